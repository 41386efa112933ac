use serde::{Deserialize, Serialize};

use crate::condition::{cond_local, CondGlobalOptions, GlobalCondResult};
use crate::error::{Error, Result};
use crate::norms::{pseudoinverse, PowerOptions};
use crate::poly::PolyTuple;
use crate::reach::bounds::{
    cond_bound, gamma_bound, kantorovich_radius, reach_lb_cond_global, KantorovichData, KantorovichRoutes,
};
use crate::reach::smale::{newton_refine, smale_beta, smale_gamma, zero_tol, GammaBounds};
use crate::scalar::{hinf_norm, inf_norm, Scalar};

/// Settings for [`reach_bound_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReachOptions {
    pub routes: KantorovichRoutes,
    /// Upper end of the Kantorovich radius search.
    pub r_max: f64,
    pub newton_max_iter: usize,
    pub cond_global: CondGlobalOptions,
    pub power: PowerOptions,
}

impl Default for ReachOptions {
    fn default() -> Self {
        ReachOptions {
            routes: KantorovichRoutes::Both,
            r_max: f64::INFINITY,
            newton_max_iter: 50,
            cond_global: CondGlobalOptions::default(),
            power: PowerOptions::default(),
        }
    }
}

/// All applicable reach lower bounds, at a point and/or over a cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ReachBoundReport<T: Scalar> {
    /// The point as given.
    #[serde(with = "crate::serde_ext::option_vec")]
    pub input_point: Option<Vec<T>>,
    /// The point the local bounds refer to, after Newton refinement.
    #[serde(with = "crate::serde_ext::option_vec")]
    pub point: Option<Vec<T>>,
    #[serde(with = "crate::serde_ext::option")]
    pub residual: Option<T>,
    pub newton_iterations: Option<usize>,
    pub gamma: Option<GammaBounds<T>>,
    #[serde(with = "crate::serde_ext::option")]
    pub gamma_value: Option<T>,
    #[serde(with = "crate::serde_ext::option")]
    pub beta_value: Option<T>,
    #[serde(with = "crate::serde_ext::option")]
    pub alpha_value: Option<T>,
    #[serde(with = "crate::serde_ext::option")]
    pub cond_local: Option<T>,
    #[serde(with = "crate::serde_ext::option")]
    pub bound_gamma: Option<T>,
    #[serde(with = "crate::serde_ext::option")]
    pub bound_kantorovich: Option<T>,
    #[serde(with = "crate::serde_ext::option")]
    pub bound_cond_local: Option<T>,
    #[serde(with = "crate::serde_ext::option")]
    pub bound_cond_global: Option<T>,
    pub cond_global: Option<GlobalCondResult<T>>,
    #[serde(with = "crate::serde_ext")]
    pub best: T,
    pub best_route: Option<String>,
    pub diagnostics: Vec<String>,
}

impl<T: Scalar> ReachBoundReport<T> {
    fn empty() -> Self {
        ReachBoundReport {
            input_point: None,
            point: None,
            residual: None,
            newton_iterations: None,
            gamma: None,
            gamma_value: None,
            beta_value: None,
            alpha_value: None,
            cond_local: None,
            bound_gamma: None,
            bound_kantorovich: None,
            bound_cond_local: None,
            bound_cond_global: None,
            cond_global: None,
            best: T::zero(),
            best_route: None,
            diagnostics: Vec::new(),
        }
    }

    /// `(route, value)` pairs for every populated bound.
    pub fn routes(&self) -> Vec<(&'static str, T)> {
        [
            ("gamma", self.bound_gamma),
            ("kantorovich", self.bound_kantorovich),
            ("cond_local", self.bound_cond_local),
            ("cond_global", self.bound_cond_global),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }

    fn settle_best(&mut self) {
        let mut best = T::zero();
        let mut route = None;
        for (k, v) in self.routes() {
            if v > best || route.is_none() {
                best = best.max(v);
                route = Some(k.to_string());
            }
        }
        self.best = best;
        self.best_route = route;
    }
}

/// Builds a report. With `point` the local routes are evaluated at the
/// Newton-refined point; with `radius` the global condition route over
/// `[−R,R]ⁿ` is added.
pub fn reach_bound_report<T: Scalar>(
    f: &PolyTuple<T>,
    point: Option<&[T]>,
    radius: Option<T>,
    opts: &ReachOptions,
) -> Result<ReachBoundReport<T>> {
    let mut rep = ReachBoundReport::empty();
    if let Some(x0) = point {
        f.evaluate(x0)?;
        rep.input_point = Some(x0.to_vec());
        let res0 = inf_norm(&f.evaluate(x0)?);
        let zeta = if res0 <= zero_tol(f, x0) {
            rep.newton_iterations = Some(0);
            rep.residual = Some(res0);
            x0.to_vec()
        } else {
            let out = newton_refine(f, x0, opts.newton_max_iter)?;
            rep.newton_iterations = Some(out.iterations);
            rep.residual = Some(out.residual);
            if !out.converged {
                return Err(Error::NotAZero {
                    residual: out.residual.as_f64(),
                    tol: zero_tol(f, &out.point).as_f64(),
                });
            }
            out.point
        };
        pseudoinverse(&f.jacobian(&zeta)?)?;
        let gamma = smale_gamma(f, &zeta, &opts.power)?;
        let beta = smale_beta(f, &zeta)?;
        let cond = cond_local(f, &zeta)?.cond;
        let data = KantorovichData {
            gamma: gamma.upper,
            cond,
            h: hinf_norm(&zeta),
            degree: f.max_degree(),
        };
        rep.gamma_value = Some(gamma.upper);
        rep.beta_value = Some(beta);
        rep.alpha_value = Some(beta * gamma.upper);
        rep.gamma = Some(gamma);
        rep.cond_local = Some(cond);
        rep.bound_gamma = Some(gamma_bound(gamma.upper));
        rep.bound_kantorovich = Some(kantorovich_radius(&data, T::lit(opts.r_max), opts.routes));
        rep.bound_cond_local = Some(cond_bound(data.h, data.degree, cond));
        rep.point = Some(zeta);
    }
    if let Some(r) = radius {
        let g = reach_lb_cond_global(f, r, &opts.cond_global)?;
        rep.bound_cond_global = Some(g.bound);
        rep.cond_global = g.cond;
        rep.diagnostics.extend(g.diagnostic);
    }
    rep.settle_best();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly_text;
    use approx::assert_relative_eq;

    #[test]
    fn circle_report() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2 + x1^2 - 1", 2, &[2]).unwrap();
        let rep = reach_bound_report(&f, Some(&[1.0, 0.0]), Some(2.0), &ReachOptions::default()).unwrap();
        assert_relative_eq!(rep.bound_gamma.unwrap(), 0.4, epsilon = 1e-12);
        assert_relative_eq!(rep.bound_cond_local.unwrap(), 1.0 / 6.0, epsilon = 1e-12);
        assert!(rep.bound_cond_global.unwrap() > 0.0);
        assert_eq!(rep.best_route.as_deref(), Some("kantorovich"));
        assert!(rep.best <= 1.0);
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"bound_gamma\""));
    }

    #[test]
    fn refines_nearby_points() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2 + x1^2 - 1", 2, &[2]).unwrap();
        let rep = reach_bound_report(&f, Some(&[1.01, 0.02]), None, &ReachOptions::default()).unwrap();
        assert!(rep.newton_iterations.unwrap() > 0);
        assert!(rep.residual.unwrap() <= 1e-9);
    }

    #[test]
    fn singular_point_errors() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2", 1, &[2]).unwrap();
        assert!(matches!(
            reach_bound_report(&f, Some(&[0.0]), None, &ReachOptions::default()),
            Err(Error::NonSurjective { .. })
        ));
    }
}
