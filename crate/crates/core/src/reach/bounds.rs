use serde::{Deserialize, Serialize};

use crate::condition::{cond_global, cond_local, CondGlobalOptions, GlobalCondResult};
use crate::error::{Error, Result};
use crate::norms::{pseudoinverse, PowerOptions};
use crate::poly::PolyTuple;
use crate::reach::smale::{check_zero, smale_gamma};
use crate::scalar::{hinf_norm, Scalar};

/// `1/(5γ)` at a zero; `+∞` when `γ = 0` at a regular zero.
pub fn reach_lb_gamma<T: Scalar>(f: &PolyTuple<T>, zeta: &[T]) -> Result<T> {
    check_zero(f, zeta)?;
    pseudoinverse(&f.jacobian(zeta)?)?;
    let g = smale_gamma(f, zeta, &PowerOptions::default())?;
    Ok(gamma_bound(g.upper))
}

pub(crate) fn gamma_bound<T: Scalar>(gamma: T) -> T {
    if gamma > T::zero() {
        T::one() / (T::lit(5.0) * gamma)
    } else {
        T::infinity()
    }
}

/// Which bounds on the Kantorovich measure `K(f, ζ, r)` may be used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KantorovichRoutes {
    GammaOnly,
    CondOnly,
    #[default]
    Both,
}

impl KantorovichRoutes {
    fn gamma(self) -> bool {
        matches!(self, Self::GammaOnly | Self::Both)
    }
    fn cond(self) -> bool {
        matches!(self, Self::CondOnly | Self::Both)
    }
}

/// The point data both routes need: `γ` upper bound, `cond(f, ζ)`,
/// `‖ζ‖_h∞` and `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KantorovichData<T> {
    pub gamma: T,
    pub cond: T,
    pub h: T,
    pub degree: u32,
}

impl<T: Scalar> KantorovichData<T> {
    pub fn at(f: &PolyTuple<T>, zeta: &[T]) -> Result<Self> {
        Ok(KantorovichData {
            gamma: smale_gamma(f, zeta, &PowerOptions::default())?.upper,
            cond: cond_local(f, zeta)?.cond,
            h: hinf_norm(zeta),
            degree: f.max_degree(),
        })
    }

    /// `2γ/(1 − γr)³`, valid while `γr < 1`.
    fn gamma_route(&self, r: T) -> Option<T> {
        let t = self.gamma * r;
        (t < T::one()).then(|| T::lit(2.0) * self.gamma / (T::one() - t).powi(3))
    }

    /// `(cond/h)·(1 + r/h)^{D−2}`, used while `r/h < 1/(D−2)` (always for
    /// `D ≤ 2`). The growth factor bounds `‖z‖_h∞/‖ζ‖_h∞` on the ball.
    fn cond_route(&self, r: T) -> Option<T> {
        if !self.cond.is_finite() {
            return None;
        }
        let excess = self.degree.saturating_sub(2);
        if excess > 0 && !(r / self.h < T::one() / T::lit(f64::from(excess))) {
            return None;
        }
        Some(self.cond / self.h * (T::one() + r / self.h).powi(excess as i32))
    }

    pub fn k_upper(&self, r: T, routes: KantorovichRoutes) -> Option<T> {
        let g = if routes.gamma() { self.gamma_route(r) } else { None };
        let c = if routes.cond() { self.cond_route(r) } else { None };
        match (g, c) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Radius past which no selected route can certify `K·r < 1`.
    fn search_limit(&self, routes: KantorovichRoutes) -> T {
        let mut limit = T::zero();
        if routes.gamma() {
            limit = limit.max(if self.gamma > T::zero() {
                T::one() / self.gamma
            } else {
                T::infinity()
            });
        }
        if routes.cond() && self.cond.is_finite() {
            let mut c = self.h / self.cond;
            let excess = self.degree.saturating_sub(2);
            if excess > 0 {
                c = c.min(self.h / T::lit(f64::from(excess)));
            }
            limit = limit.max(c);
        }
        limit
    }
}

/// Certified upper bound on `K(f, ζ, r)`, the minimum over applicable routes.
pub fn kantorovich_k_upper<T: Scalar>(
    f: &PolyTuple<T>,
    zeta: &[T],
    r: T,
    routes: KantorovichRoutes,
) -> Result<T> {
    KantorovichData::at(f, zeta)?
        .k_upper(r, routes)
        .ok_or(Error::NoRouteApplicable { radius: r.as_f64() })
}

/// Largest `r ≤ r_max` (40 bisection steps) with `K(f,ζ,r)·r < 1`.
pub fn reach_lb_kantorovich<T: Scalar>(
    f: &PolyTuple<T>,
    zeta: &[T],
    r_max: T,
    routes: KantorovichRoutes,
) -> Result<T> {
    check_zero(f, zeta)?;
    pseudoinverse(&f.jacobian(zeta)?)?;
    let data = KantorovichData::at(f, zeta)?;
    Ok(kantorovich_radius(&data, r_max, routes))
}

pub(crate) fn kantorovich_radius<T: Scalar>(data: &KantorovichData<T>, r_max: T, routes: KantorovichRoutes) -> T {
    let ok = |r: T| data.k_upper(r, routes).is_some_and(|k| k * r < T::one());
    let hi = r_max.min(data.search_limit(routes));
    if hi.is_infinite() {
        // only reachable when K vanishes identically
        return if ok(T::one()) { r_max } else { T::zero() };
    }
    if ok(hi) {
        return hi;
    }
    let mut lo = T::zero();
    let mut hi = hi;
    for _ in 0..40 {
        let mid = (lo + hi) / T::lit(2.0);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `‖ζ‖_h∞ / max{D − 2, cond(f, ζ)}`.
pub fn reach_lb_cond_local<T: Scalar>(f: &PolyTuple<T>, zeta: &[T]) -> Result<T> {
    check_zero(f, zeta)?;
    let c = cond_local(f, zeta)?.cond;
    Ok(cond_bound(hinf_norm(zeta), f.max_degree(), c))
}

pub(crate) fn cond_bound<T: Scalar>(h: T, degree: u32, cond: T) -> T {
    let d2 = T::lit(f64::from(degree) - 2.0);
    let denom = d2.max(cond);
    if denom.is_infinite() {
        T::zero()
    } else {
        h / denom
    }
}

/// Global bound on `reach_R` together with the `cond_R` bracket behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GlobalReachBound<T: Scalar> {
    #[serde(with = "crate::serde_ext")]
    pub bound: T,
    pub cond: Option<GlobalCondResult<T>>,
    pub diagnostic: Option<String>,
}

/// `1 / max{D − 2, cond_R upper}`; an exhausted cell budget gives 0 with a
/// diagnostic.
pub fn reach_lb_cond_global<T: Scalar>(
    f: &PolyTuple<T>,
    r: T,
    opts: &CondGlobalOptions,
) -> Result<GlobalReachBound<T>> {
    match cond_global(f, r, opts) {
        Ok(g) => Ok(GlobalReachBound {
            bound: cond_bound(T::one(), f.max_degree(), g.upper),
            cond: Some(g),
            diagnostic: None,
        }),
        Err(e @ Error::BudgetExceeded { .. }) => Ok(GlobalReachBound {
            bound: T::zero(),
            cond: None,
            diagnostic: Some(e.to_string()),
        }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly_text;
    use approx::assert_relative_eq;

    fn circle() -> PolyTuple<f64> {
        parse_poly_text("x0^2 + x1^2 - 1", 2, &[2]).unwrap()
    }

    #[test]
    fn gamma_route_examples() {
        assert_relative_eq!(reach_lb_gamma(&circle(), &[1.0, 0.0]).unwrap(), 0.4, epsilon = 1e-15);
        let parabola: PolyTuple<f64> = parse_poly_text("x1 - x0^2", 2, &[2]).unwrap();
        assert_relative_eq!(reach_lb_gamma(&parabola, &[0.0, 0.0]).unwrap(), 0.2, epsilon = 1e-15);
        let lin: PolyTuple<f64> = parse_poly_text("x0 + x1", 2, &[1]).unwrap();
        assert!(reach_lb_gamma(&lin, &[1.0, -1.0]).unwrap().is_infinite());
        assert!(matches!(
            reach_lb_gamma(&circle(), &[0.5, 0.0]),
            Err(Error::NotAZero { .. })
        ));
    }

    #[test]
    fn k_upper_examples() {
        let k = kantorovich_k_upper(&circle(), &[1.0, 0.0], 0.5, KantorovichRoutes::GammaOnly).unwrap();
        assert_relative_eq!(k, 64.0 / 27.0, epsilon = 1e-14);
        let lin: PolyTuple<f64> = parse_poly_text("x0 - x1", 2, &[1]).unwrap();
        assert_eq!(kantorovich_k_upper(&lin, &[0.0, 0.0], 7.0, KantorovichRoutes::Both).unwrap(), 0.0);
        assert!(matches!(
            kantorovich_k_upper(&circle(), &[1.0, 0.0], 3.0, KantorovichRoutes::GammaOnly),
            Err(Error::NoRouteApplicable { .. })
        ));
    }

    #[test]
    fn kantorovich_radius_examples() {
        let r = reach_lb_kantorovich(&circle(), &[1.0, 0.0], f64::INFINITY, KantorovichRoutes::Both).unwrap();
        assert!((r * 0.5 - 0.22908).abs() < 1e-3 * 0.22908, "{r}");
        let lin: PolyTuple<f64> = parse_poly_text("x0 - x1", 2, &[1]).unwrap();
        assert_eq!(
            reach_lb_kantorovich(&lin, &[0.0, 0.0], 12.5, KantorovichRoutes::Both).unwrap(),
            12.5
        );
        let sq: PolyTuple<f64> = parse_poly_text("x0^2", 1, &[2]).unwrap();
        assert!(matches!(
            reach_lb_kantorovich(&sq, &[0.0], 1.0, KantorovichRoutes::Both),
            Err(Error::NonSurjective { .. })
        ));
    }

    #[test]
    fn cond_routes() {
        assert_relative_eq!(reach_lb_cond_local(&circle(), &[1.0, 0.0]).unwrap(), 1.0 / 6.0, epsilon = 1e-14);
        let lin: PolyTuple<f64> = parse_poly_text("x0", 1, &[1]).unwrap();
        assert_relative_eq!(reach_lb_cond_local(&lin, &[0.0]).unwrap(), 1.0);
        let sq: PolyTuple<f64> = parse_poly_text("x0^2", 1, &[2]).unwrap();
        assert_eq!(reach_lb_cond_local(&sq, &[0.0]).unwrap(), 0.0);
        let g = reach_lb_cond_global(&circle(), 2.0, &CondGlobalOptions::default()).unwrap();
        assert!(g.bound > 0.0 && g.bound <= 1.0 / 6.0 + 1e-12);
    }
}
