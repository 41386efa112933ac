//! Closed-form tail bounds for random tuples, evaluated in log space.

use std::f64::consts::{E, LN_2};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::random::model::{model_constants, ModelKind, RandomModelSpec};
use crate::scalar::binomial;

/// Which tail is bounded.
///
/// `Reach` takes the threshold `ε` of `P(reach_R ≤ ε)`; `LogInvReach` takes
/// `t` in `P(log₂(1/reach_R) ≥ t)`. The condition kinds bound
/// `P(cond ≥ t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    CondGlobal,
    CondLocal,
    Reach,
    LogInvReach,
}

/// Parameters of the tail formulas. Continuous bounds read `p`, `l`, `rho`;
/// discrete ones read `tau`, `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailParams {
    pub n: usize,
    pub q: usize,
    /// Maximum degree `D`.
    pub d: u32,
    #[serde(rename = "R")]
    pub r: f64,
    pub p: f64,
    pub l: f64,
    pub rho: f64,
    /// `max_i |M_i|`.
    pub m: usize,
    /// `‖x‖_h∞` of the point in the local condition bounds.
    pub x_hnorm: f64,
    pub tau: u32,
    pub u: f64,
}

impl TailParams {
    /// Parameters for a model and shape. `p` defaults to 2 (and is forced to
    /// 2 for Gaussian coefficients).
    pub fn for_model(spec: &RandomModelSpec, n: usize, degrees: &[u32], r: f64) -> Result<Self> {
        let c = model_constants(spec, n, degrees)?;
        let p = match spec.kind {
            ModelKind::Gaussian { .. } => 2.0,
            _ => spec.p.unwrap_or(2.0),
        };
        Ok(TailParams {
            n,
            q: degrees.len(),
            d: degrees.iter().copied().max().unwrap_or(1),
            r,
            p,
            l: c.l.unwrap_or(0.0),
            rho: c.rho.unwrap_or(0.0),
            m: c.max_support,
            x_hnorm: 1.0,
            tau: spec.tau().unwrap_or(0),
            u: c.u.unwrap_or(0.0),
        })
    }

    /// `binom(n + D, n)`, the size of a dense support.
    pub fn dense_support(&self) -> f64 {
        binomial::<f64>((self.n as u32) + self.d, self.n as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// Reported bound: `raw` clamped to `[0, 1]`, or 1 out of range.
    pub value: f64,
    /// The formula's value.
    #[serde(with = "crate::serde_ext")]
    pub raw: f64,
    #[serde(with = "crate::serde_ext")]
    pub ln_raw: f64,
    /// Whether the threshold lies in the range where the bound is claimed.
    pub in_range: bool,
}

impl TailBound {
    fn from_ln(ln_raw: f64, in_range: bool) -> Self {
        let raw = ln_raw.exp();
        TailBound {
            value: if in_range { raw.clamp(0.0, 1.0) } else { 1.0 },
            raw,
            ln_raw,
            in_range,
        }
    }
}

/// Tail bounds for p-zintzo tuples.
pub fn tail_bound_cont(kind: TailKind, params: &TailParams, t: f64) -> TailBound {
    let TailParams {
        n, q, d, r, p, l, rho, ..
    } = *params;
    let (nf, qf, df) = (n as f64, q as f64, f64::from(d));
    let a = (nf + qf) / p;
    let e1 = (p + 2.0) / (2.0 * p) * nf + qf / p;
    let common = (qf + 2.0 * nf) * df.ln() + (nf + qf) * (4.0 * l * rho).ln();
    let cond_range = t >= (nf + 1.0).exp();
    match kind {
        TailKind::CondGlobal => {
            let ln = 8f64.ln() + r.ln() + (e1 + 1.0) * (nf + 1.0).ln() + common + a * t.ln().ln() - t.ln();
            TailBound::from_ln(ln, cond_range)
        }
        TailKind::CondLocal => {
            let ln = 4f64.ln() + params.x_hnorm.ln() + e1 * (nf + 1.0).ln() + common + a * t.ln().ln()
                - (nf + 1.0) * t.ln();
            TailBound::from_ln(ln, cond_range)
        }
        TailKind::Reach => {
            let eps = t;
            let in_range = eps > 0.0 && eps <= (1.0 / df).min((-(nf + 1.0)).exp());
            let ln = 8f64.ln() + r.ln() + (e1 + 1.0) * (nf + 1.0).ln() + common + eps.ln() + a * (-eps.ln()).ln();
            TailBound::from_ln(ln, in_range)
        }
        TailKind::LogInvReach => {
            let m = params.m as f64;
            let ln = 8f64.ln() + r.ln() + (nf / 2.0 + 1.0) * (nf + 1.0).ln() + (qf + 2.0 * nf) * df.ln()
                + (nf + qf) * (4.0 * m).ln()
                + a * t.ln()
                - t * LN_2;
            TailBound::from_ln(ln, t >= 2.0 * (nf + 1.0))
        }
    }
}

/// [`tail_bound_cont`] minimized over `p ∈ {1, 2, 4, 8, ln s}` (with `s = t`,
/// or `1/ε` for [`TailKind::Reach`]); valid for coefficients that are
/// p-subexponential for every `p ≥ 1`, such as bounded ones.
pub fn tail_bound_cont_best_p(kind: TailKind, params: &TailParams, t: f64) -> (TailBound, f64) {
    let s = if kind == TailKind::Reach { 1.0 / t } else { t };
    let mut ps = vec![1.0, 2.0, 4.0, 8.0];
    if s.ln() >= 1.0 {
        ps.push(s.ln());
    }
    ps.into_iter()
        .map(|p| (tail_bound_cont(kind, &TailParams { p, ..*params }, t), p))
        .min_by(|a, b| a.0.ln_raw.total_cmp(&b.0.ln_raw))
        .expect("candidate list is non-empty")
}

/// Tail bounds for random bit tuples.
pub fn tail_bound_disc(kind: TailKind, params: &TailParams, t: f64) -> TailBound {
    let TailParams { n, q, d, r, tau, u, .. } = *params;
    let (nf, qf, df, m) = (n as f64, q as f64, f64::from(d), params.m as f64);
    let common = (qf + nf) * (2f64.sqrt() * m).ln() + (qf + 2.0 * nf) * df.ln() + u;
    let scale = qf * (nf + 1.0) * m;
    let lead = 20f64.ln() + r.ln() + (nf / 2.0 + 1.0) * nf.ln() + common;
    match kind {
        TailKind::CondGlobal => {
            let in_range = t >= nf && t <= scale * 2f64.powi(tau as i32 - 2);
            TailBound::from_ln(lead - t.ln(), in_range)
        }
        TailKind::CondLocal => {
            let ln = 6f64.ln() + params.x_hnorm.ln() + nf / 2.0 * nf.ln() + common - (nf + 1.0) * t.ln();
            TailBound::from_ln(ln, t > 0.0 && t <= scale * 2f64.powi(tau as i32 - 1))
        }
        TailKind::Reach => {
            let lo = 2.0 / (scale * 2f64.powi(tau as i32));
            let in_range = t >= lo && t <= (1.0 / df).min(1.0 / nf);
            TailBound::from_ln(lead + t.ln(), in_range)
        }
        TailKind::LogInvReach => {
            let lo = df.log2().max(nf.log2());
            let hi = scale.log2() + f64::from(tau) - 1.0;
            TailBound::from_ln(lead - t * LN_2, t >= lo && t <= hi)
        }
    }
}

/// Lower end of the range where [`tail_bound_cont`] is claimed, in the
/// kind's own threshold variable (`ε` ranges are upper ends, reported here).
pub fn cont_threshold(kind: TailKind, n: usize, d: u32) -> f64 {
    let nf = n as f64;
    match kind {
        TailKind::CondGlobal | TailKind::CondLocal => E.powf(nf + 1.0),
        TailKind::Reach => (1.0 / f64::from(d)).min((-(nf + 1.0)).exp()),
        TailKind::LogInvReach => 2.0 * (nf + 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, q: usize, d: u32) -> TailParams {
        TailParams {
            n,
            q,
            d,
            r: 1.0,
            p: 2.0,
            l: 3.0,
            rho: 0.5,
            m: 3,
            x_hnorm: 1.0,
            tau: 20,
            u: 0.0,
        }
    }

    #[test]
    fn headline_continuous_example() {
        let b = tail_bound_cont(TailKind::LogInvReach, &params(1, 1, 2), 4.0);
        let want = 8.0 * 2f64.powf(1.5) * 8.0 * 144.0 * 4.0 / 16.0;
        assert!((b.raw - want).abs() < 1e-9 * want);
        assert!(b.in_range && b.value == 1.0);
        assert!(!tail_bound_cont(TailKind::LogInvReach, &params(1, 1, 2), 3.9).in_range);
    }

    #[test]
    fn headline_discrete_example() {
        let b = tail_bound_disc(TailKind::LogInvReach, &params(1, 1, 2), 10.0);
        assert!((b.raw - 2.8125).abs() < 1e-12);
        assert!(b.in_range);
        assert_eq!(b.value, 1.0);
    }

    #[test]
    fn out_of_range_is_trivial() {
        let p = params(1, 1, 2);
        for kind in [TailKind::CondGlobal, TailKind::CondLocal] {
            let b = tail_bound_cont(kind, &p, 2.0);
            assert!(!b.in_range && b.value == 1.0);
        }
        let b = tail_bound_disc(TailKind::Reach, &p, 1e-12);
        assert!(!b.in_range && b.value == 1.0);
        assert!(tail_bound_disc(TailKind::Reach, &p, 1e-3).in_range);
    }
}
