use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition::{cond_global_decide, cond_local, CondGlobalOptions};
use crate::error::{Error, Result};
use crate::federer::{estimate_reach, sample_variety_with, SampleOptions};
use crate::random::model::{sample_tuple_with, ModelKind, RandomModelSpec, SupportSpec};
use crate::random::tail::{tail_bound_cont, tail_bound_cont_best_p, tail_bound_disc, TailBound, TailKind, TailParams};
use crate::scalar::hinf_norm;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Trials below this count make the soundness check underpowered.
pub const POWERED_TRIALS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistic {
    #[serde(rename = "cond_R")]
    CondR,
    #[serde(rename = "cond_local")]
    CondLocal,
    #[serde(rename = "log_inv_reach_R")]
    LogInvReachR,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub n: usize,
    pub degrees: Vec<u32>,
    #[serde(rename = "R")]
    pub r: f64,
    /// Point for the local condition statistic; the origin by default.
    #[serde(default)]
    pub point: Option<Vec<f64>>,
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.degrees.is_empty() || self.degrees.len() > self.n {
            return Err(Error::InvalidInput("geometry needs n >= 1 and 1 <= q <= n degrees".into()));
        }
        if self.degrees.contains(&0) {
            return Err(Error::InvalidInput("geometry.degrees must be positive".into()));
        }
        if !(self.r >= 1.0 && self.r.is_finite()) {
            return Err(Error::InvalidInput("geometry.R must be finite and at least 1".into()));
        }
        if let Some(p) = &self.point {
            if p.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: p.len(),
                });
            }
        }
        Ok(())
    }

    fn point_or_origin(&self) -> Vec<f64> {
        self.point.clone().unwrap_or_else(|| vec![0.0; self.n])
    }
}

/// Per-trial computation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McOptions {
    pub cond: CondGlobalOptions,
    /// Points per variety sample for the upper side of the reach bracket.
    pub sample_points: usize,
    pub sample_probes: usize,
    pub min_sep: f64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            cond: CondGlobalOptions {
                target_rel_err: 0.25,
                max_cells: 20_000,
                ..CondGlobalOptions::default()
            },
            sample_points: 40,
            sample_probes: 200,
            min_sep: 1e-3,
        }
    }
}

/// A complete experiment description, as read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: RandomModelSpec,
    pub geometry: Geometry,
    pub statistic: Statistic,
    pub t_grid: Vec<f64>,
    pub trials: usize,
    pub seed: Option<u64>,
    #[serde(default)]
    pub options: McOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub t: f64,
    /// Trials whose bracket certifies the exceedance.
    pub exceed: usize,
    /// Trials whose bracket straddles `t`.
    pub undecided: usize,
    /// `exceed / valid trials`.
    pub empirical: f64,
    /// `(exceed + undecided) / valid trials`.
    pub conservative: f64,
    /// Wilson 95% interval of the conservative proportion.
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub theoretical: TailBound,
    /// `None` when `t` is outside the bound's stated range.
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    pub statistic: Statistic,
    /// Formula the theoretical column comes from.
    pub formula: String,
    pub params: TailParams,
    pub trials: usize,
    /// Trials whose statistic could not be computed.
    pub excluded: usize,
    pub points: Vec<TailPoint>,
    /// Least-squares slope of `log₂(empirical)` against `t` over in-range
    /// points with positive counts.
    pub decay_slope: Option<f64>,
    pub underpowered: bool,
}

impl TailCurve {
    pub fn t_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    /// `true` unless some in-range point fails; underpowered runs pass.
    pub fn sound(&self) -> bool {
        self.underpowered || self.points.iter().all(|p| p.pass != Some(false))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidInput(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "t",
            "empirical",
            "wilson_lo",
            "wilson_hi",
            "theoretical",
            "undecided",
            "exceed",
            "conservative",
            "theoretical_raw",
            "in_range",
        ])
        .map_err(io)?;
        for p in &self.points {
            w.write_record([
                p.t.to_string(),
                p.empirical.to_string(),
                p.wilson_lo.to_string(),
                p.wilson_hi.to_string(),
                p.theoretical.value.to_string(),
                p.undecided.to_string(),
                p.exceed.to_string(),
                p.conservative.to_string(),
                format!("{:e}", p.theoretical.raw),
                p.theoretical.in_range.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k >= n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Theoretical tail at `t` for the experiment's statistic and model.
pub fn theoretical_tail(
    spec: &RandomModelSpec,
    statistic: Statistic,
    params: &TailParams,
    t: f64,
) -> (TailBound, &'static str) {
    let any_p = matches!(spec.kind, ModelKind::UniformContinuous);
    let cont = |kind: TailKind, x: f64| {
        if any_p {
            tail_bound_cont_best_p(kind, params, x).0
        } else {
            tail_bound_cont(kind, params, x)
        }
    };
    match (spec.is_discrete(), statistic) {
        (false, Statistic::CondR) => (cont(TailKind::CondGlobal, t), "cond_global_cont"),
        (false, Statistic::CondLocal) => (cont(TailKind::CondLocal, t), "cond_local_cont"),
        (false, Statistic::LogInvReachR) => {
            let dense = spec.support == SupportSpec::Dense;
            if any_p && dense {
                (cont(TailKind::LogInvReach, t), "log_inv_reach_uniform")
            } else {
                (cont(TailKind::Reach, (-t).exp2()), "reach_cont")
            }
        }
        (true, Statistic::CondR) => (tail_bound_disc(TailKind::CondGlobal, params, t), "cond_global_disc"),
        (true, Statistic::CondLocal) => (tail_bound_disc(TailKind::CondLocal, params, t), "cond_local_disc"),
        (true, Statistic::LogInvReachR) => (tail_bound_disc(TailKind::LogInvReach, params, t), "reach_disc"),
    }
}

/// Certified bracket `[lo, hi]` on one trial's statistic.
fn trial_bracket(
    spec: &RandomModelSpec,
    geometry: &Geometry,
    statistic: Statistic,
    grid: &[f64],
    opts: &McOptions,
    seed: u64,
    index: u64,
) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let f = sample_tuple_with(spec, geometry.n, &geometry.degrees, &mut rng)?;
    let sample_seed = rng.next_u64();
    // refinement only has to place cond_R relative to the grid
    let thresholds: Vec<f64> = match statistic {
        Statistic::LogInvReachR => grid.iter().map(|t| t.exp2()).collect(),
        _ => grid.to_vec(),
    };
    let t_min = grid[0];
    let cond_opts = CondGlobalOptions {
        cap: opts.cond.cap.min(thresholds[thresholds.len() - 1] * (1.0 + 1e-9)),
        ..opts.cond
    };
    let cond_bracket = || match cond_global_decide(&f, geometry.r, &cond_opts, &thresholds) {
        Ok(g) => Ok((g.lower, g.upper)),
        Err(Error::BudgetExceeded { lower, upper, .. }) => Ok((lower, upper)),
        Err(e) => Err(e),
    };
    match statistic {
        Statistic::CondLocal => {
            let c = cond_local(&f, &geometry.point_or_origin())?.cond;
            Ok((c, c))
        }
        Statistic::CondR => cond_bracket(),
        Statistic::LogInvReachR => {
            let d2 = f64::from(f.max_degree()) - 2.0;
            let (_, upper) = cond_bracket()?;
            // reach_R ≥ 1/max{D − 2, cond_R}
            let hi = d2.max(upper).log2();
            if hi < t_min {
                return Ok((f64::NEG_INFINITY, hi));
            }
            let sopts = SampleOptions {
                max_probes: Some(opts.sample_probes),
                ..SampleOptions::default()
            };
            let lo = match sample_variety_with(&f, geometry.r, opts.sample_points, sample_seed, &sopts) {
                Ok(s) => match estimate_reach(&s, opts.min_sep) {
                    Ok(e) => -e.estimate.log2(),
                    Err(Error::NoAdmissiblePairs) => f64::NEG_INFINITY,
                    Err(e) => return Err(e),
                },
                Err(Error::EmptySample { .. }) => f64::NEG_INFINITY,
                Err(e) => return Err(e),
            };
            Ok((lo.min(hi), hi))
        }
    }
}

/// Runs `trials` independent trials and compares the empirical tail of
/// `statistic` with the theoretical bound on `t_grid`.
///
/// Trial `i` draws from a generator keyed by `(seed, i)`, so counts do not
/// depend on `workers`. A trial counts towards the exceedance at `t` only
/// when its certified bracket lies at or above `t`; brackets straddling `t`
/// are reported as undecided and included in the conservative count that
/// the soundness check uses.
pub fn mc_tail_experiment(
    spec: &RandomModelSpec,
    geometry: &Geometry,
    statistic: Statistic,
    t_grid: &[f64],
    trials: usize,
    seed: u64,
    workers: Option<usize>,
    opts: &McOptions,
) -> Result<TailCurve> {
    spec.validate()?;
    geometry.validate()?;
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("t_grid must be a non-empty list of finite values".into()));
    }
    let mut grid = t_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    
    let run = || -> Vec<Option<(f64, f64)>> {
        (0..trials as u64)
            .into_par_iter()
            .map(|i| trial_bracket(spec, geometry, statistic, &grid, opts, seed, i).ok())
            .collect()
    };
    let brackets = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?
            .install(run),
        None => run(),
    };

    let excluded = brackets.iter().filter(|b| b.is_none()).count();
    let valid = trials - excluded;
    let mut params = TailParams::for_model(spec, geometry.n, &geometry.degrees, geometry.r)?;
    params.x_hnorm = hinf_norm(&geometry.point_or_origin());
    let mut formula = "";
    let points: Vec<TailPoint> = grid
        .iter()
        .map(|&t| {
            let (exceed, undecided) = brackets.iter().flatten().fold((0, 0), |(e, u), &(lo, hi)| {
                if lo >= t {
                    (e + 1, u)
                } else if hi >= t {
                    (e, u + 1)
                } else {
                    (e, u)
                }
            });
            let (bound, name) = theoretical_tail(spec, statistic, &params, t);
            formula = name;
            let (wilson_lo, wilson_hi) = wilson_interval(exceed + undecided, valid, Z95);
            let frac = |k: usize| if valid == 0 { 0.0 } else { k as f64 / valid as f64 };
            TailPoint {
                t,
                exceed,
                undecided,
                empirical: frac(exceed),
                conservative: frac(exceed + undecided),
                wilson_lo,
                wilson_hi,
                theoretical: bound,
                pass: bound.in_range.then_some(wilson_lo <= bound.value),
            }
        })
        .collect();

    let fit: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.theoretical.in_range && p.exceed > 0)
        .map(|p| (p.t, p.empirical.log2()))
        .collect();
    Ok(TailCurve {
        statistic,
        formula: formula.to_string(),
        params,
        trials,
        excluded,
        decay_slope: slope(&fit),
        underpowered: trials < POWERED_TRIALS,
        points,
    })
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// [`mc_tail_experiment`] driven by a config; a missing seed is an error.
pub fn run_experiment(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<TailCurve> {
    let seed = cfg
        .seed
        .ok_or_else(|| Error::InvalidInput("experiment config needs a seed".into()))?;
    mc_tail_experiment(
        &cfg.model,
        &cfg.geometry,
        cfg.statistic,
        &cfg.t_grid,
        cfg.trials,
        seed,
        workers,
        &cfg.options,
    )
}
