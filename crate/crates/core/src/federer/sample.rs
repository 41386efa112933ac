use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::federer::univariate::{real_roots, restrict_to_line};
use crate::norms::{pseudoinverse, Mat};
use crate::poly::PolyTuple;
use crate::reach::{newton_refine, zero_tol};
use crate::scalar::{inf_norm, two_norm};

/// Points of `Z(f) ∩ [−R,R]ⁿ` with the derivative data the estimator needs.
#[derive(Debug, Clone, PartialEq)]
pub struct VarietySample {
    pub points: Vec<Vec<f64>>,
    pub jacobians: Vec<Mat<f64>>,
    pub pinvs: Vec<Mat<f64>>,
    pub residuals: Vec<f64>,
    pub stats: SampleStats,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleStats {
    pub probes: usize,
    pub starts: usize,
    pub duplicates: usize,
    pub rejected_outside: usize,
    pub rejected_singular: usize,
    pub rejected_residual: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleOptions {
    /// Probe budget; `None` means `1000 + 50·N`.
    pub max_probes: Option<usize>,
    /// Newton starts per slice axis when `q ≥ 2`.
    pub starts_per_axis: usize,
    pub newton_max_iter: usize,
    /// Points closer than this are merged.
    pub dedup_dist: f64,
    /// Probes evaluated per parallel round.
    pub batch: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            max_probes: None,
            starts_per_axis: 4,
            newton_max_iter: 50,
            dedup_dist: 1e-8,
            batch: 256,
        }
    }
}

impl VarietySample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with header `x0,…,x{n−1},residual`, one row per point.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidInput(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        let n = self.points.first().map_or(0, Vec::len);
        let mut header: Vec<String> = (0..n).map(|k| format!("x{k}")).collect();
        header.push("residual".into());
        w.write_record(&header).map_err(io)?;
        for (p, r) in self.points.iter().zip(&self.residuals) {
            let row: Vec<String> = p.iter().chain(std::iter::once(r)).map(|v| format!("{v:e}")).collect();
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

enum Outcome {
    Point(Vec<f64>, Mat<f64>, Mat<f64>, f64),
    Outside,
    Singular,
    Residual,
}

struct ProbeResult {
    starts: usize,
    outcomes: Vec<Outcome>,
}

/// Samples `Z(f) ∩ [−R,R]ⁿ` by intersecting it with random affine slices
/// `a + B·t` of dimension `q`. Hypersurfaces use exact root isolation along
/// lines; otherwise Newton runs on the slice from a grid of starts.
///
/// Probe `i` draws from a generator seeded by `(seed, i)` and probes are
/// merged in index order, so the sample does not depend on the thread count.
pub fn sample_variety(f: &PolyTuple<f64>, r: f64, n_target: usize, seed: u64) -> Result<VarietySample> {
    sample_variety_with(f, r, n_target, seed, &SampleOptions::default())
}

pub fn sample_variety_with(
    f: &PolyTuple<f64>,
    r: f64,
    n_target: usize,
    seed: u64,
    opts: &SampleOptions,
) -> Result<VarietySample> {
    if f.q() > f.n() {
        return Err(Error::PreconditionViolated("more equations than variables".into()));
    }
    if !(r > 0.0 && r.is_finite()) || n_target == 0 {
        return Err(Error::InvalidInput("radius must be positive and finite, N at least 1".into()));
    }
    let budget = opts.max_probes.unwrap_or(1000 + 50 * n_target);
    let batch = opts.batch.max(1);
    let mut sample = VarietySample {
        points: Vec::new(),
        jacobians: Vec::new(),
        pinvs: Vec::new(),
        residuals: Vec::new(),
        stats: SampleStats::default(),
    };
    let mut next = 0;
    while next < budget && sample.len() < n_target {
        let end = (next + batch).min(budget);
        let results: Vec<ProbeResult> = (next..end)
            .into_par_iter()
            .map(|i| probe(f, r, seed, i as u64, opts))
            .collect::<Result<_>>()?;
        for res in results {
            sample.stats.probes += 1;
            sample.stats.starts += res.starts;
            for o in res.outcomes {
                match o {
                    Outcome::Outside => sample.stats.rejected_outside += 1,
                    Outcome::Singular => sample.stats.rejected_singular += 1,
                    Outcome::Residual => sample.stats.rejected_residual += 1,
                    Outcome::Point(x, jac, pinv, res) => {
                        if sample.len() >= n_target {
                            continue;
                        }
                        let dup = sample.points.iter().any(|p| dist(p, &x) < opts.dedup_dist);
                        if dup {
                            sample.stats.duplicates += 1;
                            continue;
                        }
                        sample.points.push(x);
                        sample.jacobians.push(jac);
                        sample.pinvs.push(pinv);
                        sample.residuals.push(res);
                    }
                }
            }
            if sample.len() >= n_target {
                break;
            }
        }
        next = end;
    }
    if sample.is_empty() {
        return Err(Error::EmptySample {
            probes: sample.stats.probes,
        });
    }
    Ok(sample)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    two_norm(&d)
}

fn probe(f: &PolyTuple<f64>, r: f64, seed: u64, index: u64, opts: &SampleOptions) -> Result<ProbeResult> {
    let (n, q) = (f.n(), f.q());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(-r..=r)).collect();
    let basis = orthonormal_columns(&mut rng, n, q);
    let at = |t: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|k| a[k] + (0..q).map(|j| basis[j][k] * t[j]).sum::<f64>())
            .collect()
    };

    let mut seeds = Vec::new();
    let starts;
    if q == 1 {
        starts = 1;
        let (lo, hi) = line_window(&a, &basis[0], r);
        let poly = restrict_to_line(f, &a, &basis[0]);
        seeds.extend(real_roots(&poly, lo, hi).into_iter().map(|t| at(&[t])));
    } else {
        let k = opts.starts_per_axis.max(1);
        let grid: Vec<f64> = (0..k)
            .map(|i| if k == 1 { 0.0 } else { -r + 2.0 * r * i as f64 / (k - 1) as f64 })
            .collect();
        starts = k.pow(q as u32);
        for s in 0..starts {
            let mut t: Vec<f64> = (0..q).map(|j| grid[(s / k.pow(j as u32)) % k]).collect();
            if let Some(x) = slice_newton(f, &at, &basis, &mut t, opts.newton_max_iter)? {
                seeds.push(x);
            }
        }
    }

    let mut outcomes = Vec::with_capacity(seeds.len());
    for x0 in seeds {
        let res0 = inf_norm(&f.evaluate(&x0)?);
        let (x, residual, converged) = if res0 <= zero_tol(f, &x0) {
            (x0, res0, true)
        } else {
            let out = newton_refine(f, &x0, opts.newton_max_iter)?;
            (out.point, out.residual, out.converged)
        };
        if !converged {
            outcomes.push(Outcome::Residual);
        } else if !(inf_norm(&x) <= r) {
            outcomes.push(Outcome::Outside);
        } else {
            let jac = f.jacobian(&x)?;
            match pseudoinverse(&jac) {
                Ok(p) => outcomes.push(Outcome::Point(x, jac, p, residual)),
                Err(Error::NonSurjective { .. }) => outcomes.push(Outcome::Singular),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(ProbeResult { starts, outcomes })
}

/// Parameter interval on which `a + t·b` stays in `[−R,R]ⁿ`.
fn line_window(a: &[f64], b: &[f64], r: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (&ak, &bk) in a.iter().zip(b) {
        if bk != 0.0 {
            let (u, v) = ((-r - ak) / bk, (r - ak) / bk);
            lo = lo.max(u.min(v));
            hi = hi.min(u.max(v));
        }
    }
    (lo, hi)
}

/// `q` orthonormal vectors in `ℝⁿ` from Gaussian columns by Gram–Schmidt.
fn orthonormal_columns(rng: &mut ChaCha8Rng, n: usize, q: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(q);
    while out.len() < q {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for u in &out {
            let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = two_norm(&v);
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            out.push(v);
        }
    }
    out
}

/// Damped Newton on the square system `t ↦ f(a + B·t)`.
fn slice_newton(
    f: &PolyTuple<f64>,
    at: &dyn Fn(&[f64]) -> Vec<f64>,
    basis: &[Vec<f64>],
    t: &mut Vec<f64>,
    max_iter: usize,
) -> Result<Option<Vec<f64>>> {
    let q = basis.len();
    let mut x = at(t);
    let mut fx = f.evaluate(&x)?;
    let mut res = inf_norm(&fx);
    for _ in 0..max_iter {
        // polish well past the acceptance tolerance; the quotients are second order
        if res <= 1e-6 * zero_tol(f, &x) {
            break;
        }
        let jac = f.jacobian(&x)?;
        let mut js = Mat::zeros(q, q);
        for i in 0..q {
            for j in 0..q {
                js[(i, j)] = (0..f.n()).map(|k| jac[(i, k)] * basis[j][k]).sum();
            }
        }
        let Ok(p) = pseudoinverse(&js) else {
            return Ok(None);
        };
        let step = p.mul_vec(&fx);
        let mut lambda = 1.0;
        let mut moved = false;
        for _ in 0..12 {
            let cand: Vec<f64> = t.iter().zip(&step).map(|(a, s)| a - lambda * s).collect();
            let xc = at(&cand);
            let fc = f.evaluate(&xc)?;
            let rc = inf_norm(&fc);
            if rc < res {
                *t = cand;
                x = xc;
                fx = fc;
                res = rc;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !res.is_finite() {
            return Ok(None);
        }
        if !moved {
            break;
        }
    }
    Ok((res <= zero_tol(f, &x)).then_some(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly_text;

    #[test]
    fn circle_sample_is_on_circle() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2 + x1^2 - 1", 2, &[2]).unwrap();
        let s = sample_variety(&f, 2.0, 200, 7).unwrap();
        assert_eq!(s.len(), 200);
        for p in &s.points {
            assert!((p[0] * p[0] + p[1] * p[1] - 1.0).abs() <= 1e-9);
        }
        assert_eq!(s, sample_variety(&f, 2.0, 200, 7).unwrap());
    }

    #[test]
    fn empty_variety() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2 + x1^2 + 1", 2, &[2]).unwrap();
        let opts = SampleOptions {
            max_probes: Some(300),
            ..SampleOptions::default()
        };
        assert!(matches!(
            sample_variety_with(&f, 2.0, 10, 1, &opts),
            Err(Error::EmptySample { probes: 300 })
        ));
    }

    #[test]
    fn space_curve_by_slices() {
        // unit circle in the plane x2 = 0
        let f: PolyTuple<f64> = parse_poly_text("x0^2 + x1^2 - 1; x2", 3, &[2, 1]).unwrap();
        let s = sample_variety(&f, 1.5, 50, 3).unwrap();
        assert_eq!(s.len(), 50);
        for p in &s.points {
            assert!(p[2].abs() <= 1e-9 && (p[0].hypot(p[1]) - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn csv_export() {
        let f: PolyTuple<f64> = parse_poly_text("x0 - 0.5", 1, &[1]).unwrap();
        let s = sample_variety(&f, 1.0, 1, 0).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x0,residual\n5e-1,"));
    }
}
