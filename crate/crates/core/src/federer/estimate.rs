use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::federer::sample::VarietySample;
use crate::scalar::two_norm;

/// Quotients with a smaller normal component are treated as `+∞`.
pub const TANGENT_FLOOR: f64 = 1e-14;

/// `‖D_{z_i}f^† D_{z_i}f (z_j − z_i)‖₂`, the distance from the chord to the
/// tangent space at `z_i`.
pub fn tangent_distance(sample: &VarietySample, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Err(Error::PreconditionViolated("tangent distance needs two distinct points".into()));
    }
    let n = sample.len();
    if i >= n || j >= n {
        return Err(Error::InvalidInput(format!("index out of range for a sample of {n} points")));
    }
    Ok(normal_part(sample, i, &chord(sample, i, j)))
}

fn chord(sample: &VarietySample, i: usize, j: usize) -> Vec<f64> {
    sample.points[j].iter().zip(&sample.points[i]).map(|(a, b)| a - b).collect()
}

fn normal_part(sample: &VarietySample, i: usize, delta: &[f64]) -> f64 {
    two_norm(&sample.pinvs[i].mul_vec(&sample.jacobians[i].mul_vec(delta)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachEstimate {
    /// Smallest Federer quotient `‖z̃−z‖²/(2 dist(z̃−z, T_zZ))` over the scanned pairs.
    #[serde(with = "crate::serde_ext")]
    pub estimate: f64,
    /// `(i, j)` attaining the estimate; the lexicographically first on ties.
    pub argmin_pair: Option<(usize, usize)>,
    /// Ordered pairs whose quotient was evaluated.
    pub pairs_scanned: u64,
    /// Pairs skipped because `‖z̃−z‖/2`, a lower bound on their quotient,
    /// already exceeds the running minimum.
    pub pruned: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalReachEstimate {
    pub center: Vec<f64>,
    pub radius: f64,
    /// `min{r, t}` with `t` the quotient infimum inside the ball.
    #[serde(with = "crate::serde_ext")]
    pub estimate: f64,
    pub points_in_ball: usize,
    pub scan: ReachEstimate,
}

/// Minimum Federer quotient over ordered pairs at distance at least `min_sep`.
/// Overestimates the reach on a finite sample.
pub fn estimate_reach(sample: &VarietySample, min_sep: f64) -> Result<ReachEstimate> {
    let all: Vec<usize> = (0..sample.len()).collect();
    scan(sample, &all, min_sep)
}

/// Federer estimate restricted to sample points in the closed ball `B(ζ, r)`.
pub fn estimate_reach_local(
    sample: &VarietySample,
    center: &[f64],
    r: f64,
    min_sep: f64,
) -> Result<LocalReachEstimate> {
    let idx: Vec<usize> = (0..sample.len())
        .filter(|&i| {
            let d: Vec<f64> = sample.points[i].iter().zip(center).map(|(a, b)| a - b).collect();
            two_norm(&d) <= r
        })
        .collect();
    let scan = scan(sample, &idx, min_sep)?;
    Ok(LocalReachEstimate {
        center: center.to_vec(),
        radius: r,
        estimate: scan.estimate.min(r),
        points_in_ball: idx.len(),
        scan,
    })
}

struct Row {
    best: f64,
    pair: Option<(usize, usize)>,
    scanned: u64,
    pruned: u64,
    admissible: bool,
}

fn quotient(sample: &VarietySample, i: usize, delta: &[f64], len: f64) -> f64 {
    let td = normal_part(sample, i, delta);
    if td < TANGENT_FLOOR {
        f64::INFINITY
    } else {
        len * len / (2.0 * td)
    }
}

fn scan(sample: &VarietySample, idx: &[usize], min_sep: f64) -> Result<ReachEstimate> {
    if idx.len() < 2 {
        return Err(Error::NoAdmissiblePairs);
    }
    // a deterministic starting bound from consecutive pairs, so pruning and
    // the counters do not depend on how rows are scheduled
    let seed_bound = idx
        .windows(2)
        .filter_map(|w| {
            let delta = chord(sample, w[0], w[1]);
            let len = two_norm(&delta);
            (len >= min_sep).then(|| quotient(sample, w[0], &delta, len))
        })
        .fold(f64::INFINITY, f64::min);

    let rows: Vec<Row> = idx
        .par_iter()
        .map(|&i| {
            let mut row = Row {
                best: f64::INFINITY,
                pair: None,
                scanned: 0,
                pruned: 0,
                admissible: false,
            };
            for &j in idx {
                if j == i {
                    continue;
                }
                let delta = chord(sample, i, j);
                let len = two_norm(&delta);
                if len < min_sep {
                    continue;
                }
                row.admissible = true;
                let bound = seed_bound.min(row.best);
                if 0.5 * len > bound * (1.0 + 1e-12) {
                    row.pruned += 1;
                    continue;
                }
                row.scanned += 1;
                let qv = quotient(sample, i, &delta, len);
                if qv < row.best {
                    row.best = qv;
                    row.pair = Some((i, j));
                }
            }
            row
        })
        .collect();

    if !rows.iter().any(|r| r.admissible) {
        return Err(Error::NoAdmissiblePairs);
    }
    let mut out = ReachEstimate {
        estimate: f64::INFINITY,
        argmin_pair: None,
        pairs_scanned: 0,
        pruned: 0,
    };
    for row in rows {
        out.pairs_scanned += row.scanned;
        out.pruned += row.pruned;
        if row.best < out.estimate {
            out.estimate = row.best;
            out.argmin_pair = row.pair;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::federer::sample::sample_variety;
    use crate::norms::{pseudoinverse, Mat};
    use crate::poly::{parse_poly_text, PolyTuple};

    fn manual(f: &PolyTuple<f64>, pts: &[Vec<f64>]) -> VarietySample {
        let jacobians: Vec<Mat<f64>> = pts.iter().map(|p| f.jacobian(p).unwrap()).collect();
        VarietySample {
            pinvs: jacobians.iter().map(|j| pseudoinverse(j).unwrap()).collect(),
            jacobians,
            residuals: vec![0.0; pts.len()],
            points: pts.to_vec(),
            stats: Default::default(),
        }
    }

    #[test]
    fn antipodal_chord_is_normal() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2 + x1^2 - 1", 2, &[2]).unwrap();
        let s = manual(&f, &[vec![1.0, 0.0], vec![-1.0, 0.0]]);
        assert_eq!(tangent_distance(&s, 0, 1).unwrap(), 2.0);
        assert!(tangent_distance(&s, 0, 0).is_err());
        assert_eq!(estimate_reach(&s, 1e-3).unwrap().estimate, 1.0);
    }

    #[test]
    fn tangent_chord_is_second_order() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2 + x1^2 - 1", 2, &[2]).unwrap();
        let h: f64 = 1e-3;
        let s = manual(&f, &[vec![1.0, 0.0], vec![h.cos(), h.sin()]]);
        let td = tangent_distance(&s, 0, 1).unwrap();
        assert!((td - (1.0 - h.cos())).abs() < 1e-15);
    }

    #[test]
    fn pruning_does_not_change_the_minimum() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2 + 4*x1^2 - 4", 2, &[2]).unwrap();
        let s = sample_variety(&f, 2.5, 150, 11).unwrap();
        let est = estimate_reach(&s, 1e-3).unwrap();
        let mut brute = f64::INFINITY;
        for i in 0..s.len() {
            for j in 0..s.len() {
                if i == j {
                    continue;
                }
                let d = chord(&s, i, j);
                let len = two_norm(&d);
                if len >= 1e-3 {
                    brute = brute.min(quotient(&s, i, &d, len));
                }
            }
        }
        assert_eq!(est.estimate, brute);
        assert!(est.pruned > 0);
        let n = s.len() as u64;
        assert!(est.pairs_scanned + est.pruned <= n * (n - 1));
    }

    #[test]
    fn degenerate_inputs() {
        let f: PolyTuple<f64> = parse_poly_text("x0 + x1", 2, &[1]).unwrap();
        let s = manual(&f, &[vec![0.0, 0.0]]);
        assert_eq!(estimate_reach(&s, 0.0), Err(Error::NoAdmissiblePairs));
        // a line has no normal chords
        let s = manual(&f, &[vec![0.0, 0.0], vec![1.0, -1.0]]);
        assert!(estimate_reach(&s, 1e-3).unwrap().estimate.is_infinite());
        assert_eq!(estimate_reach(&s, 10.0), Err(Error::NoAdmissiblePairs));
    }
}
