use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition::local::HomogEvaluator;
use crate::error::{Error, Result};
use crate::poly::PolyTuple;
use crate::scalar::Scalar;

/// Refinement knobs for [`cond_global`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondGlobalOptions {
    /// Stop once `upper ≤ (1 + target_rel_err)·lower`.
    pub target_rel_err: f64,
    /// Maximum number of evaluated cells.
    pub max_cells: usize,
    /// Cells split per round; fixed so results do not depend on threads.
    pub batch: usize,
    /// Once the lower bound reaches this value the upper bound is reported
    /// as `+∞` without further refinement.
    pub cap: f64,
    /// Cells narrower than this are not split; a cell that would need it
    /// forces `upper = +∞`.
    pub min_width: f64,
}

impl Default for CondGlobalOptions {
    fn default() -> Self {
        CondGlobalOptions {
            target_rel_err: 0.05,
            max_cells: 10_000_000,
            batch: 64,
            cap: 1e12,
            min_width: 1e-12,
        }
    }
}

/// Certified bracket on `cond_R(f) = sup_{‖x‖_∞ ≤ R} cond(f, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GlobalCondResult<T: Scalar> {
    #[serde(rename = "R", with = "crate::serde_ext")]
    pub r: T,
    #[serde(with = "crate::serde_ext")]
    pub lower: T,
    #[serde(with = "crate::serde_ext")]
    pub upper: T,
    pub cells: usize,
    /// Affine point with `cond(f, witness) = lower`.
    #[serde(with = "crate::serde_ext::vec")]
    pub witness: Vec<T>,
}

/// Axis-aligned box on one face of `∂[−1,1]^{n+1}`. `face = 0` is `z_0 = 1`;
/// `face = 2k−1` and `2k` are `z_k = +1` and `z_k = −1`.
#[derive(Debug, Clone)]
struct Cell<T> {
    face: usize,
    lo: Vec<T>,
    hi: Vec<T>,
    upper: T,
}

impl<T: Scalar> Cell<T> {
    fn free_axes(&self) -> usize {
        self.lo.len()
    }

    /// Full coordinate vector of the center in `ℝ^{n+1}`.
    fn center(&self) -> Vec<T> {
        let two = T::lit(2.0);
        let mid: Vec<T> = self.lo.iter().zip(&self.hi).map(|(a, b)| (*a + *b) / two).collect();
        embed(self.face, &mid)
    }

    fn radius(&self) -> T {
        let two = T::lit(2.0);
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (*b - *a) / two)
            .fold(T::zero(), T::max)
    }

    fn split(&self) -> [Cell<T>; 2] {
        let mut axis = 0;
        let mut width = T::neg_infinity();
        for k in 0..self.free_axes() {
            let w = self.hi[k] - self.lo[k];
            if w > width {
                width = w;
                axis = k;
            }
        }
        let mid = (self.lo[axis] + self.hi[axis]) / T::lit(2.0);
        let mut left = self.clone();
        let mut right = self.clone();
        left.hi[axis] = mid;
        right.lo[axis] = mid;
        [left, right]
    }
}

/// Inserts the fixed coordinate of `face` into the free coordinates.
fn embed<T: Scalar>(face: usize, free: &[T]) -> Vec<T> {
    if face == 0 {
        let mut z = Vec::with_capacity(free.len() + 1);
        z.push(T::one());
        z.extend_from_slice(free);
        return z;
    }
    let k = face.div_ceil(2);
    let val = if face % 2 == 1 { T::one() } else { -T::one() };
    let mut z = free.to_vec();
    z.insert(k, val);
    z
}

struct Ranked<T>(Cell<T>);

impl<T: Scalar> Ranked<T> {
    fn key_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        a.upper
            .partial_cmp(&b.upper)
            .unwrap_or(Ordering::Equal)
            .then_with(|| b.face.cmp(&a.face))
            .then_with(|| {
                for (x, y) in b.lo.iter().zip(&a.lo).chain(b.hi.iter().zip(&a.hi)) {
                    match x.partial_cmp(y) {
                        Some(Ordering::Equal) | None => continue,
                        Some(o) => return o,
                    }
                }
                Ordering::Equal
            })
    }
}

impl<T: Scalar> PartialEq for Ranked<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Ranked<T> {}
impl<T: Scalar> PartialOrd for Ranked<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Ranked<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
    }
}

struct Evaluated<T> {
    cell: Cell<T>,
    cond: T,
    center: Vec<T>,
}

fn evaluate<T: Scalar>(ev: &HomogEvaluator<T>, mut cell: Cell<T>, slack: T) -> Evaluated<T> {
    let center = cell.center();
    let inv = ev.inverse_cond(&center);
    let cond = if inv > T::zero() { T::one() / inv } else { T::infinity() };
    let margin = inv - cell.radius() - slack;
    cell.upper = if margin > T::zero() {
        T::one() / margin
    } else {
        T::infinity()
    };
    Evaluated { cell, cond, center }
}

fn initial_cells<T: Scalar>(n: usize, r: T) -> Vec<Cell<T>> {
    let mut cells = vec![Cell {
        face: 0,
        lo: vec![-T::one(); n],
        hi: vec![T::one(); n],
        upper: T::infinity(),
    }];
    if r > T::one() {
        let z0_lo = if r.is_finite() { T::one() / r } else { T::zero() };
        for face in 1..=2 * n {
            let mut lo = vec![-T::one(); n];
            let mut hi = vec![T::one(); n];
            lo[0] = z0_lo;
            hi[0] = T::one();
            cells.push(Cell {
                face,
                lo,
                hi,
                upper: T::infinity(),
            });
        }
    }
    cells
}

/// Certified bracket on `cond_R(f)` for `R ∈ [1, ∞]`.
///
/// The cube `[−R,R]ⁿ` corresponds to the part of `∂[−1,1]^{n+1}` with
/// `z_0 ≥ 1/R`. Since `z ↦ 1/cond^h(f,z)` is 1-Lipschitz in the sup norm, a
/// cell of radius `h` whose center has `1/cond^h = c` satisfies
/// `cond^h ≤ 1/(c − h)` throughout. Cells are refined in order of that bound.
pub fn cond_global<T: Scalar>(
    f: &PolyTuple<T>,
    r: T,
    opts: &CondGlobalOptions,
) -> Result<GlobalCondResult<T>> {
    refine(f, r, opts, &[])
}

/// Like [`cond_global`], but also stops refining once the bracket places
/// `cond_R` on a definite side of every threshold: no `t` in `thresholds`
/// satisfies `lower < t ≤ upper`. The bracket may then be wider than the
/// relative target.
pub fn cond_global_decide<T: Scalar>(
    f: &PolyTuple<T>,
    r: T,
    opts: &CondGlobalOptions,
    thresholds: &[T],
) -> Result<GlobalCondResult<T>> {
    let mut sorted: Vec<T> = thresholds.iter().copied().filter(|t| !t.is_nan()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN filtered"));
    refine(f, r, opts, &sorted)
}

fn refine<T: Scalar>(
    f: &PolyTuple<T>,
    r: T,
    opts: &CondGlobalOptions,
    thresholds: &[T],
) -> Result<GlobalCondResult<T>> {
    if !(r >= T::one()) {
        return Err(Error::InvalidInput(format!("radius R = {r} must be at least 1")));
    }
    if !(opts.target_rel_err > 0.0 && opts.target_rel_err < 1.0) {
        return Err(Error::InvalidInput(format!(
            "target relative error {} must lie in (0, 1)",
            opts.target_rel_err
        )));
    }
    let ev = HomogEvaluator::new(f);
    let n = f.n();
    let factor = T::one() + T::lit(opts.target_rel_err);
    let cap = T::lit(opts.cap);
    let min_width = T::lit(opts.min_width);
    // round-off allowance on the Lipschitz certificate
    let slack = T::lit(64.0) * T::epsilon();

    let mut lower = T::zero();
    let mut witness_z: Vec<T> = Vec::new();
    let mut settled = T::zero();
    let mut heap: BinaryHeap<Ranked<T>> = BinaryHeap::new();
    let mut cells = 0usize;
    let mut unresolved = false;

    let absorb = |batch: Vec<Evaluated<T>>,
                      lower: &mut T,
                      witness_z: &mut Vec<T>,
                      heap: &mut BinaryHeap<Ranked<T>>| {
        for e in batch {
            // only centers with z_0 > 0 map back to affine points
            if e.center[0] > T::zero() && (e.cond > *lower || witness_z.is_empty()) {
                *lower = e.cond.max(*lower);
                *witness_z = e.center.clone();
            }
            heap.push(Ranked(e.cell));
        }
    };

    let first: Vec<Evaluated<T>> = initial_cells(n, r)
        .into_par_iter()
        .map(|c| evaluate(&ev, c, slack))
        .collect();
    cells += first.len();
    absorb(first, &mut lower, &mut witness_z, &mut heap);

    // a cell may stop once its bound is within target, or below the first
    // threshold above `lower`; `lower` only grows, so both stay valid
    let enough = |upper: T, lower: T| {
        let next = thresholds
            .get(thresholds.partition_point(|t| *t <= lower))
            .copied()
            .unwrap_or(T::infinity());
        upper <= factor * lower || (!thresholds.is_empty() && upper < next)
    };

    loop {
        while let Some(top) = heap.peek() {
            if enough(top.0.upper, lower) {
                let c = heap.pop().expect("peeked").0;
                settled = settled.max(c.upper);
            } else {
                break;
            }
        }
        if heap.is_empty() {
            break;
        }
        if lower >= cap || lower.is_infinite() {
            unresolved = true;
            break;
        }
        if cells >= opts.max_cells {
            let upper = heap.peek().map_or(settled, |c| c.0.upper.max(settled));
            return Err(Error::BudgetExceeded {
                cells,
                lower: lower.as_f64(),
                upper: upper.as_f64(),
            });
        }
        let take = opts.batch.max(1).min((opts.max_cells - cells).div_ceil(2));
        let mut parents = Vec::with_capacity(take);
        while parents.len() < take {
            match heap.peek() {
                Some(top) if !enough(top.0.upper, lower) => parents.push(heap.pop().expect("peeked").0),
                _ => break,
            }
        }
        if parents.iter().any(|c| c.radius() < min_width) {
            unresolved = true;
            break;
        }
        let children: Vec<Cell<T>> = parents.iter().flat_map(|c| c.split()).collect();
        cells += children.len();
        let done: Vec<Evaluated<T>> = children
            .into_par_iter()
            .map(|c| evaluate(&ev, c, slack))
            .collect();
        absorb(done, &mut lower, &mut witness_z, &mut heap);
    }

    let upper = if unresolved {
        T::infinity()
    } else {
        settled.max(lower)
    };
    let z0 = witness_z[0];
    let witness = witness_z[1..].iter().map(|v| *v / z0).collect();
    Ok(GlobalCondResult {
        r,
        lower,
        upper,
        cells,
        witness,
    })
}

/// Bracket on `dist₁(Δ⁻¹f, Σ_R)` from a `cond_R` bracket:
/// `[‖f‖₁/upper, (1+D)‖f‖₁/lower]`, collapsing to `[0, 0]` when the cube
/// contains a singular zero.
pub fn dist_to_singular_bounds<T: Scalar>(
    f: &PolyTuple<T>,
    r: T,
    opts: &CondGlobalOptions,
) -> Result<(T, T)> {
    let g = cond_global(f, r, opts)?;
    Ok(dist_from_bracket(f, &g))
}

pub fn dist_from_bracket<T: Scalar>(f: &PolyTuple<T>, g: &GlobalCondResult<T>) -> (T, T) {
    let norm = f.one_norm();
    let d = T::lit(f64::from(f.max_degree()));
    let lo = if g.upper.is_finite() { norm / g.upper } else { T::zero() };
    let hi = if g.lower.is_finite() {
        (T::one() + d) * norm / g.lower
    } else {
        T::zero()
    };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::cond_local;
    use crate::poly::parse_poly_text;

    #[test]
    fn circle_bracket_dominates_grid() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2 + x1^2 - 1", 2, &[2]).unwrap();
        let g = cond_global(&f, 2.0, &CondGlobalOptions::default()).unwrap();
        assert!(g.lower >= 6.0 - 1e-9, "{g:?}");
        assert!(g.upper.is_finite() && g.upper <= 1.05 * g.lower + 1e-12);
        let w = cond_local(&f, &g.witness).unwrap().cond;
        assert!((w - g.lower).abs() <= 1e-9 * g.lower);
        for i in 0..=80 {
            for j in 0..=80 {
                let x = [-2.0 + 4.0 * i as f64 / 80.0, -2.0 + 4.0 * j as f64 / 80.0];
                assert!(cond_local(&f, &x).unwrap().cond <= g.upper);
            }
        }
    }

    #[test]
    fn singular_zero_gives_infinite_upper() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2", 1, &[2]).unwrap();
        let g = cond_global(&f, 1.0, &CondGlobalOptions::default()).unwrap();
        assert!(g.upper.is_infinite());
        assert_eq!(dist_to_singular_bounds(&f, 1.0, &CondGlobalOptions::default()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn budget_is_reported() {
        let f: PolyTuple<f64> = parse_poly_text("x0*x0 - x0", 1, &[2]).unwrap();
        let opts = CondGlobalOptions {
            max_cells: 8,
            target_rel_err: 1e-6,
            ..Default::default()
        };
        match cond_global(&f, 4.0, &opts) {
            Err(Error::BudgetExceeded { cells, lower, upper }) => {
                assert!(cells >= 8 && lower <= upper);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let f: PolyTuple<f64> = parse_poly_text("x0", 1, &[1]).unwrap();
        assert!(cond_global(&f, 0.5, &CondGlobalOptions::default()).is_err());
        let opts = CondGlobalOptions {
            target_rel_err: 1.5,
            ..Default::default()
        };
        assert!(cond_global(&f, 2.0, &opts).is_err());
    }
}
