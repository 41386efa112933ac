use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::svd::{spectral_norm, svd};
use crate::norms::Mat;
use crate::scalar::{two_norm, Scalar};

/// Two-sided bracket on an operator norm. `exact` means both sides coincide
/// with the true value up to round-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorNormBounds<T> {
    pub lower: T,
    pub upper: T,
    pub exact: bool,
}

impl<T: Scalar> OperatorNormBounds<T> {
    pub fn exact(v: T) -> Self {
        OperatorNormBounds {
            lower: v,
            upper: v,
            exact: true,
        }
    }

    pub fn bracket(lower: T, upper: T) -> Self {
        OperatorNormBounds {
            lower: lower.min(upper),
            upper,
            exact: false,
        }
    }
}

/// Knobs for the `(∞,2)` norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormOptions {
    /// Largest column count handled by full sign-vector enumeration.
    pub q_exact: usize,
    /// Random sign vectors tried above `q_exact`.
    pub random_signs: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            q_exact: 16,
            random_signs: 1 << 16,
            seed: 0x5e_ed0f_516e,
        }
    }
}

/// Relative threshold under which the smallest singular value counts as zero.
pub fn rank_tol<T: Scalar>(cols: usize, sigma_max: T) -> T {
    T::from_usize_lossy(cols) * T::epsilon() * sigma_max
}

/// Right pseudoinverse `A^† = A^*(AA^*)^{-1}` of a surjective `q × n` matrix,
/// computed from the SVD.
pub fn pseudoinverse<T: Scalar>(a: &Mat<T>) -> Result<Mat<T>> {
    let (q, n) = a.shape();
    if q > n {
        return Err(Error::DimensionMismatch { expected: n, got: q });
    }
    if q == 0 {
        return Ok(Mat::zeros(n, 0));
    }
    let d = svd(a);
    let sigma_q = d.s[q - 1];
    if !(sigma_q > rank_tol(n, d.s[0])) {
        return Err(Error::NonSurjective {
            sigma_q: sigma_q.as_f64(),
        });
    }
    // V Σ^{-1} Uᵀ
    let mut out = Mat::zeros(n, q);
    for i in 0..n {
        for j in 0..q {
            let mut acc = T::zero();
            for k in 0..q {
                acc = acc + d.v[(i, k)] * d.u[(j, k)] / d.s[k];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// `‖A s‖₂` for a sign vector encoded in the bits of `mask`.
fn signed_norm<T: Scalar>(a: &Mat<T>, mask: u64, buf: &mut [T]) -> T {
    for (i, b) in buf.iter_mut().enumerate() {
        let row = a.row(i);
        let mut acc = T::zero();
        for (j, &v) in row.iter().enumerate() {
            if mask >> j & 1 == 1 {
                acc = acc - v;
            } else {
                acc = acc + v;
            }
        }
        *b = acc;
    }
    two_norm(buf)
}

/// `‖A‖_{∞,2}` of an `n × q` matrix with default options.
pub fn opnorm_inf_two<T: Scalar>(a: &Mat<T>) -> OperatorNormBounds<T> {
    opnorm_inf_two_with(a, &NormOptions::default())
}

/// `‖A‖_{∞,2} = max_{s ∈ {±1}^q} ‖As‖₂`. The maximum of a convex function on
/// the cube sits at a vertex, so enumeration is exact; above `q_exact` the
/// result is a bracket from random vertices and the column-norm sum.
pub fn opnorm_inf_two_with<T: Scalar>(a: &Mat<T>, opts: &NormOptions) -> OperatorNormBounds<T> {
    let (n, q) = a.shape();
    if q == 0 || n == 0 {
        return OperatorNormBounds::exact(T::zero());
    }
    let mut buf = vec![T::zero(); n];
    if q <= opts.q_exact {
        // s and −s give the same norm; keep the last sign fixed
        let half = 1u64 << (q - 1);
        let best = (0..half).fold(T::zero(), |m, mask| m.max(signed_norm(a, mask, &mut buf)));
        return OperatorNormBounds::exact(best);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut lower = T::zero();
    let words = q.div_ceil(64);
    let mut signs = vec![0u64; words];
    for _ in 0..opts.random_signs {
        signs.iter_mut().for_each(|w| *w = rng.random());
        for (i, b) in buf.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (j, &v) in a.row(i).iter().enumerate() {
                if signs[j / 64] >> (j % 64) & 1 == 1 {
                    acc = acc - v;
                } else {
                    acc = acc + v;
                }
            }
            *b = acc;
        }
        lower = lower.max(two_norm(&buf));
    }
    let upper = (0..q).map(|j| two_norm(&a.column(j))).fold(T::zero(), |s, c| s + c);
    OperatorNormBounds::bracket(lower, upper)
}

/// `‖A^†‖_{∞,2}^{-1} = min_{v ⊥ ker A, v ≠ 0} ‖Av‖_∞ / ‖v‖₂`, or 0 when `A` is
/// not surjective. Uses the upper side of the norm bracket, so the result
/// never overestimates.
pub fn minvalue_inf_two<T: Scalar>(a: &Mat<T>) -> T {
    minvalue_inf_two_with(a, &NormOptions::default())
}

pub fn minvalue_inf_two_with<T: Scalar>(a: &Mat<T>, opts: &NormOptions) -> T {
    if a.rows() == 1 && a.cols() >= 1 {
        // the pseudoinverse of a row is aᵀ/‖a‖²
        return two_norm(a.row(0));
    }
    match pseudoinverse(a) {
        Ok(p) => {
            let up = opnorm_inf_two_with(&p, opts).upper;
            if up > T::zero() {
                T::one() / up
            } else {
                T::zero()
            }
        }
        Err(_) => T::zero(),
    }
}

/// Returns `(‖A^†B‖₂, 1/(1 − ‖B^†(A−B)‖₂))`, the two sides of the
/// perturbation inequality for pseudoinverses.
pub fn perturbation_check<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Result<(T, T)> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: b.rows() * b.cols(),
            got: a.rows() * a.cols(),
        });
    }
    let bp = pseudoinverse(b)?;
    let delta = spectral_norm(&bp.matmul(&a.sub(b)));
    if delta >= T::one() {
        return Err(Error::PreconditionViolated(format!(
            "perturbation norm {delta} is not below 1"
        )));
    }
    let ap = pseudoinverse(a)?;
    Ok((spectral_norm(&ap.matmul(b)), T::one() / (T::one() - delta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pseudoinverse_examples() {
        let p = pseudoinverse(&Mat::from_rows(&[vec![2.0, 0.0]])).unwrap();
        assert_relative_eq!(p[(0, 0)], 0.5, epsilon = 1e-15);
        assert_eq!(p[(1, 0)], 0.0);
        let i = pseudoinverse(&Mat::<f64>::identity(2)).unwrap();
        assert_eq!(i, Mat::identity(2));
        assert!(matches!(
            pseudoinverse(&Mat::from_rows(&[vec![0.0, 0.0]])),
            Err(Error::NonSurjective { .. })
        ));
    }

    #[test]
    fn right_inverse() {
        let a = Mat::from_rows(&[vec![1.0, 2.0, 0.5], vec![-1.0, 0.3, 2.0]]);
        let ap = a.matmul(&pseudoinverse(&a).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                let e: f64 = if i == j { 1.0 } else { 0.0 };
                assert!((ap[(i, j)] - e).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn opnorm_examples() {
        let a = Mat::from_rows(&[vec![2.0], vec![0.0]]);
        assert_eq!(opnorm_inf_two(&a), OperatorNormBounds::exact(2.0));
        let i = opnorm_inf_two(&Mat::<f64>::identity(2));
        assert!(i.exact);
        assert_relative_eq!(i.upper, 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(opnorm_inf_two(&Mat::<f64>::zeros(3, 2)).upper, 0.0);
    }

    #[test]
    fn opnorm_bracket_above_cutover() {
        let opts = NormOptions {
            q_exact: 2,
            random_signs: 256,
            seed: 1,
        };
        let a = Mat::from_rows(&[vec![1.0, -1.0, 0.5], vec![0.25, 2.0, 1.0]]);
        let exact = opnorm_inf_two(&a).upper;
        let b = opnorm_inf_two_with(&a, &opts);
        assert!(!b.exact);
        assert!(b.lower <= exact + 1e-15 && exact <= b.upper + 1e-15);
    }

    #[test]
    fn minvalue_examples() {
        assert_relative_eq!(
            minvalue_inf_two(&Mat::diag(&[1.0, 2.0])),
            2.0 / 5f64.sqrt(),
            epsilon = 1e-14
        );
        assert_relative_eq!(minvalue_inf_two(&Mat::from_rows(&[vec![2.0, 0.0]])), 2.0);
        assert_eq!(minvalue_inf_two(&Mat::<f64>::zeros(2, 3)), 0.0);
        assert_eq!(minvalue_inf_two(&Mat::<f64>::zeros(1, 3)), 0.0);
    }

    #[test]
    fn perturbation_examples() {
        let id = Mat::<f64>::identity(2);
        assert_eq!(perturbation_check(&id, &id).unwrap(), (1.0, 1.0));
        let (lhs, rhs) = perturbation_check(&Mat::diag(&[1.0, 0.5]), &id).unwrap();
        assert_relative_eq!(lhs, 2.0, epsilon = 1e-14);
        assert_relative_eq!(rhs, 2.0, epsilon = 1e-14);
        assert!(matches!(
            perturbation_check(&Mat::zeros(2, 2), &id),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
