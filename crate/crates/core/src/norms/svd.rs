//! One-sided Jacobi SVD and cyclic Jacobi symmetric eigensolver for the
//! small dense matrices that show up here (at most a handful of rows).

use crate::norms::Mat;
use crate::scalar::{two_norm, Scalar};

/// Thin SVD `A = U·diag(s)·Vᵀ` with `k = min(m, n)` singular values in
/// nonincreasing order.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Mat<T>,
    pub s: Vec<T>,
    pub v: Mat<T>,
}

const MAX_SWEEPS: usize = 80;

/// Orthogonalizes the columns of a tall (`m ≥ n`) matrix.
fn jacobi_tall<T: Scalar>(a: &Mat<T>) -> Svd<T> {
    let (m, n) = a.shape();
    // column-major working copies
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            e
        })
        .collect();
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for r in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let (cp, cr) = (&cols[p], &cols[r]);
                    let mut alpha = T::zero();
                    let mut beta = T::zero();
                    let mut gamma = T::zero();
                    for i in 0..m {
                        alpha = alpha + cp[i] * cp[i];
                        beta = beta + cr[i] * cr[i];
                        gamma = gamma + cp[i] * cr[i];
                    }
                    (alpha, beta, gamma)
                };
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (cols[p][i], cols[r][i]);
                    cols[p][i] = c * x - s * y;
                    cols[r][i] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (vcols[p][i], vcols[r][i]);
                    vcols[p][i] = c * x - s * y;
                    vcols[r][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(T, usize)> = cols.iter().enumerate().map(|(j, c)| (two_norm(c), j)).collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal).then(x.1.cmp(&y.1)));
    let mut u = Mat::zeros(m, n);
    let mut v = Mat::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (dst, &(sigma, j)) in order.iter().enumerate() {
        s.push(sigma);
        for i in 0..m {
            u[(i, dst)] = if sigma > T::zero() { cols[j][i] / sigma } else { T::zero() };
        }
        for i in 0..n {
            v[(i, dst)] = vcols[j][i];
        }
    }
    Svd { u, s, v }
}

pub fn svd<T: Scalar>(a: &Mat<T>) -> Svd<T> {
    if a.rows() >= a.cols() {
        jacobi_tall(a)
    } else {
        let t = jacobi_tall(&a.transpose());
        Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        }
    }
}

pub fn singular_values<T: Scalar>(a: &Mat<T>) -> Vec<T> {
    svd(a).s
}

/// `‖A‖_{2,2}`, the largest singular value.
pub fn spectral_norm<T: Scalar>(a: &Mat<T>) -> T {
    if a.rows() == 0 || a.cols() == 0 {
        return T::zero();
    }
    singular_values(a)[0]
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<T: Scalar>(a: &Mat<T>) -> Vec<T> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "matrix must be square");
    let mut m = a.clone();
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let total = m.frobenius();
        if off.sqrt() <= eps * total || off == T::zero() {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = m[(p, r)];
                if apr == T::zero() {
                    continue;
                }
                let theta = (m[(r, r)] - m[(p, p)]) / (T::lit(2.0) * apr);
                let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (x, y) = (m[(k, p)], m[(k, r)]);
                    m[(k, p)] = c * x - s * y;
                    m[(k, r)] = s * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (m[(p, k)], m[(r, k)]);
                    m[(p, k)] = c * x - s * y;
                    m[(r, k)] = s * x + c * y;
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)]).collect()
}
