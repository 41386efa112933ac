use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::norms::opnorm::OperatorNormBounds;
use crate::norms::svd::{svd, symmetric_eigenvalues};
use crate::norms::Mat;
use crate::poly::DerivativeTensor;
use crate::scalar::{two_norm, Scalar};

/// Dense multilinear map `ℝ^{n_1} × ⋯ × ℝ^{n_ℓ} → ℝ^{m}` stored as an
/// array of shape `(m, n_1, …, n_ℓ)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Multilinear<T> {
    dims: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> Multilinear<T> {
    pub fn new(dims: Vec<usize>, data: Vec<T>) -> Self {
        assert!(dims.len() >= 2, "need an output slot and at least one input");
        assert_eq!(dims.iter().product::<usize>(), data.len(), "shape mismatch");
        Multilinear { dims, data }
    }

    /// `u_0 ⊗ u_1 ⊗ ⋯`; `factors[0]` is the output factor.
    pub fn from_rank_one(factors: &[Vec<T>]) -> Self {
        let dims: Vec<usize> = factors.iter().map(Vec::len).collect();
        let mut data = vec![T::one()];
        for f in factors {
            data = data.iter().flat_map(|a| f.iter().map(move |b| *a * *b)).collect();
        }
        Self::new(dims, data)
    }

    /// Contracts `left` (`m × q`) with the derivative tensor and scales by `c`:
    /// `(v_1…v_ℓ) ↦ c · left · D^ℓ f[v_1…v_ℓ]`.
    pub fn from_derivative(left: &Mat<T>, tensor: &DerivativeTensor<T>, c: T) -> Self {
        assert_eq!(left.cols(), tensor.q(), "left factor must have q columns");
        let block = tensor.n().pow(tensor.order());
        let m = left.rows();
        let mut dims = vec![m];
        dims.extend(std::iter::repeat_n(tensor.n(), tensor.order() as usize));
        let mut data = vec![T::zero(); m * block];
        if let Some(e) = tensor.entries() {
            for a in 0..m {
                for i in 0..tensor.q() {
                    let w = left[(a, i)] * c;
                    if w == T::zero() {
                        continue;
                    }
                    for k in 0..block {
                        data[a * block + k] = data[a * block + k] + w * e[i * block + k];
                    }
                }
            }
        }
        Self::new(dims, data)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn frobenius(&self) -> T {
        two_norm(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == T::zero())
    }

    /// Contracts every slot except `skip` against `vecs`.
    fn contract_except(&self, vecs: &[Vec<T>], skip: usize) -> Vec<T> {
        let slots = self.dims.len();
        let mut out = vec![T::zero(); self.dims[skip]];
        let mut idx = vec![0usize; slots];
        for &v in &self.data {
            if v != T::zero() {
                let mut w = v;
                for s in 0..slots {
                    if s != skip {
                        w = w * vecs[s][idx[s]];
                    }
                }
                out[idx[skip]] = out[idx[skip]] + w;
            }
            for s in (0..slots).rev() {
                idx[s] += 1;
                if idx[s] < self.dims[s] {
                    break;
                }
                idx[s] = 0;
            }
        }
        out
    }

    /// Mode-`k` unfolding as a `dims[k] × rest` matrix.
    fn unfold(&self, k: usize) -> Mat<T> {
        let rest = self.data.len() / self.dims[k];
        let mut m = Mat::zeros(self.dims[k], rest);
        let mut fill = vec![0usize; self.dims[k]];
        let mut idx = vec![0usize; self.dims.len()];
        for &v in &self.data {
            let r = idx[k];
            m[(r, fill[r])] = v;
            fill[r] += 1;
            for s in (0..self.dims.len()).rev() {
                idx[s] += 1;
                if idx[s] < self.dims[s] {
                    break;
                }
                idx[s] = 0;
            }
        }
        m
    }

    /// Alternating power iteration from one starting point.
    fn power_iterate(&self, mut vecs: Vec<Vec<T>>, opts: &PowerOptions) -> T {
        let slots = self.dims.len();
        let tol = T::lit(opts.tol);
        let mut sigma = T::zero();
        for _ in 0..opts.iterations {
            let prev = sigma;
            for k in 0..slots {
                let w = self.contract_except(&vecs, k);
                let nw = two_norm(&w);
                if nw == T::zero() {
                    return sigma;
                }
                sigma = nw;
                vecs[k] = w.into_iter().map(|x| x / nw).collect();
            }
            if (sigma - prev).abs() <= tol * sigma {
                break;
            }
        }
        sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            restarts: 8,
            iterations: 200,
            tol: 1e-10,
            seed: 0x7e_4502,
        }
    }
}

fn top_left_singular<T: Scalar>(m: &Mat<T>) -> Vec<T> {
    let d = svd(m);
    d.u.column(0)
}

/// Bracket on the `(2,2)` norm `sup ‖T(v_1,…,v_ℓ)‖₂ / Π‖v_j‖₂`.
///
/// The upper side is the Frobenius norm; the lower side comes from
/// alternating power iteration. A single output row with two inputs is a
/// symmetric-matrix case handled exactly by eigenvalues.
pub fn multilinear_22_bounds<T: Scalar>(t: &Multilinear<T>, opts: &PowerOptions) -> OperatorNormBounds<T> {
    if t.is_zero() {
        return OperatorNormBounds::exact(T::zero());
    }
    let upper = t.frobenius();
    let dims = t.dims();
    if dims.len() == 2 {
        // plain linear map: the spectral norm
        let m = Mat::from_row_major(dims[0], dims[1], t.as_slice().to_vec());
        let s = svd(&m).s[0];
        return OperatorNormBounds::exact(s.min(upper));
    }
    if dims.len() == 3 && dims[0] == 1 && dims[1] == dims[2] {
        let m = Mat::from_row_major(dims[1], dims[2], t.as_slice().to_vec());
        if m == m.transpose() {
            let e = symmetric_eigenvalues(&m)
                .into_iter()
                .fold(T::zero(), |a, v| a.max(v.abs()));
            return OperatorNormBounds::exact(e.min(upper));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut lower = T::zero();
    for r in 0..opts.restarts.max(1) {
        let vecs: Vec<Vec<T>> = if r == 0 {
            (0..dims.len()).map(|k| top_left_singular(&t.unfold(k))).collect()
        } else {
            dims.iter()
                .map(|&d| {
                    let v: Vec<T> = (0..d)
                        .map(|_| T::lit(StandardNormal.sample(&mut rng)))
                        .collect();
                    let nv = two_norm(&v);
                    v.into_iter().map(|x| x / nv).collect()
                })
                .collect()
        };
        lower = lower.max(t.power_iterate(vecs, opts));
    }
    OperatorNormBounds::bracket(lower.min(upper), upper)
}

/// `(2,2)` norm bracket of `c · left ∘ D^ℓ f` where `left` is `m × q`.
///
/// With a single polynomial the map factors as `p ⊗ S` with `S` a scalar
/// symmetric form, so only `S` is iterated.
pub fn tensor_22_norm_bounds<T: Scalar>(
    left: &Mat<T>,
    tensor: &DerivativeTensor<T>,
    c: T,
    opts: &PowerOptions,
) -> OperatorNormBounds<T> {
    if tensor.is_zero() {
        return OperatorNormBounds::exact(T::zero());
    }
    if tensor.q() == 1 {
        let p = two_norm(&left.column(0)) * c.abs();
        let mut dims = vec![1];
        dims.extend(std::iter::repeat_n(tensor.n(), tensor.order() as usize));
        let form = Multilinear::new(dims, tensor.entries().expect("nonzero").to_vec());
        let b = multilinear_22_bounds(&form, opts);
        return OperatorNormBounds {
            lower: b.lower * p,
            upper: b.upper * p,
            exact: b.exact,
        };
    }
    multilinear_22_bounds(&Multilinear::from_derivative(left, tensor, c), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyTuple;
    use approx::assert_relative_eq;

    #[test]
    fn circle_hessian_contraction() {
        let f: PolyTuple<f64> = PolyTuple::new(
            2,
            vec![2],
            vec![vec![(vec![2, 0], 1.0), (vec![0, 2], 1.0), (vec![0, 0], -1.0)]],
        )
        .unwrap();
        let h = f.derivative_tensor(&[1.0, 0.0], 2).unwrap();
        let left = Mat::from_rows(&[vec![0.5], vec![0.0]]);
        let b = tensor_22_norm_bounds(&left, &h, 0.5, &PowerOptions::default());
        assert!(b.exact);
        assert_relative_eq!(b.upper, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn zero_tensor() {
        let t = Multilinear::new(vec![2, 2, 2], vec![0.0; 8]);
        assert_eq!(multilinear_22_bounds(&t, &PowerOptions::default()), OperatorNormBounds::exact(0.0));
    }

    #[test]
    fn rank_one_bracket() {
        let u = vec![1.0, -2.0, 0.5];
        let v = vec![0.3, 0.4];
        let w = vec![2.0, 1.0];
        let t = Multilinear::from_rank_one(&[u.clone(), v.clone(), w.clone()]);
        let expect = two_norm(&u) * two_norm(&v) * two_norm(&w);
        let b = multilinear_22_bounds(&t, &PowerOptions::default());
        assert_relative_eq!(b.upper, expect, epsilon = 1e-12);
        assert!((b.lower - expect as f64).abs() < 1e-8);
    }
}
