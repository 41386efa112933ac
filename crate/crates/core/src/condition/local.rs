use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{minvalue_inf_two, Mat};
use crate::poly::PolyTuple;
use crate::scalar::{hinf_norm, inf_norm, Scalar};

/// `cond(f, x)` with its two denominator terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConditionReport<T: Scalar> {
    #[serde(with = "crate::serde_ext::vec")]
    pub point: Vec<T>,
    /// `‖Δ⁻¹ ‖x‖_h∞^{-d} f(x)‖_∞`
    #[serde(with = "crate::serde_ext")]
    pub residual_term: T,
    /// `‖(Δ⁻² ‖x‖_h∞^{1-d} D_x f)^†‖_{∞,2}^{-1}`, zero when not surjective.
    #[serde(with = "crate::serde_ext")]
    pub inverse_term: T,
    #[serde(with = "crate::serde_ext")]
    pub cond: T,
    pub surjective: bool,
}

fn ratio<T: Scalar>(norm: T, denom: T) -> T {
    if denom > T::zero() {
        norm / denom
    } else {
        T::infinity()
    }
}

/// Local 1-condition number `‖f‖₁ / max{residual, inverse}`, `+∞` at
/// singular zeros.
pub fn cond_local<T: Scalar>(f: &PolyTuple<T>, x: &[T]) -> Result<ConditionReport<T>> {
    let fx = f.evaluate(x)?;
    let h = hinf_norm(x);
    let degrees = f.degrees();
    let residual_term = fx
        .iter()
        .zip(degrees)
        .map(|(v, &d)| v.abs() / (T::lit(f64::from(d)) * h.powi(d as i32)))
        .fold(T::zero(), T::max);
    let factors: Vec<T> = degrees
        .iter()
        .map(|&d| T::one() / (T::lit(f64::from(d * d)) * h.powi(d as i32 - 1)))
        .collect();
    let b = f.jacobian(x)?.scale_rows(&factors);
    let inverse_term = minvalue_inf_two(&b);
    Ok(ConditionReport {
        point: x.to_vec(),
        residual_term,
        inverse_term,
        cond: ratio(f.one_norm(), residual_term.max(inverse_term)),
        surjective: inverse_term > T::zero(),
    })
}

/// Cached homogenization `f^h` and its partials in `X_1 … X_n`, used to
/// evaluate `1/cond^h` many times.
#[derive(Debug, Clone)]
pub struct HomogEvaluator<T> {
    fh: PolyTuple<T>,
    grads: Vec<PolyTuple<T>>,
    inv_d: Vec<T>,
    inv_d2: Vec<T>,
    norm: T,
}

impl<T: Scalar> HomogEvaluator<T> {
    pub fn new(f: &PolyTuple<T>) -> Self {
        let fh = f.homogenize();
        let grads = (1..fh.n()).map(|k| fh.partial(k)).collect();
        let inv_d = f.degrees().iter().map(|&d| T::one() / T::lit(f64::from(d))).collect();
        let inv_d2 = f
            .degrees()
            .iter()
            .map(|&d| T::one() / T::lit(f64::from(d * d)))
            .collect();
        HomogEvaluator {
            fh,
            grads,
            inv_d,
            inv_d2,
            norm: f.one_norm(),
        }
    }

    pub fn one_norm(&self) -> T {
        self.norm
    }

    /// `(‖Δ⁻¹ f^h(z)‖_∞, ‖(D_z f^h P_0)^† Δ²‖_{∞,2}^{-1})` for any `z`.
    pub fn terms(&self, z: &[T]) -> (T, T) {
        let powers = self.fh.power_table(z);
        let residual = self
            .fh
            .evaluate_with_powers(&powers)
            .iter()
            .zip(&self.inv_d)
            .map(|(v, w)| v.abs() * *w)
            .fold(T::zero(), T::max);
        let q = self.inv_d.len();
        let n = self.grads.len();
        let mut jac = Mat::zeros(q, n);
        for (k, g) in self.grads.iter().enumerate() {
            for (i, v) in g.evaluate_with_powers(&powers).into_iter().enumerate() {
                jac[(i, k)] = v * self.inv_d2[i];
            }
        }
        (residual, minvalue_inf_two(&jac))
    }

    /// `1/cond^h(f, z)`, which is 1-Lipschitz in the sup norm on the cube.
    pub fn inverse_cond(&self, z: &[T]) -> T {
        if self.norm == T::zero() {
            return T::zero();
        }
        let (r, m) = self.terms(z);
        r.max(m) / self.norm
    }

    pub fn cond(&self, z: &[T]) -> T {
        let (r, m) = self.terms(z);
        ratio(self.norm, r.max(m))
    }
}

/// `cond^h(f, z)` for `z` on the boundary of `[−1,1]^{n+1}`, `X_0` first.
pub fn cond_homog<T: Scalar>(f: &PolyTuple<T>, z: &[T]) -> Result<T> {
    if z.len() != f.n() + 1 {
        return Err(Error::DimensionMismatch {
            expected: f.n() + 1,
            got: z.len(),
        });
    }
    let norm = inf_norm(z);
    if (norm - T::one()).abs() > T::lit(1e-12) {
        return Err(Error::NotOnBoundary { norm: norm.as_f64() });
    }
    Ok(HomogEvaluator::new(f).cond(z))
}
