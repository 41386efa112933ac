use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{pseudoinverse, tensor_22_norm_bounds, PowerOptions};
use crate::poly::PolyTuple;
use crate::scalar::{factorial, hinf_norm, inf_norm, two_norm, Scalar};

/// `β(f, x) = ‖D_x f^† f(x)‖₂`.
pub fn smale_beta<T: Scalar>(f: &PolyTuple<T>, x: &[T]) -> Result<T> {
    let p = pseudoinverse(&f.jacobian(x)?)?;
    Ok(two_norm(&p.mul_vec(&f.evaluate(x)?)))
}

/// Bracket on Smale's `γ(f, x) = sup_{ℓ≥2} ‖D_x f^† D^ℓ_x f / ℓ!‖_{2,2}^{1/(ℓ−1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GammaBounds<T: Scalar> {
    #[serde(with = "crate::serde_ext")]
    pub upper: T,
    #[serde(with = "crate::serde_ext")]
    pub lower: T,
    /// `D_x f` is not surjective; both sides are then 0 by convention.
    pub singular: bool,
    pub exact: bool,
}

/// `γ` bracket. The upper side comes from Frobenius norms and is the one
/// used in reach bounds; the lower side from power iteration.
pub fn smale_gamma<T: Scalar>(f: &PolyTuple<T>, x: &[T], opts: &PowerOptions) -> Result<GammaBounds<T>> {
    let jac = f.jacobian(x)?;
    let p = match pseudoinverse(&jac) {
        Ok(p) => p,
        Err(Error::NonSurjective { .. }) => {
            return Ok(GammaBounds {
                upper: T::zero(),
                lower: T::zero(),
                singular: true,
                exact: true,
            })
        }
        Err(e) => return Err(e),
    };
    let mut upper = T::zero();
    let mut lower = T::zero();
    let mut exact = true;
    for l in 2..=f.max_degree() {
        let t = f.derivative_tensor(x, l)?;
        let b = tensor_22_norm_bounds(&p, &t, T::one() / factorial::<T>(l), opts);
        let e = T::one() / T::lit(f64::from(l - 1));
        upper = upper.max(b.upper.powf(e));
        lower = lower.max(b.lower.powf(e));
        exact &= b.exact;
    }
    Ok(GammaBounds {
        upper,
        lower: lower.min(upper),
        singular: false,
        exact,
    })
}

/// Upper bound on `γ(f, x)`; 0 at points with non-surjective derivative.
pub fn smale_gamma_upper<T: Scalar>(f: &PolyTuple<T>, x: &[T]) -> Result<T> {
    Ok(smale_gamma(f, x, &PowerOptions::default())?.upper)
}

/// Default zero tolerance `1e−9·(1 + ‖f‖₁‖ζ‖_h∞^D)`.
pub fn zero_tol<T: Scalar>(f: &PolyTuple<T>, x: &[T]) -> T {
    T::lit(1e-9) * (T::one() + f.one_norm() * hinf_norm(x).powi(f.max_degree() as i32))
}

/// Fails with `NotAZero` unless `‖f(ζ)‖_∞ ≤ zero_tol`.
pub fn check_zero<T: Scalar>(f: &PolyTuple<T>, zeta: &[T]) -> Result<()> {
    let residual = inf_norm(&f.evaluate(zeta)?);
    let tol = zero_tol(f, zeta);
    if residual > tol || residual.is_nan() {
        return Err(Error::NotAZero {
            residual: residual.as_f64(),
            tol: tol.as_f64(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NewtonOutcome<T: Scalar> {
    #[serde(with = "crate::serde_ext::vec")]
    pub point: Vec<T>,
    #[serde(with = "crate::serde_ext")]
    pub residual: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Damped pseudo-inverse Newton iteration `x ← x − λ D_x f^† f(x)`. Once
/// `‖f(x)‖_∞ ≤ zero_tol` a few more full steps are taken while they still
/// reduce the residual.
pub fn newton_refine<T: Scalar>(f: &PolyTuple<T>, x0: &[T], max_iter: usize) -> Result<NewtonOutcome<T>> {
    let mut x = x0.to_vec();
    let mut fx = f.evaluate(&x)?;
    let mut res = inf_norm(&fx);
    let mut iterations = 0;
    let mut polish = 0;
    while iterations < max_iter && res > T::zero() {
        let converged = res <= zero_tol(f, &x);
        if converged {
            if polish == 3 {
                break;
            }
            polish += 1;
        }
        let step = match pseudoinverse(&f.jacobian(&x)?) {
            Ok(p) => p.mul_vec(&fx),
            Err(_) if converged => break,
            Err(e) => return Err(e),
        };
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..if converged { 1 } else { 12 } {
            let cand: Vec<T> = x.iter().zip(&step).map(|(a, s)| *a - lambda * *s).collect();
            let fc = f.evaluate(&cand)?;
            let rc = inf_norm(&fc);
            if rc < res {
                x = cand;
                fx = fc;
                res = rc;
                accepted = true;
                break;
            }
            lambda = lambda / T::lit(2.0);
        }
        if !accepted {
            break;
        }
        iterations += 1;
    }
    let converged = res <= zero_tol(f, &x);
    Ok(NewtonOutcome {
        point: x,
        residual: res,
        iterations,
        converged,
    })
}
