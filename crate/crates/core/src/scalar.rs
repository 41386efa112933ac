use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used by the polynomial, norm, condition and reach code.
///
/// Implemented for `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::nan)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).unwrap_or_else(Self::infinity)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `max{1, ‖x‖_∞}`, the ∞-norm of the homogenized point `(1, x)`.
pub fn hinf_norm<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::one(), |acc, v| acc.max(v.abs()))
}

pub fn inf_norm<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
}

pub fn two_norm<T: Scalar>(x: &[T]) -> T {
    // scaled to avoid overflow on large coefficients
    let scale = inf_norm(x);
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let s: T = x.iter().map(|v| (*v / scale) * (*v / scale)).sum();
    scale * s.sqrt()
}

/// Neumaier-compensated sum.
pub fn compensated_sum<T: Scalar, I: IntoIterator<Item = T>>(terms: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp = comp + ((sum - s) + t);
        } else {
            comp = comp + ((t - s) + sum);
        }
        sum = s;
    }
    sum + comp
}

/// Binomial coefficient as a float; zero when `k > n`.
pub fn binomial<T: Scalar>(n: u32, k: u32) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for j in 0..k {
        acc = acc * f64::from(n - j) / f64::from(j + 1);
    }
    T::lit(acc.round())
}

pub fn factorial<T: Scalar>(k: u32) -> T {
    T::lit((1..=k).map(f64::from).product::<f64>())
}
