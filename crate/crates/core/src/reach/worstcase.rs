use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value of the worst-case bit bound on `log₂(1/reach_R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseBound {
    /// The bound as a double; `+∞` when it overflows.
    #[serde(with = "crate::serde_ext")]
    pub value: f64,
    /// `log₂` of the bound, finite even when `value` overflows.
    pub log2_value: f64,
    /// Integer part in decimal, computed from the exact leading factor.
    pub integer_part: String,
}

/// `4n(2D)^{1+q+2n}(5 + τ + log₂R + 6n log₂D) + 2 log₂D + τ`.
pub fn worstcase_bit_bound(n: u32, q: u32, d: u32, tau: u32, r: u64) -> Result<WorstCaseBound> {
    if n == 0 || q == 0 || d == 0 || r == 0 {
        return Err(Error::InvalidInput("n, q, D and R must be at least 1".into()));
    }
    let exponent = 1 + q + 2 * n;
    let lead = BigUint::from(4 * u64::from(n)) * BigUint::from(2 * u64::from(d)).pow(exponent);
    let log_d = f64::from(d).log2();
    let tau_f = f64::from(tau);
    let factor = 5.0 + tau_f + (r as f64).log2() + 6.0 * f64::from(n) * log_d;
    let tail = 2.0 * log_d + tau_f;

    let lead_f = lead.to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    let value = lead_f * factor + tail;
    let log2_lead = (4.0 * f64::from(n)).log2() + f64::from(exponent) * (2.0 * f64::from(d)).log2();
    let log2_value = if value.is_finite() {
        value.log2()
    } else {
        log2_lead + factor.log2()
    };

    // factor = m·2^e exactly, so lead·factor = (lead·m) >> −e
    let (mantissa, exp) = decompose(factor);
    let scaled = lead * BigUint::from(mantissa);
    let product = if exp >= 0 {
        scaled << exp as u32
    } else {
        scaled >> (-exp) as u32
    };
    let integer = product + BigUint::from(tail.floor() as u64);
    Ok(WorstCaseBound {
        value,
        log2_value,
        integer_part: integer.to_string(),
    })
}

/// Splits a positive finite double into `(m, e)` with `x = m·2^e`.
fn decompose(x: f64) -> (u64, i32) {
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_values() {
        let b = worstcase_bit_bound(1, 1, 2, 1, 1).unwrap();
        assert_eq!(b.value, 12291.0);
        assert_eq!(b.integer_part, "12291");
        // 4·2⁴·5
        let b = worstcase_bit_bound(1, 1, 1, 0, 1).unwrap();
        assert_eq!(b.value, 320.0);
        assert_eq!(b.integer_part, "320");
    }

    #[test]
    fn linear_in_tau() {
        let a = worstcase_bit_bound(2, 1, 3, 5, 4).unwrap().value;
        let b = worstcase_bit_bound(2, 1, 3, 6, 4).unwrap().value;
        let step = 4.0 * 2.0 * 6f64.powi(1 + 1 + 4) + 1.0;
        assert!((b - a - step).abs() <= 1e-9 * b);
    }

    #[test]
    fn overflow_falls_back() {
        let b = worstcase_bit_bound(200, 3, 50, 10, 2).unwrap();
        assert!(b.value.is_infinite());
        assert!(b.log2_value > 1024.0 && b.log2_value.is_finite());
        assert!(b.integer_part.len() > 300);
    }

    #[test]
    fn rejects_zero_inputs() {
        assert!(worstcase_bit_bound(0, 1, 1, 1, 1).is_err());
    }
}
