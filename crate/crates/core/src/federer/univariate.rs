//! Real roots of univariate polynomials, used for line probes of hypersurfaces.

use crate::poly::PolyTuple;

/// Coefficients (constant term first) of `t ↦ f_0(a + t·b)`.
pub fn restrict_to_line(f: &PolyTuple<f64>, a: &[f64], b: &[f64]) -> Vec<f64> {
    let d = f.degrees()[0] as usize;
    // pows[k][e] = (a_k + b_k t)^e
    let pows: Vec<Vec<Vec<f64>>> = a
        .iter()
        .zip(b)
        .map(|(&ak, &bk)| {
            let mut out = vec![vec![1.0]];
            for e in 1..=d {
                let next = mul(&out[e - 1], &[ak, bk]);
                out.push(next);
            }
            out
        })
        .collect();
    let mut acc = vec![0.0; d + 1];
    for (alpha, &c) in f.poly(0).terms() {
        let mut term = vec![c];
        for (k, &e) in alpha.exponents().iter().enumerate() {
            if e > 0 {
                term = mul(&term, &pows[k][e as usize]);
            }
        }
        for (slot, v) in acc.iter_mut().zip(&term) {
            *slot += v;
        }
    }
    acc
}

fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub fn horner(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
}

fn trim(p: &[f64]) -> &[f64] {
    let scale = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut end = p.len();
    while end > 0 && p[end - 1].abs() <= 1e-15 * scale {
        end -= 1;
    }
    &p[..end]
}

/// Real roots in `[lo, hi]`, ascending. Critical points split the interval
/// into monotone pieces, each holding at most one root, found by bisection.
/// Identically vanishing polynomials have no isolated roots and return none.
pub fn real_roots(p: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let p = trim(p);
    match p.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let t = -p[0] / p[1];
            return if (lo..=hi).contains(&t) { vec![t] } else { Vec::new() };
        }
        _ => {}
    }
    let mut knots = vec![lo];
    knots.extend(real_roots(&derivative(p), lo, hi));
    knots.push(hi);

    let mut roots: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        let (u, v) = (w[0], w[1]);
        let (fu, fv) = (horner(p, u), horner(p, v));
        if fu == 0.0 {
            roots.push(u);
        } else if fu.signum() != fv.signum() && fv != 0.0 {
            roots.push(bisect(p, u, v, fu));
        }
    }
    if horner(p, hi) == 0.0 {
        roots.push(hi);
    }
    roots.dedup();
    roots
}

fn bisect(p: &[f64], mut u: f64, mut v: f64, fu: f64) -> f64 {
    let su = fu.signum();
    for _ in 0..200 {
        let m = 0.5 * (u + v);
        if m <= u || m >= v {
            break;
        }
        let fm = horner(p, m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == su {
            u = m;
        } else {
            v = m;
        }
    }
    0.5 * (u + v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly_text;

    #[test]
    fn quadratic_and_cubic_roots() {
        let r = real_roots(&[-2.0, 0.0, 1.0], -5.0, 5.0);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 2f64.sqrt()).abs() < 1e-15 && (r[1] - 2f64.sqrt()).abs() < 1e-15);
        // (t−1)(t−2)(t−3)
        let r = real_roots(&[-6.0, 11.0, -6.0, 1.0], 0.0, 10.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!(real_roots(&[1.0, 0.0, 1.0], -10.0, 10.0).is_empty());
        assert_eq!(real_roots(&[-6.0, 11.0, -6.0, 1.0], 1.5, 2.5).len(), 1);
    }

    #[test]
    fn restriction_matches_evaluation() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2*x1 - 3*x1 + x0 + 2", 2, &[3]).unwrap();
        let (a, b) = ([0.3, -0.7], [0.6, 0.8]);
        let p = restrict_to_line(&f, &a, &b);
        for t in [-1.0, 0.0, 0.4, 2.5] {
            let x = [a[0] + t * b[0], a[1] + t * b[1]];
            let want = f.evaluate(&x).unwrap()[0];
            assert!((horner(&p, t) - want).abs() < 1e-12);
        }
    }
}
