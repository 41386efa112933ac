use approx::assert_relative_eq;
use proptest::prelude::*;

use reachbound::condition::cond_local;
use reachbound::norms::{minvalue_inf_two, opnorm_inf_two};
use reachbound::poly::MultiIndex;
use reachbound::reach::{reach_lb_cond_local, reach_lb_gamma};
use reachbound::scalar::two_norm;
use reachbound::{Matrix, Poly};

/// Dense tuple data: (n, degrees, coefficient per monomial up to each degree).
fn tuple() -> impl Strategy<Value = Poly> {
    (1usize..=3)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(1u32..=3, 1..=n)))
        .prop_flat_map(|(n, degrees)| {
            let rows: Vec<_> = degrees
                .iter()
                .map(|&d| prop::collection::vec(-4.0f64..4.0, MultiIndex::all_up_to(n, d).len()))
                .collect();
            (Just(n), Just(degrees), rows)
        })
        .prop_map(|(n, degrees, rows)| {
            let polys = degrees
                .iter()
                .zip(rows)
                .map(|(&d, coefs)| {
                    MultiIndex::all_up_to(n, d)
                        .into_iter()
                        .zip(coefs)
                        .filter(|(_, c)| c.abs() > 0.5)
                        .map(|(a, c)| (a.exponents().to_vec(), c))
                        .collect()
                })
                .collect();
            Poly::new(n, degrees.clone(), polys).unwrap()
        })
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3.0f64..3.0, r * c).prop_map(move |d| Matrix::from_row_major(r, c, d))
    })
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

fn scale(v: &[f64]) -> f64 {
    v.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

proptest! {
    #[test]
    fn json_round_trip_is_exact(f in tuple()) {
        prop_assert_eq!(Poly::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn homogenization_restricts_and_scales(f in tuple(), x in point(3), t in 0.2f64..3.0) {
        let x = &x[..f.n()];
        let fh = f.homogenize();
        let mut z = vec![1.0];
        z.extend_from_slice(x);
        let (a, b) = (fh.evaluate(&z).unwrap(), f.evaluate(x).unwrap());
        let tol = 1e-12 * f.one_norm() * scale(x).powi(f.max_degree() as i32);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= tol, "{} vs {}", u, v);
        }
        let tz: Vec<f64> = z.iter().map(|c| c * t).collect();
        for ((u, v), &d) in fh.evaluate(&tz).unwrap().iter().zip(&a).zip(f.degrees()) {
            let expected = t.powi(d as i32) * v;
            prop_assert!((u - expected).abs() <= tol * t.max(1.0).powi(d as i32) * 4.0);
        }
    }

    #[test]
    fn condition_is_at_least_one_and_scale_invariant(f in tuple(), x in point(3), c in 0.01f64..100.0) {
        prop_assume!(f.one_norm() > 0.0);
        let x = &x[..f.n()];
        let a = cond_local(&f, x).unwrap();
        prop_assert!(a.cond >= 1.0 - 1e-12, "cond = {}", a.cond);
        let b = cond_local(&f.scaled(-c), x).unwrap();
        if a.cond.is_finite() {
            assert_relative_eq!(a.cond, b.cond, max_relative = 1e-10);
        } else {
            prop_assert!(b.cond.is_infinite());
        }
    }

    #[test]
    fn opnorm_matches_vertex_enumeration(a in matrix(5, 6), v in point(6)) {
        let q = a.cols();
        let b = opnorm_inf_two(&a);
        prop_assert!(b.exact);
        let brute = (0..1u32 << q)
            .map(|mask| {
                let s: Vec<f64> = (0..q).map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
                two_norm(&a.mul_vec(&s))
            })
            .fold(0.0f64, f64::max);
        assert_relative_eq!(b.upper, brute, max_relative = 1e-12);
        // any point of the cube stays below the vertex maximum
        let v: Vec<f64> = v[..q].iter().map(|c| c / 2.0).collect();
        prop_assert!(two_norm(&a.mul_vec(&v)) <= b.upper * (1.0 + 1e-12));
    }

    #[test]
    fn minvalue_is_homogeneous(a in matrix(3, 4), c in -50.0f64..50.0) {
        prop_assume!(c.abs() > 1e-3);
        let (m, mc) = (minvalue_inf_two(&a), minvalue_inf_two(&a.scale(c)));
        prop_assert!(m >= 0.0);
        assert_relative_eq!(mc, c.abs() * m, max_relative = 1e-9, epsilon = 1e-12);
    }

    #[test]
    fn circle_bounds_stay_below_radius(r in 0.05f64..20.0, theta in 0.0f64..std::f64::consts::TAU, c in 0.1f64..10.0) {
        let src = format!("x0^2 + x1^2 - {}", r * r);
        let f: Poly = reachbound::poly::parse_poly_text(&src, 2, &[2]).unwrap();
        let zeta = [r * theta.cos(), r * theta.sin()];
        let g = reach_lb_gamma(&f, &zeta).unwrap();
        let k = reach_lb_cond_local(&f, &zeta).unwrap();
        prop_assert!(g > 0.0 && g <= r * (1.0 + 1e-9), "gamma route {} vs reach {}", g, r);
        prop_assert!(k > 0.0 && k <= r * (1.0 + 1e-9), "cond route {} vs reach {}", k, r);
        let fc = f.scaled(c);
        assert_relative_eq!(reach_lb_gamma(&fc, &zeta).unwrap(), g, max_relative = 1e-9);
        assert_relative_eq!(reach_lb_cond_local(&fc, &zeta).unwrap(), k, max_relative = 1e-9);
    }
}
