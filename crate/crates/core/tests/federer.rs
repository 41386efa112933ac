use reachbound::federer::{estimate_reach, estimate_reach_local, sample_variety, tangent_distance};
use reachbound::poly::parse_poly_text;
use reachbound::Poly;

fn poly(src: &str, n: usize, degrees: &[u32]) -> Poly {
    parse_poly_text(src, n, degrees).unwrap()
}

/// Radius of curvature of the ellipse x²/a² + y²/b² = 1 at parameter θ.
fn ellipse_curvature_radius(a: f64, b: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    (a * a * s * s + b * b * c * c).powf(1.5) / (a * b)
}

#[test]
fn circle_estimate() {
    let f = poly("x0^2 + x1^2 - 1", 2, &[2]);
    let s = sample_variety(&f, 2.0, 500, 1).unwrap();
    let e = estimate_reach(&s, 1e-3).unwrap();
    assert!((e.estimate - 1.0).abs() < 0.02, "{}", e.estimate);
    assert!(e.estimate >= 1.0 - 1e-6);
}

#[test]
fn ellipse_estimate_matches_minimum_curvature_radius() {
    let f = poly("0.25*x0^2 + x1^2 - 1", 2, &[2]);
    let oracle = (0..=10_000)
        .map(|k| ellipse_curvature_radius(2.0, 1.0, k as f64 * std::f64::consts::TAU / 10_000.0))
        .fold(f64::INFINITY, f64::min);
    assert!((oracle - 0.5).abs() < 1e-12);
    let s = sample_variety(&f, 3.0, 1000, 2).unwrap();
    let e = estimate_reach(&s, 3e-3).unwrap();
    assert!(e.estimate >= oracle * 0.98 && e.estimate <= oracle * 1.02, "{}", e.estimate);
}

#[test]
fn parabola_estimate() {
    let f = poly("x1 - x0^2", 2, &[2]);
    let s = sample_variety(&f, 3.0, 1000, 3).unwrap();
    for p in &s.points {
        assert!((p[1] - p[0] * p[0]).abs() <= 1e-9);
        assert!(p[0].abs().max(p[1].abs()) <= 3.0);
    }
    let e = estimate_reach(&s, 3e-3).unwrap();
    assert!((e.estimate - 0.5).abs() < 0.025, "{}", e.estimate);

    // local reach at (x, x²) grows like min{1/2, |x|}
    let s = sample_variety(&f, 5.0, 1000, 4).unwrap();
    let local = estimate_reach_local(&s, &[2.0, 4.0], 1.0, 5e-3).unwrap();
    assert!(local.points_in_ball > 10);
    assert!(local.estimate > 0.5, "{}", local.estimate);
}

#[test]
fn parallel_lines_estimate_is_half_the_gap() {
    let f = poly("x0^2 - x0", 2, &[2]);
    let s = sample_variety(&f, 2.0, 500, 5).unwrap();
    let e = estimate_reach(&s, 2e-3).unwrap();
    assert!((e.estimate - 0.5).abs() < 0.025, "{}", e.estimate);
    let (i, j) = e.argmin_pair.unwrap();
    assert!((s.points[i][0] - s.points[j][0]).abs() > 0.5);
    assert!(tangent_distance(&s, i, j).unwrap() > 0.99);
}

#[test]
fn sphere_estimate() {
    let f = poly("x0^2 + x1^2 + x2^2 - 1", 3, &[2]);
    let s = sample_variety(&f, 2.0, 400, 6).unwrap();
    let e = estimate_reach(&s, 2e-3).unwrap();
    assert!((e.estimate - 1.0).abs() < 0.02, "{}", e.estimate);
}

#[test]
fn estimate_independent_of_thread_count() {
    let f = poly("x1 - x0^2", 2, &[2]);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let s = sample_variety(&f, 3.0, 300, 9).unwrap();
            (s.points.clone(), estimate_reach(&s, 3e-3).unwrap())
        })
    };
    let (p1, e1) = run(1);
    let (p4, e4) = run(4);
    assert_eq!(p1, p4);
    assert_eq!(e1, e4);
}
