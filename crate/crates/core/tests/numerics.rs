use proptest::prelude::*;
use remeta::numerics::{
    chisq_cdf, chisq_quantile, find_root, integrate, minimize_scalar, normal_cdf, normal_pdf, normal_quantile,
    student_t_cdf, student_t_quantile,
};
use remeta::Interval;

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

// Reference values from scipy.stats (norm, chi2, t).
const PHI_1: f64 = 0.841_344_746_068_542_9;
const Z_975: f64 = 1.959_963_984_540_054;
const CHI2_975_1: f64 = 5.023_886_187_314_888;
const CHI2_025_1: f64 = 0.000_982_069_117_175_255_5;
const T_975_11: f64 = 2.200_985_160_082_949;

#[test]
fn normal_examples() {
    assert_eq!(normal_cdf(0.0), 0.5);
    assert!((normal_cdf(1.0) - PHI_1).abs() < 1e-12);
    for x in [0.3, 1.7, 4.2, 9.0] {
        assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() < 1e-15);
    }
    assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
    assert!((normal_quantile(0.975).unwrap() - Z_975).abs() < 1e-12);
    for p in [0.001, 0.2, 0.45] {
        let s = normal_quantile(p).unwrap() + normal_quantile(1.0 - p).unwrap();
        assert!(s.abs() < 1e-12, "p={p}: {s}");
    }
}

#[test]
fn chi_square_examples() {
    assert!((chisq_quantile(0.5, 2.0).unwrap() - 2f64.ln() * 2.0).abs() < 1e-10);
    assert!((chisq_quantile(0.95, 2.0).unwrap() + 2.0 * 0.05f64.ln()).abs() < 1e-10);
    assert!((chisq_quantile(0.975, 1.0).unwrap() - CHI2_975_1).abs() < 1e-9);
    assert!((chisq_quantile(0.025, 1.0).unwrap() - CHI2_025_1).abs() < 1e-12);
    // dof 2 closed form for the CDF as well
    for x in [0.1, 1.0, 3.3, 12.0] {
        assert!((chisq_cdf(x, 2.0) - (1.0 - (-x / 2.0).exp())).abs() < 1e-10);
    }
}

#[test]
fn student_t_examples() {
    for dof in [1.0, 2.5, 11.0, 100.0] {
        assert_eq!(student_t_quantile(0.5, dof).unwrap(), 0.0);
    }
    let cauchy = (std::f64::consts::PI * 0.475).tan();
    assert!((student_t_quantile(0.975, 1.0).unwrap() - cauchy).abs() < 1e-10);
    assert!((student_t_quantile(0.975, 1.0).unwrap() - 12.706_205).abs() < 1e-6);
    assert!((student_t_quantile(0.975, 11.0).unwrap() - T_975_11).abs() < 1e-9);
    for t in [-3.0f64, -0.2, 0.7, 5.0] {
        let closed = 0.5 + t.atan() / std::f64::consts::PI;
        assert!((student_t_cdf(t, 1.0) - closed).abs() < 1e-10);
    }
}

#[test]
fn root_and_minimiser_examples() {
    let r = find_root(|x| x * x - 2.0, iv(0.0, 2.0), 1e-12).unwrap();
    assert!((r - 2f64.sqrt()).abs() < 1e-10);
    let c = 3.7;
    assert!((find_root(|x| x - c, iv(c - 1.0, c + 1.0), 1e-12).unwrap() - c).abs() < 1e-12);
    // fixed-point iteration as the oracle for cos(x) = x
    let mut fp = 0.5f64;
    for _ in 0..200 {
        fp = fp.cos();
    }
    let r = find_root(|x| x.cos() - x, iv(0.0, 1.0), 1e-12).unwrap();
    assert!((r - fp).abs() < 1e-10);
    assert!((r - 0.739_085_1).abs() < 1e-7);

    assert!((minimize_scalar(|x| (x - 2.0).powi(2), iv(0.0, 5.0), 1e-8) - 2.0).abs() < 1e-6);
    assert!(minimize_scalar(f64::abs, iv(-1.0, 3.0), 1e-8).abs() < 1e-6);
    let m = minimize_scalar(|x| x * x.ln(), iv(0.1, 1.0), 1e-8);
    assert!((m - (-1f64).exp()).abs() < 1e-6);
}

#[test]
fn quadrature_examples() {
    let r = integrate(|x| x * x, iv(0.0, 1.0), 1e-10).unwrap();
    assert!((r - 1.0 / 3.0).abs() < 1e-12);
    let r = integrate(f64::sin, iv(0.0, std::f64::consts::PI), 1e-10).unwrap();
    assert!((r - 2.0).abs() < 1e-9);
    let r = integrate(normal_pdf, iv(-8.0, 8.0), 1e-12).unwrap();
    assert!((r - 1.0).abs() < 1e-10);
}

#[test]
fn chi_square_quantile_increasing_in_p() {
    for dof in [0.5, 1.0, 2.0, 4.0, 11.0, 50.0] {
        let mut last = 0.0;
        for i in 1..200 {
            let q = chisq_quantile(i as f64 / 200.0, dof).unwrap();
            assert!(q > last, "dof={dof} p={}", i as f64 / 200.0);
            last = q;
        }
    }
}

proptest! {
    #[test]
    fn normal_quantile_inverts_cdf(x in -6.0f64..6.0) {
        let p = normal_cdf(x);
        let back = normal_quantile(p).unwrap();
        // Storing p already loses ulp(p)/2; mapped back through 1/φ(x) that is
        // ~8e-9 near x = 6, an error no inverse can undo.
        let floor = f64::EPSILON * p / normal_pdf(x);
        prop_assert!((back - x).abs() < 1e-9 + floor, "{} -> {}", x, back);
    }

    #[test]
    fn normal_cdf_monotone(x in -10.0f64..10.0, dx in 0.0f64..1.0) {
        prop_assert!(normal_cdf(x + dx) >= normal_cdf(x));
    }

    #[test]
    fn chi_square_quantile_inverts_cdf(p in 0.001f64..0.999, dof in 0.5f64..60.0) {
        let q = chisq_quantile(p, dof).unwrap();
        prop_assert!((chisq_cdf(q, dof) - p).abs() < 1e-10);
    }

    #[test]
    fn t_quantile_inverts_cdf(p in 0.001f64..0.999, dof in 0.5f64..60.0) {
        let q = student_t_quantile(p, dof).unwrap();
        prop_assert!((student_t_cdf(q, dof) - p).abs() < 1e-10);
    }

    #[test]
    fn root_is_bracketed(c in -50.0f64..50.0, a in 0.1f64..5.0) {
        let f = |x: f64| (x - c) * (1.0 + a * (x - c).powi(2));
        let tol = 1e-10;
        let r = find_root(f, Interval::new(c - 7.0, c + 3.0).unwrap(), tol).unwrap();
        let crosses = f(r - tol).signum() != f(r + tol).signum();
        prop_assert!(crosses || f(r).abs() <= 1e-12 * (1.0 + c.abs()));
    }

    #[test]
    fn integration_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, c0 in -2.0f64..2.0, c3 in -2.0f64..2.0) {
        let f = |x: f64| 1.0 + x - 2.0 * x * x;
        let g = |x: f64| c0 + c3 * x * x * x;
        let dom = Interval::new(-1.0, 2.0).unwrap();
        let combined = integrate(|x| a * f(x) + b * g(x), dom, 1e-10).unwrap();
        let parts = a * integrate(f, dom, 1e-10).unwrap() + b * integrate(g, dom, 1e-10).unwrap();
        prop_assert!((combined - parts).abs() < 1e-9 * (1.0 + combined.abs()));
    }
}
