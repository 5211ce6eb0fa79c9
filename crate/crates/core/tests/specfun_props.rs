use proptest::prelude::*;
use smartpath::numerics::{integrate_interval, NumericConfig};
use smartpath::specfun::{bessel_i_scaled, digamma, hermite, kummer_1f1, log_gamma};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn log_gamma_matches_statrs() {
    for &x in &[0.1, 0.5, 1.0, 1.5, 2.5, 7.25, 30.0, 171.5] {
        let ours = log_gamma(x).unwrap();
        let oracle = statrs::function::gamma::ln_gamma(x);
        assert!(
            (ours - oracle).abs() <= 1e-12 * oracle.abs().max(1.0),
            "x={x}: {ours} vs {oracle}"
        );
    }
}

#[test]
fn digamma_matches_statrs() {
    for &x in &[0.25, 0.5, 1.0, 3.0, 12.5, 100.0] {
        let ours = digamma(x).unwrap();
        let oracle = statrs::function::gamma::digamma(x);
        assert!(
            (ours - oracle).abs() <= 1e-12 * oracle.abs().max(1.0),
            "x={x}: {ours} vs {oracle}"
        );
    }
}

#[test]
fn hermite_orthogonal_under_gaussian() {
    // Off-diagonal integrals are exactly zero, so only the absolute tolerance can be met.
    let cfg = NumericConfig {
        quad_abs_tol: 1e-12,
        ..NumericConfig::default()
    };
    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    for j in 0..6u32 {
        for k in 0..6u32 {
            let v = integrate_interval(|z| Ok(hermite(j, z) * hermite(k, z) * phi(z)), -14.0, 14.0, &cfg)
                .unwrap()
                .value;
            let want = if j == k {
                (1..=k).map(f64::from).product()
            } else {
                0.0
            };
            assert!((v - want).abs() < 1e-9, "<He_{j}, He_{k}> = {v}, want {want}");
        }
    }
}

#[test]
fn kummer_reduces_to_exponential() {
    for &z in &[0.0, 0.3, 5.0, 40.0, 600.0] {
        let v = kummer_1f1(2.5, 2.5, z).unwrap();
        assert!((v.log_magnitude - z).abs() < 1e-10 * z.max(1.0), "z={z}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bessel_three_term_recurrence(nu in 1.5f64..40.0, z in 0.05f64..200.0) {
        let lo = bessel_i_scaled(nu - 1.0, z).unwrap();
        let mid = bessel_i_scaled(nu, z).unwrap();
        let hi = bessel_i_scaled(nu + 1.0, z).unwrap();
        prop_assume!(mid > 1e-280);
        let lhs = lo - hi;
        let rhs = 2.0 * nu / z * mid;
        prop_assert!(rel(lhs, rhs) < 1e-9, "nu={} z={}: {} vs {}", nu, z, lhs, rhs);
    }

    #[test]
    fn bessel_positive_and_decreasing_in_order(nu in 0.5f64..30.0, z in 0.01f64..100.0) {
        let a = bessel_i_scaled(nu, z).unwrap();
        let b = bessel_i_scaled(nu + 1.0, z).unwrap();
        prop_assert!(a >= 0.0 && b >= 0.0);
        prop_assert!(b <= a * (1.0 + 1e-12));
    }

    #[test]
    fn kummer_at_least_one(a in 0.01f64..20.0, b in 0.01f64..20.0, z in 0.0f64..300.0) {
        let v = kummer_1f1(a, b, z).unwrap();
        prop_assert!(v.log_magnitude >= -1e-14);
    }

    #[test]
    fn log_gamma_recurrence(x in 0.01f64..150.0) {
        let lhs = log_gamma(x + 1.0).unwrap();
        let rhs = log_gamma(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn digamma_recurrence(x in 0.05f64..150.0) {
        let lhs = digamma(x + 1.0).unwrap();
        let rhs = digamma(x).unwrap() + 1.0 / x;
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
    }
}
