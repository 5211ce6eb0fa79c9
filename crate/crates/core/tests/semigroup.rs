use proptest::prelude::*;
use smartpath::laguerre::{apply, apply_mc, bismut, dsigma_apply, kernel};
use smartpath::measures::GammaParams;
use smartpath::numerics::{derivative_fd, integrate_halfline_around, NumericConfig};
use smartpath::smartpath::Tau;

fn tau(t: f64) -> Tau {
    Tau::new(t).unwrap()
}

fn f(u: f64) -> f64 {
    (-0.7 * u).exp() + 0.3 * u.sqrt()
}

fn df(u: f64) -> f64 {
    -0.7 * (-0.7 * u).exp() + 0.15 / u.sqrt()
}

/// `√x·d/dx P_τ f(x)` by finite differences of the quadrature semigroup.
fn dsigma_fd(p: &GammaParams, t: f64, x: f64) -> f64 {
    let cfg = NumericConfig::default();
    x.sqrt() * derivative_fd(|y| apply(p, f, tau(t), y, &cfg), x, &cfg).unwrap()
}

#[test]
fn bismut_first_order_matches_finite_differences() {
    let p = GammaParams::new(2.0, 1.0).unwrap();
    for (t, x) in [(0.3, 1.0), (0.6, 2.5), (0.8, 0.5)] {
        let est = bismut(&p, f, tau(t), x, 1, 100_000, 7).unwrap();
        let fd = dsigma_fd(&p, t, x);
        let tol = (3.0 * est.error_bound).max(1e-4);
        assert!(
            (est.value - fd).abs() < tol,
            "t={t} x={x}: {} +- {} vs {fd}",
            est.value,
            est.error_bound
        );
    }
}

#[test]
fn intertwined_derivative_matches_finite_differences() {
    let p = GammaParams::new(1.5, 2.0).unwrap();
    for (t, x) in [(0.4, 0.8), (0.7, 1.6)] {
        let (est, max_w) = dsigma_apply(&p, df, tau(t), x, 100_000, 11).unwrap();
        let fd = dsigma_fd(&p, t, x);
        assert!(max_w <= 1.0 + 1e-12);
        assert!(
            (est.value - fd).abs() < (4.0 * est.error_bound).max(1e-4),
            "{} vs {fd}",
            est.value
        );
    }
}

#[test]
fn monte_carlo_semigroup_matches_quadrature() {
    let p = GammaParams::new(3.0, 0.5).unwrap();
    let cfg = NumericConfig::default();
    for (t, x) in [(0.2, 4.0), (0.9, 7.0)] {
        let q = apply(&p, f, tau(t), x, &cfg).unwrap();
        let mc = apply_mc(&p, f, tau(t), x, 100_000, 3).unwrap();
        assert!(
            (mc.value - q).abs() < 4.0 * mc.error_bound,
            "{} +- {} vs {q}",
            mc.value,
            mc.error_bound
        );
    }
}

#[test]
fn bismut_rejects_order_zero() {
    let p = GammaParams::new(2.0, 1.0).unwrap();
    assert!(bismut(&p, f, tau(0.5), 1.0, 0, 10, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn detailed_balance(
        alpha in 0.5f64..6.0,
        lambda in 0.2f64..4.0,
        t in 0.01f64..0.99,
        x in 0.05f64..6.0,
        u in 0.05f64..6.0,
    ) {
        let p = GammaParams::new(alpha, lambda).unwrap();
        let (x, u) = (x / lambda, u / lambda);
        let lhs = p.ln_pdf(x) + kernel(&p, tau(t), x, u).unwrap().ln();
        let rhs = p.ln_pdf(u) + kernel(&p, tau(t), u, x).unwrap().ln();
        prop_assume!(lhs > -600.0);
        prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn kernel_is_a_probability_density(alpha in 0.5f64..6.0, t in 0.01f64..0.99, x in 0.05f64..8.0) {
        let p = GammaParams::new(alpha, 1.0).unwrap();
        let cfg = NumericConfig::default();
        let center = (1.0 - t) * p.mean() + t * x;
        let mass = integrate_halfline_around(|u| kernel(&p, tau(t), x, u), center, &cfg).unwrap().value;
        prop_assert!((mass - 1.0).abs() < 1e-9, "mass {}", mass);
    }

    #[test]
    fn gamma_is_invariant(alpha in 0.5f64..5.0, t in 0.05f64..0.95, u in 0.1f64..8.0) {
        let p = GammaParams::new(alpha, 1.0).unwrap();
        let cfg = NumericConfig::default();
        let v = integrate_halfline_around(
            |x| Ok(p.pdf(x)? * kernel(&p, tau(t), x, u)?),
            p.mean(),
            &cfg,
        )
        .unwrap()
        .value;
        let want = p.pdf(u).unwrap();
        prop_assert!((v - want).abs() < 1e-9 * want.max(1e-300), "{} vs {}", v, want);
    }

    #[test]
    fn chapman_kolmogorov(t in 0.1f64..0.9, s in 0.1f64..0.9, x in 0.2f64..5.0, u in 0.2f64..5.0) {
        let p = GammaParams::new(2.0, 1.0).unwrap();
        let cfg = NumericConfig::default();
        let center = (1.0 - t) * p.mean() + t * x;
        let composed = integrate_halfline_around(
            |v| Ok(kernel(&p, tau(t), x, v)? * kernel(&p, tau(s), v, u)?),
            center,
            &cfg,
        )
        .unwrap()
        .value;
        let direct = kernel(&p, tau(t * s), x, u).unwrap();
        prop_assert!((composed - direct).abs() < 1e-9 * direct.max(1e-300), "{} vs {}", composed, direct);
    }
}
