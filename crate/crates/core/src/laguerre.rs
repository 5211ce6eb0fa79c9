//! Laguerre semigroup indexed by `τ = e^{−λt}`: transition kernel, its
//! action on functions, the intertwined derivative `∂^σ = √x·d/dx` and the
//! Hermite-weighted Bismut formulas.
//!
//! Monte Carlo variants draw `X^x_τ = (1−τ)·γ(α−½, λ) + (√τ√x + cZ)²` with
//! `c = √((1−τ)/2λ)`; the Gaussian and gamma draws do not depend on `x`, so
//! two starting points evaluated with one seed share random numbers.

use crate::error::{domain, Result};
use crate::measures::{sample_gamma, GammaParams};
use crate::numerics::{integrate_halfline_around, mc_draws, mean_stderr, Estimate, NumericConfig};
use crate::smartpath::{ln_point_terms, Tau};
use crate::specfun::hermite;
use rand_distr::{Distribution, StandardNormal};

/// A start point, end point and time for the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub x: f64,
    pub u: f64,
    pub tau: Tau,
}

impl KernelPoint {
    pub fn new(x: f64, u: f64, tau: Tau) -> Result<Self> {
        if !(x > 0.0) || !(u > 0.0) {
            return Err(domain(format!("kernel points must be > 0, got x={x}, u={u}")));
        }
        Ok(Self { x, u, tau })
    }
}

/// Transition density `p_τ(x, u)`.
pub fn kernel(p: &GammaParams, tau: Tau, x: f64, u: f64) -> Result<f64> {
    let pt = KernelPoint::new(x, u, tau)?;
    p.require_half_alpha()?;
    Ok(ln_point_terms(p, pt.tau.value(), pt.x, pt.u)[0].exp())
}

/// `P_τ f(x) = ∫ f(u) p_τ(x, u) du` by quadrature.
pub fn apply<F>(p: &GammaParams, f: F, tau: Tau, x: f64, cfg: &NumericConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let t = tau.value();
    let center = (1.0 - t) * p.mean() + t * x;
    kernel(p, tau, x, center)?;
    Ok(integrate_halfline_around(|u| Ok(f(u) * kernel(p, tau, x, u)?), center, cfg)?.value)
}

struct Draw {
    z: f64,
    gamma: f64,
}

fn draws(p: &GammaParams, n: usize, seed: u64) -> Vec<Draw> {
    let shape = p.alpha - 0.5;
    mc_draws(n, seed, |rng| Draw {
        z: StandardNormal.sample(rng),
        gamma: sample_gamma(shape, p.lambda, rng),
    })
}

fn endpoint(t: f64, c: f64, x: f64, d: &Draw) -> (f64, f64) {
    let shift = t.sqrt() * x.sqrt() + c * d.z;
    ((1.0 - t) * d.gamma + shift * shift, shift)
}

/// `P_τ f(x)` by Monte Carlo over the half-shift representation.
pub fn apply_mc<F>(p: &GammaParams, f: F, tau: Tau, x: f64, n: usize, seed: u64) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    p.require_half_alpha()?;
    let t = tau.value();
    let c = ((1.0 - t) / (2.0 * p.lambda)).sqrt();
    let vals: Vec<f64> = draws(p, n, seed)
        .iter()
        .map(|d| f(endpoint(t, c, x, d).0))
        .collect();
    Ok(mean_stderr(&vals))
}

/// `√x·∂_x P_τ f(x)` as `√τ·E[𝒱·∂^σ f(X^x_τ)]` with
/// `𝒱 = (√τ√x + cZ)/√X^x_τ`; `df` is `f'`. Also returns `max |𝒱|`.
pub fn dsigma_apply<F>(
    p: &GammaParams,
    df: F,
    tau: Tau,
    x: f64,
    n: usize,
    seed: u64,
) -> Result<(Estimate, f64)>
where
    F: Fn(f64) -> f64,
{
    p.require_half_alpha()?;
    let t = tau.value();
    let c = ((1.0 - t) / (2.0 * p.lambda)).sqrt();
    let mut max_w = 0.0_f64;
    let vals: Vec<f64> = draws(p, n, seed)
        .iter()
        .map(|d| {
            let (v, shift) = endpoint(t, c, x, d);
            if v > 0.0 {
                max_w = max_w.max(shift.abs() / v.sqrt());
            }
            // V · √v f'(v) = shift · f'(v)
            t.sqrt() * shift * df(v)
        })
        .collect();
    Ok((mean_stderr(&vals), max_w))
}

/// `(λ/2)^{k/2} (τ/(1−τ))^{k/2}`.
pub fn bismut_prefactor(p: &GammaParams, tau: Tau, k: u32) -> f64 {
    let t = tau.value();
    (0.5 * p.lambda * t / (1.0 - t)).powf(0.5 * f64::from(k))
}

/// `(∂^σ)^k P_τ f(x) = prefactor · E[H_k(Z) f(X^x_τ)]`.
pub fn bismut<F>(p: &GammaParams, f: F, tau: Tau, x: f64, k: u32, n: usize, seed: u64) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    p.require_half_alpha()?;
    if k == 0 {
        return Err(domain("Bismut formula needs k >= 1"));
    }
    let t = tau.value();
    let c = ((1.0 - t) / (2.0 * p.lambda)).sqrt();
    let pre = bismut_prefactor(p, tau, k);
    let vals: Vec<f64> = draws(p, n, seed)
        .iter()
        .map(|d| pre * hermite(k, d.z) * f(endpoint(t, c, x, d).0))
        .collect();
    Ok(mean_stderr(&vals))
}
