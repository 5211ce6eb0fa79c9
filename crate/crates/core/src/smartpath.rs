//! The smart path `X_τ = (1−τ)·γ(α,λ) + τ·Y`, where `Y` is `γ(K, λτ/(1−τ))`
//! and `K` is Poisson with mean `λτX/(1−τ)`.
//!
//! Conditionally on `K` the path is `γ(α+K, λ/(1−τ))`, so its density is a
//! Poisson mixture of gamma densities. Summing the series over `K` gives the
//! Bessel form used here; `h` and `k` are the companion sums weighted by
//! `K/u` and `K(K−1)/u²`.

use crate::error::{domain, Error, Result};
use crate::measures::{sample_gamma, GammaParams, SourceMeasure};
use crate::numerics::{integrate_halfline_vec, integrate_span_vec, NumericConfig};
use crate::specfun::{kummer_1f1, ln_bessel_i_scaled, ln_gamma};
use rand::RngCore;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

/// Interpolation time, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Tau(f64);

impl Tau {
    pub fn new(t: f64) -> Result<Self> {
        if t > 0.0 && t < 1.0 {
            Ok(Self(t))
        } else {
            Err(domain(format!("tau must lie in (0, 1), got {t}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Tau {
    type Error = Error;
    fn try_from(t: f64) -> Result<Self> {
        Self::new(t)
    }
}

impl From<Tau> for f64 {
    fn from(t: Tau) -> f64 {
        t.0
    }
}

/// `[log g, log h, log k]` for a point-mass source at `x`.
pub(crate) fn ln_point_terms(t: &GammaParams, tau: f64, x: f64, u: f64) -> [f64; 3] {
    let r = t.lambda / (1.0 - tau);
    let tx = tau * x;
    let z = 2.0 * r * (u * tx).sqrt();
    let (lr, lq) = (r.ln(), (u / tx).ln());
    let gap = u.sqrt() - tx.sqrt();
    let base = -r * gap * gap;
    let mut out = [f64::NEG_INFINITY; 3];
    if z <= 0.0 {
        return out;
    }
    for (j, o) in out.iter_mut().enumerate() {
        let j = j as f64;
        *o =
            (j + 1.0) * lr + 0.5 * (t.alpha - 1.0 - j) * lq + base + ln_bessel_i_scaled(t.alpha - 1.0 + j, z);
    }
    out
}

/// All internal draws behind one sample of `X_τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDraw {
    pub x: f64,
    pub k: u64,
    pub y: f64,
    pub gamma: f64,
    pub value: f64,
}

/// Internals of the half-shift representation
/// `(1−τ)·γ(α−½, λ) + (√τ√X + √((1−τ)/2λ)·Z)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfShiftDraw {
    pub x: f64,
    pub z: f64,
    pub gamma: f64,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct SmartPathModel {
    pub source: SourceMeasure,
    pub target: GammaParams,
    pub numeric: NumericConfig,
}

impl SmartPathModel {
    pub fn new(source: SourceMeasure, target: GammaParams, numeric: NumericConfig) -> Result<Self> {
        numeric.validate()?;
        Ok(Self {
            source,
            target,
            numeric,
        })
    }

    fn check_u(u: f64) -> Result<()> {
        if u > 0.0 && u.is_finite() {
            Ok(())
        } else {
            Err(domain(format!("u must be > 0, got {u}")))
        }
    }

    /// Where the source integrand `x ↦ p(x, u)` lives: for `τ ≥ ½` the kernel
    /// has relative width about `√(2(1−τ)/(λu))` around
    /// `x ≈ (u − (1−τ)α/λ)/τ`, which becomes narrow as `τ → 1`.
    fn source_window(&self, t: f64, u: f64) -> (f64, f64) {
        let rel = (2.0 * (1.0 - t) / (self.target.lambda * u)).sqrt();
        if t >= 0.5 && rel < 0.25 {
            let x = (u - (1.0 - t) * self.target.mean()).max(0.5 * u) / t;
            (x, rel)
        } else {
            ((u / t * self.source.scale()).sqrt(), 1.0)
        }
    }

    /// `∫_0^∞ f(u) du` for integrands carried by the law of `X_τ`. For
    /// atomic sources the mesh spans every peak `τx + (1−τ)α/λ` with panels
    /// narrower than the peaks, which become thin as `τ → 1`.
    pub fn integrate_u<const N: usize, F>(&self, tau: Tau, f: F) -> Result<([f64; N], [f64; N])>
    where
        F: Fn(f64) -> Result<[f64; N]>,
    {
        let t = tau.value();
        let base = (1.0 - t) * self.target.mean();
        let atoms: Vec<f64> = match &self.source {
            SourceMeasure::Dirac(x) => vec![*x],
            SourceMeasure::Atoms(m) => m.atoms().iter().map(|a| a.0).collect(),
            _ => Vec::new(),
        };
        let peaks: Vec<(f64, f64)> = atoms
            .iter()
            .map(|&x| {
                let u = t * x + base;
                let var = (1.0 - t) * (1.0 - t) * self.target.alpha
                    / (self.target.lambda * self.target.lambda)
                    + 2.0 * t * (1.0 - t) * x / self.target.lambda;
                (u, var.sqrt() / u)
            })
            .collect();
        let step = peaks.iter().fold(1.0_f64, |s, p| s.min(0.25 * p.1)).max(1e-4);
        if peaks.is_empty() || step >= 1.0 {
            return integrate_halfline_vec(f, self.mean(tau)?, &self.numeric);
        }
        let lo = peaks.iter().fold(f64::INFINITY, |m, p| m.min(p.0));
        let hi = peaks.iter().fold(0.0_f64, |m, p| m.max(p.0));
        integrate_span_vec(f, lo, hi, step, &self.numeric)
    }

    /// `(g, h, k)` at `(τ, u)`; one pass over the source law.
    pub fn components(&self, tau: Tau, u: f64) -> Result<[f64; 3]> {
        Self::check_u(u)?;
        self.target.require_half_alpha()?;
        let t = tau.value();
        let point = |x: f64| -> Result<[f64; 3]> {
            let l = ln_point_terms(&self.target, t, x, u);
            Ok([l[0].exp(), l[1].exp(), l[2].exp()])
        };
        let (center, step) = self.source_window(t, u);
        Ok(self
            .source
            .expect_vec_scaled(point, center, step, &self.numeric)?
            .0)
    }

    /// Density `g(τ, u)` of `X_τ`.
    pub fn density(&self, tau: Tau, u: f64) -> Result<f64> {
        Self::check_u(u)?;
        self.target.require_half_alpha()?;
        let t = tau.value();
        let point = |x: f64| Ok([ln_point_terms(&self.target, t, x, u)[0].exp()]);
        let (center, step) = self.source_window(t, u);
        Ok(self
            .source
            .expect_vec_scaled(point, center, step, &self.numeric)?
            .0[0])
    }

    pub fn h_function(&self, tau: Tau, u: f64) -> Result<f64> {
        Ok(self.components(tau, u)?[1])
    }

    pub fn k_function(&self, tau: Tau, u: f64) -> Result<f64> {
        Ok(self.components(tau, u)?[2])
    }

    /// `E[e^{−μX_τ}] = (1+μ(1−τ)/λ)^{−α} · L_X(μτ/(1+μ(1−τ)/λ))`.
    pub fn laplace(&self, tau: Tau, mu: f64) -> Result<f64> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(domain(format!("Laplace argument must be >= 0, got {mu}")));
        }
        let t = tau.value();
        let d = 1.0 + mu * (1.0 - t) / self.target.lambda;
        Ok(d.powf(-self.target.alpha) * self.source.laplace(mu * t / d, &self.numeric)?)
    }

    /// `E[X_τ] = (1−τ)α/λ + τE[X]`.
    pub fn mean(&self, tau: Tau) -> Result<f64> {
        let t = tau.value();
        Ok((1.0 - t) * self.target.mean() + t * self.source.mean(&self.numeric)?)
    }

    /// `E[X_τ^β]` through the Kummer-function mixture over the source.
    pub fn moment(&self, tau: Tau, beta: f64) -> Result<f64> {
        let a = self.target.alpha;
        if a + beta <= 0.0 {
            return Err(Error::Divergent(format!(
                "E[X_tau^{beta}] is infinite for alpha = {a}"
            )));
        }
        let t = tau.value();
        let r = self.target.lambda / (1.0 - t);
        let inner = self.source.expect(
            |x| {
                let z = r * t * x;
                Ok((kummer_1f1(a + beta, a, z)?.log_magnitude - z).exp())
            },
            &self.numeric,
        )?;
        Ok((-beta * r.ln() + ln_gamma(a + beta) - ln_gamma(a)).exp() * inner)
    }

    /// `(s, E[e^{s X_τ}])` with `s = μ/(τ + μ(1−τ)/λ)`; the value equals
    /// `(1 + μ(1−τ)/(λτ))^{α} · E[e^{μX}]`.
    pub fn exp_moment(&self, tau: Tau, mu: f64) -> Result<(f64, f64)> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(domain(format!("exponential moment needs mu > 0, got {mu}")));
        }
        let t = tau.value();
        let l = self.target.lambda;
        let s = mu / (t + mu * (1.0 - t) / l);
        let src = self.source.exp_moment(mu, &self.numeric)?;
        if !src.is_finite() {
            return Err(Error::Divergent(format!("E[exp({mu} X)] is infinite")));
        }
        Ok((s, (1.0 + mu * (1.0 - t) / (l * t)).powf(self.target.alpha) * src))
    }

    /// One draw of `X_τ` with its internals.
    pub fn sample_detailed<R: RngCore>(&self, tau: Tau, rng: &mut R) -> PathDraw {
        let t = tau.value();
        let l = self.target.lambda;
        let x = self.source.sample(rng);
        let m = l * t * x / (1.0 - t);
        let k = if m > 0.0 {
            Poisson::new(m).expect("finite Poisson mean").sample(rng) as u64
        } else {
            0
        };
        let y = sample_gamma(k as f64, l * t / (1.0 - t), rng);
        let gamma = self.target.sample(rng);
        PathDraw {
            x,
            k,
            y,
            gamma,
            value: (1.0 - t) * gamma + t * y,
        }
    }

    pub fn sample<R: RngCore>(&self, tau: Tau, rng: &mut R) -> f64 {
        self.sample_detailed(tau, rng).value
    }

    /// Non-central chi-square form, valid when `2α` is a positive integer `p`:
    /// `Σ_{i≤p} (√τ√(X/p) + √((1−τ)/2λ)·Z_i)²`.
    pub fn sample_chi2_rep<R: RngCore>(&self, tau: Tau, rng: &mut R) -> Result<f64> {
        let p2 = 2.0 * self.target.alpha;
        if (p2 - p2.round()).abs() > 1e-12 || p2.round() < 1.0 {
            return Err(domain(format!(
                "chi-square form needs 2*alpha integral, got alpha = {}",
                self.target.alpha
            )));
        }
        let p = p2.round() as usize;
        let t = tau.value();
        let c = ((1.0 - t) / (2.0 * self.target.lambda)).sqrt();
        let shift = (t * self.source.sample(rng) / p as f64).sqrt();
        Ok((0..p)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                let v = shift + c * z;
                v * v
            })
            .sum())
    }

    pub fn sample_halfshift_detailed<R: RngCore>(&self, tau: Tau, rng: &mut R) -> Result<HalfShiftDraw> {
        self.target.require_half_alpha()?;
        let t = tau.value();
        let l = self.target.lambda;
        let x = self.source.sample(rng);
        let z: f64 = StandardNormal.sample(rng);
        let gamma = sample_gamma(self.target.alpha - 0.5, l, rng);
        let v = t.sqrt() * x.sqrt() + ((1.0 - t) / (2.0 * l)).sqrt() * z;
        Ok(HalfShiftDraw {
            x,
            z,
            gamma,
            value: (1.0 - t) * gamma + v * v,
        })
    }

    pub fn sample_halfshift_rep<R: RngCore>(&self, tau: Tau, rng: &mut R) -> Result<f64> {
        Ok(self.sample_halfshift_detailed(tau, rng)?.value)
    }
}

/// One draw of the path built from independent components `X_i`, each
/// model carrying target shape `α/N` and the common rate `λ`.
pub fn sample_convolution<R: RngCore>(models: &[SmartPathModel], tau: Tau, rng: &mut R) -> Result<f64> {
    let first = models
        .first()
        .ok_or_else(|| Error::Invalid("convolution needs at least one component".into()))?;
    let l = first.target.lambda;
    if models.iter().any(|m| m.target.lambda != l) {
        return Err(Error::Invalid(
            "convolution components must share the rate".into(),
        ));
    }
    Ok(models.iter().map(|m| m.sample(tau, rng)).sum())
}
