//! The gamma target and the source laws on `(0, ∞)`.

use crate::error::{domain, Error, Result};
use crate::numerics::{integrate_halfline_vec_scaled, NumericConfig};
use crate::specfun::{digamma, ln_gamma};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Shape `alpha` and rate `lambda` of a gamma law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub alpha: f64,
    pub lambda: f64,
}

impl GammaParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(domain(format!("gamma shape must be > 0, got {alpha}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain(format!("gamma rate must be > 0, got {lambda}")));
        }
        Ok(Self { alpha, lambda })
    }

    /// Fails unless `alpha ≥ 1/2`.
    pub fn require_half_alpha(&self) -> Result<()> {
        if self.alpha >= 0.5 {
            Ok(())
        } else {
            Err(domain(format!("requires alpha >= 1/2, got {}", self.alpha)))
        }
    }

    pub fn ln_pdf(&self, u: f64) -> f64 {
        self.alpha * self.lambda.ln() - ln_gamma(self.alpha) + (self.alpha - 1.0) * u.ln() - self.lambda * u
    }

    pub fn pdf(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(domain(format!("gamma density needs u > 0, got {u}")));
        }
        Ok(self.ln_pdf(u).exp())
    }

    /// `d/du log pdf = (α−1)/u − λ`.
    pub fn score(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(domain(format!("gamma score needs u > 0, got {u}")));
        }
        Ok((self.alpha - 1.0) / u - self.lambda)
    }

    pub fn mean(&self) -> f64 {
        self.alpha / self.lambda
    }

    pub fn laplace(&self, mu: f64) -> f64 {
        (1.0 + mu / self.lambda).powf(-self.alpha)
    }

    pub fn moment(&self, beta: f64) -> Result<f64> {
        if self.alpha + beta <= 0.0 {
            return Err(Error::Divergent(format!(
                "E[X^{beta}] is infinite for shape {}",
                self.alpha
            )));
        }
        Ok((ln_gamma(self.alpha + beta) - ln_gamma(self.alpha) - beta * self.lambda.ln()).exp())
    }

    /// `E[log X] = ψ(α) − log λ`.
    pub fn log_moment(&self) -> f64 {
        digamma(self.alpha).expect("alpha > 0") - self.lambda.ln()
    }

    pub fn exp_moment(&self, mu: f64) -> Result<f64> {
        if mu >= self.lambda {
            return Err(Error::Divergent(format!(
                "E[exp({mu} X)] is infinite for rate {}",
                self.lambda
            )));
        }
        Ok((1.0 - mu / self.lambda).powf(-self.alpha))
    }

    /// Shannon entropy `α − log λ + log Γ(α) + (1−α)ψ(α)`.
    pub fn entropy(&self) -> f64 {
        self.alpha - self.lambda.ln()
            + ln_gamma(self.alpha)
            + (1.0 - self.alpha) * digamma(self.alpha).expect("alpha > 0")
    }

    /// Draws `γ(α, λ)`; shape 0 is the point mass at 0.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_gamma(self.alpha, self.lambda, rng)
    }
}

/// `γ(shape, rate)` draw with `γ(0, ·) ≡ 0`.
pub(crate) fn sample_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> f64 {
    if shape == 0.0 {
        return 0.0;
    }
    Gamma::new(shape, 1.0 / rate)
        .expect("positive gamma parameters")
        .sample(rng)
}

/// Finitely many atoms on `(0, ∞)` with weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomMixture {
    atoms: Vec<(f64, f64)>,
}

impl AtomMixture {
    /// `atoms` holds `(location, weight)` pairs.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Invalid("atom mixture needs at least one atom".into()));
        }
        for &(x, w) in &atoms {
            if !(x > 0.0) || !x.is_finite() {
                return Err(domain(format!("atom location must be > 0, got {x}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(domain(format!("atom weight must be > 0, got {w}")));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!(
                "atom weights must sum to 1 within 1e-12, got {total}"
            )));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Sampler = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;

/// A source law given by its density on `(0, ∞)` together with a sampler.
#[derive(Clone)]
pub struct DensitySource {
    label: String,
    density: RealFn,
    score: Option<RealFn>,
    sampler: Sampler,
    scale: f64,
}

impl fmt::Debug for DensitySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensitySource")
            .field("label", &self.label)
            .field("scale", &self.scale)
            .field("has_score", &self.score.is_some())
            .finish()
    }
}

impl DensitySource {
    /// `scale` is a typical magnitude of the law (its mean, say); it only
    /// steers where quadrature looks first.
    pub fn new<D, S>(label: impl Into<String>, density: D, sampler: S, scale: f64) -> Result<Self>
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        S: Fn(&mut dyn RngCore) -> f64 + Send + Sync + 'static,
    {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(domain(format!("density source scale must be > 0, got {scale}")));
        }
        Ok(Self {
            label: label.into(),
            density: Arc::new(density),
            score: None,
            sampler: Arc::new(sampler),
            scale,
        })
    }

    pub fn with_score<F>(mut self, score: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.score = Some(Arc::new(score));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn density(&self, u: f64) -> f64 {
        (self.density)(u)
    }

    /// `f'(u)/f(u)`: the supplied score, else a Richardson difference of `log f`.
    pub fn score(&self, u: f64) -> f64 {
        match &self.score {
            Some(s) => s(u),
            None => {
                let h = 1e-3 * u;
                let lf = |x: f64| (self.density)(x).ln();
                let d1 = (lf(u + h) - lf(u - h)) / (2.0 * h);
                let d2 = (lf(u + 0.5 * h) - lf(u - 0.5 * h)) / h;
                (4.0 * d2 - d1) / 3.0
            }
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        (self.sampler)(rng)
    }
}

/// The law of the starting point `X`.
#[derive(Debug, Clone)]
pub enum SourceMeasure {
    Dirac(f64),
    Atoms(AtomMixture),
    Gamma(GammaParams),
    Density(DensitySource),
}

impl SourceMeasure {
    pub fn dirac(x0: f64) -> Result<Self> {
        if !(x0 > 0.0) || !x0.is_finite() {
            return Err(domain(format!("Dirac location must be > 0, got {x0}")));
        }
        Ok(Self::Dirac(x0))
    }

    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Ok(Self::Atoms(AtomMixture::new(atoms)?))
    }

    pub fn gamma(alpha: f64, lambda: f64) -> Result<Self> {
        Ok(Self::Gamma(GammaParams::new(alpha, lambda)?))
    }

    /// Finite mixture `Σ w_i γ(a_i, b_i)` as a density source with exact score.
    pub fn gamma_mixture(components: Vec<(f64, GammaParams)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid("gamma mixture needs a component".into()));
        }
        for &(w, _) in &components {
            if !(w > 0.0) || !w.is_finite() {
                return Err(domain(format!("mixture weight must be > 0, got {w}")));
            }
        }
        let total: f64 = components.iter().map(|c| c.0).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!(
                "mixture weights must sum to 1 within 1e-12, got {total}"
            )));
        }
        let mean: f64 = components.iter().map(|(w, p)| w * p.mean()).sum();
        let label = components
            .iter()
            .map(|(w, p)| format!("{w}*gamma({}, {})", p.alpha, p.lambda))
            .collect::<Vec<_>>()
            .join(" + ");
        let dens = components.clone();
        let score_parts = components.clone();
        let draw = components.clone();
        let src = DensitySource::new(
            label,
            move |u| dens.iter().map(|(w, p)| w * p.ln_pdf(u).exp()).sum(),
            move |rng| {
                let mut v: f64 = rng.random();
                for (w, p) in &draw {
                    if v < *w {
                        return p.sample(rng);
                    }
                    v -= w;
                }
                draw.last().expect("non-empty").1.sample(rng)
            },
            mean,
        )?
        .with_score(move |u| {
            // log-sum-exp weighted average of component scores
            let logs: Vec<f64> = score_parts.iter().map(|(w, p)| w.ln() + p.ln_pdf(u)).collect();
            let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let (mut num, mut den) = (0.0, 0.0);
            for ((_, p), l) in score_parts.iter().zip(&logs) {
                let r = (l - m).exp();
                num += r * ((p.alpha - 1.0) / u - p.lambda);
                den += r;
            }
            num / den
        });
        Ok(Self::Density(src))
    }

    pub fn has_density(&self) -> bool {
        matches!(self, Self::Gamma(_) | Self::Density(_))
    }

    /// Density at `u`, if the law has one.
    pub fn density(&self, u: f64) -> Option<f64> {
        match self {
            Self::Gamma(p) => Some(if u > 0.0 { p.ln_pdf(u).exp() } else { 0.0 }),
            Self::Density(d) => Some(if u > 0.0 { d.density(u) } else { 0.0 }),
            _ => None,
        }
    }

    /// Score `f'/f` at `u`, if the law has a density.
    pub fn score(&self, u: f64) -> Option<f64> {
        match self {
            Self::Gamma(p) => Some((p.alpha - 1.0) / u - p.lambda),
            Self::Density(d) => Some(d.score(u)),
            _ => None,
        }
    }

    pub fn sample<R: RngCore>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Dirac(x) => *x,
            Self::Atoms(m) => {
                let mut v: f64 = rng.random();
                for &(x, w) in m.atoms() {
                    if v < w {
                        return x;
                    }
                    v -= w;
                }
                m.atoms().last().expect("non-empty").0
            }
            Self::Gamma(p) => p.sample(rng),
            Self::Density(d) => d.sample(rng),
        }
    }

    /// Typical magnitude, used to centre quadrature.
    pub fn scale(&self) -> f64 {
        match self {
            Self::Dirac(x) => *x,
            Self::Atoms(m) => m.atoms().iter().map(|(x, w)| x * w).sum(),
            Self::Gamma(p) => p.mean(),
            Self::Density(d) => d.scale(),
        }
    }

    /// `E[φ(X)]` for a vector of test functions: exact sums for atomic laws,
    /// quadrature against the density (mapped around `center`) otherwise.
    pub fn expect_vec_around<const N: usize, F>(
        &self,
        phi: F,
        center: f64,
        cfg: &NumericConfig,
    ) -> Result<([f64; N], [f64; N])>
    where
        F: Fn(f64) -> Result<[f64; N]>,
    {
        self.expect_vec_scaled(phi, center, 1.0, cfg)
    }

    /// [`Self::expect_vec_around`] for test functions concentrated in a
    /// window of relative width `step` around `center`.
    pub fn expect_vec_scaled<const N: usize, F>(
        &self,
        phi: F,
        center: f64,
        step: f64,
        cfg: &NumericConfig,
    ) -> Result<([f64; N], [f64; N])>
    where
        F: Fn(f64) -> Result<[f64; N]>,
    {
        match self {
            Self::Dirac(x) => Ok((phi(*x)?, [0.0; N])),
            Self::Atoms(m) => {
                let mut acc = [0.0; N];
                for &(x, w) in m.atoms() {
                    let v = phi(x)?;
                    for c in 0..N {
                        acc[c] += w * v[c];
                    }
                }
                Ok((acc, [0.0; N]))
            }
            _ => integrate_halfline_vec_scaled(
                |x| {
                    let f = self.density(x).expect("has density");
                    if f == 0.0 {
                        return Ok([0.0; N]);
                    }
                    let mut v = phi(x)?;
                    for y in v.iter_mut() {
                        *y *= f;
                    }
                    Ok(v)
                },
                center,
                step,
                cfg,
            ),
        }
    }

    pub fn expect<F>(&self, phi: F, cfg: &NumericConfig) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        Ok(self
            .expect_vec_around(|x| phi(x).map(|v| [v]), self.scale(), cfg)?
            .0[0])
    }

    /// `E[e^{−μX}]`.
    pub fn laplace(&self, mu: f64, cfg: &NumericConfig) -> Result<f64> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(domain(format!("Laplace argument must be >= 0, got {mu}")));
        }
        match self {
            Self::Gamma(p) => Ok(p.laplace(mu)),
            _ => self.expect(|x| Ok((-mu * x).exp()), cfg),
        }
    }

    /// `E[X^β]`.
    pub fn moment(&self, beta: f64, cfg: &NumericConfig) -> Result<f64> {
        match self {
            Self::Gamma(p) => p.moment(beta),
            _ => self.expect(|x| Ok(x.powf(beta)), cfg),
        }
    }

    pub fn mean(&self, cfg: &NumericConfig) -> Result<f64> {
        match self {
            Self::Dirac(x) => Ok(*x),
            Self::Gamma(p) => Ok(p.mean()),
            _ => self.moment(1.0, cfg),
        }
    }

    /// `E[log X]`.
    pub fn log_moment(&self, cfg: &NumericConfig) -> Result<f64> {
        match self {
            Self::Gamma(p) => Ok(p.log_moment()),
            _ => self.expect(|x| Ok(x.ln()), cfg),
        }
    }

    /// `E[e^{μX}]`.
    pub fn exp_moment(&self, mu: f64, cfg: &NumericConfig) -> Result<f64> {
        match self {
            Self::Gamma(p) => p.exp_moment(mu),
            _ => self.expect(|x| Ok((mu * x).exp()), cfg),
        }
    }

    /// Whether `E[X] = α/λ` for `target` to relative tolerance `tol`.
    pub fn is_mean_matched(&self, target: &GammaParams, tol: f64, cfg: &NumericConfig) -> Result<bool> {
        let m = self.mean(cfg)?;
        Ok((m - target.mean()).abs() <= tol * target.mean())
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Dirac(x) => format!("dirac({x})"),
            Self::Atoms(m) => format!(
                "atoms[{}]",
                m.atoms()
                    .iter()
                    .map(|(x, w)| format!("{x}:{w}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            Self::Gamma(p) => format!("gamma({}, {})", p.alpha, p.lambda),
            Self::Density(d) => d.label().to_string(),
        }
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return Err(Error::NoConvergence(format!(
            "no sign change on [{lo}, {hi}]: {flo:e}, {fhi:e}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Two-component gamma mixture `w·γ(a1, b) + (1−w)·γ(a2, b)` whose mean and
/// mean logarithm both equal those of `target`. Needs `a1 < α < a2`.
pub fn log_moment_matched_mixture(target: &GammaParams, a1: f64, a2: f64) -> Result<SourceMeasure> {
    let alpha = target.alpha;
    if !(a1 > 0.0 && a1 < alpha && alpha < a2) {
        return Err(domain(format!(
            "need 0 < a1 < alpha < a2, got {a1}, {alpha}, {a2}"
        )));
    }
    let (p1, p2) = (digamma(a1)?, digamma(a2)?);
    let pa = digamma(alpha)?;
    // shared rate b = λ·mean_shape/α fixes the mean; w fixes E[log X]
    let gap = |w: f64| {
        let shape = w * a1 + (1.0 - w) * a2;
        w * p1 + (1.0 - w) * p2 - shape.ln() + alpha.ln() - pa
    };
    let w = bisect(gap, 1e-12, 1.0 - 1e-12)?;
    let b = target.lambda * (w * a1 + (1.0 - w) * a2) / alpha;
    SourceMeasure::gamma_mixture(vec![
        (w, GammaParams::new(a1, b)?),
        (1.0 - w, GammaParams::new(a2, b)?),
    ])
}

/// Two-component mixture `w·γ(a1, b) + (1−w)·γ(a2, b)`, mean-matched to
/// `target`, whose Stein kernel stays bounded at the origin, i.e.
/// `λ·E[X^{1/2}] = (α − 1/2)·E[X^{−1/2}]`. Needs `1/2 < a1 < α < a2`.
pub fn stein_admissible_mixture(target: &GammaParams, a1: f64, a2: f64) -> Result<SourceMeasure> {
    let alpha = target.alpha;
    if !(a1 > 0.5 && a1 < alpha && alpha < a2) {
        return Err(domain(format!(
            "need 1/2 < a1 < alpha < a2, got {a1}, {alpha}, {a2}"
        )));
    }
    let rho = |a: f64| (ln_gamma(a + 0.5) - ln_gamma(a)).exp();
    let sigma = |a: f64| (ln_gamma(a - 0.5) - ln_gamma(a)).exp();
    let (r1, r2, s1, s2) = (rho(a1), rho(a2), sigma(a1), sigma(a2));
    let gap = |w: f64| {
        let shape = w * a1 + (1.0 - w) * a2;
        let s = w * s1 + (1.0 - w) * s2;
        let r = w * r1 + (1.0 - w) * r2;
        (alpha - 0.5) * shape * s - alpha * r
    };
    let w = bisect(gap, 1e-12, 1.0 - 1e-12)?;
    let b = target.lambda * (w * a1 + (1.0 - w) * a2) / alpha;
    SourceMeasure::gamma_mixture(vec![
        (w, GammaParams::new(a1, b)?),
        (1.0 - w, GammaParams::new(a2, b)?),
    ])
}
