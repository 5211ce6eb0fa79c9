//! Entropy and Fisher-information functionals relative to the gamma target,
//! the Stein kernel and the Stein discrepancy.
//!
//! Path functionals are quadratures in `u` of expressions in `(g, h)`: the
//! score gap `ρ_{X_τ} − ρ_{α,λ}` equals `h/g − λτ/(1−τ)`.

use crate::error::{Error, Result};
use crate::measures::{GammaParams, SourceMeasure};
use crate::numerics::{
    integrate_halfline_around, integrate_interval, mc_draws, mean_stderr, Estimate, EstimateKind,
    NumericConfig,
};
use crate::smartpath::{SmartPathModel, Tau};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Densities below this are treated as zero inside integrands.
pub const DENSITY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoFunctionalResult {
    pub value: f64,
    pub method: EstimateKind,
    pub error_bound: f64,
}

impl From<Estimate> for InfoFunctionalResult {
    fn from(e: Estimate) -> Self {
        Self {
            value: e.value,
            method: e.kind,
            error_bound: e.error_bound,
        }
    }
}

fn quad(value: f64, error_bound: f64) -> InfoFunctionalResult {
    InfoFunctionalResult {
        value,
        method: EstimateKind::Quadrature,
        error_bound,
    }
}

/// `g log(g/γ) − g + γ`, which is pointwise non-negative and integrates to the
/// relative entropy when both densities are normalized.
fn entropy_integrand(g: f64, ln_gamma_pdf: f64) -> f64 {
    let gam = ln_gamma_pdf.exp();
    if g < DENSITY_FLOOR {
        return gam;
    }
    g * (g.ln() - ln_gamma_pdf) - g + gam
}

/// `D(X_τ ‖ γ_{α,λ})`.
pub fn relative_entropy(model: &SmartPathModel, tau: Tau) -> Result<InfoFunctionalResult> {
    model.target.require_half_alpha()?;
    let t = &model.target;
    let (v, e) = model.integrate_u(tau, |u| {
        Ok([entropy_integrand(model.density(tau, u)?, t.ln_pdf(u))])
    })?;
    Ok(quad(v[0], e[0]))
}

/// `D(X ‖ γ_{α,λ})` for a source with a density.
pub fn relative_entropy_source(
    source: &SourceMeasure,
    target: &GammaParams,
    cfg: &NumericConfig,
) -> Result<InfoFunctionalResult> {
    if !source.has_density() {
        return Err(Error::Divergent(
            "relative entropy of a law without density is infinite".into(),
        ));
    }
    let e = integrate_halfline_around(
        |u| {
            Ok(entropy_integrand(
                source.density(u).expect("density"),
                target.ln_pdf(u),
            ))
        },
        source.scale(),
        cfg,
    )?;
    Ok(quad(e.value, e.error_bound))
}

/// Shannon entropy `−∫ f log f` of a normalized density on `(0, ∞)`.
pub fn shannon_entropy<F>(density: F, center: f64, cfg: &NumericConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    Ok(integrate_halfline_around(
        |u| {
            let f = density(u);
            Ok(if f < DENSITY_FLOOR { 0.0 } else { -f * f.ln() })
        },
        center,
        cfg,
    )?
    .value)
}

/// `(I^τ, J)`: the localized Fisher information `∫ u h²/g` and the
/// standardized one `∫ u (h/g − λτ/(1−τ))² g`, on one quadrature mesh.
pub fn fisher_pair(model: &SmartPathModel, tau: Tau) -> Result<(InfoFunctionalResult, InfoFunctionalResult)> {
    model.target.require_half_alpha()?;
    let t = tau.value();
    let shift = model.target.lambda * t / (1.0 - t);
    let (v, e) = model.integrate_u(tau, |u| {
        let [g, h, _] = model.components(tau, u)?;
        if g < DENSITY_FLOOR {
            return Ok([0.0, 0.0]);
        }
        let q = h / g;
        Ok([u * h * q, u * (q - shift) * (q - shift) * g])
    })?;
    Ok((quad(v[0], e[0]), quad(v[1], e[1])))
}

/// `I^τ_γ(X_τ)`.
pub fn localized_fisher(model: &SmartPathModel, tau: Tau) -> Result<InfoFunctionalResult> {
    Ok(fisher_pair(model, tau)?.0)
}

/// `J_{st,γ}(X_τ)`.
pub fn standardized_fisher_path(model: &SmartPathModel, tau: Tau) -> Result<InfoFunctionalResult> {
    Ok(fisher_pair(model, tau)?.1)
}

/// `J_{st,γ}(X) = ∫ u (f'/f − (α−1)/u + λ)² f`.
pub fn standardized_fisher_source(
    source: &SourceMeasure,
    target: &GammaParams,
    cfg: &NumericConfig,
) -> Result<InfoFunctionalResult> {
    if !source.has_density() {
        return Err(Error::Divergent(
            "Fisher information of a law without density is infinite".into(),
        ));
    }
    let e = integrate_halfline_around(
        |u| {
            let f = source.density(u).expect("density");
            if f < DENSITY_FLOOR {
                return Ok(0.0);
            }
            let d = source.score(u).expect("density") - (target.alpha - 1.0) / u + target.lambda;
            Ok(u * d * d * f)
        },
        source.scale(),
        cfg,
    )?;
    Ok(quad(e.value, e.error_bound))
}

/// Stein kernel of a source with density,
/// `τ_X(x) = (√x f(x))^{−1} ∫_x^∞ (λv − α + ½) v^{−½} f(v) dv`.
///
/// Below the source scale the tail is written as `T(0) − ∫_0^x`, which keeps
/// relative accuracy where `T(x)` is small. `T(0) = λE[X^½] − (α−½)E[X^{−½}]`
/// is snapped to zero when it vanishes to quadrature precision; otherwise
/// `τ_X` blows up like `x^{−½}/f(x)` at the origin.
#[derive(Debug, Clone)]
pub struct SteinKernel<'a> {
    source: &'a SourceMeasure,
    target: GammaParams,
    cfg: NumericConfig,
    t0: f64,
    bounded_at_origin: bool,
}

impl<'a> SteinKernel<'a> {
    pub fn new(source: &'a SourceMeasure, target: &GammaParams, cfg: &NumericConfig) -> Result<Self> {
        target.require_half_alpha()?;
        if !source.has_density() {
            return Err(Error::Invalid("Stein kernel needs a source with density".into()));
        }
        let (a, l) = (target.alpha, target.lambda);
        let (m, _) = source.expect_vec_around(
            |x| {
                let s = x.sqrt();
                Ok([s, if a > 0.5 { 1.0 / s } else { 0.0 }])
            },
            source.scale(),
            cfg,
        )?;
        let (pos, neg) = (l * m[0], (a - 0.5) * m[1]);
        let t0 = pos - neg;
        let bounded = t0.abs() <= 1e-9 * (pos + neg);
        Ok(Self {
            source,
            target: *target,
            cfg: cfg.clone(),
            t0: if bounded { 0.0 } else { t0 },
            bounded_at_origin: bounded,
        })
    }

    /// `T(0)` after snapping.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Whether `λE[X^½] = (α−½)E[X^{−½}]`, the condition for `τ_X` to stay
    /// square-integrable near the origin.
    pub fn bounded_at_origin(&self) -> bool {
        self.bounded_at_origin
    }

    fn phi(&self, v: f64) -> f64 {
        let f = self.source.density(v).expect("density");
        (self.target.lambda * v - self.target.alpha + 0.5) * f / v.sqrt()
    }

    /// `T(x) = ∫_x^∞ (λv − α + ½) v^{−½} f(v) dv`.
    pub fn tail(&self, x: f64) -> Result<f64> {
        if x <= self.source.scale() {
            // ∫_0^x φ = ∫_0^∞ φ(x/(1+w)) x/(1+w)² dw
            let head = integrate_halfline_around(
                |w| {
                    let d = 1.0 + w;
                    Ok(self.phi(x / d) * x / (d * d))
                },
                1.0,
                &self.cfg,
            )?;
            Ok(self.t0 - head.value)
        } else {
            Ok(integrate_halfline_around(|w| Ok(self.phi(x + w)), x, &self.cfg)?.value)
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("Stein kernel needs x > 0, got {x}")));
        }
        let f = self.source.density(x).expect("density");
        if f < DENSITY_FLOOR {
            return Err(Error::Domain(format!("source density underflows at x = {x}")));
        }
        Ok(self.tail(x)? / (x.sqrt() * f))
    }
}

/// `τ_X(x)`.
pub fn stein_kernel(
    source: &SourceMeasure,
    target: &GammaParams,
    x: f64,
    cfg: &NumericConfig,
) -> Result<f64> {
    SteinKernel::new(source, target, cfg)?.eval(x)
}

/// Smooth bump supported on `[c − w, c + w]`.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    pub fn value(&self, x: f64) -> f64 {
        let y = (x - self.center) / self.half_width;
        if y.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - y * y)).exp()
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let y = (x - self.center) / self.half_width;
        if y.abs() >= 1.0 {
            0.0
        } else {
            let d = 1.0 - y * y;
            -2.0 * y / (d * d) * (-1.0 / d).exp() / self.half_width
        }
    }
}

/// Test functions for the defining identity of the Stein kernel.
pub const STEIN_BUMPS: [Bump; 5] = [
    Bump {
        center: 0.5,
        half_width: 0.4,
    },
    Bump {
        center: 1.0,
        half_width: 0.8,
    },
    Bump {
        center: 2.0,
        half_width: 1.5,
    },
    Bump {
        center: 3.0,
        half_width: 2.0,
    },
    Bump {
        center: 5.0,
        half_width: 3.0,
    },
];

/// One test function's two sides of
/// `E[(λX − α + ½)φ(X)] = E[τ_X(X)(φ(X)/2 + Xφ'(X))]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinIdentityResidual {
    pub lhs: f64,
    pub rhs: f64,
}

/// Both sides of the Stein identity for every bump in [`STEIN_BUMPS`].
pub fn stein_identity_residuals(kernel: &SteinKernel<'_>) -> Result<Vec<SteinIdentityResidual>> {
    let (a, l) = (kernel.target.alpha, kernel.target.lambda);
    let src = kernel.source;
    STEIN_BUMPS
        .iter()
        .map(|b| {
            let (lo, hi) = (b.center - b.half_width, b.center + b.half_width);
            let lhs = integrate_interval(
                |x| Ok((l * x - a + 0.5) * b.value(x) * src.density(x).expect("density")),
                lo,
                hi,
                &kernel.cfg,
            )?
            .value;
            let rhs = integrate_interval(
                |x| {
                    let w = 0.5 * b.value(x) + x * b.derivative(x);
                    if w == 0.0 {
                        return Ok(0.0);
                    }
                    Ok(kernel.eval(x)? * w * src.density(x).expect("density"))
                },
                lo,
                hi,
                &kernel.cfg,
            )?
            .value;
            Ok(SteinIdentityResidual { lhs, rhs })
        })
        .collect()
}

/// `S² = E[(τ_X(X) − 1)²]`; [`Error::Divergent`] when infinite.
pub fn stein_discrepancy(
    source: &SourceMeasure,
    target: &GammaParams,
    cfg: &NumericConfig,
) -> Result<InfoFunctionalResult> {
    let k = SteinKernel::new(source, target, cfg)?;
    if !k.bounded_at_origin() {
        return Err(Error::Divergent(format!(
            "Stein kernel is not square-integrable at the origin (T(0) = {:e})",
            k.t0()
        )));
    }
    let e = integrate_halfline_around(
        |x| {
            let f = source.density(x).expect("density");
            if f < DENSITY_FLOOR {
                return Ok(0.0);
            }
            let d = k.eval(x)? - 1.0;
            Ok(d * d * f)
        },
        source.scale(),
        cfg,
    )?;
    Ok(quad(e.value, e.error_bound))
}

/// `E[τ_X(X)]`.
pub fn stein_kernel_mean(source: &SourceMeasure, target: &GammaParams, cfg: &NumericConfig) -> Result<f64> {
    let k = SteinKernel::new(source, target, cfg)?;
    Ok(integrate_halfline_around(
        |x| {
            let f = source.density(x).expect("density");
            if f < DENSITY_FLOOR {
                return Ok(0.0);
            }
            Ok(k.tail(x)? / x.sqrt())
        },
        source.scale(),
        cfg,
    )?
    .value)
}

/// Cubic Lagrange interpolation on a uniform grid in `log x`.
struct LogTable {
    s0: f64,
    ds: f64,
    vals: Vec<f64>,
}

impl LogTable {
    fn build<F>(lo: f64, hi: f64, n: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let (s0, s1) = (lo.ln(), hi.ln());
        let ds = (s1 - s0) / (n - 1) as f64;
        let vals = (0..n)
            .into_par_iter()
            .map(|i| f((s0 + ds * i as f64).exp()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { s0, ds, vals })
    }

    fn eval(&self, x: f64) -> f64 {
        let p = (x.ln() - self.s0) / self.ds;
        let n = self.vals.len();
        let i = (p.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let t = p - i as f64;
        let y = &self.vals[i..i + 4];
        // Lagrange basis on nodes 0, 1, 2, 3
        let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3]
    }
}

const REP_TABLE_POINTS: usize = 801;

/// Monte Carlo estimate of `J_{st,γ}(X_τ)` through the Stein-kernel
/// representation
/// `√(λ/2)·τ/√(1−τ)·E[(τ_X(X) − 1)·Z·𝒱·∂^σ v_τ(X_τ)]`,
/// with `𝒱·∂^σ v_τ(u) = (√τ√X + cZ)·(h/g − λτ/(1−τ))(u)`.
///
/// `τ_X` and `h/g` are tabulated on log grids spanning the drawn values and
/// interpolated; the table error is far below the Monte Carlo error. Also
/// returns `max |𝒱|` over the draws.
pub fn fisher_rep_estimate(model: &SmartPathModel, tau: Tau) -> Result<(Estimate, f64)> {
    let target = &model.target;
    target.require_half_alpha()?;
    let cfg = &model.numeric;
    if !model.source.is_mean_matched(target, 1e-10, cfg)? {
        return Err(Error::Hypothesis(
            "source is not mean-matched to the target".into(),
        ));
    }
    let kernel = SteinKernel::new(&model.source, target, cfg)?;
    let t = tau.value();
    let l = target.lambda;
    let shift = l * t / (1.0 - t);
    let draws = mc_draws(cfg.mc_samples, cfg.mc_seed, |rng| {
        model.sample_halfshift_detailed(tau, rng).expect("alpha checked")
    });
    let range = |it: &mut dyn Iterator<Item = f64>| {
        it.fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (xlo, xhi) = range(&mut draws.iter().map(|d| d.x));
    let (ulo, uhi) = range(&mut draws.iter().map(|d| d.value));
    let tau_tab = LogTable::build(xlo * 0.99, xhi * 1.01, REP_TABLE_POINTS, |x| kernel.eval(x))?;
    let q_tab = LogTable::build(ulo * 0.99, uhi * 1.01, REP_TABLE_POINTS, |u| {
        let [g, h, _] = model.components(tau, u)?;
        Ok(if g < DENSITY_FLOOR { 0.0 } else { h / g - shift })
    })?;
    let pre = (0.5 * l).sqrt() * t / (1.0 - t).sqrt();
    let c = ((1.0 - t) / (2.0 * l)).sqrt();
    let mut max_w = 0.0_f64;
    let vals: Vec<f64> = draws
        .iter()
        .map(|d| {
            let s = t.sqrt() * d.x.sqrt() + c * d.z;
            if d.value > 0.0 {
                max_w = max_w.max(s.abs() / d.value.sqrt());
            }
            pre * (tau_tab.eval(d.x) - 1.0) * d.z * s * q_tab.eval(d.value)
        })
        .collect();
    Ok((mean_stderr(&vals), max_w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    #[test]
    fn entropy_of_exponential_and_scaling() {
        let c = cfg();
        let h = shannon_entropy(|u| (-u).exp(), 1.0, &c).unwrap();
        assert!((h - 1.0).abs() < 1e-10);
        let p = GammaParams::new(2.0, 1.0).unwrap();
        let q = GammaParams::new(2.0, 2.0).unwrap();
        let hp = shannon_entropy(|u| p.ln_pdf(u).exp(), 2.0, &c).unwrap();
        let hq = shannon_entropy(|u| q.ln_pdf(u).exp(), 1.0, &c).unwrap();
        assert!((hq - (hp + 0.5f64.ln())).abs() < 1e-10);
        assert!((hp - p.entropy()).abs() < 1e-10);
    }

    #[test]
    fn log_table_interpolates_smooth_functions() {
        let t = LogTable::build(0.01, 100.0, 801, |x| Ok(x.ln().sin() + x.sqrt())).unwrap();
        for x in [0.013, 0.5, 3.3, 77.0] {
            assert!((t.eval(x) - (x.ln().sin() + x.sqrt())).abs() < 1e-7);
        }
    }

    #[test]
    fn bump_derivative_matches_fd() {
        let b = STEIN_BUMPS[2];
        for x in [0.7, 1.9, 3.2] {
            let h = 1e-6;
            let fd = (b.value(x + h) - b.value(x - h)) / (2.0 * h);
            assert!((fd - b.derivative(x)).abs() < 1e-8);
        }
        assert_eq!(b.value(10.0), 0.0);
    }

    #[test]
    fn target_stein_kernel_is_one() {
        let p = GammaParams::new(2.0, 1.0).unwrap();
        let s = SourceMeasure::Gamma(p);
        let k = SteinKernel::new(&s, &p, &cfg()).unwrap();
        assert!(k.bounded_at_origin());
        for x in [0.3, 1.0, 4.0] {
            assert!((k.eval(x).unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn fisher_source_closed_forms() {
        let c = cfg();
        let (a, l) = (2.0, 1.0);
        let t = GammaParams::new(a, l).unwrap();
        let j = standardized_fisher_source(&SourceMeasure::gamma(a, l).unwrap(), &t, &c).unwrap();
        assert!(j.value.abs() < 1e-12);
        let j = standardized_fisher_source(&SourceMeasure::gamma(a, 2.0 * l).unwrap(), &t, &c).unwrap();
        assert!((j.value - a * l / 2.0).abs() < 1e-9);
        let j = standardized_fisher_source(&SourceMeasure::gamma(a + 1.0, l).unwrap(), &t, &c).unwrap();
        assert!((j.value - l / a).abs() < 1e-9);
    }
}
