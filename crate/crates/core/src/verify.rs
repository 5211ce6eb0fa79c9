//! Checks of the smart-path identities and inequalities.
//!
//! Every check produces one or more [`CheckReport`]s named `<check>` or
//! `<check>.<part>`, comparing a left-hand side with a right-hand side over a
//! grid (usually of `τ` values). Hypotheses are tested, never enforced: a
//! check whose hypotheses fail is reported as skipped, not failed.

use crate::error::{Error, Result};
use crate::information::{
    fisher_pair, relative_entropy, relative_entropy_source, shannon_entropy, standardized_fisher_path,
    standardized_fisher_source, stein_discrepancy, stein_identity_residuals, SteinKernel, STEIN_BUMPS,
};
use crate::measures::{GammaParams, SourceMeasure};
use crate::numerics::{
    central_difference, derivative_fd, integrate_interval_par, ks_critical, mc_draws, two_sample_ks,
    Estimate, NumericConfig,
};
use crate::smartpath::{sample_convolution, SmartPathModel, Tau};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;
use std::time::Instant;

/// Names accepted by [`Suite::check`], in suite order.
pub const CHECK_NAMES: [&str; 12] = [
    "debruijn_local",
    "debruijn_integrated",
    "shannon_bridge",
    "cramer_rao",
    "fisher_bounds",
    "fisher_monotonicity",
    "lsi",
    "hsi",
    "representations",
    "pde",
    "small_u",
    "endpoints",
];

/// Relative tolerance for `E[X] = α/λ`.
pub const MEAN_MATCH_TOL: f64 = 1e-10;
/// Absolute tolerance for `E[log X] = ψ(α) − log λ`.
pub const LOG_MATCH_TOL: f64 = 1e-6;

/// `lhs = rhs` or `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    #[serde(rename = "passed")]
    Passed,
    #[serde(rename = "failed")]
    Failed,
    #[serde(rename = "skipped: hypothesis unmet")]
    Skipped,
    #[serde(rename = "error")]
    Error,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Passed => "passed",
            Self::Failed => "failed",
            Self::Skipped => "skipped: hypothesis unmet",
            Self::Error => "error",
        })
    }
}

/// An absolute and a relative tolerance; a report passes when either holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
}

impl Tol {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }
}

/// Per-check tolerances with their dominant error source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Richardson difference in `τ` of entropies known to the quadrature
    /// tolerance: noise `~ quad_rel_tol / fd_step`.
    pub debruijn_local: Tol,
    /// Plain central differences are second order: halving the step should
    /// cut the error by about 4; at least this factor is required.
    pub fd_order_ratio: f64,
    /// Error floor below which the order probe is pure quadrature noise.
    pub fd_order_floor: f64,
    /// `τ`-quadrature of `J/(λτ)` plus endpoint envelopes.
    pub debruijn_integrated: Tol,
    /// Same `τ`-integral against a difference of two Shannon quadratures.
    pub shannon_bridge: Tol,
    /// `I^τ` and `J` share one `u`-mesh; `I^τ` is large near `τ = 1`, so the
    /// subtraction loses digits relative to `J`.
    pub cramer_rao: Tol,
    /// `J ≥ −floor`: quadrature of a non-negative integrand.
    pub fisher_floor: f64,
    /// Closed-form bounds against single quadratures.
    pub bound: Tol,
    /// `J(X_τ) ≤ τJ(X)`.
    pub monotonicity: Tol,
    /// Stein identity on bump test functions, two nested quadratures.
    pub stein_gate: Tol,
    /// KS null quantile level for the sampler comparisons.
    pub ks_significance: f64,
    /// First-order FD in `u`.
    pub pde_first: Tol,
    /// Nested FD (second derivative in `u`, first in `τ`).
    pub pde_second: Tol,
    /// Log-log fit over `[1e−6, 1e−4]`; bias is the `O(u)` remainder.
    pub small_u: Tol,
    /// Monotone decay of Laplace-transform gaps; pure rounding.
    pub endpoints: Tol,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            debruijn_local: Tol::new(1e-8, 1e-3),
            fd_order_ratio: 3.0,
            fd_order_floor: 1e-9,
            debruijn_integrated: Tol::new(1e-6, 1e-2),
            shannon_bridge: Tol::new(1e-6, 1e-2),
            cramer_rao: Tol::new(1e-10, 1e-6),
            fisher_floor: 1e-8,
            bound: Tol::new(1e-10, 0.0),
            monotonicity: Tol::new(1e-6, 0.0),
            stein_gate: Tol::new(1e-6, 0.0),
            ks_significance: 0.01,
            pde_first: Tol::new(1e-7, 1e-4),
            pde_second: Tol::new(1e-7, 1e-3),
            small_u: Tol::new(1e-2, 0.0),
            endpoints: Tol::new(1e-14, 0.0),
        }
    }
}

/// One verification outcome.
///
/// For evaluated reports `passed ⟺ max_abs_dev ≤ tolerance_abs or
/// max_rel_dev ≤ tolerance_rel`. Skipped and errored reports have empty
/// arrays and `passed = false`; only their status matters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub relation: Relation,
    pub grid: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub max_abs_dev: f64,
    pub max_rel_dev: f64,
    pub tolerance_abs: f64,
    pub tolerance_rel: f64,
    pub passed: bool,
    pub status: CheckStatus,
    pub note: String,
    /// Wall time; excluded from serialized output so reports are reproducible.
    #[serde(skip)]
    pub runtime_ms: u64,
}

/// `(abs, rel)` deviation of one point. For `AtMost` only the excess
/// `lhs − rhs > 0` counts. Non-finite sides give infinite deviation.
pub fn point_deviation(relation: Relation, lhs: f64, rhs: f64) -> (f64, f64) {
    let d = match relation {
        Relation::Equal => (lhs - rhs).abs(),
        Relation::AtMost => (lhs - rhs).max(0.0),
    };
    if !d.is_finite() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let rel = if d == 0.0 {
        0.0
    } else {
        d / rhs.abs().max(f64::MIN_POSITIVE)
    };
    (d, rel)
}

impl CheckReport {
    pub fn evaluated(
        name: impl Into<String>,
        relation: Relation,
        grid: Vec<f64>,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        tol: Tol,
        note: impl Into<String>,
    ) -> Self {
        assert!(grid.len() == lhs.len() && lhs.len() == rhs.len());
        let (mut max_abs, mut max_rel) = (0.0_f64, 0.0_f64);
        for (&l, &r) in lhs.iter().zip(&rhs) {
            let (a, b) = point_deviation(relation, l, r);
            max_abs = max_abs.max(a);
            max_rel = max_rel.max(b);
        }
        let passed = max_abs <= tol.abs || max_rel <= tol.rel;
        Self {
            check_name: name.into(),
            relation,
            grid,
            lhs,
            rhs,
            max_abs_dev: max_abs,
            max_rel_dev: max_rel,
            tolerance_abs: tol.abs,
            tolerance_rel: tol.rel,
            passed,
            status: if passed {
                CheckStatus::Passed
            } else {
                CheckStatus::Failed
            },
            note: note.into(),
            runtime_ms: 0,
        }
    }

    fn empty(name: impl Into<String>, status: CheckStatus, note: String) -> Self {
        Self {
            check_name: name.into(),
            relation: Relation::Equal,
            grid: Vec::new(),
            lhs: Vec::new(),
            rhs: Vec::new(),
            max_abs_dev: 0.0,
            max_rel_dev: 0.0,
            tolerance_abs: 0.0,
            tolerance_rel: 0.0,
            passed: false,
            status,
            note,
            runtime_ms: 0,
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::empty(name, CheckStatus::Skipped, reason.into())
    }

    pub fn errored(name: impl Into<String>, err: &Error) -> Self {
        Self::empty(name, CheckStatus::Error, err.to_string())
    }

    /// Per-point `(abs, rel)` deviations.
    pub fn deviations(&self) -> Vec<(f64, f64)> {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .map(|(&l, &r)| point_deviation(self.relation, l, r))
            .collect()
    }

    /// Counts against the run: failed or errored.
    pub fn is_failure(&self) -> bool {
        matches!(self.status, CheckStatus::Failed | CheckStatus::Error)
    }
}

/// `n` Chebyshev–Lobatto points on `[a, b]`, ascending.
pub fn chebyshev_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n)
        .map(|k| {
            let c = (std::f64::consts::PI * k as f64 / (n - 1) as f64).cos();
            0.5 * (a + b) - 0.5 * (b - a) * c
        })
        .collect()
}

/// Default `τ`-grid: 9 Chebyshev points on `[0.05, 0.95]`.
pub fn default_tau_grid() -> Vec<f64> {
    chebyshev_grid(0.05, 0.95, 9)
}

/// Default `(τ, u)` points for the PDE checks.
pub const PDE_POINTS: [(f64, f64); 5] = [(0.3, 0.4), (0.5, 3.0), (0.5, 5.0), (0.7, 0.5), (0.7, 4.0)];
/// Default Laplace arguments for the endpoint checks.
pub const ENDPOINT_MU: [f64; 3] = [0.5, 1.0, 2.0];
/// `τ` values for the sampler comparisons.
pub const REPRESENTATION_TAUS: [f64; 2] = [0.3, 0.7];
/// Inner cut-offs of the `τ`-integral `∫_0^1 J/(λτ) dτ`.
pub const TAU_INTEGRAL_CUTS: (f64, f64) = (1e-6, 1e-4);
/// Relative tolerance of the adaptive `τ`-quadrature.
const TAU_INTEGRAL_REL: f64 = 1e-5;

fn tau(t: f64) -> Result<Tau> {
    Tau::new(t)
}

fn par_map<T, F>(xs: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

/// Bound constant of the localized Fisher information: `1` for `α ≥ 1`,
/// `1 + 1/α` below.
fn fisher_bound_factor(alpha: f64) -> f64 {
    if alpha >= 1.0 {
        1.0
    } else {
        1.0 + 1.0 / alpha
    }
}

/// Runs checks against one model; shared quantities are computed once.
pub struct Suite<'a> {
    pub model: &'a SmartPathModel,
    pub tau_grid: Vec<f64>,
    pub tolerances: Tolerances,
    tau_integral: OnceLock<std::result::Result<Estimate, Error>>,
}

impl<'a> Suite<'a> {
    pub fn new(model: &'a SmartPathModel) -> Self {
        Self {
            model,
            tau_grid: default_tau_grid(),
            tolerances: Tolerances::default(),
            tau_integral: OnceLock::new(),
        }
    }

    pub fn with_tau_grid(mut self, grid: Vec<f64>) -> Result<Self> {
        if grid.is_empty() || grid.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(Error::Invalid(
                "tau grid must be non-empty and inside (0, 1)".into(),
            ));
        }
        self.tau_grid = grid;
        Ok(self)
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    fn cfg(&self) -> &NumericConfig {
        &self.model.numeric
    }

    fn target(&self) -> &GammaParams {
        &self.model.target
    }

    fn source(&self) -> &SourceMeasure {
        &self.model.source
    }

    /// Runs the named checks concurrently; reports sorted by name.
    pub fn run(&self, names: &[&str]) -> Vec<CheckReport> {
        if names
            .iter()
            .any(|n| *n == "debruijn_integrated" || *n == "shannon_bridge")
            && matches!(self.integrated_hypotheses(), Ok(None))
        {
            let _ = self.tau_integral();
        }
        let mut out: Vec<CheckReport> = names.par_iter().flat_map_iter(|n| self.check(n)).collect();
        out.sort_by(|a, b| a.check_name.cmp(&b.check_name));
        out
    }

    /// Runs every check.
    pub fn run_all(&self) -> Vec<CheckReport> {
        self.run(&CHECK_NAMES)
    }

    /// One check by name, timed; errors become an errored report.
    pub fn check(&self, name: &str) -> Vec<CheckReport> {
        let start = Instant::now();
        let res = match name {
            "debruijn_local" => self.check_debruijn_local(),
            "debruijn_integrated" => self.check_debruijn_integrated(),
            "shannon_bridge" => self.check_shannon_bridge(),
            "cramer_rao" => self.check_cramer_rao(),
            "fisher_bounds" => self.check_fisher_bounds(),
            "fisher_monotonicity" => self.check_fisher_monotonicity(),
            "lsi" => self.check_lsi(),
            "hsi" => self.check_hsi(),
            "representations" => self.check_representations(&REPRESENTATION_TAUS, self.cfg().mc_samples),
            "pde" => self.check_pde(&PDE_POINTS),
            "small_u" => self.check_small_u(0.5),
            "endpoints" => self.check_endpoints(&ENDPOINT_MU),
            other => Err(Error::Invalid(format!(
                "unknown check {other:?}; valid names: {}",
                CHECK_NAMES.join(", ")
            ))),
        };
        let ms = start.elapsed().as_millis() as u64;
        let mut reports = res.unwrap_or_else(|e| vec![CheckReport::errored(name, &e)]);
        for r in &mut reports {
            r.runtime_ms = ms;
        }
        reports
    }

    // Hypotheses: `Ok(None)` when they hold, `Ok(Some(reason))` otherwise.

    fn finite_moment(&self, beta: f64) -> Result<Option<String>> {
        match self.source().moment(beta, self.cfg()) {
            Ok(m) if m.is_finite() => Ok(None),
            Ok(_) | Err(Error::Divergent(_)) => {
                Ok(Some(format!("source moment of order {beta} is infinite")))
            }
            Err(e) => Err(e),
        }
    }

    fn mean_matched(&self) -> Result<Option<String>> {
        if self
            .source()
            .is_mean_matched(self.target(), MEAN_MATCH_TOL, self.cfg())?
        {
            Ok(None)
        } else {
            Ok(Some(format!(
                "E[X] = {} differs from alpha/lambda = {}",
                self.source().mean(self.cfg())?,
                self.target().mean()
            )))
        }
    }

    fn has_density(&self) -> Option<String> {
        if self.source().has_density() {
            None
        } else {
            Some("source has no density (entropy and Fisher information are infinite)".into())
        }
    }

    fn half_alpha(&self) -> Option<String> {
        self.target()
            .require_half_alpha()
            .err()
            .map(|_| format!("target alpha = {} < 1/2", self.target().alpha))
    }

    fn first_unmet(checks: Vec<Result<Option<String>>>) -> Result<Option<String>> {
        for c in checks {
            if let Some(reason) = c? {
                return Ok(Some(reason));
            }
        }
        Ok(None)
    }

    fn local_hypotheses(&self) -> Result<Option<String>> {
        Self::first_unmet(vec![
            Ok(self.half_alpha()),
            self.finite_moment(self.target().alpha + 4.0),
        ])
    }

    fn integrated_hypotheses(&self) -> Result<Option<String>> {
        Self::first_unmet(vec![
            self.local_hypotheses(),
            Ok(self.has_density()),
            self.mean_matched(),
        ])
    }

    fn d_path(&self, t: f64) -> Result<f64> {
        Ok(relative_entropy(self.model, tau(t)?)?.value)
    }

    fn j_path(&self, t: f64) -> Result<f64> {
        Ok(standardized_fisher_path(self.model, tau(t)?)?.value)
    }

    fn d_source(&self) -> Result<f64> {
        Ok(relative_entropy_source(self.source(), self.target(), self.cfg())?.value)
    }

    fn j_source(&self) -> Result<f64> {
        Ok(standardized_fisher_source(self.source(), self.target(), self.cfg())?.value)
    }

    /// `d/dτ D(X_τ‖γ) = J(X_τ)/(λτ)` on the grid, plus a convergence-order
    /// probe of plain central differences at steps `20h` and `10h`.
    pub fn check_debruijn_local(&self) -> Result<Vec<CheckReport>> {
        if let Some(reason) = self.local_hypotheses()? {
            return Ok(vec![
                CheckReport::skipped("debruijn_local", reason.clone()),
                CheckReport::skipped("debruijn_local.fd_order", reason),
            ]);
        }
        let lambda = self.target().lambda;
        let h = self.cfg().fd_step;
        let (h1, h2) = (20.0 * h, 10.0 * h);
        let rows = par_map(&self.tau_grid, |t| {
            let d = |s: f64| self.d_path(s);
            let lhs = derivative_fd(d, t, self.cfg())?;
            let rhs = self.j_path(t)? / (lambda * t);
            let e1 = (central_difference(d, t, h1)? - rhs).abs();
            let e2 = (central_difference(d, t, h2)? - rhs).abs();
            Ok((lhs, rhs, e1, e2))
        })?;
        let grid = self.tau_grid.clone();
        let matched = self.mean_matched()?.is_none();
        let note = format!(
            "hypotheses: alpha >= 1/2, finite alpha+4 moment; source {} mean-matched",
            if matched { "is" } else { "is not" }
        );
        let tol = &self.tolerances;
        Ok(vec![
            CheckReport::evaluated(
                "debruijn_local",
                Relation::Equal,
                grid.clone(),
                rows.iter().map(|r| r.0).collect(),
                rows.iter().map(|r| r.1).collect(),
                tol.debruijn_local,
                note,
            ),
            CheckReport::evaluated(
                "debruijn_local.fd_order",
                Relation::AtMost,
                grid,
                rows.iter().map(|r| tol.fd_order_ratio * r.3).collect(),
                rows.iter().map(|r| r.2).collect(),
                Tol::new(tol.fd_order_floor, 0.0),
                format!(
                    "lhs = {}*err(step {h2}), rhs = err(step {h1}) of central differences",
                    tol.fd_order_ratio
                ),
            ),
        ])
    }

    /// `∫_0^1 J(X_τ)/(λτ) dτ`: adaptive quadrature on `[ε₀, 1−ε₁]`. Near 0
    /// the integrand is at most `c_α λE[X]/(1−τ)²`, which bounds the left
    /// piece; near 1 it tends to `J(X)/λ` and the right piece is a trapezoid.
    pub fn tau_integral(&self) -> Result<Estimate> {
        self.tau_integral
            .get_or_init(|| self.compute_tau_integral())
            .clone()
    }

    fn compute_tau_integral(&self) -> Result<Estimate> {
        let (e0, e1) = TAU_INTEGRAL_CUTS;
        let lambda = self.target().lambda;
        let mut cfg = self.cfg().clone();
        cfg.quad_rel_tol = TAU_INTEGRAL_REL;
        let main = integrate_interval_par(|t| Ok(self.j_path(t)? / (lambda * t)), e0, 1.0 - e1, 4, &cfg)?;
        let left = fisher_bound_factor(self.target().alpha) * lambda * self.source().mean(self.cfg())? * e0
            / (1.0 - e0);
        let inner = self.j_path(1.0 - e1)? / (lambda * (1.0 - e1));
        let outer = self.j_source()? / lambda;
        Ok(Estimate::quadrature(
            main.value + 0.5 * e1 * (inner + outer),
            main.error_bound + left + 0.5 * e1 * (outer - inner).abs(),
        ))
    }

    /// `D(X‖γ) = ∫_0^1 J(X_τ)/(λτ) dτ`.
    pub fn check_debruijn_integrated(&self) -> Result<Vec<CheckReport>> {
        if let Some(reason) = self.integrated_hypotheses()? {
            return Ok(vec![CheckReport::skipped("debruijn_integrated", reason)]);
        }
        let rhs = self.tau_integral()?;
        Ok(vec![CheckReport::evaluated(
            "debruijn_integrated",
            Relation::Equal,
            vec![1.0],
            vec![self.d_source()?],
            vec![rhs.value],
            self.tolerances.debruijn_integrated,
            format!(
                "hypotheses: mean-matched, density, finite alpha+4 moment; tau-integral error bound {:e}",
                rhs.error_bound
            ),
        )])
    }

    /// `H(γ) − H(X) = ∫_0^1 J(X_τ)/(λτ) dτ` when `E[log X] = E[log γ]`.
    pub fn check_shannon_bridge(&self) -> Result<Vec<CheckReport>> {
        let name = "shannon_bridge";
        if let Some(reason) = self.integrated_hypotheses()? {
            return Ok(vec![CheckReport::skipped(name, reason)]);
        }
        let lm = self.source().log_moment(self.cfg())?;
        let target_lm = self.target().log_moment();
        if (lm - target_lm).abs() > LOG_MATCH_TOL {
            return Ok(vec![CheckReport::skipped(
                name,
                format!("E[log X] = {lm} differs from E[log gamma] = {target_lm}"),
            )]);
        }
        let t = *self.target();
        let h_target = shannon_entropy(|u| t.pdf(u).unwrap_or(0.0), t.mean(), self.cfg())?;
        let src = self.source();
        let h_source = shannon_entropy(|u| src.density(u).unwrap_or(0.0), src.scale(), self.cfg())?;
        let rhs = self.tau_integral()?;
        Ok(vec![CheckReport::evaluated(
            name,
            Relation::Equal,
            vec![1.0],
            vec![h_target - h_source],
            vec![rhs.value],
            self.tolerances.shannon_bridge,
            format!(
                "H(gamma) = {h_target}, H(X) = {h_source}; tau-integral error bound {:e}",
                rhs.error_bound
            ),
        )])
    }

    /// `J = I^τ − αλτ²/(1−τ)²`, `J ≥ 0` and, for `α ≥ 1`, `J ≤ αλτ/(1−τ)`.
    pub fn check_cramer_rao(&self) -> Result<Vec<CheckReport>> {
        let names = [
            "cramer_rao.identity",
            "cramer_rao.nonneg",
            "cramer_rao.upper_bound",
        ];
        let unmet = Self::first_unmet(vec![Ok(self.half_alpha()), self.mean_matched()])?;
        if let Some(reason) = unmet {
            return Ok(names
                .iter()
                .map(|n| CheckReport::skipped(*n, reason.clone()))
                .collect());
        }
        let GammaParams { alpha, lambda } = *self.target();
        let pairs = par_map(&self.tau_grid, |t| {
            let (i, j) = fisher_pair(self.model, tau(t)?)?;
            Ok((i.value, j.value))
        })?;
        let grid = self.tau_grid.clone();
        let j: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let tol = &self.tolerances;
        let mut out = vec![
            CheckReport::evaluated(
                names[0],
                Relation::Equal,
                grid.clone(),
                j.clone(),
                pairs
                    .iter()
                    .zip(&grid)
                    .map(|(p, &t)| p.0 - alpha * lambda * t * t / ((1.0 - t) * (1.0 - t)))
                    .collect(),
                tol.cramer_rao,
                "lhs = J, rhs = I - alpha*lambda*tau^2/(1-tau)^2",
            ),
            CheckReport::evaluated(
                names[1],
                Relation::AtMost,
                grid.clone(),
                j.iter().map(|v| -v).collect(),
                vec![0.0; grid.len()],
                Tol::new(tol.fisher_floor, 0.0),
                "lhs = -J, rhs = 0",
            ),
        ];
        out.push(if alpha >= 1.0 {
            CheckReport::evaluated(
                names[2],
                Relation::AtMost,
                grid.clone(),
                j,
                grid.iter().map(|&t| alpha * lambda * t / (1.0 - t)).collect(),
                tol.bound,
                "rhs = alpha*lambda*tau/(1-tau)",
            )
        } else {
            CheckReport::skipped(names[2], format!("upper bound needs alpha >= 1, got {alpha}"))
        });
        Ok(out)
    }

    /// `I^τ ≤ c_α λ²τE[X]/(1−τ)²` with `c_α = 1` for `α ≥ 1` and `1 + 1/α`
    /// below; for `E[X] = α/λ` this is `c_α αλτ/(1−τ)²`.
    pub fn check_fisher_bounds(&self) -> Result<Vec<CheckReport>> {
        let name = "fisher_bounds";
        if let Some(reason) = Self::first_unmet(vec![Ok(self.half_alpha()), self.finite_moment(1.0)])? {
            return Ok(vec![CheckReport::skipped(name, reason)]);
        }
        let GammaParams { alpha, lambda } = *self.target();
        let mean = self.source().mean(self.cfg())?;
        let c = fisher_bound_factor(alpha);
        let lhs = par_map(&self.tau_grid, |t| Ok(fisher_pair(self.model, tau(t)?)?.0.value))?;
        let rhs = self
            .tau_grid
            .iter()
            .map(|&t| c * lambda * lambda * t * mean / ((1.0 - t) * (1.0 - t)))
            .collect();
        Ok(vec![CheckReport::evaluated(
            name,
            Relation::AtMost,
            self.tau_grid.clone(),
            lhs,
            rhs,
            self.tolerances.bound,
            format!("lhs = I^tau, bound factor {c} (alpha = {alpha}), E[X] = {mean}"),
        )])
    }

    /// `J(X_τ) ≤ τJ(X)`.
    pub fn check_fisher_monotonicity(&self) -> Result<Vec<CheckReport>> {
        let name = "fisher_monotonicity";
        if let Some(reason) = Self::first_unmet(vec![Ok(self.half_alpha()), Ok(self.has_density())])? {
            return Ok(vec![CheckReport::skipped(name, reason)]);
        }
        let js = self.j_source()?;
        let lhs = par_map(&self.tau_grid, |t| self.j_path(t))?;
        let rhs: Vec<f64> = self.tau_grid.iter().map(|&t| t * js).collect();
        let gap = rhs.last().zip(lhs.last()).map_or(0.0, |(r, l)| r - l);
        Ok(vec![CheckReport::evaluated(
            name,
            Relation::AtMost,
            self.tau_grid.clone(),
            lhs,
            rhs,
            self.tolerances.monotonicity,
            format!("J(X) = {js}; gap at the largest tau = {gap:e}"),
        )])
    }

    /// `D(X‖γ) ≤ J(X)/λ`.
    pub fn check_lsi(&self) -> Result<Vec<CheckReport>> {
        let name = "lsi";
        if let Some(reason) = Self::first_unmet(vec![Ok(self.half_alpha()), Ok(self.has_density())])? {
            return Ok(vec![CheckReport::skipped(name, reason)]);
        }
        Ok(vec![CheckReport::evaluated(
            name,
            Relation::AtMost,
            vec![1.0],
            vec![self.d_source()?],
            vec![self.j_source()? / self.target().lambda],
            self.tolerances.bound,
            "lhs = D(X), rhs = J(X)/lambda",
        )])
    }

    /// Stein-kernel identity gate, then `D ≤ ½S² log(1 + 2J/(λS²))` and
    /// the comparison of that bound with `J/λ`.
    pub fn check_hsi(&self) -> Result<Vec<CheckReport>> {
        let names = ["hsi", "hsi.lsi_dominance", "hsi.stein_gate"];
        let unmet = Self::first_unmet(vec![
            self.local_hypotheses(),
            Ok(self.has_density()),
            self.mean_matched(),
        ])?;
        if let Some(reason) = unmet {
            return Ok(names
                .iter()
                .map(|n| CheckReport::skipped(*n, reason.clone()))
                .collect());
        }
        let tol = &self.tolerances;
        let kernel = SteinKernel::new(self.source(), self.target(), self.cfg())?;
        let residuals = stein_identity_residuals(&kernel)?;
        let gate = CheckReport::evaluated(
            names[2],
            Relation::Equal,
            STEIN_BUMPS.iter().map(|b| b.center).collect(),
            residuals.iter().map(|r| r.lhs).collect(),
            residuals.iter().map(|r| r.rhs).collect(),
            tol.stein_gate,
            "E[(lambda X - alpha + 1/2) phi(X)] vs E[tau_X(X) (phi(X)/2 + X phi'(X))] on bump functions",
        );
        if !gate.passed {
            let err = Error::NoConvergence("Stein kernel failed its identity gate".into());
            return Ok(vec![
                CheckReport::errored(names[0], &err),
                CheckReport::errored(names[1], &err),
                gate,
            ]);
        }
        let lambda = self.target().lambda;
        let d = self.d_source()?;
        let j = self.j_source()?;
        let (s2, s2_note) = match stein_discrepancy(self.source(), self.target(), self.cfg()) {
            Ok(r) => (r.value, format!("S^2 = {}", r.value)),
            Err(Error::Divergent(msg)) => (
                f64::INFINITY,
                format!("S^2 infinite ({msg}); bound taken at its S^2 -> inf limit J/lambda"),
            ),
            Err(e) => return Err(e),
        };
        let bound = hsi_bound(s2, j, lambda);
        Ok(vec![
            CheckReport::evaluated(
                names[0],
                Relation::AtMost,
                vec![1.0],
                vec![d],
                vec![bound],
                tol.bound,
                format!("{s2_note}; J = {j}; slack = {:e}", bound - d),
            ),
            CheckReport::evaluated(
                names[1],
                Relation::AtMost,
                vec![1.0],
                vec![bound],
                vec![j / lambda],
                Tol::new(1e-15, 0.0),
                "lhs = HSI bound, rhs = LSI bound J/lambda",
            ),
            gate,
        ])
    }

    /// Two-sample KS comparisons of the three-stage sampler with the
    /// half-shift, chi-square and convolution representations and with an
    /// independent run of itself.
    pub fn check_representations(&self, taus: &[f64], n: usize) -> Result<Vec<CheckReport>> {
        let names = [
            "representations.chi2",
            "representations.convolution",
            "representations.halfshift",
            "representations.self",
        ];
        if let Some(reason) = self.half_alpha() {
            return Ok(names
                .iter()
                .map(|x| CheckReport::skipped(*x, reason.clone()))
                .collect());
        }
        let seed = self.cfg().mc_seed;
        let m = self.model;
        let crit = ks_critical(n, n, self.tolerances.ks_significance);
        let base: Vec<Vec<f64>> = taus
            .iter()
            .map(|&t| {
                let tt = tau(t)?;
                Ok(mc_draws(n, seed, |rng| m.sample(tt, rng)))
            })
            .collect::<Result<_>>()?;
        let compare =
            |name: &str,
             k: u64,
             draw: &(dyn Fn(Tau, &mut crate::numerics::StreamRng) -> Result<f64> + Sync)| {
                let stats = taus
                    .iter()
                    .zip(&base)
                    .map(|(&t, b)| {
                        let tt = tau(t)?;
                        let other = mc_draws(n, seed.wrapping_add(k), |rng| draw(tt, rng))
                            .into_iter()
                            .collect::<Result<Vec<f64>>>()?;
                        two_sample_ks(b, &other)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok::<_, Error>(CheckReport::evaluated(
                    name,
                    Relation::AtMost,
                    taus.to_vec(),
                    stats,
                    vec![crit; taus.len()],
                    Tol::new(0.0, 0.0),
                    format!("KS statistic vs 99% null quantile, n = m = {n}"),
                ))
            };
        let mut out = Vec::new();
        let two_alpha = 2.0 * self.target().alpha;
        out.push(if (two_alpha - two_alpha.round()).abs() < 1e-12 {
            compare(names[0], 1, &|t, rng| m.sample_chi2_rep(t, rng))?
        } else {
            CheckReport::skipped(names[0], format!("2*alpha = {two_alpha} is not an integer"))
        });
        out.push(match self.convolution_parts()? {
            Some(parts) => compare(names[1], 2, &|t, rng| sample_convolution(&parts, t, rng))?,
            None => CheckReport::skipped(
                names[1],
                format!("no independent split known for {}", self.source().describe()),
            ),
        });
        out.push(compare(names[2], 3, &|t, rng| m.sample_halfshift_rep(t, rng))?);
        out.push(compare(names[3], 4, &|t, rng| Ok(m.sample(t, rng)))?);
        Ok(out)
    }

    /// Two independent halves `X = X₁ + X₂` with targets `γ(α/2, λ)`, when
    /// the source splits exactly.
    fn convolution_parts(&self) -> Result<Option<Vec<SmartPathModel>>> {
        let GammaParams { alpha, lambda } = *self.target();
        let half = GammaParams::new(0.5 * alpha, lambda)?;
        let piece = match self.source() {
            SourceMeasure::Dirac(x) => SourceMeasure::dirac(0.5 * x)?,
            SourceMeasure::Gamma(p) => SourceMeasure::gamma(0.5 * p.alpha, p.lambda)?,
            _ => return Ok(None),
        };
        let part = SmartPathModel::new(piece, half, self.cfg().clone())?;
        Ok(Some(vec![part.clone(), part]))
    }

    /// The three forms of the `(τ, u)` equations: `∂_u g`, the divergence
    /// form of `−λτ∂_τ g`, and its expansion in `(g, h, k)`.
    pub fn check_pde(&self, points: &[(f64, f64)]) -> Result<Vec<CheckReport>> {
        let names = ["pde.du", "pde.dtau_divergence", "pde.dtau_expanded"];
        if let Some(reason) = self.half_alpha() {
            return Ok(names
                .iter()
                .map(|n| CheckReport::skipped(*n, reason.clone()))
                .collect());
        }
        let GammaParams { alpha, lambda } = *self.target();
        let cfg = self.cfg();
        let mut outer = cfg.clone();
        outer.fd_step = 10.0 * cfg.fd_step;
        let m = self.model;
        let rows = points
            .par_iter()
            .map(|&(t, u)| {
                let tt = tau(t)?;
                let [g, h, k] = m.components(tt, u)?;
                let r = lambda / (1.0 - t);
                let du = derivative_fd(|v| m.density(tt, v), u, cfg)?;
                let dtau = -lambda * t * derivative_fd(|s| m.density(tau(s)?, u), t, cfg)?;
                // g·v·∂_v log(g/γ)
                let flux = |v: f64| -> Result<f64> {
                    let gv = m.density(tt, v)?;
                    let dlog = derivative_fd(|w| Ok(m.density(tt, w)?.ln()), v, cfg)?;
                    Ok(gv * v * (dlog - (alpha - 1.0) / v + lambda))
                };
                let divergence = derivative_fd(flux, u, &outer)?;
                let expanded = g
                    * (u * lambda * lambda * t / ((1.0 - t) * (1.0 - t)) - lambda * alpha * t / (1.0 - t))
                    + h * (alpha - u * lambda * (1.0 + t) / (1.0 - t))
                    + u * k;
                Ok([du, ((alpha - 1.0) / u - r) * g + h, dtau, divergence, expanded])
            })
            .collect::<Result<Vec<[f64; 5]>>>()?;
        let grid: Vec<f64> = points.iter().map(|p| p.1).collect();
        let taus = points
            .iter()
            .map(|p| p.0.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
        let tol = &self.tolerances;
        Ok(vec![
            CheckReport::evaluated(
                names[0],
                Relation::Equal,
                grid.clone(),
                col(0),
                col(1),
                tol.pde_first,
                format!("grid = u at tau = [{taus}]; lhs = FD d/du g, rhs = ((alpha-1)/u - lambda/(1-tau)) g + h"),
            ),
            CheckReport::evaluated(
                names[1],
                Relation::Equal,
                grid.clone(),
                col(2),
                col(3),
                tol.pde_second,
                format!("grid = u at tau = [{taus}]; lhs = -lambda tau FD d/dtau g, rhs = FD d/du [g u d/du log(g/gamma)]"),
            ),
            CheckReport::evaluated(
                names[2],
                Relation::Equal,
                grid,
                col(2),
                col(4),
                tol.pde_second,
                format!("grid = u at tau = [{taus}]; rhs = expansion in g, h, k"),
            ),
        ])
    }

    /// Least-squares fit of `log g(τ, u)` against `log u` on 9 points of
    /// `[1e−6, 1e−4]`: slope `α − 1` and constant
    /// `αλ^α(1−τ)^{−α} L_X(λτ/(1−τ)) / Γ(α+1)`.
    pub fn check_small_u(&self, t: f64) -> Result<Vec<CheckReport>> {
        let names = ["small_u.constant", "small_u.slope"];
        if let Some(reason) = self.half_alpha() {
            return Ok(names
                .iter()
                .map(|n| CheckReport::skipped(*n, reason.clone()))
                .collect());
        }
        let GammaParams { alpha, lambda } = *self.target();
        let tt = tau(t)?;
        let xs: Vec<f64> = (0..9)
            .map(|i| (1e-6f64).ln() + (i as f64) * (100f64).ln() / 8.0)
            .collect();
        let ys = xs
            .par_iter()
            .map(|&x| Ok(self.model.density(tt, x.exp())?.ln()))
            .collect::<Result<Vec<f64>>>()?;
        let (slope, intercept) = least_squares(&xs, &ys);
        let ln_const = alpha.ln() + alpha * lambda.ln() - alpha * (1.0 - t).ln()
            + self.source().laplace(lambda * t / (1.0 - t), self.cfg())?.ln()
            - crate::specfun::log_gamma(alpha + 1.0)?;
        let tol = self.tolerances.small_u;
        Ok(vec![
            CheckReport::evaluated(
                names[0],
                Relation::Equal,
                vec![t],
                vec![intercept],
                vec![ln_const],
                tol,
                "log of the constant: fitted intercept vs closed form",
            ),
            CheckReport::evaluated(
                names[1],
                Relation::Equal,
                vec![t],
                vec![slope],
                vec![alpha - 1.0],
                tol,
                "fitted slope of log g against log u vs alpha - 1",
            ),
        ])
    }

    /// Laplace transforms approach `(1+μ/λ)^{−α}` as `τ → 0` and `L_X` as
    /// `τ → 1`, with gaps shrinking along the grids; and
    /// `D(X_a‖γ) ≤ −α log(1−a)` for small `a` on mean-matched sources.
    pub fn check_endpoints(&self, mus: &[f64]) -> Result<Vec<CheckReport>> {
        let GammaParams { alpha, lambda } = *self.target();
        let m = self.model;
        let gap = |t: f64, limit: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
            let tt = tau(t)?;
            mus.iter().try_fold(0.0_f64, |acc, &mu| {
                Ok(acc.max((m.laplace(tt, mu)? - limit(mu)?).abs()))
            })
        };
        let gamma_limit = |mu: f64| Ok((1.0 + mu / lambda).powf(-alpha));
        let source_limit = |mu: f64| self.source().laplace(mu, self.cfg());
        let tol = self.tolerances.endpoints;
        let decay = |name: &str, taus: &[f64], limit: &dyn Fn(f64) -> Result<f64>, what: &str| {
            let gaps = taus
                .iter()
                .map(|&t| gap(t, limit))
                .collect::<Result<Vec<f64>>>()?;
            let mut prev = gaps.clone();
            prev.rotate_right(1);
            prev[0] = gaps[0];
            Ok::<_, Error>(CheckReport::evaluated(
                name,
                Relation::AtMost,
                taus.to_vec(),
                gaps,
                prev,
                tol,
                format!(
                    "lhs = max over mu of |L_tau(mu) - {what}|, rhs = the same at the previous grid point"
                ),
            ))
        };
        let mut out = vec![
            decay(
                "endpoints.tau0",
                &[1e-1, 1e-2, 1e-3],
                &gamma_limit,
                "(1+mu/lambda)^-alpha",
            )?,
            decay("endpoints.tau1", &[0.9, 0.99, 0.999], &source_limit, "L_X(mu)")?,
        ];
        let unmet = Self::first_unmet(vec![Ok(self.half_alpha()), self.mean_matched()])?;
        out.push(match unmet {
            Some(reason) => CheckReport::skipped("endpoints.entropy_bound", reason),
            None => {
                let a = [0.01, 0.05, 0.1];
                let lhs = par_map(&a, |t| self.d_path(t))?;
                CheckReport::evaluated(
                    "endpoints.entropy_bound",
                    Relation::AtMost,
                    a.to_vec(),
                    lhs,
                    a.iter().map(|t| -alpha * (1.0 - t).ln()).collect(),
                    self.tolerances.bound,
                    "lhs = D(X_a), rhs = -alpha log(1-a)",
                )
            }
        });
        Ok(out)
    }
}

/// `½S² log(1 + 2J/(λS²))`, extended by its limits `0` at `S² = 0` and
/// `J/λ` at `S² = ∞`.
pub fn hsi_bound(s2: f64, j: f64, lambda: f64) -> f64 {
    if s2 <= 0.0 {
        0.0
    } else if s2.is_infinite() {
        j / lambda
    } else {
        0.5 * s2 * (2.0 * j / (lambda * s2)).ln_1p()
    }
}

/// `(slope, intercept)` of the least-squares line through `(x, y)`.
fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviations() {
        assert_eq!(point_deviation(Relation::Equal, 1.0, 2.0), (1.0, 0.5));
        assert_eq!(point_deviation(Relation::AtMost, 1.0, 2.0), (0.0, 0.0));
        assert_eq!(point_deviation(Relation::AtMost, 3.0, 2.0), (1.0, 0.5));
        assert_eq!(point_deviation(Relation::Equal, f64::NAN, 2.0).0, f64::INFINITY);
        let r = CheckReport::evaluated(
            "x",
            Relation::Equal,
            vec![0.1, 0.2],
            vec![1.0, 1.0],
            vec![1.0, 1.1],
            Tol::new(1e-3, 0.1),
            "",
        );
        assert!(r.passed);
        assert_eq!(r.status, CheckStatus::Passed);
        assert!((r.max_abs_dev - 0.1).abs() < 1e-12);
    }

    #[test]
    fn grid_shape() {
        let g = default_tau_grid();
        assert_eq!(g.len(), 9);
        assert!((g[0] - 0.05).abs() < 1e-15 && (g[8] - 0.95).abs() < 1e-15);
        assert!((g[4] - 0.5).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn hsi_limits() {
        assert_eq!(hsi_bound(0.0, 1.0, 1.0), 0.0);
        assert_eq!(hsi_bound(f64::INFINITY, 1.0, 2.0), 0.5);
        let b = hsi_bound(1e8, 1.0, 1.0);
        assert!(b < 1.0 && b > 1.0 - 1e-7);
    }

    #[test]
    fn fit() {
        let x = [0.0, 1.0, 2.0];
        let y = [1.0, 3.0, 5.0];
        assert_eq!(least_squares(&x, &y), (2.0, 1.0));
    }
}
