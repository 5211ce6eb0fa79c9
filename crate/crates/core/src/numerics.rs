//! Numerical substrate: adaptive Gauss–Kronrod quadrature on finite
//! intervals and on `(0, ∞)`, Richardson finite differences, seeded
//! Monte Carlo with per-chunk streams, and the two-sample
//! Kolmogorov–Smirnov statistic.

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Generator handed to every Monte Carlo task.
pub type StreamRng = ChaCha8Rng;

/// Draws per Monte Carlo task; fixed so results do not depend on the pool size.
pub const MC_CHUNK: usize = 4096;

/// Quadrature and Monte Carlo controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericConfig {
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
    pub quad_max_subdiv: usize,
    /// Relative mass that may be dropped when truncating `(0, ∞)`.
    pub tail_cutoff_mass: f64,
    pub mc_samples: usize,
    pub mc_seed: u64,
    pub fd_step: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            quad_rel_tol: 1e-10,
            quad_abs_tol: 1e-14,
            quad_max_subdiv: 2000,
            tail_cutoff_mass: 1e-12,
            mc_samples: 100_000,
            mc_seed: 20_240_917,
            fd_step: 1e-3,
        }
    }
}

impl NumericConfig {
    /// Every violated invariant, one message per field.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let positive = [
            ("quad_rel_tol", self.quad_rel_tol),
            ("quad_abs_tol", self.quad_abs_tol),
            ("tail_cutoff_mass", self.tail_cutoff_mass),
            ("fd_step", self.fd_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                out.push(format!("numeric.{name} must be a finite number > 0, got {v}"));
            }
        }
        if self.tail_cutoff_mass >= 1e-8 {
            out.push(format!(
                "numeric.tail_cutoff_mass must be < 1e-8, got {}",
                self.tail_cutoff_mass
            ));
        }
        if self.mc_samples < 1000 {
            out.push(format!(
                "numeric.mc_samples must be >= 1000, got {}",
                self.mc_samples
            ));
        }
        if self.quad_max_subdiv == 0 {
            out.push("numeric.quad_max_subdiv must be >= 1".to_string());
        }
        if self.fd_step >= 0.25 {
            out.push(format!("numeric.fd_step must be < 0.25, got {}", self.fd_step));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(p.join("; ")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Quadrature,
    MonteCarlo,
}

/// A value with its error bar: absolute error estimate for quadrature,
/// one-sigma standard error for Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
    pub kind: EstimateKind,
}

impl Estimate {
    pub fn quadrature(value: f64, error_bound: f64) -> Self {
        Self {
            value,
            error_bound,
            kind: EstimateKind::Quadrature,
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn gk21_nodes(a: f64, b: f64) -> [f64; 21] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut x = [c; 21];
    for j in 0..10 {
        x[j] = c - h * XGK[j];
        x[20 - j] = c + h * XGK[j];
    }
    x
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    val: [f64; N],
    err: [f64; N],
}

fn gk21_combine<const N: usize>(a: f64, b: f64, fv: &[[f64; N]; 21]) -> Panel<N> {
    let h = 0.5 * (b - a);
    let mut val = [0.0; N];
    let mut err = [0.0; N];
    for c in 0..N {
        let fc = fv[10][c];
        let mut res_k = fc * WGK[10];
        let mut res_g = 0.0;
        let mut res_abs = res_k.abs();
        for j in 0..10 {
            let (f1, f2) = (fv[j][c], fv[20 - j][c]);
            res_k += WGK[j] * (f1 + f2);
            res_abs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                res_g += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * res_k;
        let mut res_asc = WGK[10] * (fc - mean).abs();
        for j in 0..10 {
            res_asc += WGK[j] * ((fv[j][c] - mean).abs() + (fv[20 - j][c] - mean).abs());
        }
        val[c] = res_k * h;
        err[c] = rescale_error((res_k - res_g) * h, res_abs * h.abs(), res_asc * h.abs());
    }
    Panel { a, b, val, err }
}

fn check_finite<const N: usize>(v: &[f64; N], at: f64) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { at })
    }
}

/// Refines panels by bisecting the worst one until every component meets
/// `max(abs_tol, rel_tol·|I|)`.
fn adapt<const N: usize, E>(
    mut panels: Vec<Panel<N>>,
    eval: E,
    cfg: &NumericConfig,
) -> Result<([f64; N], [f64; N])>
where
    E: Fn(f64, f64) -> Result<Panel<N>>,
{
    let mut splits = 0usize;
    loop {
        let mut tot = [0.0; N];
        let mut tot_err = [0.0; N];
        for p in &panels {
            for c in 0..N {
                tot[c] += p.val[c];
                tot_err[c] += p.err[c];
            }
        }
        let tol: Vec<f64> = (0..N)
            .map(|c| cfg.quad_abs_tol.max(cfg.quad_rel_tol * tot[c].abs()))
            .collect();
        if (0..N).all(|c| tot_err[c] <= tol[c]) {
            return Ok((tot, tot_err));
        }
        if splits >= cfg.quad_max_subdiv {
            return Err(Error::Quadrature(format!(
                "no convergence after {splits} subdivisions (error {:e}, tolerance {:e})",
                tot_err[0], tol[0]
            )));
        }
        let score = |p: &Panel<N>| (0..N).map(|c| p.err[c] / tol[c]).fold(0.0_f64, f64::max);
        let worst = (0..panels.len())
            .max_by(|&i, &j| score(&panels[i]).total_cmp(&score(&panels[j])))
            .expect("at least one panel");
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            return Err(Error::Quadrature(format!(
                "panel [{a}, {b}] cannot be bisected further"
            )));
        }
        let left = eval(a, mid)?;
        let right = eval(mid, b)?;
        panels[worst] = left;
        panels.insert(worst + 1, right);
        splits += 1;
    }
}

fn panel_serial<const N: usize, F>(f: &F, a: f64, b: f64) -> Result<Panel<N>>
where
    F: Fn(f64) -> Result<[f64; N]>,
{
    let x = gk21_nodes(a, b);
    let mut fv = [[0.0; N]; 21];
    for (v, &xi) in fv.iter_mut().zip(x.iter()) {
        *v = f(xi)?;
        check_finite(v, xi)?;
    }
    Ok(gk21_combine(a, b, &fv))
}

fn panel_parallel<const N: usize, F>(f: &F, a: f64, b: f64) -> Result<Panel<N>>
where
    F: Fn(f64) -> Result<[f64; N]> + Sync,
{
    let x = gk21_nodes(a, b);
    let vals: Vec<[f64; N]> = x
        .par_iter()
        .map(|&xi| {
            let v = f(xi)?;
            check_finite(&v, xi)?;
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let mut fv = [[0.0; N]; 21];
    fv.copy_from_slice(&vals);
    Ok(gk21_combine(a, b, &fv))
}

fn uniform_panels(a: f64, b: f64, pieces: usize) -> Vec<(f64, f64)> {
    let w = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let lo = a + w * i as f64;
            let hi = if i + 1 == pieces {
                b
            } else {
                a + w * (i + 1) as f64
            };
            (lo, hi)
        })
        .collect()
}

/// `∫_a^b f` by adaptive Gauss–Kronrod (21 points).
pub fn integrate_interval<F>(f: F, a: f64, b: f64, cfg: &NumericConfig) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = |x: f64| f(x).map(|v| [v]);
    let init = vec![panel_serial(&g, a, b)?];
    let (v, e) = adapt(init, |lo, hi| panel_serial(&g, lo, hi), cfg)?;
    Ok(Estimate::quadrature(v[0], e[0]))
}

/// Same as [`integrate_interval`] but evaluates the nodes of each panel on
/// the rayon pool. Meant for expensive integrands; the result is identical
/// to the serial version.
pub fn integrate_interval_par<F>(f: F, a: f64, b: f64, pieces: usize, cfg: &NumericConfig) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let g = |x: f64| f(x).map(|v| [v]);
    let init = uniform_panels(a, b, pieces.max(1))
        .into_iter()
        .map(|(lo, hi)| panel_parallel(&g, lo, hi))
        .collect::<Result<Vec<_>>>()?;
    let (v, e) = adapt(init, |lo, hi| panel_parallel(&g, lo, hi), cfg)?;
    Ok(Estimate::quadrature(v[0], e[0]))
}

const SCAN_LO: i32 = -24;
const SCAN_HI: i32 = 10;
const SCAN_FLOOR: i32 = -200;
const SCAN_CEIL: i32 = 200;

/// `∫_0^∞ f(u) du` for a vector of integrands sharing one mesh.
///
/// The half-line is mapped by `u = center·e^s`. A unit-step scan in `s`
/// locates where the integrand lives, extending each side until it drops
/// below `tail_cutoff_mass·quad_rel_tol` times its peak; the bracketed range
/// is then refined adaptively. The estimated tail beyond the cut is added
/// to the error bound. An integrand that fails to decay towards either end
/// is reported as [`Error::Divergent`].
pub fn integrate_halfline_vec<const N: usize, F>(
    f: F,
    center: f64,
    cfg: &NumericConfig,
) -> Result<([f64; N], [f64; N])>
where
    F: Fn(f64) -> Result<[f64; N]>,
{
    integrate_halfline_vec_scaled(f, center, 1.0, cfg)
}

/// [`integrate_halfline_vec`] with `u = center·e^{step·s}`, for integrands
/// concentrated in a window of relative width about `step` around `center`.
pub fn integrate_halfline_vec_scaled<const N: usize, F>(
    f: F,
    center: f64,
    step: f64,
    cfg: &NumericConfig,
) -> Result<([f64; N], [f64; N])>
where
    F: Fn(f64) -> Result<[f64; N]>,
{
    if !(center > 0.0) || !center.is_finite() {
        return Err(Error::Invalid(format!(
            "halfline center must be > 0, got {center}"
        )));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Invalid(format!(
            "halfline step must be in (0, 1], got {step}"
        )));
    }
    let (scan_lo, scan_hi) = if step < 1.0 { (-8, 8) } else { (SCAN_LO, SCAN_HI) };
    halfline_core(f, center, step, scan_lo, scan_hi, cfg)
}

/// [`integrate_halfline_vec_scaled`] for integrands with mass spread over
/// `[lo, hi]`, possibly in several narrow bumps: the initial mesh covers the
/// whole span in panels of relative width `step`.
pub fn integrate_span_vec<const N: usize, F>(
    f: F,
    lo: f64,
    hi: f64,
    step: f64,
    cfg: &NumericConfig,
) -> Result<([f64; N], [f64; N])>
where
    F: Fn(f64) -> Result<[f64; N]>,
{
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::Invalid(format!(
            "span must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Invalid(format!(
            "halfline step must be in (0, 1], got {step}"
        )));
    }
    let half = ((hi / lo).ln() / (2.0 * step)).ceil() as i32 + 8;
    halfline_core(f, (lo * hi).sqrt(), step, -half, half, cfg)
}

fn halfline_core<const N: usize, F>(
    f: F,
    center: f64,
    step: f64,
    scan_lo: i32,
    scan_hi: i32,
    cfg: &NumericConfig,
) -> Result<([f64; N], [f64; N])>
where
    F: Fn(f64) -> Result<[f64; N]>,
{
    let ln_c = center.ln();
    let big = |s: f64| -> Result<[f64; N]> {
        let u = (ln_c + step * s).exp();
        let mut v = f(u)?;
        for x in v.iter_mut() {
            *x *= u * step;
        }
        check_finite(&v, u)?;
        Ok(v)
    };
    let ceil = scan_hi.max((f64::from(SCAN_CEIL) / step).ceil() as i32);
    let floor = scan_lo.min((f64::from(SCAN_FLOOR) / step).floor() as i32);
    let rise_limit = (8.0 / step).ceil() as i32;
    let norm = |v: &[f64; N]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));

    let mut scan: Vec<(i32, f64)> = Vec::new();
    for s in scan_lo..=scan_hi {
        scan.push((s, norm(&big(f64::from(s))?)));
    }
    let cut = cfg.tail_cutoff_mass * cfg.quad_rel_tol;
    let mut peak = scan.iter().fold(0.0_f64, |m, &(_, v)| m.max(v));

    // Past the scan limits, slow geometric decay is accepted once its
    // extrapolated tail `v/k` is below the relative tolerance.
    let settled = |edge: f64, inner: f64, scan: &[(i32, f64)]| {
        let k = (inner / edge).ln();
        let total: f64 = scan.iter().map(|p| p.1).sum();
        k > 0.01 && edge / k <= cfg.quad_rel_tol * total
    };
    let mut s = scan_hi;
    while scan.last().is_some_and(|&(_, v)| v > cut * peak) {
        s += 1;
        if s > ceil {
            let n = scan.len();
            if n >= 2 && settled(scan[n - 1].1, scan[n - 2].1, &scan) {
                break;
            }
            return Err(Error::Divergent(format!(
                "integrand does not decay as u -> inf (still {:e} at u = {:e})",
                scan.last().unwrap().1,
                (ln_c + step * f64::from(ceil)).exp()
            )));
        }
        let v = norm(&big(f64::from(s))?);
        peak = peak.max(v);
        scan.push((s, v));
    }
    let mut s = scan_lo;
    let mut rising = 0;
    while scan.first().is_some_and(|&(_, v)| v > cut * peak) {
        s -= 1;
        let v = match big(f64::from(s)) {
            Ok(v) => norm(&v),
            Err(Error::NonFinite { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        rising = if v > scan[0].1 { rising + 1 } else { 0 };
        if s < floor && v.is_finite() && settled(v, scan[0].1, &scan) {
            peak = peak.max(v);
            scan.insert(0, (s, v));
            break;
        }
        if s < floor || !v.is_finite() || (rising >= rise_limit && v > peak) {
            return Err(Error::Divergent(format!(
                "integrand is not integrable at u -> 0 (value {v:e} near u = {:e})",
                (ln_c + step * f64::from(s)).exp()
            )));
        }
        peak = peak.max(v);
        scan.insert(0, (s, v));
    }
    if peak == 0.0 {
        return Ok(([0.0; N], [0.0; N]));
    }

    let first = scan.iter().position(|&(_, v)| v > cut * peak).unwrap_or(0);
    let last = scan
        .iter()
        .rposition(|&(_, v)| v > cut * peak)
        .unwrap_or(scan.len() - 1);
    let lo_idx = first.saturating_sub(1);
    let hi_idx = (last + 1).min(scan.len() - 1);
    let (s_lo, s_hi) = (scan[lo_idx].0, scan[hi_idx].0);

    let tail = |edge: usize, inner: usize| {
        let (fe, fi) = (scan[edge].1, scan[inner].1);
        if fe == 0.0 {
            0.0
        } else {
            let k = (fi / fe).ln();
            if k > 0.01 {
                fe / k
            } else {
                100.0 * fe
            }
        }
    };
    let tail_err = tail(lo_idx, (lo_idx + 1).min(scan.len() - 1)) + tail(hi_idx, hi_idx.saturating_sub(1));

    let init = (s_lo..s_hi)
        .map(|k| panel_serial(&big, f64::from(k), f64::from(k + 1)))
        .collect::<Result<Vec<_>>>()?;
    let (v, mut e) = adapt(init, |a, b| panel_serial(&big, a, b), cfg)?;
    for x in e.iter_mut() {
        *x += tail_err;
    }
    Ok((v, e))
}

/// `∫_0^∞ f(u) du` with the mapping centred near `center` (the scale where
/// the integrand lives, if known).
pub fn integrate_halfline_around<F>(f: F, center: f64, cfg: &NumericConfig) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    let (v, e) = integrate_halfline_vec(|u| f(u).map(|x| [x]), center, cfg)?;
    Ok(Estimate::quadrature(v[0], e[0]))
}

/// `∫_0^∞ f(u) du`.
pub fn integrate_halfline<F>(f: F, cfg: &NumericConfig) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    integrate_halfline_around(f, 1.0, cfg)
}

/// Plain central difference `(f(x+h) − f(x−h)) / 2h`.
pub fn central_difference<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Central difference with one Richardson step (steps `h` and `h/2`),
/// error `O(h⁴)`. Domain violations surface as errors from `f`.
pub fn derivative_fd<F>(f: F, x: f64, cfg: &NumericConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let h = cfg.fd_step;
    let d1 = central_difference(&f, x, h)?;
    let d2 = central_difference(&f, x, 0.5 * h)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Generator for stream `stream` of seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` draws, generated in fixed-size chunks with one stream per chunk.
/// The output is independent of the number of worker threads.
pub fn mc_draws<T, F>(n: usize, seed: u64, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    let chunks = n.div_ceil(MC_CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = MC_CHUNK.min(n - c * MC_CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Sample mean and its standard error.
pub fn mean_stderr(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Estimate {
        value: mean,
        error_bound: (var / n).sqrt(),
        kind: EstimateKind::MonteCarlo,
    }
}

/// Monte Carlo mean of `cfg.mc_samples` draws seeded by `cfg.mc_seed`.
pub fn mc_mean<F>(sampler: F, cfg: &NumericConfig) -> Estimate
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    mean_stderr(&mc_draws(cfg.mc_samples, cfg.mc_seed, sampler))
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F̂_a − F̂_b|`.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Invalid("KS statistic needs non-empty samples".into()));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::Invalid("KS statistic got NaN samples".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0_f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Asymptotic critical value of the two-sample KS statistic at the given
/// significance level (`0.01` for the 99% quantile).
pub fn ks_critical(n: usize, m: usize, significance: f64) -> f64 {
    let c = (-(0.5 * significance).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}
