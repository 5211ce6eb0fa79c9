//! Scalar special functions: scaled modified Bessel `I_ν`, Kummer `₁F₁`,
//! log-gamma, digamma and probabilists' Hermite polynomials.
//!
//! Everything that can overflow is evaluated in log space. The Bessel
//! function uses its ascending power series for moderate arguments and the
//! large-argument asymptotic expansion beyond [`BESSEL_SERIES_LIMIT`],
//! falling back to a rescaled power series whenever the asymptotic series
//! does not reach full precision (large order relative to the argument).

use crate::error::{domain, Error, Result};
use std::f64::consts::PI;

/// Arguments up to this value always use the ascending series.
pub const BESSEL_SERIES_LIMIT: f64 = 30.0;

const LN_RESCALE: f64 = 280.0 * std::f64::consts::LN_10;
const RESCALE: f64 = 1e280;
const KUMMER_MAX_TERMS: usize = 100_000;

/// A real number stored as `sign · exp(log_magnitude)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaledValue {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl LogScaledValue {
    pub const ZERO: LogScaledValue = LogScaledValue {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn positive(log_magnitude: f64) -> Self {
        Self {
            log_magnitude,
            sign: 1,
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self {
                log_magnitude: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    /// Reconstructs the plain value; overflows to ±inf past ~709.
    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }
}

#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma(x))
}

/// Unchecked `ln Γ(x)`, `x > 0`.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    if x > 20.0 {
        return stirling_ln_gamma(x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + 7.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn stirling_ln_gamma(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// Digamma `ψ(x) = d/dx ln Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let tail = inv2
        * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    Ok(acc + x.ln() - 0.5 / x - tail)
}

/// `e^{-z} I_ν(z)` for `ν ≥ -1/2`, `z ≥ 0`.
pub fn bessel_i_scaled(nu: f64, z: f64) -> Result<f64> {
    check_bessel_domain(nu, z)?;
    if z == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    Ok(ln_bessel_i_scaled(nu, z).exp())
}

fn check_bessel_domain(nu: f64, z: f64) -> Result<()> {
    if !(nu >= -0.5) || !nu.is_finite() {
        return Err(domain(format!("Bessel order must be >= -1/2, got {nu}")));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(domain(format!("Bessel argument must be >= 0, got {z}")));
    }
    Ok(())
}

/// `ln(e^{-z} I_ν(z))`, with `z > 0` and `ν ≥ -1/2` assumed.
pub(crate) fn ln_bessel_i_scaled(nu: f64, z: f64) -> f64 {
    if nu == -0.5 {
        return (-2.0 * z).exp().ln_1p() - 0.5 * (2.0 * PI * z).ln();
    }
    if nu == 0.5 {
        return (-(-2.0 * z).exp_m1()).ln() - 0.5 * (2.0 * PI * z).ln();
    }
    if z > BESSEL_SERIES_LIMIT {
        if let Some(v) = ln_bessel_asymptotic(nu, z) {
            return v;
        }
    }
    ln_bessel_series(nu, z)
}

/// Ascending series, rescaled so that it never overflows.
fn ln_bessel_series(nu: f64, z: f64) -> f64 {
    let lead = nu * (0.5 * z).ln() - ln_gamma(nu + 1.0) - z;
    let q = 0.25 * z * z;
    let (mut term, mut sum, mut shift) = (1.0_f64, 1.0_f64, 0.0_f64);
    let mut k = 1.0;
    loop {
        term *= q / (k * (nu + k));
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            shift += LN_RESCALE;
        }
        k += 1.0;
    }
    lead + shift + sum.ln()
}

/// Large-argument expansion `e^{-z} I_ν(z) ~ (2πz)^{-1/2} Σ (-1)^k a_k(ν) z^{-k}`.
/// Returns `None` if the terms stop shrinking before reaching full precision.
fn ln_bessel_asymptotic(nu: f64, z: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= -(mu - odd * odd) / (8.0 * kf * z);
        if term == 0.0 {
            break;
        }
        let mag = term.abs();
        if mag >= prev {
            return None;
        }
        sum += term;
        if mag < 1e-17 * sum.abs() {
            return Some(sum.ln() - 0.5 * (2.0 * PI * z).ln());
        }
        prev = mag;
    }
    if term == 0.0 {
        Some(sum.ln() - 0.5 * (2.0 * PI * z).ln())
    } else {
        None
    }
}

/// Kummer's `₁F₁(a; b; z)` for `a > 0`, `b > 0`, `z ≥ 0`, returned log-scaled.
///
/// All series terms are positive here, so plain summation is stable; a
/// Neumaier compensation keeps the long sums at large `z` accurate.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<LogScaledValue> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(domain(format!("1F1 requires b > 0, got {b}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!("1F1 requires a > 0, got {a}")));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(domain(format!("1F1 requires z >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(LogScaledValue::positive(0.0));
    }
    let (mut term, mut sum, mut comp, mut shift) = (1.0_f64, 1.0_f64, 0.0_f64, 0.0_f64);
    for k in 1..=KUMMER_MAX_TERMS {
        let kf = k as f64;
        let ratio = (a + kf - 1.0) * z / ((b + kf - 1.0) * kf);
        term *= ratio;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if ratio < 1.0 && term <= 1e-17 * sum {
            return Ok(LogScaledValue::positive(shift + (sum + comp).ln()));
        }
        if sum > RESCALE {
            sum /= RESCALE;
            comp /= RESCALE;
            term /= RESCALE;
            shift += LN_RESCALE;
        }
    }
    Err(Error::NoConvergence(format!(
        "1F1({a}, {b}, {z}) after {KUMMER_MAX_TERMS} terms"
    )))
}

/// Probabilists' Hermite polynomial `He_k(z)`.
pub fn hermite(k: u32, z: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, z);
    if k == 0 {
        return prev;
    }
    for n in 1..k {
        let next = z * cur - f64::from(n) * prev;
        prev = cur;
        cur = next;
    }
    cur
}
