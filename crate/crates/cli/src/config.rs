//! JSON run configuration: parsing and schema validation.
//!
//! Validation walks the whole document and reports every violation, each
//! prefixed with the path of the offending field.

use serde_json::{Map, Value};
use smartpath::measures::{log_moment_matched_mixture, stein_admissible_mixture, GammaParams, SourceMeasure};
use smartpath::numerics::NumericConfig;
use smartpath::verify::{chebyshev_grid, default_tau_grid, CHECK_NAMES};
use std::fmt;
use std::path::PathBuf;

/// Named `τ`-grid presets.
pub const TAU_PRESETS: [&str; 2] = ["chebyshev9", "chebyshev17"];

pub const DEFAULT_OUTPUT_DIR: &str = "smartpath-out";

/// Source law as written in the config.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    Gamma {
        alpha: f64,
        lambda: f64,
    },
    Dirac {
        x: f64,
    },
    Atoms(Vec<(f64, f64)>),
    GammaMixture(Vec<(f64, GammaParams)>),
    /// Mean- and log-moment-matched to the target.
    LogMomentMatched {
        a1: f64,
        a2: f64,
    },
    /// Mean-matched with a Stein kernel bounded at the origin.
    SteinAdmissible {
        a1: f64,
        a2: f64,
    },
}

impl SourceSpec {
    pub fn build(&self, target: &GammaParams) -> smartpath::Result<SourceMeasure> {
        match self {
            Self::Gamma { alpha, lambda } => SourceMeasure::gamma(*alpha, *lambda),
            Self::Dirac { x } => SourceMeasure::dirac(*x),
            Self::Atoms(a) => SourceMeasure::atoms(a.clone()),
            Self::GammaMixture(c) => SourceMeasure::gamma_mixture(c.clone()),
            Self::LogMomentMatched { a1, a2 } => log_moment_matched_mixture(target, *a1, *a2),
            Self::SteinAdmissible { a1, a2 } => stein_admissible_mixture(target, *a1, *a2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub target: GammaParams,
    pub source_spec: SourceSpec,
    pub source: SourceMeasure,
    pub tau_grid: Vec<f64>,
    pub checks: Vec<String>,
    pub numeric: NumericConfig,
    pub output_dir: PathBuf,
    pub emit_plots: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Syntax(String),
    Schema(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Syntax(m) => write!(f, "config is not valid JSON: {m}"),
            Self::Schema(errs) => {
                write!(f, "config has {} problem(s):", errs.len())?;
                for e in errs {
                    write!(f, "\n  - {e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

struct Collector(Vec<String>);

impl Collector {
    fn push(&mut self, path: &str, msg: impl fmt::Display) {
        self.0.push(format!("{path}: {msg}"));
    }

    fn object<'v>(&mut self, path: &str, v: &'v Value, allowed: &[&str]) -> Option<&'v Map<String, Value>> {
        let Some(obj) = v.as_object() else {
            self.push(path, "must be an object");
            return None;
        };
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                self.push(
                    path,
                    format!("unknown key `{k}` (allowed: {})", allowed.join(", ")),
                );
            }
        }
        Some(obj)
    }

    fn number(&mut self, path: &str, obj: &Map<String, Value>, key: &str) -> Option<f64> {
        let p = format!("{path}.{key}");
        match obj.get(key) {
            None => {
                self.push(&p, "is required");
                None
            }
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => Some(x),
                _ => {
                    self.push(&p, "must be a number");
                    None
                }
            },
        }
    }

    fn positive(&mut self, path: &str, obj: &Map<String, Value>, key: &str) -> Option<f64> {
        let x = self.number(path, obj, key)?;
        if x > 0.0 {
            Some(x)
        } else {
            self.push(&format!("{path}.{key}"), format!("must be > 0, got {x}"));
            None
        }
    }

    fn gamma(&mut self, path: &str, v: &Value, extra: &[&str]) -> Option<GammaParams> {
        let mut allowed = vec!["alpha", "lambda"];
        allowed.extend_from_slice(extra);
        let obj = self.object(path, v, &allowed)?;
        let a = self.positive(path, obj, "alpha");
        let l = self.positive(path, obj, "lambda");
        GammaParams::new(a?, l?).ok()
    }
}

fn source(c: &mut Collector, v: &Value) -> Option<SourceSpec> {
    let path = "source";
    let Some(obj) = v.as_object() else {
        c.push(path, "must be an object");
        return None;
    };
    let kinds = [
        "gamma",
        "dirac",
        "atoms",
        "gamma_mixture",
        "log_moment_matched_mixture",
        "stein_admissible_mixture",
    ];
    let Some(kind) = obj.get("type").and_then(Value::as_str) else {
        c.push(
            &format!("{path}.type"),
            format!("is required, one of: {}", kinds.join(", ")),
        );
        return None;
    };
    match kind {
        "gamma" => {
            let p = c.gamma(path, v, &["type"])?;
            Some(SourceSpec::Gamma {
                alpha: p.alpha,
                lambda: p.lambda,
            })
        }
        "dirac" => {
            let obj = c.object(path, v, &["type", "x"])?;
            Some(SourceSpec::Dirac {
                x: c.positive(path, obj, "x")?,
            })
        }
        "atoms" => {
            let obj = c.object(path, v, &["type", "atoms"])?;
            let p = format!("{path}.atoms");
            let Some(list) = obj.get("atoms").and_then(Value::as_array) else {
                c.push(&p, "is required: a list of [x, weight] pairs");
                return None;
            };
            let mut atoms = Vec::with_capacity(list.len());
            let mut ok = true;
            for (i, a) in list.iter().enumerate() {
                match a
                    .as_array()
                    .map(|xs| xs.iter().map(Value::as_f64).collect::<Vec<_>>())
                {
                    Some(xs) if xs.len() == 2 && xs.iter().all(Option::is_some) => {
                        atoms.push((xs[0].unwrap_or(0.0), xs[1].unwrap_or(0.0)));
                    }
                    _ => {
                        c.push(&format!("{p}[{i}]"), "must be a [x, weight] pair of numbers");
                        ok = false;
                    }
                }
            }
            ok.then_some(SourceSpec::Atoms(atoms))
        }
        "gamma_mixture" => {
            let obj = c.object(path, v, &["type", "components"])?;
            let p = format!("{path}.components");
            let Some(list) = obj.get("components").and_then(Value::as_array) else {
                c.push(&p, "is required: a list of {weight, alpha, lambda} objects");
                return None;
            };
            let mut comps = Vec::with_capacity(list.len());
            let mut ok = true;
            for (i, comp) in list.iter().enumerate() {
                let cp = format!("{p}[{i}]");
                let w = comp.as_object().and_then(|o| c.positive(&cp, o, "weight"));
                match (w, c.gamma(&cp, comp, &["weight"])) {
                    (Some(w), Some(g)) => comps.push((w, g)),
                    _ => ok = false,
                }
            }
            ok.then_some(SourceSpec::GammaMixture(comps))
        }
        "log_moment_matched_mixture" | "stein_admissible_mixture" => {
            let obj = c.object(path, v, &["type", "a1", "a2"])?;
            let a1 = c.positive(path, obj, "a1");
            let a2 = c.positive(path, obj, "a2");
            let (a1, a2) = (a1?, a2?);
            Some(if kind == "log_moment_matched_mixture" {
                SourceSpec::LogMomentMatched { a1, a2 }
            } else {
                SourceSpec::SteinAdmissible { a1, a2 }
            })
        }
        other => {
            c.push(
                &format!("{path}.type"),
                format!("unknown source type `{other}` (allowed: {})", kinds.join(", ")),
            );
            None
        }
    }
}

fn tau_grid(c: &mut Collector, v: Option<&Value>) -> Vec<f64> {
    let path = "tau_grid";
    match v {
        None => default_tau_grid(),
        Some(Value::String(s)) => match s.as_str() {
            "chebyshev9" => default_tau_grid(),
            "chebyshev17" => chebyshev_grid(0.05, 0.95, 17),
            other => {
                c.push(
                    path,
                    format!("unknown preset `{other}` (allowed: {})", TAU_PRESETS.join(", ")),
                );
                Vec::new()
            }
        },
        Some(Value::Array(xs)) => {
            if xs.is_empty() {
                c.push(path, "must not be empty");
            }
            let mut out = Vec::with_capacity(xs.len());
            for (i, x) in xs.iter().enumerate() {
                match x.as_f64() {
                    Some(t) if t > 0.0 && t < 1.0 => out.push(t),
                    _ => c.push(&format!("{path}[{i}]"), "must be a number in (0, 1)"),
                }
            }
            out
        }
        Some(_) => {
            c.push(path, "must be a list of numbers or a preset name");
            Vec::new()
        }
    }
}

/// Validates check names; `"all"` expands to every check.
pub fn check_list(names: &[String]) -> Result<Vec<String>, String> {
    if names.len() == 1 && names[0] == "all" {
        return Ok(CHECK_NAMES.iter().map(|s| s.to_string()).collect());
    }
    let bad: Vec<&str> = names
        .iter()
        .filter(|n| !CHECK_NAMES.contains(&n.as_str()))
        .map(String::as_str)
        .collect();
    if !bad.is_empty() {
        return Err(format!(
            "unknown check name(s) {}; valid names: all, {}",
            bad.join(", "),
            CHECK_NAMES.join(", ")
        ));
    }
    if names.is_empty() {
        return Err("at least one check is required".into());
    }
    let mut out: Vec<String> = names.to_vec();
    out.sort();
    out.dedup();
    Ok(out)
}

fn checks(c: &mut Collector, v: Option<&Value>) -> Vec<String> {
    let path = "checks";
    let names: Vec<String> = match v {
        None => vec!["all".into()],
        Some(Value::String(s)) => vec![s.clone()],
        Some(Value::Array(xs)) => {
            let mut out = Vec::new();
            for (i, x) in xs.iter().enumerate() {
                match x.as_str() {
                    Some(s) => out.push(s.to_string()),
                    None => c.push(&format!("{path}[{i}]"), "must be a string"),
                }
            }
            out
        }
        Some(_) => {
            c.push(path, "must be \"all\" or a list of check names");
            return Vec::new();
        }
    };
    check_list(&names).unwrap_or_else(|e| {
        c.push(path, e);
        Vec::new()
    })
}

fn numeric(c: &mut Collector, v: Option<&Value>) -> NumericConfig {
    let Some(v) = v else {
        return NumericConfig::default();
    };
    match serde_json::from_value::<NumericConfig>(v.clone()) {
        Ok(cfg) => {
            for p in cfg.problems() {
                c.push("numeric", p);
            }
            cfg
        }
        Err(e) => {
            c.push("numeric", e);
            NumericConfig::default()
        }
    }
}

/// Parses and validates a config document, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let mut c = Collector(Vec::new());
    let allowed = [
        "target",
        "source",
        "tau_grid",
        "checks",
        "numeric",
        "output_dir",
        "emit_plots",
    ];
    let Some(root) = c.object("config", &doc, &allowed) else {
        return Err(ConfigError::Schema(c.0));
    };
    let target = match root.get("target") {
        Some(v) => c.gamma("target", v, &[]),
        None => {
            c.push("target", "is required");
            None
        }
    };
    let spec = match root.get("source") {
        Some(v) => source(&mut c, v),
        None => {
            c.push("source", "is required");
            None
        }
    };
    let tau_grid = tau_grid(&mut c, root.get("tau_grid"));
    let checks = checks(&mut c, root.get("checks"));
    let numeric = numeric(&mut c, root.get("numeric"));
    let output_dir = match root.get("output_dir") {
        None => PathBuf::from(DEFAULT_OUTPUT_DIR),
        Some(Value::String(s)) if !s.is_empty() => PathBuf::from(s),
        Some(_) => {
            c.push("output_dir", "must be a non-empty string");
            PathBuf::new()
        }
    };
    let emit_plots = match root.get("emit_plots") {
        None => true,
        Some(Value::Bool(b)) => *b,
        Some(_) => {
            c.push("emit_plots", "must be a boolean");
            true
        }
    };
    if let Some(t) = &target {
        if t.alpha < 0.5 {
            c.push(
                "target.alpha",
                format!("must be >= 1/2 for the path density, got {}", t.alpha),
            );
        }
    }
    let built = match (&target, &spec) {
        (Some(t), Some(s)) => match s.build(t) {
            Ok(src) => Some(src),
            Err(e) => {
                c.push("source", e);
                None
            }
        },
        _ => None,
    };
    match (target, spec, built) {
        (Some(target), Some(source_spec), Some(source)) if c.0.is_empty() => Ok(RunConfig {
            target,
            source_spec,
            source,
            tau_grid,
            checks,
            numeric,
            output_dir,
            emit_plots,
        }),
        _ => Err(ConfigError::Schema(c.0)),
    }
}
