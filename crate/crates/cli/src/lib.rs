//! Batch driver: reads a JSON run config, runs the selected checks and
//! writes CSV, JSON and SVG outputs.

pub mod config;
pub mod output;
pub mod svg;

use config::RunConfig;
use output::{report_csv, summary_json, timings_json, Counts, Summary};
use rayon::prelude::*;
use serde_json::{json, Value};
use smartpath::information::{
    fisher_pair, fisher_rep_estimate, relative_entropy, standardized_fisher_path, stein_discrepancy,
};
use smartpath::smartpath::{SmartPathModel, Tau};
use smartpath::verify::{CheckReport, Suite, MEAN_MATCH_TOL};
use std::path::{Path, PathBuf};
use svg::{emit_svg, PlotOptions, Series};

/// Exit codes of the `smartpath` binary.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] smartpath::Error),
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub reports: Vec<CheckReport>,
    pub files: Vec<PathBuf>,
    pub counts: Counts,
}

impl RunOutcome {
    /// 0 when no evaluated check failed or errored, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.counts.failed + self.counts.errors == 0 {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

pub fn build_model(cfg: &RunConfig) -> smartpath::Result<SmartPathModel> {
    SmartPathModel::new(cfg.source.clone(), cfg.target, cfg.numeric.clone())
}

fn write(path: PathBuf, contents: &str, files: &mut Vec<PathBuf>) -> Result<(), RunError> {
    std::fs::write(&path, contents).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    files.push(path);
    Ok(())
}

/// `τ ↦ (D(X_τ‖γ), J(X_τ)/(λτ))` on the grid, for the plots.
pub fn path_curves(model: &SmartPathModel, grid: &[f64]) -> smartpath::Result<(Vec<f64>, Vec<f64>)> {
    let lambda = model.target.lambda;
    let rows = grid
        .par_iter()
        .map(|&t| {
            let tau = Tau::new(t)?;
            Ok((
                relative_entropy(model, tau)?.value,
                standardized_fisher_path(model, tau)?.value / (lambda * t),
            ))
        })
        .collect::<smartpath::Result<Vec<_>>>()?;
    Ok(rows.into_iter().unzip())
}

fn write_plots(
    model: &SmartPathModel,
    grid: &[f64],
    out: &Path,
    files: &mut Vec<PathBuf>,
) -> Result<(), RunError> {
    let (d, j) = path_curves(model, grid)?;
    let plots = [
        (
            "entropy.svg",
            "relative entropy along the path",
            "D(X_tau || gamma)",
            d,
        ),
        ("fisher.svg", "De Bruijn integrand", "J(X_tau) / (lambda tau)", j),
    ];
    for (file, title, label, y) in plots {
        let path = out.join(file);
        let series = [Series {
            label: label.into(),
            x: grid.to_vec(),
            y,
        }];
        let opts = PlotOptions {
            title: title.into(),
            x_label: "tau".into(),
            y_label: label.into(),
            log_y: false,
        };
        emit_svg(&series, &opts, &path).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
        files.push(path);
    }
    Ok(())
}

/// Runs the configured checks and writes `<check>.csv` per report,
/// `summary.json`, `timings.json` and, if enabled, `entropy.svg` and
/// `fisher.svg` into the output directory.
pub fn run_suite(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let model = build_model(cfg)?;
    let suite = Suite::new(&model).with_tau_grid(cfg.tau_grid.clone())?;
    let names: Vec<&str> = cfg.checks.iter().map(String::as_str).collect();
    let reports = suite.run(&names);

    let out = &cfg.output_dir;
    std::fs::create_dir_all(out).map_err(|source| RunError::Io {
        path: out.clone(),
        source,
    })?;
    let mut files = Vec::new();
    for r in &reports {
        write(
            out.join(format!("{}.csv", r.check_name)),
            &report_csv(r),
            &mut files,
        )?;
    }
    let counts = Counts::of(&reports);
    let summary = Summary {
        target: [cfg.target.alpha, cfg.target.lambda],
        source: cfg.source.describe(),
        seed: cfg.numeric.mc_seed,
        tau_grid: &cfg.tau_grid,
        counts,
        reports: &reports,
    };
    write(out.join("summary.json"), &summary_json(&summary), &mut files)?;
    write(out.join("timings.json"), &timings_json(&reports), &mut files)?;
    if cfg.emit_plots {
        write_plots(&model, &cfg.tau_grid, out, &mut files)?;
    }
    Ok(RunOutcome {
        reports,
        files,
        counts,
    })
}

/// Single-value queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    Entropy,
    Fisher,
    Stein,
}

/// Evaluates one functional at `τ` and returns it as JSON.
pub fn eval(cfg: &RunConfig, functional: Functional, tau: f64) -> smartpath::Result<Value> {
    let model = build_model(cfg)?;
    let t = Tau::new(tau)?;
    Ok(match functional {
        Functional::Entropy => {
            let r = relative_entropy(&model, t)?;
            json!({ "functional": "entropy", "tau": tau, "relative_entropy": r })
        }
        Functional::Fisher => {
            let (i, j) = fisher_pair(&model, t)?;
            json!({ "functional": "fisher", "tau": tau, "localized": i, "standardized": j })
        }
        Functional::Stein => {
            let s2 = match stein_discrepancy(&model.source, &model.target, &model.numeric) {
                Ok(r) => json!(r),
                Err(smartpath::Error::Divergent(m)) => json!({ "divergent": m }),
                Err(e) => return Err(e),
            };
            let rep = if model
                .source
                .is_mean_matched(&model.target, MEAN_MATCH_TOL, &model.numeric)?
            {
                let (e, max_w) = fisher_rep_estimate(&model, t)?;
                json!({ "estimate": e, "max_weight": max_w })
            } else {
                Value::Null
            };
            json!({
                "functional": "stein",
                "tau": tau,
                "stein_discrepancy": s2,
                "fisher_representation": rep,
            })
        }
    })
}
