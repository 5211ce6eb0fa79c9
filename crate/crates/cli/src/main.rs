use clap::{Parser, Subcommand, ValueEnum};
use smartpath_cli::config::{check_list, parse_config, RunConfig};
use smartpath_cli::{eval, run_suite, Functional, EXIT_CONFIG, EXIT_FAIL};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "smartpath",
    version,
    about = "Checks of the gamma smart-path identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured checks and write reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Monte Carlo seed (overrides `numeric.mc_seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated check names (overrides `checks`).
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        #[arg(long)]
        no_plots: bool,
    },
    /// Evaluate one functional at one tau.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        functional: FunctionalArg,
        #[arg(long)]
        tau: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionalArg {
    Entropy,
    Fisher,
    Stein,
}

fn load(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| e.to_string())
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("SMARTPATH_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("SMARTPATH_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn fail(code: i32, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        return fail(EXIT_CONFIG, e);
    }
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            checks,
            no_plots,
        } => {
            let mut cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(EXIT_CONFIG, e),
            };
            if let Some(dir) = out {
                cfg.output_dir = dir;
            }
            if let Some(s) = seed {
                cfg.numeric.mc_seed = s;
            }
            if let Some(names) = checks {
                match check_list(&names) {
                    Ok(n) => cfg.checks = n,
                    Err(e) => return fail(EXIT_CONFIG, e),
                }
            }
            if no_plots {
                cfg.emit_plots = false;
            }
            match run_suite(&cfg) {
                Ok(outcome) => {
                    for r in &outcome.reports {
                        println!(
                            "{:<34} {:<26} max_abs_dev={:.3e} max_rel_dev={:.3e}",
                            r.check_name,
                            r.status.to_string(),
                            r.max_abs_dev,
                            r.max_rel_dev
                        );
                    }
                    let c = outcome.counts;
                    println!(
                        "passed {}, failed {}, skipped {}, errors {}; outputs in {}",
                        c.passed,
                        c.failed,
                        c.skipped,
                        c.errors,
                        cfg.output_dir.display()
                    );
                    ExitCode::from(outcome.exit_code() as u8)
                }
                Err(e) => fail(EXIT_FAIL, e),
            }
        }
        Command::Eval {
            config,
            functional,
            tau,
        } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(EXIT_CONFIG, e),
            };
            let f = match functional {
                FunctionalArg::Entropy => Functional::Entropy,
                FunctionalArg::Fisher => Functional::Fisher,
                FunctionalArg::Stein => Functional::Stein,
            };
            match eval(&cfg, f, tau) {
                Ok(v) => {
                    println!("{v}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(EXIT_FAIL, e),
            }
        }
    }
}
