//! `trialsim` command-line interface.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use trialsim_core::io::{
    write_curve_csv, write_scan_csv, write_summary_csv, ConfigFile, RunManifest,
};
use trialsim_core::neyman::{default_grid, linear_grid, neyman_curve};
use trialsim_core::{
    power_scan, run_monte_carlo, Error, Hypothesis, Ratio, DEFAULT_INFLATION_MARGIN,
};

#[derive(Parser)]
#[command(
    name = "trialsim",
    version,
    about = "Operating characteristics of ER, FUR and RAR two-arm trials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate every design of a scenario under the null and the alternative.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Directory receiving summary.csv and manifest.json.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Null rejection rates above alpha + margin are flagged as inflated.
        #[arg(long, default_value_t = DEFAULT_INFLATION_MARGIN)]
        inflation_margin: f64,
    },
    /// Neyman allocation curve over a grid of treatment success rates.
    NeymanCurve {
        /// Control-arm success rate.
        #[arg(long)]
        p0: f64,
        /// Explicit treatment success rates (comma separated). Overrides the grid flags.
        #[arg(long, value_delimiter = ',')]
        p1: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        grid_start: f64,
        #[arg(long, default_value_t = 0.99)]
        grid_stop: f64,
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
        /// Output CSV path.
        #[arg(long, default_value = "neyman_curve.csv")]
        out: PathBuf,
    },
    /// Power of fixed allocation ratios under the scenario's alternative.
    PowerScan {
        #[command(flatten)]
        run: RunArgs,
        /// Control:treatment ratios, e.g. `2:1,1:1,1:2`.
        #[arg(long, value_delimiter = ',', required = true)]
        ratios: Vec<String>,
        /// Output CSV path.
        #[arg(long, default_value = "power_scan.csv")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's replication count.
    #[arg(long)]
    replications: Option<usize>,
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Config(String),
    Internal(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Domain(_) => Failure::Config(e.to_string()),
            other => Failure::Internal(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_config(run: &RunArgs) -> Result<ConfigFile, Failure> {
    let text = fs::read_to_string(&run.config)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", run.config.display())))?;
    let mut cfg = ConfigFile::from_json(&text)?;
    if let Some(seed) = run.seed {
        cfg.seed = seed;
    }
    if let Some(r) = run.replications {
        cfg.replications = r;
    }
    Ok(cfg)
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::Config("invalid `threads`: must be ≥ 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("building thread pool")?;
    Ok(pool.install(f))
}

fn create(path: &Path) -> Result<fs::File, Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Simulate {
            run,
            out_dir,
            inflation_margin,
        } => {
            let cfg = load_config(&run)?;
            let scenario = cfg.to_scenario()?;
            let start = Instant::now();
            let summaries = with_pool(run.threads, || run_monte_carlo(&scenario))??;
            let manifest = RunManifest::new(
                cfg,
                summaries,
                start.elapsed().as_secs_f64(),
                inflation_margin,
            );

            write_summary_csv(create(&out_dir.join("summary.csv"))?, &manifest.summaries)
                .context("writing summary.csv")?;
            fs::write(out_dir.join("manifest.json"), manifest.to_json_pretty())
                .context("writing manifest.json")?;

            for s in &manifest.summaries {
                let what = match s.hypothesis {
                    Hypothesis::Null => "type-I",
                    Hypothesis::Alternative => "power ",
                };
                eprintln!(
                    "{:<20} {what} {:>6.2}% (mcse {:.3}%)  n1/n {:.3}  outcome {:.4}",
                    s.design,
                    100.0 * s.rejection_rate,
                    100.0 * s.rejection_mcse,
                    s.mean_prop_arm1,
                    s.mean_outcome
                );
            }
            for design in &manifest.type1_inflation {
                eprintln!(
                    "warning: {design}: type-I error inflation above alpha + {inflation_margin}"
                );
            }
            eprintln!("wrote {}", out_dir.display());
            Ok(())
        }
        Command::NeymanCurve {
            p0,
            p1,
            grid_start,
            grid_stop,
            grid_step,
            out,
        } => {
            if !(p0 > 0.0 && p0 < 1.0) {
                return Err(Failure::Config(format!(
                    "invalid `p0`: {p0} must lie in (0, 1)"
                )));
            }
            let grid = if !p1.is_empty() {
                p1
            } else if (grid_start, grid_stop, grid_step) == (0.01, 0.99, 0.01) {
                default_grid()
            } else {
                linear_grid(grid_start, grid_stop, grid_step)?
            };
            let rows = neyman_curve(p0, &grid)?;
            write_curve_csv(create(&out)?, &rows).context("writing curve")?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
        Command::PowerScan { run, ratios, out } => {
            let ratios = ratios
                .iter()
                .filter(|r| !r.trim().is_empty())
                .map(|r| r.parse::<Ratio>())
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = load_config(&run)?;
            let scenario = cfg.to_scenario()?;
            let rows = with_pool(run.threads, || power_scan(&scenario, &ratios))??;
            write_scan_csv(create(&out)?, &rows).context("writing scan")?;
            for r in &rows {
                eprintln!(
                    "{:>6}  power {:>6.2}% (mcse {:.3}%)",
                    r.ratio.to_string(),
                    100.0 * r.power,
                    100.0 * r.mcse
                );
            }
            Ok(())
        }
    }
}
