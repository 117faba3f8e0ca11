use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gpts_cli::commands::{self, SweepAxis};
use gpts_cli::error::EXIT_FAILURE;
use gpts_cli::verify::{self, Suite, DEFAULT_SEED};
use gpts_cli::{parse_config, CliError, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "gpts", version, about = "Thompson sampling with Gaussian-process priors for online learning")]
struct Cli {
    /// Experiment config (flat `section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `game.seed`, or the verify seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory. Overrides `output.path`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured replications and write replications.csv and summary.json.
    Simulate,
    /// Run an invariant suite at pinned seeds and write verify.json.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Run one simulation per value along an axis and write sweep.csv.
    Sweep {
        #[arg(long, value_enum)]
        axis: SweepAxis,
        /// Comma-separated values, e.g. `250,500,1000`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Print closed-form bound values as JSON.
    Bounds {
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        /// Grid radius for the modulus bound.
        #[arg(long)]
        h: Option<f64>,
    },
}

const DEFAULT_OUT: &str = "gpts-out";

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::usage("this command needs --config PATH"))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn out_dir(cli: &Cli, config: Option<&ExperimentConfig>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| config.and_then(|c| c.output_path.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn write_json(dir: &Path, name: &str, json: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), format!("{json}\n"))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Simulate => {
            let config = load_config(cli)?;
            let sim = commands::simulate(&config)?;
            let out = out_dir(cli, Some(&config));
            commands::write_simulation(&config, &sim, &out)?;
            println!("{}", serde_json::to_string_pretty(&sim.summary)?);
        }
        Command::Verify { suite } => {
            let report = verify::run(*suite, cli.seed.unwrap_or(DEFAULT_SEED))?;
            let json = serde_json::to_string_pretty(&report)?;
            write_json(&out_dir(cli, None), "verify.json", &json)?;
            for c in &report.checks {
                println!(
                    "{} [{}] {}: {:.3e} <= {:.3e}",
                    c.suite,
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.threshold
                );
            }
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            println!("verify {}: {} checks, {failed} failed", report.suite, report.checks.len());
            if !report.passed {
                return Ok(ExitCode::from(EXIT_FAILURE));
            }
        }
        Command::Sweep { axis, values } => {
            let config = load_config(cli)?;
            let rows = commands::sweep(&config, *axis, values)?;
            let path = commands::write_sweep(&rows, &out_dir(cli, Some(&config)))?;
            println!("wrote {}", path.display());
        }
        Command::Bounds { horizon, n, d, beta, lambda, sigma, kappa, h } => {
            let report = commands::bounds(*horizon, *n, *d, *beta, *lambda, *sigma, *kappa, *h)?;
            let json = serde_json::to_string_pretty(&report)?;
            if let Some(dir) = &cli.out {
                write_json(dir, "bounds.json", &json)?;
            }
            println!("{json}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
