use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use bhl_harness::experiments::{
    run_attractor, run_bounds, run_dim_convergence, run_eps_convergence, run_error_order, run_noise_convergence,
    run_ou_path, run_simulate, Outcome,
};
use bhl_harness::verify::run_verify;
use bhl_harness::{ExitStatus, ExperimentConfig, Format, HarnessError, Result};
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bhl", version, about = "Burgers-Huxley lattice experiments")]
struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; overrides the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Implicit-Euler orbit of one sampled initial state.
    Simulate {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Truncation order; the window space is used when omitted.
        #[arg(long)]
        m: Option<usize>,
    },
    /// One discrete attractor surrogate.
    Attractor {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Discrete attractors against the continuous reference.
    ConvergeEps,
    /// Truncated attractors against the window attractor.
    ConvergeDim,
    /// Random attractor samples against the deterministic one.
    ConvergeNoise,
    /// Local and global discretization error orders.
    ErrorOrder,
    /// Attractor norms against the forcing bound.
    Bounds,
    /// One Ornstein-Uhlenbeck realization.
    OuPath {
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long, allow_hyphen_values = true)]
        t_min: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
    },
    /// Invariant checks across all modules.
    Verify,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<ExitStatus> {
    let cfg = load_config(cli)?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    }
    let outcome: Outcome = match &cli.command {
        Command::Simulate { eps, steps, m } => run_simulate(&cfg, *eps, *steps, *m)?,
        Command::Attractor { eps, m } => run_attractor(&cfg, *eps, *m)?,
        Command::ConvergeEps => run_eps_convergence(&cfg)?,
        Command::ConvergeDim => run_dim_convergence(&cfg)?,
        Command::ConvergeNoise => run_noise_convergence(&cfg)?,
        Command::ErrorOrder => run_error_order(&cfg)?,
        Command::Bounds => run_bounds(&cfg)?,
        Command::OuPath { index, t_min, h } => run_ou_path(&cfg, *index, *t_min, *h)?,
        Command::Verify => {
            let report = run_verify(&cfg);
            let dir = &cfg.output_dir;
            fs::create_dir_all(dir).map_err(|e| HarnessError::io(format!("creating {}", dir.display()), e))?;
            let path = dir.join("verify_report.json");
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            fs::write(&path, text).map_err(|e| HarnessError::io(format!("writing {}", path.display()), e))?;
            for c in &report.checks {
                println!("{:<32} {:?}", c.check_name, c.status);
            }
            if !report.passed() {
                for c in report.failures() {
                    eprintln!("FAIL {}: {}", c.check_name, c.witness);
                }
                return Ok(ExitStatus::VerificationFailed);
            }
            return Ok(ExitStatus::Success);
        }
    };
    for path in outcome.write(&cfg.output_dir, cli.format, &cfg)? {
        println!("{}", path.display());
    }
    Ok(ExitStatus::Success)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let status = match run(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_status()
        }
    };
    ExitCode::from(status as u8)
}
