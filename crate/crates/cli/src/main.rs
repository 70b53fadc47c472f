//! `dcopt` binary: argument parsing and dispatch. Exit codes: 0 for a normal
//! finish (including iteration-capped solves and all checks passing), 2 for a
//! diverged solve, 1 for configuration or usage errors and failed checks.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dcopt_cli::check::cmd_check;
use dcopt_cli::compare::cmd_compare;
use dcopt_cli::config::load_config;
use dcopt_cli::run::cmd_run;
use dcopt_cli::sfs::cmd_sfs;

#[derive(Parser)]
#[command(name = "dcopt", version, about = "Solvers for smooth-minus-convex composite objectives")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Base seed; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config's `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one solve and write its trace and summary.
    Run(ConfigArgs),
    /// Run the prox-vs-CCCP sparse-regression study.
    Compare {
        #[command(flatten)]
        common: ConfigArgs,
        /// Replication count; overrides the config's `replications`.
        #[arg(long)]
        reps: Option<usize>,
        /// Worker threads for replications (each solve stays single-threaded).
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Reconstruct a height field from a PGM intensity image.
    Sfs {
        /// Input image (PGM, P2 or P5).
        input: PathBuf,
        /// Light direction as "l1,l2,l3".
        #[arg(long, default_value = "0,0,1", value_parser = parse_light)]
        light: Light,
        /// Backtracking iteration budget.
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant-check battery (optionally one suite).
    Check {
        /// Substring selecting which suites to run.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug)]
struct Light([f64; 3]);

fn parse_light(s: &str) -> Result<Light, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut l = [0.0; 3];
    for (slot, part) in l.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad light component '{part}': {e}"))?;
    }
    Ok(Light(l))
}

fn default_out() -> PathBuf {
    PathBuf::from("dcopt_out")
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.cmd {
        Cmd::Run(common) => {
            let cfg = load_config(&common.config)?;
            let seed = common.seed.or(cfg.seed).unwrap_or(0);
            let out = common
                .out
                .or_else(|| cfg.output.dir.clone())
                .unwrap_or_else(default_out);
            cmd_run(&cfg, seed, &out)
        }
        Cmd::Compare { common, reps, workers } => {
            let cfg = load_config(&common.config)?;
            let seed = common.seed.or(cfg.seed).unwrap_or(0);
            let out = common
                .out
                .or_else(|| cfg.output.dir.clone())
                .unwrap_or_else(default_out);
            cmd_compare(&cfg, seed, reps, workers, &out)
        }
        Cmd::Sfs { input, light, iters, seed, out } => {
            cmd_sfs(&input, light.0, iters, seed, &out.unwrap_or_else(default_out))
        }
        Cmd::Check { suite, seed } => cmd_check(suite.as_deref(), seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are normal exits; real usage errors
            // are reported as configuration failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
