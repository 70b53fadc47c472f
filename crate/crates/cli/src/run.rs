//! The `run` subcommand: one solve of a named problem, trace CSV plus a
//! summary record on disk, exit code keyed to the terminal status.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use dcopt::data::csv::write_trace_csv;
use dcopt::solvers::{backtracking_gd, cccp, prox_dc, subgradient_dc, CccpConfig};
use dcopt::{DcProblem, SolveStatus, SolveTrace, SolverConfig};
use ndarray::Array1;

use crate::config::{ExperimentConfig, SolverSpec};
use crate::registry::build_problem;

/// Exit code for a finished solve: 0 when the run terminated normally
/// (converged or hit the iteration cap), 2 when it diverged.
pub fn exit_for(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Converged | SolveStatus::IterCap => 0,
        SolveStatus::Diverged => 2,
    }
}

/// Resolve the solver knobs against the problem: unset `alpha` becomes
/// `1/M_g` where the smoothness constant is known, and stays at the default
/// otherwise (entry validation rejects it if the problem needed better).
fn resolve_config(spec: &SolverSpec, problem: &DcProblem, seed: u64) -> SolverConfig {
    let mut cfg = SolverConfig::default().with_seed(seed);
    match (spec.alpha, problem.smoothness()) {
        (Some(a), _) => cfg.alpha = a,
        (None, Some(m)) => cfg.alpha = 1.0 / m,
        (None, None) => {}
    }
    if let Some(b) = spec.beta {
        cfg.beta = b;
    }
    if let Some(c) = spec.c0 {
        cfg.c0 = c;
    }
    if let Some(k) = spec.max_iter {
        cfg.max_iter = k;
    }
    if let Some(t) = spec.tol {
        cfg.tol = t;
    }
    cfg
}

/// Dispatch on the algorithm name. When the config names none, problems with
/// a prox part get the proximal solver (the subgradient step cannot handle an
/// indicator term) and everything else gets the plain subgradient step.
/// Frank-Wolfe is not reachable from here: it needs a linear minimization
/// oracle for a caller-chosen compact set, which a flat config cannot name;
/// the check battery exercises it instead.
pub fn solve_named(
    problem: &DcProblem,
    x0: &Array1<f64>,
    spec: &SolverSpec,
    seed: u64,
) -> anyhow::Result<(String, SolveTrace)> {
    let cfg = resolve_config(spec, problem, seed);
    let default_algo = if problem.has_prox() { "prox" } else { "subgradient" };
    let algo = spec.algorithm.as_deref().unwrap_or(default_algo);
    let trace = match algo {
        "subgradient" => subgradient_dc(problem, x0, &cfg)?,
        "backtracking" => backtracking_gd(problem, x0, &cfg)?,
        "prox" => prox_dc(problem, x0, &cfg)?,
        "cccp" => {
            let mut inner = CccpConfig::new(cfg.alpha);
            if let Some(t) = spec.inner_tol {
                inner.inner_tol = t;
            }
            if let Some(k) = spec.inner_max_iter {
                inner.inner_max_iter = k;
            }
            cccp(problem, x0, &cfg, &inner)?
        }
        other => bail!(
            "unknown algorithm '{other}'; expected one of subgradient, backtracking, \
             prox, cccp"
        ),
    };
    Ok((algo.to_string(), trace))
}

/// TOML-formatted run summary: what ran, where it stopped, and how long the
/// recorded iterations took.
pub fn summary_toml(problem_name: &str, algo: &str, seed: u64, trace: &SolveTrace) -> String {
    let last = trace.len() - 1;
    let mut s = String::new();
    let _ = writeln!(s, "problem = {problem_name:?}");
    let _ = writeln!(s, "algorithm = {algo:?}");
    let _ = writeln!(s, "seed = {seed}");
    let _ = writeln!(s, "status = \"{:?}\"", trace.status);
    let _ = writeln!(s, "iterations = {last}");
    let _ = writeln!(s, "final_f = {:?}", trace.f_val[last]);
    let _ = writeln!(s, "final_residual = {:?}", trace.grad_norm[last]);
    let _ = writeln!(s, "wall_time_s = {:?}", trace.elapsed[last]);
    s
}

pub fn cmd_run(cfg: &ExperimentConfig, seed: u64, out_dir: &Path) -> anyhow::Result<i32> {
    let built = build_problem(&cfg.problem, seed)?;
    let (algo, trace) = solve_named(&built.problem, &built.x0, &cfg.solver, seed)?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    write_trace_csv(&out_dir.join("trace.csv"), &trace)?;
    fs::write(
        out_dir.join("summary.toml"),
        summary_toml(&cfg.problem.name, &algo, seed, &trace),
    )?;
    let last = trace.len() - 1;
    println!(
        "{} via {}: {:?} after {} iterations, f = {:.6e}, residual = {:.3e}",
        cfg.problem.name, algo, trace.status, last, trace.f_val[last], trace.grad_norm[last]
    );
    Ok(exit_for(trace.status))
}
