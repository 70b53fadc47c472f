//! Acceptance gate: eleven numbered end-to-end criteria covering descent
//! invariants, rate bounds, gradient correctness, fast-rate decay, saddle
//! escape, the solver-comparison study, the stationarity certificate, the
//! curvature and weak-smoothness checkers, and the shape-from-shading round
//! trip. Each test prints exactly one `acceptance criterion NN` line (visible
//! under `--nocapture`, and in the captured output when a criterion fails)
//! before asserting, so the suite doubles as a report.

use std::time::Instant;

use dcopt::problems::{
    brute_force_best_subset, convex_subproblem_residual, make_best_subset, refit_on_support,
    BestSubsetInstance,
};
use dcopt::rng::replication_stream;
use dcopt::solvers::prox_dc;
use dcopt::{SolveStatus, SolverConfig};
use dcopt_cli::battery::{hemisphere_grid, run_suite};
use dcopt_cli::compare::{run_study, StudyParams, StudyRow};
use dcopt_cli::registry::lambda_heuristic;
use dcopt_cli::sfs::render_and_reconstruct;

const SEED: u64 = 0;

/// Print the criterion's one-line verdict; returns `passed` for the assert.
fn verdict(num: u32, label: &str, passed: bool, started: Instant) -> bool {
    println!(
        "acceptance criterion {num:02} ({label}): {} ({:.1}s)",
        if passed { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    passed
}

fn failures(reports: &[dcopt::diagnostics::CheckReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{}: worst {:+.3e} (tol {:.1e})", r.name, r.worst_violation, r.tol))
        .collect()
}

#[test]
fn criterion_01_per_iteration_descent_inequalities() {
    let t0 = Instant::now();
    let reports = run_suite("descent", SEED).expect("descent suite runs");
    let bad = failures(&reports);
    let passed =
        reports.len() >= 12 && bad.is_empty() && t0.elapsed().as_secs_f64() <= 60.0;
    let ok = verdict(1, "per-iteration descent inequalities", passed, t0);
    assert!(
        ok,
        "{} problem x algorithm pairs (need >= 12), elapsed {:.1}s (budget 60s), failures: {bad:?}",
        reports.len(),
        t0.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_02_per_run_rate_bounds() {
    let t0 = Instant::now();
    let reports = run_suite("rates", SEED).expect("rates suite runs");
    let rate_reports: Vec<_> =
        reports.iter().filter(|r| r.name.starts_with("rate[")).cloned().collect();
    let bad = failures(&rate_reports);
    let kinds = ["rate[T1]", "rate[T2-step]", "rate[T2-grad]", "rate[T3]", "rate[P1-strong]"];
    let all_kinds_present =
        kinds.iter().all(|k| rate_reports.iter().any(|r| r.name.starts_with(k)));
    let passed = all_kinds_present && bad.is_empty() && t0.elapsed().as_secs_f64() <= 60.0;
    let ok = verdict(2, "per-run rate bounds", passed, t0);
    assert!(
        ok,
        "kinds present: {all_kinds_present}, elapsed {:.1}s (budget 60s), failures: {bad:?}",
        t0.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_03_analytic_gradients_match_finite_differences() {
    let t0 = Instant::now();
    let reports = run_suite("gradients", SEED).expect("gradients suite runs");
    let bad = failures(&reports);
    let passed = reports.len() >= 7 && bad.is_empty();
    let ok = verdict(3, "analytic gradients vs finite differences", passed, t0);
    assert!(ok, "{} objectives checked (need >= 7), failures: {bad:?}", reports.len());
}

#[test]
fn criterion_04_fast_rate_loglog_slopes() {
    let t0 = Instant::now();
    let reports = run_suite("rates", SEED).expect("rates suite runs");
    let kl: Vec<_> = reports.iter().filter(|r| r.name.starts_with("kl-slope")).cloned().collect();
    let bad = failures(&kl);
    let passed = kl.len() == 2 && bad.is_empty() && t0.elapsed().as_secs_f64() <= 30.0;
    let ok = verdict(4, "residual running-mean log-log slopes", passed, t0);
    assert!(
        ok,
        "{} slope checks (need 2), elapsed {:.1}s (budget 30s), failures: {bad:?}",
        kl.len(),
        t0.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_05_fast_runs_still_satisfy_worst_case_bounds() {
    let t0 = Instant::now();
    let reports = run_suite("rates", SEED).expect("rates suite runs");
    let names = ["rate[T1][kl quadratic run]", "rate[T2-step][kl l1 run]"];
    let floor: Vec<_> =
        reports.iter().filter(|r| names.contains(&r.name.as_str())).cloned().collect();
    let bad = failures(&floor);
    let passed = floor.len() == 2 && bad.is_empty();
    let ok = verdict(5, "worst-case bounds on the fast-decay runs", passed, t0);
    assert!(ok, "{} floor checks (need 2), failures: {bad:?}", floor.len());
}

#[test]
fn criterion_06_saddle_escape_monte_carlo() {
    let t0 = Instant::now();
    let reports = run_suite("saddle", SEED).expect("saddle suite runs");
    let bad = failures(&reports);
    let passed = !reports.is_empty() && bad.is_empty() && t0.elapsed().as_secs_f64() <= 10.0;
    let ok = verdict(6, "saddle escape over 100 initializations", passed, t0);
    assert!(
        ok,
        "elapsed {:.1}s (budget 10s), failures: {bad:?}",
        t0.elapsed().as_secs_f64()
    );
}

fn cell<'a>(rows: &'a [StudyRow], s: usize, algo: &str, metric: &str) -> &'a StudyRow {
    rows.iter()
        .find(|r| r.sparsity == s && r.algo == algo && r.metric == metric)
        .unwrap_or_else(|| panic!("missing study row ({s}, {algo}, {metric})"))
}

#[test]
fn criterion_07_comparison_study_runtime_direction_and_error_overlap() {
    let t0 = Instant::now();
    let sparsity = vec![5usize, 10, 20];
    let mut notes: Vec<String> = Vec::new();

    for s_star in [5usize, 10] {
        let params = StudyParams {
            n: 190,
            p: 300,
            rho: 0.7,
            s_star,
            noise_sd: 0.5,
            lambda: lambda_heuristic(0.5, 190, 300),
            sparsity: sparsity.clone(),
            replications: 20,
            tol: 1e-8,
            max_iter: 1000,
            inner_max_iter: 15,
            inner_tol: 1e-8,
            seed: SEED,
            workers: 1,
        };
        let rows = run_study(&params).expect("study runs");

        for &s in &sparsity {
            let pt = cell(&rows, s, "prox", "runtime_s");
            let ct = cell(&rows, s, "cccp", "runtime_s");
            if pt.mean >= ct.mean {
                notes.push(format!(
                    "s*={s_star} s={s}: prox runtime {:.3}s not below cccp {:.3}s",
                    pt.mean, ct.mean
                ));
            }
        }

        let s_min = *sparsity.iter().min().unwrap();
        let pe = cell(&rows, s_min, "prox", "est_error");
        let ce = cell(&rows, s_min, "cccp", "est_error");
        let allowance = 2.0 * (pe.stderr.powi(2) + ce.stderr.powi(2)).sqrt();
        if (pe.mean - ce.mean).abs() > allowance {
            notes.push(format!(
                "s*={s_star} s={s_min}: est_error prox {:.4e}±{:.1e} vs cccp {:.4e}±{:.1e}, \
                 gap {:.2e} exceeds 2-stderr allowance {:.2e}",
                pe.mean, pe.stderr, ce.mean, ce.stderr,
                (pe.mean - ce.mean).abs(),
                allowance
            ));
        }
    }

    let elapsed = t0.elapsed().as_secs_f64();
    if elapsed > 600.0 {
        notes.push(format!("elapsed {elapsed:.1}s exceeds the 600s budget"));
    }
    let passed = notes.is_empty();
    let ok = verdict(7, "solver comparison: runtime direction and error overlap", passed, t0);
    assert!(ok, "failed clauses: {}", notes.join("; "));
}

#[test]
fn criterion_08_stationarity_certificate_and_global_lower_bound() {
    let t0 = Instant::now();
    let (n, p, s) = (40usize, 10usize, 3usize);
    let lambda = lambda_heuristic(0.5, n, p);
    let mut notes: Vec<String> = Vec::new();

    for i in 0..10u64 {
        let seed = replication_stream(SEED, 8, i);
        let d = dcopt::data::gen_regression(n, p, 0.3, s, 0.5, seed).expect("dataset");
        let inst =
            BestSubsetInstance::new(d.x.clone(), d.y.clone(), lambda, s).expect("instance");
        let problem = make_best_subset(&inst).expect("problem");
        let m = problem.smoothness().expect("known smoothness");
        let cfg = SolverConfig::default()
            .with_alpha(1.0 / m)
            .with_tol(1e-8)
            .with_max_iter(20_000)
            .with_seed(seed);
        let x0 = dcopt_cli::registry::default_init(p, seed);
        let trace = prox_dc(&problem, &x0, &cfg).expect("solve");

        if trace.status != SolveStatus::Converged {
            notes.push(format!("instance {i}: status {:?} (need Converged)", trace.status));
            continue;
        }
        match convex_subproblem_residual(&trace.x_final, &inst) {
            Ok(r) if r <= 1e-6 => {}
            Ok(r) => notes.push(format!("instance {i}: residual {r:.3e} > 1e-6")),
            Err(e) => notes.push(format!("instance {i}: residual error: {e}")),
        }

        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| {
            trace.x_final[b]
                .abs()
                .partial_cmp(&trace.x_final[a].abs())
                .unwrap()
                .then(a.cmp(&b))
        });
        let support: Vec<usize> = order[..s].to_vec();
        let (_, refit_obj) = refit_on_support(&d.x, &d.y, &support).expect("refit");
        let best = brute_force_best_subset(&d.x, &d.y, s).expect("enumeration");
        if refit_obj < best.objective - 1e-9 {
            notes.push(format!(
                "instance {i}: refit objective {refit_obj:.6e} below global optimum {:.6e}",
                best.objective
            ));
        }
    }

    let elapsed = t0.elapsed().as_secs_f64();
    if elapsed > 60.0 {
        notes.push(format!("elapsed {elapsed:.1}s exceeds the 60s budget"));
    }
    let passed = notes.is_empty();
    let ok = verdict(8, "stationarity certificate and enumeration lower bound", passed, t0);
    assert!(ok, "failed clauses: {}", notes.join("; "));
}

#[test]
fn criterion_09_curvature_constant_bounds() {
    let t0 = Instant::now();
    let reports = run_suite("curvature", SEED).expect("curvature suite runs");
    let bad = failures(&reports);
    let passed = reports.len() == 2 && bad.is_empty() && t0.elapsed().as_secs_f64() <= 10.0;
    let ok = verdict(9, "empirical curvature within analytic bounds", passed, t0);
    assert!(
        ok,
        "{} checks (need 2), elapsed {:.1}s (budget 10s), failures: {bad:?}",
        reports.len(),
        t0.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_10_weak_smoothness_checker() {
    let t0 = Instant::now();
    let reports = run_suite("weak_smoothness", SEED).expect("weak-smoothness suite runs");
    let bad = failures(&reports);
    let passed = reports.len() >= 8 && bad.is_empty() && t0.elapsed().as_secs_f64() <= 10.0;
    let ok = verdict(10, "weak-smoothness acceptance and rejection", passed, t0);
    assert!(
        ok,
        "{} checks (need >= 8), elapsed {:.1}s (budget 10s), failures: {bad:?}",
        reports.len(),
        t0.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_11_shading_round_trip() {
    let t0 = Instant::now();
    let z_true = hemisphere_grid(32, 32, 40.0);
    let (f0, f_final, trace) =
        render_and_reconstruct(&z_true, [0.0, 0.0, 1.0], 500, SEED).expect("round trip");

    let mut notes: Vec<String> = Vec::new();
    if !(f_final <= 1e-2 * f0) {
        notes.push(format!("final objective {f_final:.3e} above 1e-2 x initial {f0:.3e}"));
    }
    if let Some(k) = (0..trace.f_val.len() - 1).find(|&k| trace.f_val[k + 1] > trace.f_val[k]) {
        notes.push(format!(
            "objective rose at step {k}: {} -> {}",
            trace.f_val[k],
            trace.f_val[k + 1]
        ));
    }
    let elapsed = t0.elapsed().as_secs_f64();
    if elapsed > 120.0 {
        notes.push(format!("elapsed {elapsed:.1}s exceeds the 120s budget"));
    }
    let passed = notes.is_empty();
    let ok = verdict(11, "render-and-reconstruct objective collapse", passed, t0);
    assert!(ok, "failed clauses: {}", notes.join("; "));
}
