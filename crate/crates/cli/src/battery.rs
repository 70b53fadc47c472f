//! The invariant-check battery behind `dcopt check`: every suite runs real
//! solves on the builtin problems and audits the traces against the descent
//! inequalities, rate certificates, gradient oracles, mean inequalities,
//! weak-smoothness characterization, saddle-escape behavior, and the sampled
//! curvature bound. Each suite yields [`CheckReport`]s; the command prints one
//! line per report and fails if any report fails.

use anyhow::{bail, Context};
use dcopt::data::{gen_mixture_samples, gen_regression, render_sfs};
use dcopt::diagnostics::{
    check_descent, check_rate_bound, check_weak_smoothness, default_fd_step, estimate_curvature,
    finite_diff_gradient, fit_loglog_slope, running_arith_mean, running_geo_mean, CheckReport,
    RateBound, RateConstants,
};
use dcopt::problems::mixture::project_mixture;
use dcopt::problems::sfs::{make_sfs, SfsInstance};
use dcopt::problems::{
    make_best_subset, make_gaussian_mixture_nll, make_toy, make_tukey, BestSubsetInstance,
    MixtureInstance, Toy, TukeyInstance,
};
use dcopt::rng::{stream_rng, streams};
use dcopt::solvers::{
    backtracking_gd, cccp, frank_wolfe_dc, lmo_box, prox_dc, subgradient_dc, CccpConfig,
};
use dcopt::{AlgoKind, DcProblem, ExtReal, SolveStatus, SolveTrace, SolverConfig};
use ndarray::{array, Array1, Array2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::registry::default_init;
use crate::sfs::sfs_init;

/// Suite names, in execution order.
pub const SUITES: [&str; 7] = [
    "descent",
    "rates",
    "gradients",
    "means",
    "weak_smoothness",
    "saddle",
    "curvature",
];

/// Suites whose name contains the selector (all of them when absent).
pub fn matching_suites(selector: Option<&str>) -> Vec<&'static str> {
    match selector {
        None => SUITES.to_vec(),
        Some(s) => SUITES.iter().copied().filter(|n| n.contains(s)).collect(),
    }
}

pub fn run_suite(name: &str, seed: u64) -> anyhow::Result<Vec<CheckReport>> {
    match name {
        "descent" => suite_descent(seed),
        "rates" => suite_rates(seed),
        "gradients" => suite_gradients(seed),
        "means" => suite_means(seed),
        "weak_smoothness" => suite_weak_smoothness(seed),
        "saddle" => suite_saddle(seed),
        "curvature" => suite_curvature(seed),
        other => bail!("unknown check suite '{other}'; available: {}", SUITES.join(", ")),
    }
}

/// One printed line per report: verdict, name, worst margin, where, tolerance.
pub fn format_report(r: &CheckReport) -> String {
    format!(
        "{} {}  worst = {:+.3e} at k = {} (tol {:.1e})",
        if r.passed { "PASS" } else { "FAIL" },
        r.name,
        r.worst_violation,
        r.k_worst,
        r.tol
    )
}

fn report_from(name: &str, violations: impl IntoIterator<Item = f64>, tol: f64) -> CheckReport {
    let mut worst = f64::NEG_INFINITY;
    let mut k_worst = 0;
    for (k, v) in violations.into_iter().enumerate() {
        if v > worst {
            worst = v;
            k_worst = k;
        }
    }
    CheckReport {
        name: name.to_string(),
        worst_violation: worst,
        passed: worst <= tol,
        k_worst,
        tol,
    }
}

fn renamed(mut r: CheckReport, name: &str) -> CheckReport {
    r.name = name.to_string();
    r
}

fn quad_toy(a0: f64, a1: f64, b0: f64, b1: f64) -> anyhow::Result<DcProblem> {
    Ok(make_toy(&Toy::Quadratic {
        a: array![[a0, 0.0], [0.0, a1]],
        b: array![b0, b1],
    })?)
}

/// The quadratic toy with an explicit do-nothing prox part, so the proximal
/// solver accepts it and its residual column is the true gradient norm.
fn quad_with_identity_prox(
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
) -> anyhow::Result<DcProblem> {
    Ok(DcProblem::builder(2)
        .smooth(
            move |x| 0.5 * (a0 * x[0] * x[0] + a1 * x[1] * x[1]) - b0 * x[0] - b1 * x[1],
            move |x| array![a0 * x[0] - b0, a1 * x[1] - b1],
        )
        .prox(|_| ExtReal::Finite(0.0), |z, _t| z.clone())
        .smoothness(a0.max(a1))
        .build()?)
}

/// Height grid of a sphere cap over pixel coordinates, centered on the grid:
/// z = sqrt(max(0, r^2 - d^2)). Rendering it under a vertical light yields
/// intensities in (0, 1], so the round trip never clamps.
pub fn hemisphere_grid(m: usize, n: usize, r: f64) -> Array2<f64> {
    let (ci, cj) = ((m as f64 - 1.0) / 2.0, (n as f64 - 1.0) / 2.0);
    Array2::from_shape_fn((m, n), |(i, j)| {
        let d2 = (i as f64 - ci).powi(2) + (j as f64 - cj).powi(2);
        (r * r - d2).max(0.0).sqrt()
    })
}

fn tukey_problem(seed: u64) -> anyhow::Result<(DcProblem, Array1<f64>)> {
    let d = gen_regression(60, 8, 0.3, 3, 0.5, seed)?;
    let inst = TukeyInstance::new(d.x, d.y, 1.0)?;
    let p = make_tukey(&inst)?;
    let x0 = default_init(8, seed);
    Ok((p, x0))
}

fn best_subset_problem(seed: u64) -> anyhow::Result<(DcProblem, Array1<f64>)> {
    let d = gen_regression(40, 10, 0.3, 3, 0.5, seed)?;
    let inst = BestSubsetInstance::new(d.x, d.y, 0.5, 3)?;
    let p = make_best_subset(&inst)?;
    let x0 = default_init(10, seed);
    Ok((p, x0))
}

fn mixture_problem(seed: u64) -> anyhow::Result<(DcProblem, Array1<f64>)> {
    let samples = gen_mixture_samples(200, 0.4, -1.0, 0.8, 1.5, 0.6, seed)?;
    let inst = MixtureInstance::new(samples, 3.0, 3.0)?;
    let p = make_gaussian_mixture_nll(&inst)?;
    let theta0 = project_mixture(&array![-1.0, -0.6, 1.0, -0.6, 0.5], 3.0, 3.0, inst.eps);
    Ok((p, theta0))
}

fn sfs_problem(seed: u64) -> anyhow::Result<(DcProblem, Array1<f64>)> {
    let z_true = hemisphere_grid(8, 8, 5.0);
    let intensity = render_sfs(&z_true, [0.0, 0.0, 1.0])?;
    let inst = SfsInstance::new(intensity, [0.0, 0.0, 1.0])?;
    let p = make_sfs(&inst)?;
    let z0 = sfs_init(8, 8, seed);
    Ok((p, z0))
}

/// Every builtin problem under every algorithm whose descent inequality
/// applies to it, each audited at every iteration.
fn suite_descent(seed: u64) -> anyhow::Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let base = SolverConfig::default().with_seed(seed);

    // Quadratic toy, all five algorithms.
    {
        let p = quad_toy(1.0, 4.0, 1.0, -2.0)?;
        let x0 = default_init(2, seed);
        let cfg = base.clone().with_alpha(0.25).with_tol(1e-12);
        let t = subgradient_dc(&p, &x0, &cfg)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Subgradient, cfg.alpha)?,
            "descent[quadratic x subgradient]",
        ));
        let t = backtracking_gd(&p, &x0, &base)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Backtracking, 0.0)?,
            "descent[quadratic x backtracking]",
        ));
        let t = cccp(&p, &x0, &base, &CccpConfig::for_problem(&p)?)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Cccp, 0.0)?,
            "descent[quadratic x cccp]",
        ));

        let pp = quad_with_identity_prox(1.0, 4.0, 1.0, -2.0)?;
        let cfg = base.clone().with_alpha(0.25);
        let t = prox_dc(&pp, &x0, &cfg)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Prox, cfg.alpha)?,
            "descent[quadratic x prox]",
        ));

        // Box large enough to contain the unconstrained minimizer; C0 at
        // least M * diam^2 = 4 * 32 keeps the gap step monotone.
        let lmo = lmo_box(array![-2.0, -2.0], array![2.0, 2.0])?;
        let mut cfg = base.clone().with_max_iter(400);
        cfg.c0 = 128.0;
        let t = frank_wolfe_dc(&p, &lmo, &x0, &cfg)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::FrankWolfe, 0.0)?,
            "descent[quadratic x frank-wolfe]",
        ));
    }

    // Strict saddle: no global smoothness constant, so the fixed step relies
    // on the level set the small start confines the iterates to.
    {
        let p = make_toy(&Toy::StrictSaddle)?;
        let x0 = default_init(2, seed);
        let cfg = base.clone().with_alpha(0.1);
        let t = subgradient_dc(&p, &x0, &cfg)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Subgradient, cfg.alpha)?,
            "descent[strict_saddle x subgradient]",
        ));
        let t = backtracking_gd(&p, &x0, &base)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Backtracking, 0.0)?,
            "descent[strict_saddle x backtracking]",
        ));
    }

    // Norm-power toy: nonsmooth h, step at the 1/M_g cap.
    {
        let p = make_toy(&Toy::NormPower { q: 1.5, dim: 2 })?;
        let x0 = default_init(2, seed);
        let cfg = base.clone().with_alpha(1.0);
        let t = subgradient_dc(&p, &x0, &cfg)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Subgradient, cfg.alpha)?,
            "descent[norm_power x subgradient]",
        ));
        let t = backtracking_gd(&p, &x0, &base)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Backtracking, 0.0)?,
            "descent[norm_power x backtracking]",
        ));
    }

    // One-dimensional |x| model: kinked h under both the fixed step and the
    // majorize-minimize outer loop.
    {
        let p = make_toy(&Toy::AbsDc)?;
        let x0 = default_init(1, seed);
        let cfg = base.clone().with_alpha(0.5);
        let t = subgradient_dc(&p, &x0, &cfg)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Subgradient, cfg.alpha)?,
            "descent[abs_dc x subgradient]",
        ));
        let t = cccp(&p, &x0, &base, &CccpConfig::new(0.5))?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Cccp, 0.0)?,
            "descent[abs_dc x cccp]",
        ));
    }

    // Tukey robust regression.
    {
        let (p, x0) = tukey_problem(seed)?;
        let m = p.smoothness().context("tukey instance knows M_g")?;
        let cfg = base.clone().with_alpha(1.0 / m);
        let t = subgradient_dc(&p, &x0, &cfg)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Subgradient, cfg.alpha)?,
            "descent[tukey x subgradient]",
        ));
        let t = backtracking_gd(&p, &x0, &base)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Backtracking, 0.0)?,
            "descent[tukey x backtracking]",
        ));
        let t = cccp(&p, &x0, &base, &CccpConfig::for_problem(&p)?)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Cccp, 0.0)?,
            "descent[tukey x cccp]",
        ));
    }

    // Best-subset regression: the prox solver it was built for, plus CCCP.
    {
        let (p, x0) = best_subset_problem(seed)?;
        let m = p.smoothness().context("best-subset instance knows M_g")?;
        let cfg = base.clone().with_alpha(1.0 / m);
        let t = prox_dc(&p, &x0, &cfg)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Prox, cfg.alpha)?,
            "descent[best_subset x prox]",
        ));
        let t = cccp(&p, &x0, &base, &CccpConfig::for_problem(&p)?)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Cccp, 0.0)?,
            "descent[best_subset x cccp]",
        ));
    }

    // Mixture likelihood: no global smoothness constant, and the objective
    // sums over the 200 samples, so its curvature scales with the sample
    // count; the step is sized for that scale near the moment-matched region
    // the run stays in.
    {
        let (p, theta0) = mixture_problem(seed)?;
        let cfg = base.clone().with_alpha(1e-4).with_max_iter(500);
        let t = prox_dc(&p, &theta0, &cfg)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Prox, cfg.alpha)?,
            "descent[mixture x prox]",
        ));
    }

    // Shape from shading on a small rendered cap.
    {
        let (p, z0) = sfs_problem(seed)?;
        let cfg = base.clone().with_tol(0.0).with_max_iter(200);
        let t = backtracking_gd(&p, &z0, &cfg)?;
        out.push(renamed(
            check_descent(&t, AlgoKind::Backtracking, 0.0)?,
            "descent[sfs x backtracking]",
        ));
    }

    Ok(out)
}

/// Extend a converged trace by repeating its terminal row. A converged
/// proximal iterate is a fixed point of its own update, so every later
/// iterate equals the final one exactly: zero steps, zero residual, constant
/// objective. This lets window-based fits treat early exact convergence as
/// the continuation it mathematically is.
fn pad_trace_to(t: &mut SolveTrace, len: usize) {
    if t.status != SolveStatus::Converged {
        return;
    }
    let last_f = *t.f_val.last().expect("traces are never empty");
    let last_elapsed = *t.elapsed.last().expect("traces are never empty");
    while t.f_val.len() < len {
        t.f_val.push(last_f);
        t.grad_norm.push(0.0);
        t.step_norm.push(0.0);
        t.fw_gap.push(None);
        t.step_size.push(0.0);
        t.elapsed.push(last_elapsed);
        if !t.inner_iters.is_empty() {
            let last_inner = *t.inner_iters.last().expect("nonempty");
            t.inner_iters.push(last_inner);
        }
    }
}

/// Slope of the running arithmetic mean of the residual column on a log-log
/// window, asserted against the fast-decay threshold.
fn kl_slope_report(
    trace: &SolveTrace,
    window: (usize, usize),
    threshold: f64,
    name: &str,
) -> anyhow::Result<CheckReport> {
    let means = running_arith_mean(&trace.grad_norm)?;
    let fit = fit_loglog_slope(&means, window.0, window.1)?;
    Ok(CheckReport {
        name: name.to_string(),
        worst_violation: fit.slope - threshold,
        passed: fit.slope <= threshold,
        k_worst: window.1,
        tol: 0.0,
    })
}

/// The telescoped rate certificates, each on an instance built to exercise
/// it, plus the fast log-log decay of the residual mean on strongly convex
/// instances and the worst-case bounds re-asserted on those same runs.
fn suite_rates(seed: u64) -> anyhow::Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let base = SolverConfig::default().with_seed(seed);

    // Fixed-step run on the robust-regression objective.
    {
        let (p, x0) = tukey_problem(seed)?;
        let alpha = 1.0 / p.smoothness().context("tukey instance knows M_g")?;
        let t = subgradient_dc(&p, &x0, &base.clone().with_alpha(alpha))?;
        let c = RateConstants { alpha: Some(alpha), ..Default::default() };
        out.push(renamed(
            check_rate_bound(&t, RateBound::T1, &c)?,
            "rate[T1][tukey x subgradient]",
        ));
    }

    // Proximal run on the sparsity-constrained objective: mean squared step.
    {
        let (p, x0) = best_subset_problem(seed)?;
        let alpha = 1.0 / p.smoothness().context("best-subset instance knows M_g")?;
        let t = prox_dc(&p, &x0, &base.clone().with_alpha(alpha))?;
        let c = RateConstants { alpha: Some(alpha), ..Default::default() };
        out.push(renamed(
            check_rate_bound(&t, RateBound::T2Step, &c)?,
            "rate[T2-step][best_subset x prox]",
        ));
    }

    // Smooth-h instance where the prox residual is the true gradient norm:
    // g = x' diag(3,6) x / 2 - b'x (M_g = 6), h = ||x||^2 / 2 (M_h = 1),
    // identity prox, step 1/6.
    {
        let p = DcProblem::builder(2)
            .smooth(
                |x| 0.5 * (3.0 * x[0] * x[0] + 6.0 * x[1] * x[1]) - x[0] + 2.0 * x[1],
                |x| array![3.0 * x[0] - 1.0, 6.0 * x[1] + 2.0],
            )
            .convex(|x| 0.5 * x.dot(x), |x| x.clone())
            .prox(|_| ExtReal::Finite(0.0), |z, _t| z.clone())
            .smoothness(6.0)
            .build()?;
        let x0 = default_init(2, seed);
        let alpha = 1.0 / 6.0;
        let t = prox_dc(&p, &x0, &base.clone().with_alpha(alpha))?;
        let c = RateConstants {
            alpha: Some(alpha),
            m_g: Some(6.0),
            m_h: Some(1.0),
            ..Default::default()
        };
        out.push(renamed(
            check_rate_bound(&t, RateBound::T2Grad, &c)?,
            "rate[T2-grad][smooth-h quadratic x prox]",
        ));
    }

    // Frank-Wolfe on the box-constrained quadratic: min-gap decay.
    {
        let p = quad_toy(1.0, 4.0, 1.0, -2.0)?;
        let lmo = lmo_box(array![-2.0, -2.0], array![2.0, 2.0])?;
        let mut cfg = base.clone().with_max_iter(400);
        cfg.c0 = 128.0;
        let t = frank_wolfe_dc(&p, &lmo, &default_init(2, seed), &cfg)?;
        let c = RateConstants { c0: Some(cfg.c0), ..Default::default() };
        out.push(renamed(
            check_rate_bound(&t, RateBound::T3, &c)?,
            "rate[T3][quadratic x frank-wolfe]",
        ));
    }

    // Strongly convex g (mu = 2) under majorize-minimize: mean squared step.
    {
        let p = make_toy(&Toy::AbsDc)?;
        let x0 = default_init(1, seed);
        let t = cccp(&p, &x0, &base, &CccpConfig::new(0.5))?;
        let c = RateConstants { mu: Some(2.0), ..Default::default() };
        out.push(renamed(
            check_rate_bound(&t, RateBound::P1Strong, &c)?,
            "rate[P1-strong][abs_dc x cccp]",
        ));
    }

    // Strongly convex quadratic under the fixed step: the residual's running
    // mean should decay like 1/k (log-log slope near -1), well below the
    // generic 1/sqrt(k) floor; the worst-case bound must hold on the same run.
    {
        let p = quad_toy(1.0, 4.0, 0.0, 0.0)?;
        let x0 = default_init(2, seed);
        let alpha = 0.25;
        let cfg = base.clone().with_alpha(alpha).with_tol(0.0).with_max_iter(1000);
        let t = subgradient_dc(&p, &x0, &cfg)?;
        out.push(kl_slope_report(
            &t,
            (10, 1000),
            -0.9,
            "kl-slope[quadratic x subgradient]",
        )?);
        let c = RateConstants { alpha: Some(alpha), ..Default::default() };
        out.push(renamed(
            check_rate_bound(&t, RateBound::T1, &c)?,
            "rate[T1][kl quadratic run]",
        ));
    }

    // Same fast-decay property for the proximal method with a soft-threshold
    // prox on a strongly convex smooth part. The run converges exactly in a
    // few steps; the padded continuation (see pad_trace_to) carries the
    // window to 1000.
    {
        let p = DcProblem::builder(2)
            .smooth(
                |x| x[0] * x[0] + 4.0 * x[1] * x[1] - 0.05 * x[0] + 4.0 * x[1],
                |x| array![2.0 * x[0] - 0.05, 8.0 * x[1] + 4.0],
            )
            .prox(
                |x| ExtReal::Finite(0.1 * (x[0].abs() + x[1].abs())),
                |z, t| {
                    dcopt::ops::prox_l1(z, t, 0.1).expect("fixed positive weight")
                },
            )
            .smoothness(8.0)
            .build()?;
        let x0 = default_init(2, seed);
        let alpha = 1.0 / 8.0;
        let cfg = base.clone().with_alpha(alpha).with_tol(0.0).with_max_iter(1000);
        let mut t = prox_dc(&p, &x0, &cfg)?;
        pad_trace_to(&mut t, 1001);
        out.push(kl_slope_report(&t, (10, 1000), -0.9, "kl-slope[l1 quadratic x prox]")?);
        let c = RateConstants { alpha: Some(alpha), ..Default::default() };
        out.push(renamed(
            check_rate_bound(&t, RateBound::T2Step, &c)?,
            "rate[T2-step][kl l1 run]",
        ));
    }

    Ok(out)
}

fn draw_normal(rng: &mut ChaCha8Rng) -> f64 {
    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
}

/// Analytic gradients against central finite differences of g - h at random
/// points, per problem; points steer clear of each objective's kinks and
/// domain boundary so the difference quotient is trustworthy.
fn suite_gradients(seed: u64) -> anyhow::Result<Vec<CheckReport>> {
    const POINTS: usize = 20;
    const TOL: f64 = 1e-5;
    let mut out = Vec::new();

    let mut check = |name: &str,
                     p: &DcProblem,
                     sample: &mut dyn FnMut(&mut ChaCha8Rng) -> Array1<f64>|
     -> anyhow::Result<()> {
        let mut rng = stream_rng(seed, streams::SAMPLING);
        let mut violations = Vec::with_capacity(POINTS);
        for _ in 0..POINTS {
            let x = sample(&mut rng);
            let a = p.dc_gradient(&x)?;
            let fd = finite_diff_gradient(
                |v| p.smooth_value(v).expect("dimension fixed") - p.convex_value(v).expect("dimension fixed"),
                &x,
                default_fd_step(&x),
            )?;
            let diff = &a - &fd;
            let rel = diff.dot(&diff).sqrt() / a.dot(&a).sqrt().max(1.0);
            violations.push(rel - TOL);
        }
        out.push(report_from(&format!("gradients[{name}]"), violations, 0.0));
        Ok(())
    };

    let gaussian = |dim: usize, scale: f64| {
        move |rng: &mut ChaCha8Rng| {
            Array1::from_shape_fn(dim, |_| scale * draw_normal(rng))
        }
    };

    check("quadratic", &quad_toy(1.0, 4.0, 1.0, -2.0)?, &mut gaussian(2, 1.0))?;
    check("strict_saddle", &make_toy(&Toy::StrictSaddle)?, &mut gaussian(2, 1.0))?;
    // The power-of-norm term is differentiable away from the origin only.
    check(
        "norm_power",
        &make_toy(&Toy::NormPower { q: 1.5, dim: 2 })?,
        &mut |rng: &mut ChaCha8Rng| {
            let mut x = Array1::from_shape_fn(2, |_| draw_normal(rng));
            let norm = x.dot(&x).sqrt();
            if norm < 0.2 {
                x += 0.5;
            }
            x
        },
    )?;
    // |x| is kinked at zero: keep a fixed distance from it.
    check("abs_dc", &make_toy(&Toy::AbsDc)?, &mut |rng: &mut ChaCha8Rng| {
        let v = draw_normal(rng);
        array![v.signum() * (0.3 + v.abs())]
    })?;
    let (tukey, _) = tukey_problem(seed)?;
    check("tukey", &tukey, &mut gaussian(8, 0.5))?;
    let (bs, _) = best_subset_problem(seed)?;
    check("best_subset", &bs, &mut gaussian(10, 0.5))?;
    // Mixture natural parameters: keep the variance blocks well inside the
    // domain (second block coordinates strictly negative).
    let (mix, _) = mixture_problem(seed)?;
    check("mixture", &mix, &mut |rng: &mut ChaCha8Rng| {
        array![
            0.8 * draw_normal(rng),
            -0.3 - rng.random_range(0.0..1.0),
            0.8 * draw_normal(rng),
            -0.3 - rng.random_range(0.0..1.0),
            0.2 + 0.6 * rng.random_range(0.0..1.0)
        ]
    })?;
    let (sfs, _) = sfs_problem(seed)?;
    check("sfs", &sfs, &mut gaussian(64, 0.5))?;

    Ok(out)
}

/// Arithmetic-geometric mean inequality on the running means, both for
/// synthetic positive sequences and for an actual solver residual sequence.
fn suite_means(seed: u64) -> anyhow::Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    const TOL: f64 = 1e-12;

    let am_gm_violations = |seq: &[f64]| -> anyhow::Result<Vec<f64>> {
        let am = running_arith_mean(seq)?;
        let gm = running_geo_mean(seq)?;
        Ok(am
            .iter()
            .zip(&gm)
            .map(|(a, g)| (g - a) / a.abs().max(f64::MIN_POSITIVE))
            .collect())
    };

    let mut rng = stream_rng(seed, streams::SAMPLING);
    let mut worst_rows = Vec::new();
    for _ in 0..5 {
        let seq: Vec<f64> = (0..200).map(|_| draw_normal(&mut rng).exp()).collect();
        worst_rows.extend(am_gm_violations(&seq)?);
    }
    out.push(report_from("means[am-gm lognormal]", worst_rows, TOL));

    let p = quad_toy(1.0, 4.0, 1.0, -2.0)?;
    let cfg = SolverConfig::default().with_alpha(0.25).with_seed(seed);
    let t = subgradient_dc(&p, &default_init(2, seed), &cfg)?;
    out.push(report_from(
        "means[am-gm residuals]",
        am_gm_violations(&t.grad_norm)?,
        TOL,
    ));

    Ok(out)
}

/// The monotonicity characterization of weak smoothness: passes where
/// membership in the smooth-minus-convex class at modulus M is guaranteed,
/// and must fail where M is below the function's true modulus.
fn suite_weak_smoothness(seed: u64) -> anyhow::Result<Vec<CheckReport>> {
    const SAMPLES: usize = 500;
    let mut out = Vec::new();

    let mut gauss2 = {
        move |rng: &mut ChaCha8Rng| Array1::from_shape_fn(2, |_| draw_normal(rng))
    };
    // -||x||^2 is concave: modulus 0 suffices.
    out.push(renamed(
        check_weak_smoothness(
            |x: &Array1<f64>| x * -2.0,
            &mut gauss2,
            0.0,
            SAMPLES,
            seed,
        ),
        "weak-smoothness[-||x||^2 at M = 0]",
    ));

    let unit_interval =
        |rng: &mut ChaCha8Rng| array![rng.random_range(-1.0..=1.0f64)];
    // x^4 on [-1,1]: second derivative peaks at 12.
    out.push(renamed(
        check_weak_smoothness(
            |x: &Array1<f64>| array![4.0 * x[0].powi(3)],
            unit_interval,
            12.0,
            SAMPLES,
            seed,
        ),
        "weak-smoothness[x^4 at M = 12]",
    ));
    // The same function must be rejected at M = 1: this report passes only
    // if the underlying check finds a genuine violation.
    let inner = check_weak_smoothness(
        |x: &Array1<f64>| array![4.0 * x[0].powi(3)],
        unit_interval,
        1.0,
        SAMPLES,
        seed,
    );
    out.push(CheckReport {
        name: "weak-smoothness[x^4 rejects M = 1]".into(),
        worst_violation: inner.tol - inner.worst_violation,
        passed: !inner.passed,
        k_worst: inner.k_worst,
        tol: 0.0,
    });

    // Every builtin with a known M_g: grad g is M_g-Lipschitz and the
    // subgradient of h is monotone, so the combined field satisfies the
    // inequality at M = M_g for any subgradient selection.
    let builtins: Vec<(&str, DcProblem, f64)> = {
        let (tukey, _) = tukey_problem(seed)?;
        let (bs, _) = best_subset_problem(seed)?;
        vec![
            ("quadratic", quad_toy(1.0, 4.0, 1.0, -2.0)?, 1.0),
            ("norm_power", make_toy(&Toy::NormPower { q: 1.5, dim: 2 })?, 1.0),
            ("abs_dc", make_toy(&Toy::AbsDc)?, 1.0),
            ("tukey", tukey, 0.5),
            ("best_subset", bs, 0.5),
        ]
    };
    for (name, p, scale) in builtins {
        let m = p.smoothness().context("builtin carries M_g")?;
        let dim = p.dim();
        let report = check_weak_smoothness(
            move |x: &Array1<f64>| p.dc_gradient(x).expect("dimension fixed"),
            move |rng: &mut ChaCha8Rng| {
                Array1::from_shape_fn(dim, |_| scale * draw_normal(rng))
            },
            m,
            200,
            seed,
        );
        out.push(renamed(report, &format!("weak-smoothness[{name} at M = M_g]")));
    }

    Ok(out)
}

/// Monte-Carlo saddle escape: many small random starts of the backtracking
/// solver on the strict-saddle toy must all land at one of the two minima,
/// never at the saddle at the origin.
fn suite_saddle(seed: u64) -> anyhow::Result<Vec<CheckReport>> {
    const RUNS: usize = 100;
    const GRAD_TOL: f64 = 1e-6;
    const DIST_TOL: f64 = 1e-3;
    let p = make_toy(&Toy::StrictSaddle)?;
    let cfg = SolverConfig::default().with_seed(seed);
    let mut rng = stream_rng(seed, streams::INIT);
    let mut violations = Vec::with_capacity(RUNS);
    for _ in 0..RUNS {
        let x0 = Array1::from_shape_fn(2, |_| 0.1 * draw_normal(&mut rng));
        let t = backtracking_gd(&p, &x0, &cfg)?;
        let x = &t.x_final;
        let g = p.dc_gradient(x)?;
        let gnorm = g.dot(&g).sqrt();
        let d_plus = ((x[0] - 1.0).powi(2) + x[1].powi(2)).sqrt();
        let d_minus = ((x[0] + 1.0).powi(2) + x[1].powi(2)).sqrt();
        let near_origin = x.dot(x).sqrt() <= DIST_TOL;
        violations.push(if near_origin {
            1.0
        } else {
            (gnorm - GRAD_TOL).max(d_plus.min(d_minus) - DIST_TOL)
        });
    }
    Ok(vec![report_from("saddle[strict_saddle x backtracking]", violations, 0.0)])
}

/// Sampled curvature of a difference of quadratics on a box: bounded above by
/// (M - mu) diam^2 and, with this many samples, well above half of it.
fn suite_curvature(seed: u64) -> anyhow::Result<Vec<CheckReport>> {
    const N: usize = 100_000;
    let p = DcProblem::builder(2)
        .smooth(|x| 1.5 * x.dot(x), |x| x * 3.0)
        .convex(|x| 0.5 * x.dot(x), |x| x.clone())
        .smoothness(3.0)
        .build()?;
    // Box [-1/2, 1/2]^2: diam^2 = 2, so (M - mu) diam^2 = (3 - 1) * 2 = 4.
    let bound = 4.0;
    let sampler = |rng: &mut ChaCha8Rng| {
        let draw = |rng: &mut ChaCha8Rng| {
            array![rng.random_range(-0.5..=0.5f64), rng.random_range(-0.5..=0.5f64)]
        };
        (draw(rng), draw(rng))
    };
    let est = estimate_curvature(&p, sampler, N, seed)?;
    Ok(vec![
        CheckReport {
            name: "curvature[upper (M - mu) diam^2]".into(),
            worst_violation: est - bound,
            passed: est <= bound + 1e-9,
            k_worst: 0,
            tol: 1e-9,
        },
        CheckReport {
            name: "curvature[lower half-bound]".into(),
            worst_violation: 0.5 * bound - est,
            passed: est >= 0.5 * bound,
            k_worst: 0,
            tol: 0.0,
        },
    ])
}
