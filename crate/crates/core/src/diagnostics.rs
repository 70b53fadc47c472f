//! Guarantee auditing: running means, per-iteration descent checks, telescoped
//! rate-bound checks, empirical rate-exponent fitting, curvature estimation,
//! the weak-smoothness (smooth-minus-convex) test, and the finite-difference
//! gradient oracle.
//!
//! Every check returns a [`CheckReport`] rather than panicking: the worst
//! violation, where it occurred, and whether it stayed within the check's
//! tolerance. Rate bounds replace the unknown infimum f* with the run's final
//! objective value, which the telescoping arguments make strictly stronger
//! than the stated bounds.

use ndarray::Array1;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::DcError;
use crate::problem::DcProblem;
use crate::rng::{stream_rng, streams};
use crate::trace::{AlgoKind, SolveTrace};
use crate::Result;

/// Outcome of one asserted inequality family.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    /// Max over iterations of LHS - RHS (scaled per check); negative when the
    /// inequality held everywhere.
    pub worst_violation: f64,
    pub passed: bool,
    /// Iteration (or sample) index of the worst violation.
    pub k_worst: usize,
    /// The tolerance `passed` was judged against.
    pub tol: f64,
}

impl CheckReport {
    fn from_violations(name: &str, violations: impl Iterator<Item = f64>, tol: f64) -> Self {
        let mut worst = f64::NEG_INFINITY;
        let mut k_worst = 0;
        let mut any = false;
        for (k, v) in violations.enumerate() {
            any = true;
            if v > worst {
                worst = v;
                k_worst = k;
            }
        }
        if !any {
            // Vacuous check (e.g. single-iterate trace): trivially satisfied.
            worst = f64::NEG_INFINITY;
        }
        CheckReport {
            name: name.to_string(),
            worst_violation: worst,
            passed: worst <= tol,
            k_worst,
            tol,
        }
    }
}

/// Least-squares fit of log(metric) against log(iteration).
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub slope: f64,
    pub window: (usize, usize),
    pub r2: f64,
}

/// out[k] = mean of the first k+1 entries.
pub fn running_arith_mean(seq: &[f64]) -> Result<Vec<f64>> {
    if seq.is_empty() {
        return Err(DcError::EmptySequence("running_arith_mean"));
    }
    let mut out = Vec::with_capacity(seq.len());
    let mut sum = 0.0;
    for (k, &v) in seq.iter().enumerate() {
        sum += v;
        out.push(sum / (k + 1) as f64);
    }
    Ok(out)
}

/// out[k] = geometric mean of the first k+1 entries, computed in log space;
/// a zero entry pins every subsequent output to zero.
pub fn running_geo_mean(seq: &[f64]) -> Result<Vec<f64>> {
    if seq.is_empty() {
        return Err(DcError::EmptySequence("running_geo_mean"));
    }
    let mut out = Vec::with_capacity(seq.len());
    let mut log_sum = 0.0;
    let mut hit_zero = false;
    for (k, &v) in seq.iter().enumerate() {
        if v < 0.0 {
            return Err(DcError::NegativeEntry { index: k, value: v });
        }
        if v == 0.0 {
            hit_zero = true;
        }
        if hit_zero {
            out.push(0.0);
        } else {
            log_sum += v.ln();
            out.push((log_sum / (k + 1) as f64).exp());
        }
    }
    Ok(out)
}

/// Per-iteration descent tolerance, relative to max(1, |f(x^k)|).
pub const DESCENT_REL_TOL: f64 = 1e-10;
/// Absolute tolerance for the telescoped rate bounds.
pub const RATE_TOL: f64 = 1e-8;

fn require_algo(trace: &SolveTrace, expected: AlgoKind) -> Result<()> {
    if trace.algo != expected {
        return Err(DcError::AlgoMismatch {
            expected,
            actual: trace.algo,
        });
    }
    Ok(())
}

/// Per-iteration descent inequality for the given algorithm's trace:
///
/// * subgradient: f(x^k) - f(x^{k+1}) >= (alpha/2) ||grad f(x^k)||^2
/// * backtracking: same with the recorded accepted step in place of alpha
/// * prox: f(x^k) - f(x^{k+1}) >= ||x^k - x^{k+1}||^2 / (2 alpha)
/// * CCCP: monotone descent f(x^{k+1}) <= f(x^k) (the trace-observable
///   consequence of majorant descent)
///
/// Violations are scaled by max(1, |f(x^k)|); tolerance [`DESCENT_REL_TOL`].
pub fn check_descent(trace: &SolveTrace, algo: AlgoKind, alpha: f64) -> Result<CheckReport> {
    require_algo(trace, algo)?;
    if matches!(algo, AlgoKind::Subgradient | AlgoKind::Prox) && !(alpha > 0.0) {
        return Err(DcError::InvalidParam {
            name: "alpha",
            reason: format!("descent check needs a positive step, got {alpha}"),
        });
    }
    let n = trace.len();
    let steps = n.saturating_sub(1);
    let violations = (0..steps).map(|k| {
        let drop = trace.f_val[k] - trace.f_val[k + 1];
        let required = match algo {
            AlgoKind::Subgradient => 0.5 * alpha * trace.grad_norm[k] * trace.grad_norm[k],
            AlgoKind::Backtracking => {
                0.5 * trace.step_size[k] * trace.grad_norm[k] * trace.grad_norm[k]
            }
            AlgoKind::Prox => trace.step_norm[k] * trace.step_norm[k] / (2.0 * alpha),
            // Monotone nonincrease: for CCCP it follows from majorant descent;
            // for Frank-Wolfe it holds whenever C0 upper-bounds the curvature.
            AlgoKind::Cccp | AlgoKind::FrankWolfe => 0.0,
        };
        (required - drop) / trace.f_val[k].abs().max(1.0)
    });
    let name = format!("descent[{algo:?}]");
    Ok(CheckReport::from_violations(&name, violations, DESCENT_REL_TOL))
}

/// Which telescoped guarantee to assert.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateBound {
    /// mean_{j<=k} ||grad f(x^j)||^2 <= 2 (f0 - f^{k+1}) / (alpha (k+1)).
    T1,
    /// mean_{j<=k} ||x^j - x^{j+1}||^2 <= 2 alpha (f0 - f^{k+1}) / (k+1).
    T2Step,
    /// mean_{j<=k} ||grad f(x^j)||^2 <= 2 alpha C (f0 - f^{k+1}) / (k+1) with
    /// C = (M_g + M_h + 1/alpha)^2; meaningful on smooth-h instances where the
    /// prox trace's residual column is the true gradient norm (phi = 0).
    T2Grad,
    /// min_{j<=k} G^j <= max{2 (f0 - f^{k+1}), C0} / sqrt(k+1).
    T3,
    /// mean_{j<=k} ||x^j - x^{j+1}||^2 <= 2 (f0 - f^{k+1}) / (mu (k+1)).
    P1Strong,
}

/// Constants a rate check may need; supply the ones the bound uses.
#[derive(Debug, Clone, Copy, Default)]
pub struct RateConstants {
    pub alpha: Option<f64>,
    pub m_g: Option<f64>,
    pub m_h: Option<f64>,
    pub c0: Option<f64>,
    pub mu: Option<f64>,
}

fn need(c: Option<f64>, name: &'static str) -> Result<f64> {
    c.ok_or(DcError::MissingConstant(name))
}

/// Assert the selected telescoped bound at every k (absolute tolerance
/// [`RATE_TOL`]), with f* replaced by f(x^{k+1}).
pub fn check_rate_bound(
    trace: &SolveTrace,
    bound: RateBound,
    constants: &RateConstants,
) -> Result<CheckReport> {
    let n = trace.len();
    let steps = n.saturating_sub(1);
    let f0 = if n > 0 { trace.f_val[0] } else { 0.0 };

    let report = match bound {
        RateBound::T1 => {
            require_algo(trace, AlgoKind::Subgradient)?;
            let alpha = need(constants.alpha, "alpha")?;
            let mut sum_sq = 0.0;
            let violations = (0..steps).map(|k| {
                sum_sq += trace.grad_norm[k] * trace.grad_norm[k];
                let mean = sum_sq / (k + 1) as f64;
                let rhs = 2.0 * (f0 - trace.f_val[k + 1]) / (alpha * (k + 1) as f64);
                mean - rhs
            });
            CheckReport::from_violations("rate[T1]", violations, RATE_TOL)
        }
        RateBound::T2Step => {
            require_algo(trace, AlgoKind::Prox)?;
            let alpha = need(constants.alpha, "alpha")?;
            let mut sum_sq = 0.0;
            let violations = (0..steps).map(|k| {
                sum_sq += trace.step_norm[k] * trace.step_norm[k];
                let mean = sum_sq / (k + 1) as f64;
                let rhs = 2.0 * alpha * (f0 - trace.f_val[k + 1]) / (k + 1) as f64;
                mean - rhs
            });
            CheckReport::from_violations("rate[T2-step]", violations, RATE_TOL)
        }
        RateBound::T2Grad => {
            require_algo(trace, AlgoKind::Prox)?;
            let alpha = need(constants.alpha, "alpha")?;
            let m_g = need(constants.m_g, "M_g")?;
            let m_h = need(constants.m_h, "M_h")?;
            let c = (m_g + m_h + 1.0 / alpha).powi(2);
            let mut sum_sq = 0.0;
            let violations = (0..steps).map(|k| {
                sum_sq += trace.grad_norm[k] * trace.grad_norm[k];
                let mean = sum_sq / (k + 1) as f64;
                let rhs = 2.0 * alpha * c * (f0 - trace.f_val[k + 1]) / (k + 1) as f64;
                mean - rhs
            });
            CheckReport::from_violations("rate[T2-grad]", violations, RATE_TOL)
        }
        RateBound::T3 => {
            require_algo(trace, AlgoKind::FrankWolfe)?;
            let c0 = need(constants.c0, "C0")?;
            let mut min_gap = f64::INFINITY;
            let violations = (0..steps).map(|k| {
                let gap = trace.fw_gap[k].unwrap_or(f64::INFINITY);
                min_gap = min_gap.min(gap);
                let rhs =
                    (2.0 * (f0 - trace.f_val[k + 1])).max(c0) / ((k + 1) as f64).sqrt();
                min_gap - rhs
            });
            CheckReport::from_violations("rate[T3]", violations, RATE_TOL)
        }
        RateBound::P1Strong => {
            require_algo(trace, AlgoKind::Cccp)?;
            let mu = need(constants.mu, "mu")?;
            if !(mu > 0.0) {
                return Err(DcError::InvalidParam {
                    name: "mu",
                    reason: format!("strong convexity modulus must be positive, got {mu}"),
                });
            }
            let mut sum_sq = 0.0;
            let violations = (0..steps).map(|k| {
                sum_sq += trace.step_norm[k] * trace.step_norm[k];
                let mean = sum_sq / (k + 1) as f64;
                let rhs = 2.0 * (f0 - trace.f_val[k + 1]) / (mu * (k + 1) as f64);
                mean - rhs
            });
            CheckReport::from_violations("rate[P1-strong]", violations, RATE_TOL)
        }
    };
    Ok(report)
}

/// Least-squares line through (log k, log seq[k]) for k in [k_min, k_max].
/// A nonpositive entry truncates the window at the preceding k. Errors when
/// fewer than 3 usable points remain.
pub fn fit_loglog_slope(seq: &[f64], k_min: usize, k_max: usize) -> Result<RateFit> {
    if k_min < 1 {
        return Err(DcError::InvalidParam {
            name: "k_min",
            reason: "log fit needs k_min >= 1".into(),
        });
    }
    if k_max >= seq.len() || k_min > k_max {
        return Err(DcError::InvalidParam {
            name: "k_max",
            reason: format!(
                "window [{k_min}, {k_max}] not contained in sequence of length {}",
                seq.len()
            ),
        });
    }
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        if seq[k] <= 0.0 {
            break;
        }
        pts.push(((k as f64).ln(), seq[k].ln()));
    }
    if pts.len() < 3 {
        return Err(DcError::WindowTooShort {
            k_min,
            k_max,
            usable: pts.len(),
        });
    }
    // An exactly constant window would leave both sxy and syy at rounding
    // noise, making their ratio meaningless; report the flat line directly.
    if pts.iter().all(|p| p.1 == pts[0].1) {
        return Ok(RateFit {
            slope: 0.0,
            window: (k_min, k_max),
            r2: 1.0,
        });
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0);
    Ok(RateFit {
        slope,
        window: (k_min, k_max),
        r2,
    })
}

/// Empirical lower estimate of the generalized curvature constant of
/// f = g - h on a set X: max over `n` sampled triples (x, u, gamma) of
///
/// ```text
///   (2 / gamma^2) [ f(y) - f(x) - <y - x, grad g(x) - u_h(x)> ],
///   y = x + gamma (u - x), gamma uniform in (0, 1].
/// ```
///
/// The sampler yields (x, u) pairs in X. Draws are sequential on one stream,
/// so for a fixed seed the estimate is monotone nondecreasing in `n`. This is
/// a sampled lower bound on the true constant, never a certified C0.
pub fn estimate_curvature<S>(p: &DcProblem, mut sampler: S, n: usize, seed: u64) -> Result<f64>
where
    S: FnMut(&mut ChaCha8Rng) -> (Array1<f64>, Array1<f64>),
{
    if n == 0 {
        return Err(DcError::InvalidParam {
            name: "n",
            reason: "need at least one sample".into(),
        });
    }
    let mut rng = stream_rng(seed, streams::SAMPLING);
    let f = |x: &Array1<f64>| -> Result<f64> {
        Ok(p.smooth_value(x)? - p.convex_value(x)?)
    };
    let mut best = f64::NEG_INFINITY;
    for _ in 0..n {
        let (x, u) = sampler(&mut rng);
        // Uniform on (0, 1]: flip the half-open end of random_range.
        let gamma = 1.0 - rng.random_range(0.0..1.0f64);
        let d = &u - &x;
        let y = &x + &(&d * gamma);
        let lin = p.dc_gradient(&x)?.dot(&(&y - &x));
        let val = 2.0 / (gamma * gamma) * (f(&y)? - f(&x)? - lin);
        if val > best {
            best = val;
        }
    }
    Ok(best)
}

/// Sampled test of the monotonicity characterization of M-weak smoothness:
/// `<grad f(x) - grad f(y), x - y> <= M ||x - y||^2 + 1e-9` over `n` pairs.
/// Passing certifies membership in the smooth-minus-convex class on the
/// sampled region (a function is so decomposable iff the inequality holds).
pub fn check_weak_smoothness<G, S>(
    grad: G,
    mut sampler: S,
    m: f64,
    n: usize,
    seed: u64,
) -> CheckReport
where
    G: Fn(&Array1<f64>) -> Array1<f64>,
    S: FnMut(&mut ChaCha8Rng) -> Array1<f64>,
{
    const TOL: f64 = 1e-9;
    let mut rng = stream_rng(seed, streams::SAMPLING);
    let violations = (0..n).map(|_| {
        let x = sampler(&mut rng);
        let y = sampler(&mut rng);
        let d = &x - &y;
        let lhs = (grad(&x) - grad(&y)).dot(&d);
        lhs - m * d.dot(&d)
    });
    CheckReport::from_violations(&format!("weak-smoothness[M={m}]"), violations, TOL)
}

/// Central finite differences, the independent oracle for gradient checks.
pub fn finite_diff_gradient<F>(fval: F, x: &Array1<f64>, h: f64) -> Result<Array1<f64>>
where
    F: Fn(&Array1<f64>) -> f64,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(DcError::InvalidParam {
            name: "h",
            reason: format!("difference step must be positive, got {h}"),
        });
    }
    let mut out = Array1::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = fval(&probe);
        probe[i] = x[i] - h;
        let fm = fval(&probe);
        probe[i] = x[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(DcError::NonFinite {
                context: format!("finite difference at coordinate {i}"),
            });
        }
        out[i] = (fp - fm) / (2.0 * h);
    }
    Ok(out)
}

/// Default central-difference step: 1e-5 * max(1, ||x||_inf).
pub fn default_fd_step(x: &Array1<f64>) -> f64 {
    let inf = x.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    1e-5 * inf.max(1.0)
}
