//! Subgradient-type method: fixed-step descent on f = g - h.

use ndarray::Array1;

use crate::error::DcError;
use crate::problem::{DcProblem, SolverConfig};
use crate::trace::{AlgoKind, SolveStatus, SolveTrace, TraceBuilder};
use crate::Result;

/// Fixed-step iteration `x^{k+1} = x^k - alpha (grad g(x^k) - u^k)` for
/// problems with no prox part. With `alpha <= 1/M_g` every step satisfies the
/// descent inequality `f(x^{k+1}) <= f(x^k) - (alpha/2) ||grad f(x^k)||^2`.
/// Stops when the gradient surrogate norm falls to `cfg.tol`.
pub fn subgradient_dc(p: &DcProblem, x0: &Array1<f64>, cfg: &SolverConfig) -> Result<SolveTrace> {
    super::validate_entry(p, x0, cfg, true)?;
    if p.has_prox() {
        return Err(DcError::UnexpectedProx);
    }

    let mut tb = TraceBuilder::new(AlgoKind::Subgradient, cfg.max_iter + 1);
    let mut x = x0.clone();
    let mut f = p.smooth_value(&x)? - p.convex_value(&x)?;

    for k in 0..=cfg.max_iter {
        let grad = p.dc_gradient(&x)?;
        let gnorm = grad.dot(&grad).sqrt();

        if !f.is_finite() || !gnorm.is_finite() {
            tb.push_final(f, gnorm, None);
            return Ok(tb.finish(x, SolveStatus::Diverged));
        }
        if gnorm <= cfg.tol {
            tb.push_final(f, gnorm, None);
            return Ok(tb.finish(x, SolveStatus::Converged));
        }
        if k == cfg.max_iter {
            tb.push_final(f, gnorm, None);
            return Ok(tb.finish(x, SolveStatus::IterCap));
        }

        let x_next = &x - &(&grad * cfg.alpha);
        let step = {
            let d = &x - &x_next;
            d.dot(&d).sqrt()
        };
        tb.push_step(f, gnorm, step, None, cfg.alpha);
        f = p.smooth_value(&x_next)? - p.convex_value(&x_next)?;
        x = x_next;
    }
    unreachable!("loop exits through a terminal row");
}
