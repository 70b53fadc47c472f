//! Proximal-type method for problems with a nonsmooth/indicator part.

use ndarray::Array1;

use crate::error::DcError;
use crate::problem::{DcProblem, ExtReal, SolverConfig};
use crate::trace::{AlgoKind, SolveStatus, SolveTrace, TraceBuilder};
use crate::Result;

/// Proximal iteration `x^{k+1} = prox(x^k - alpha (grad g(x^k) - u^k), alpha)`.
///
/// Each step obeys `f(x^k) - f(x^{k+1}) >= ||x^k - x^{k+1}||^2 / (2 alpha)`.
/// The trace's `grad_norm` column holds the scaled step residual
/// `||x^k - x^{k+1}|| / alpha` (the gradient-mapping proxy); the run stops
/// when it falls to `cfg.tol`. Note that with an identity prox (phi = 0) the
/// residual coincides with the true surrogate gradient norm.
pub fn prox_dc(p: &DcProblem, x0: &Array1<f64>, cfg: &SolverConfig) -> Result<SolveTrace> {
    super::validate_entry(p, x0, cfg, true)?;
    if !p.has_prox() {
        return Err(DcError::MissingProx);
    }
    match p.eval_objective(x0)? {
        ExtReal::Finite(_) => {}
        ExtReal::Infeasible => {
            return Err(DcError::InfeasibleStart(
                "phi(x0) is infinite; start inside dom(phi)".into(),
            ))
        }
    }

    let eval = |x: &Array1<f64>| -> Result<f64> {
        Ok(match p.eval_objective(x)? {
            ExtReal::Finite(v) => v,
            ExtReal::Infeasible => f64::INFINITY,
        })
    };

    let mut tb = TraceBuilder::new(AlgoKind::Prox, cfg.max_iter + 1);
    let mut x = x0.clone();
    let mut f = eval(&x)?;

    for k in 0..=cfg.max_iter {
        let grad = p.dc_gradient(&x)?;
        let z = &x - &(&grad * cfg.alpha);
        let x_next = p.prox_map(&z, cfg.alpha)?;
        let step = {
            let d = &x - &x_next;
            d.dot(&d).sqrt()
        };
        let residual = step / cfg.alpha;

        if !f.is_finite() || !residual.is_finite() {
            tb.push_final(f, residual, None);
            return Ok(tb.finish(x, SolveStatus::Diverged));
        }
        if residual <= cfg.tol {
            tb.push_final(f, residual, None);
            return Ok(tb.finish(x, SolveStatus::Converged));
        }
        if k == cfg.max_iter {
            tb.push_final(f, residual, None);
            return Ok(tb.finish(x, SolveStatus::IterCap));
        }

        tb.push_step(f, residual, step, None, cfg.alpha);
        f = eval(&x_next)?;
        x = x_next;
    }
    unreachable!("loop exits through a terminal row");
}
