//! Gradient descent with backtracking line search.

use ndarray::Array1;

use crate::problem::{DcProblem, SolverConfig};
use crate::trace::{AlgoKind, SolveStatus, SolveTrace, TraceBuilder};
use crate::Result;

/// Largest admissible power of beta before the run is declared failed.
const MAX_BACKTRACKS: u32 = 200;

/// Backtracking gradient descent for problems differentiable as a whole
/// (h smooth or absent, no prox part). At each iterate the smallest
/// `i >= 0` is chosen with `f(x - beta^i grad f(x)) <= f(x) - (beta^i / 2)
/// ||grad f(x)||^2`; the accepted step is recorded in the trace. Needs no
/// smoothness constant; when one exists the accepted step never falls below
/// `min(1, beta / M_g)`.
pub fn backtracking_gd(p: &DcProblem, x0: &Array1<f64>, cfg: &SolverConfig) -> Result<SolveTrace> {
    super::validate_entry(p, x0, cfg, false)?;
    if p.has_prox() {
        return Err(crate::error::DcError::UnexpectedProx);
    }

    let eval = |x: &Array1<f64>| -> Result<f64> {
        Ok(p.smooth_value(x)? - p.convex_value(x)?)
    };

    let mut tb = TraceBuilder::new(AlgoKind::Backtracking, cfg.max_iter + 1);
    let mut x = x0.clone();
    let mut f = eval(&x)?;

    for k in 0..=cfg.max_iter {
        let grad = p.dc_gradient(&x)?;
        let gsq = grad.dot(&grad);
        let gnorm = gsq.sqrt();

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

        let mut accepted: Option<(f64, Array1<f64>, f64)> = None;
        let mut eta = 1.0;
        for _ in 0..=MAX_BACKTRACKS {
            let cand = &x - &(&grad * eta);
            let f_cand = eval(&cand)?;
            if f_cand <= f - 0.5 * eta * gsq {
                accepted = Some((eta, cand, f_cand));
                break;
            }
            eta *= cfg.beta;
        }
        let Some((eta, x_next, f_next)) = accepted else {
            // Step underflow: no power of beta up to 200 passes the test.
            tb.push_final(f, gnorm, None);
            return Ok(tb.finish(x, SolveStatus::Diverged));
        };

        let step = {
            let d = &x - &x_next;
            d.dot(&d).sqrt()
        };
        tb.push_step(f, gnorm, step, None, eta);
        x = x_next;
        f = f_next;
    }
    unreachable!("loop exits through a terminal row");
}
