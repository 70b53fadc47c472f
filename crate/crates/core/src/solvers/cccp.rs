//! Convex-concave procedure: majorize with the linearization of h, minimize
//! the resulting convex surrogate, repeat.

use ndarray::Array1;

use crate::error::DcError;
use crate::problem::{DcProblem, ExtReal, SolverConfig};
use crate::trace::{AlgoKind, SolveStatus, SolveTrace, TraceBuilder};
use crate::Result;

/// Inner-solve knobs for the majorant minimization.
#[derive(Debug, Clone)]
pub struct CccpConfig {
    pub inner_max_iter: usize,
    pub inner_tol: f64,
    /// Proximal-gradient step for the inner solve; `1/M_g` is the canonical
    /// choice (the majorant's smooth part inherits g's smoothness).
    pub inner_step: f64,
}

impl CccpConfig {
    pub fn new(inner_step: f64) -> Self {
        CccpConfig {
            inner_max_iter: 500,
            inner_tol: 1e-8,
            inner_step,
        }
    }

    /// Inner step `1/M_g` from the problem's known smoothness.
    pub fn for_problem(p: &DcProblem) -> Result<Self> {
        let m = p.smoothness().ok_or(DcError::MissingConstant("M_g"))?;
        Ok(CccpConfig::new(1.0 / m))
    }

    fn validate(&self) -> Result<()> {
        if self.inner_max_iter == 0 {
            return Err(DcError::InvalidParam {
                name: "inner_max_iter",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.inner_tol.is_finite() && self.inner_tol > 0.0) {
            return Err(DcError::InvalidParam {
                name: "inner_tol",
                reason: format!("must be positive, got {}", self.inner_tol),
            });
        }
        if !(self.inner_step.is_finite() && self.inner_step > 0.0) {
            return Err(DcError::InvalidParam {
                name: "inner_step",
                reason: format!("must be positive, got {}", self.inner_step),
            });
        }
        Ok(())
    }
}

/// Majorize-minimize on `f = g - h + phi` (g convex). At `x^k` the surrogate
/// `Q(w) = g(w) - h(x^k) - <u^k, w - x^k> + phi(w)` sits above `f` and touches
/// it at `x^k`; its minimizer becomes `x^{k+1}`.
///
/// The inner solve is proximal gradient on `g(w) - <u^k, w>` (plain gradient
/// descent when there is no prox part), warm-started at `x^k`, run to
/// `inner.inner_tol` on its own step residual. Warm starting means every inner
/// pass only descends `Q` from `Q(x^k) = f(x^k)`, which preserves the outer
/// monotonicity even when the inner iteration cap trips (the cap is flagged in
/// the trace). Outer stopping mirrors the prox solver: scaled step residual
/// `||x^k - x^{k+1}|| / cfg.alpha <= cfg.tol`.
pub fn cccp(
    p: &DcProblem,
    x0: &Array1<f64>,
    cfg: &SolverConfig,
    inner: &CccpConfig,
) -> Result<SolveTrace> {
    super::validate_entry(p, x0, cfg, false)?;
    inner.validate()?;
    if p.has_prox() {
        match p.eval_objective(x0)? {
            ExtReal::Finite(_) => {}
            ExtReal::Infeasible => {
                return Err(DcError::InfeasibleStart(
                    "phi(x0) is infinite; start inside dom(phi)".into(),
                ))
            }
        }
    }

    let eval = |x: &Array1<f64>| -> Result<f64> {
        Ok(match p.eval_objective(x)? {
            ExtReal::Finite(v) => v,
            ExtReal::Infeasible => f64::INFINITY,
        })
    };

    let mut tb = TraceBuilder::new(AlgoKind::Cccp, cfg.max_iter + 1);
    let mut x = x0.clone();
    let mut f = eval(&x)?;
    let mut inner_total = 0usize;

    for k in 0..=cfg.max_iter {
        if !f.is_finite() {
            tb.push_final(f, f64::NAN, None);
            tb.push_inner(inner_total);
            return Ok(tb.finish(x, SolveStatus::Diverged));
        }

        // Minimize the majorant from the current iterate.
        let u = p.convex_subgrad(&x)?;
        let mut w = x.clone();
        let s = inner.inner_step;
        let mut inner_count = 0usize;
        let mut hit_cap = true;
        while inner_count < inner.inner_max_iter {
            let g_grad = p.smooth_grad(&w)?;
            let target = &w - &((&g_grad - &u) * s);
            let w_next = if p.has_prox() {
                p.prox_map(&target, s)?
            } else {
                target
            };
            let moved = {
                let d = &w - &w_next;
                d.dot(&d).sqrt()
            };
            w = w_next;
            inner_count += 1;
            if moved / s <= inner.inner_tol {
                hit_cap = false;
                break;
            }
        }
        if hit_cap {
            tb.flag_inner_cap();
        }
        inner_total += inner_count;

        let step = {
            let d = &x - &w;
            d.dot(&d).sqrt()
        };
        let residual = step / cfg.alpha;

        if !residual.is_finite() {
            tb.push_final(f, residual, None);
            tb.push_inner(inner_total);
            return Ok(tb.finish(x, SolveStatus::Diverged));
        }
        if residual <= cfg.tol {
            tb.push_final(f, residual, None);
            tb.push_inner(inner_total);
            return Ok(tb.finish(x, SolveStatus::Converged));
        }
        if k == cfg.max_iter {
            tb.push_final(f, residual, None);
            tb.push_inner(inner_total);
            return Ok(tb.finish(x, SolveStatus::IterCap));
        }

        tb.push_step(f, residual, step, None, cfg.alpha);
        tb.push_inner(inner_total);
        f = eval(&w)?;
        x = w;
    }
    unreachable!("loop exits through a terminal row");
}
