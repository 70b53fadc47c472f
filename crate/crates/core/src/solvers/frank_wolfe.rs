//! Frank-Wolfe type method over a compact convex constraint set.

use ndarray::Array1;

use crate::error::DcError;
use crate::problem::{DcProblem, SolverConfig};
use crate::trace::{AlgoKind, SolveStatus, SolveTrace, TraceBuilder};
use crate::Result;

use super::LinearMinOracle;

/// Frank-Wolfe iteration on `f = g - h` over the oracle's set X. At each
/// iterate: `s^k = argmin_{s in X} <s, c^k>` with `c^k = grad g - u`, gap
/// `G^k = -<s^k - x^k, c^k> >= 0`, step `gamma^k = min(G^k / C0, 1)`, update
/// along `s^k - x^k`. With `C0` at least the curvature constant of `f` on X,
/// `min_j G^j` decays like `1/sqrt(k+1)`. Stops when the gap falls to
/// `cfg.tol`. The trace records the gap per row and `||c^k||` as `grad_norm`.
pub fn frank_wolfe_dc(
    p: &DcProblem,
    lmo: &LinearMinOracle,
    x0: &Array1<f64>,
    cfg: &SolverConfig,
) -> Result<SolveTrace> {
    super::validate_entry(p, x0, cfg, false)?;
    if !lmo.contains(x0) {
        return Err(DcError::InfeasibleStart(
            "x0 lies outside the constraint set".into(),
        ));
    }

    let eval = |x: &Array1<f64>| -> Result<f64> {
        Ok(p.smooth_value(x)? - p.convex_value(x)?)
    };

    let mut tb = TraceBuilder::new(AlgoKind::FrankWolfe, cfg.max_iter + 1);
    let mut x = x0.clone();
    let mut f = eval(&x)?;

    for k in 0..=cfg.max_iter {
        let c = p.dc_gradient(&x)?;
        let cnorm = c.dot(&c).sqrt();
        let s = lmo.minimize(&c);
        let d = &s - &x;
        let gap = -d.dot(&c);

        if !f.is_finite() || !gap.is_finite() {
            tb.push_final(f, cnorm, Some(gap));
            return Ok(tb.finish(x, SolveStatus::Diverged));
        }
        if gap <= cfg.tol {
            tb.push_final(f, cnorm, Some(gap));
            return Ok(tb.finish(x, SolveStatus::Converged));
        }
        if k == cfg.max_iter {
            tb.push_final(f, cnorm, Some(gap));
            return Ok(tb.finish(x, SolveStatus::IterCap));
        }

        let gamma = (gap / cfg.c0).min(1.0);
        let x_next = &x + &(&d * gamma);
        let step = {
            let diff = &x - &x_next;
            diff.dot(&diff).sqrt()
        };
        tb.push_step(f, cnorm, step, Some(gap), gamma);
        f = eval(&x_next)?;
        x = x_next;
    }
    unreachable!("loop exits through a terminal row");
}
