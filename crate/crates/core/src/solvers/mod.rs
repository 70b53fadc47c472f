//! The five iterative methods. Each takes a problem, a start point, and a
//! config, and returns a [`SolveTrace`] whose rows the diagnostics module can
//! audit against the corresponding descent and rate guarantees.

mod backtracking;
mod cccp;
mod frank_wolfe;
mod prox;
mod subgradient;

pub use backtracking::backtracking_gd;
pub use cccp::{cccp, CccpConfig};
pub use frank_wolfe::frank_wolfe_dc;
pub use prox::prox_dc;
pub use subgradient::subgradient_dc;

use ndarray::Array1;

use crate::error::DcError;
use crate::ops::{project_ball, project_box};
use crate::Result;

type OracleFn = Box<dyn Fn(&Array1<f64>) -> Array1<f64> + Send + Sync>;
type MemberFn = Box<dyn Fn(&Array1<f64>) -> bool + Send + Sync>;

/// Linear minimization oracle over a compact convex set X: maps a direction
/// `c` to `argmin_{s in X} <s, c>`. Carries the set's Euclidean diameter (for
/// curvature bounds) and a membership predicate (so solvers can reject
/// infeasible starting points).
pub struct LinearMinOracle {
    minimize: OracleFn,
    contains: MemberFn,
    diameter: f64,
}

impl LinearMinOracle {
    pub fn new<F, M>(minimize: F, contains: M, diameter: f64) -> Self
    where
        F: Fn(&Array1<f64>) -> Array1<f64> + Send + Sync + 'static,
        M: Fn(&Array1<f64>) -> bool + Send + Sync + 'static,
    {
        LinearMinOracle {
            minimize: Box::new(minimize),
            contains: Box::new(contains),
            diameter,
        }
    }

    /// `argmin_{s in X} <s, c>`.
    pub fn minimize(&self, c: &Array1<f64>) -> Array1<f64> {
        (self.minimize)(c)
    }

    /// Whether `x` lies in X (up to exact arithmetic on box/ball instances).
    pub fn contains(&self, x: &Array1<f64>) -> bool {
        (self.contains)(x)
    }

    /// Euclidean diameter of X.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }
}

/// LMO for the box `[lo, hi]`: pick `lo_i` when `c_i >= 0` (ties to `lo`),
/// else `hi_i`. Diameter `||hi - lo||_2`.
pub fn lmo_box(lo: Array1<f64>, hi: Array1<f64>) -> Result<LinearMinOracle> {
    if lo.len() != hi.len() {
        return Err(DcError::DimensionMismatch {
            expected: lo.len(),
            got: hi.len(),
        });
    }
    for i in 0..lo.len() {
        if lo[i] > hi[i] {
            return Err(DcError::InvalidParam {
                name: "lo/hi",
                reason: format!("lo[{i}] = {} exceeds hi[{i}] = {}", lo[i], hi[i]),
            });
        }
    }
    let diff = &hi - &lo;
    let diameter = diff.dot(&diff).sqrt();
    let (lo_m, hi_m) = (lo.clone(), hi.clone());
    let minimize = move |c: &Array1<f64>| {
        Array1::from_iter(
            c.iter()
                .enumerate()
                .map(|(i, &ci)| if ci > 0.0 { lo_m[i] } else if ci < 0.0 { hi_m[i] } else { lo_m[i] }),
        )
    };
    let contains = move |x: &Array1<f64>| {
        x.len() == lo.len() && x.iter().enumerate().all(|(i, &v)| lo[i] <= v && v <= hi[i])
    };
    Ok(LinearMinOracle::new(minimize, contains, diameter))
}

/// LMO for the ball of radius `R` about `center`: `center - R c / ||c||`
/// (`c = 0` maps to the center). Diameter `2R`.
pub fn lmo_ball(center: Array1<f64>, r: f64) -> Result<LinearMinOracle> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(DcError::InvalidParam {
            name: "R",
            reason: format!("radius must be nonnegative, got {r}"),
        });
    }
    let c_m = center.clone();
    let minimize = move |c: &Array1<f64>| {
        let norm = c.dot(c).sqrt();
        if norm == 0.0 {
            c_m.clone()
        } else {
            &c_m - &(c * (r / norm))
        }
    };
    let c_in = center.clone();
    let contains = move |x: &Array1<f64>| {
        if x.len() != c_in.len() {
            return false;
        }
        let d = x - &c_in;
        // Minor slack: membership of freshly projected points must not fail on
        // the last bit.
        d.dot(&d).sqrt() <= r * (1.0 + 4.0 * f64::EPSILON)
    };
    Ok(LinearMinOracle::new(minimize, contains, 2.0 * r))
}

/// Box-projection oracle matching [`lmo_box`]'s set; convenience for building
/// indicator-constrained problems in tests and the CLI.
pub fn box_projector(
    lo: Array1<f64>,
    hi: Array1<f64>,
) -> impl Fn(&Array1<f64>, f64) -> Array1<f64> + Send + Sync + 'static {
    move |z, _t| project_box(z, &lo, &hi).expect("box projector dimensions fixed at build")
}

/// Ball-projection oracle matching [`lmo_ball`]'s set.
pub fn ball_projector(
    center: Array1<f64>,
    r: f64,
) -> impl Fn(&Array1<f64>, f64) -> Array1<f64> + Send + Sync + 'static {
    move |z, _t| project_ball(z, &center, r).expect("ball projector dimensions fixed at build")
}

/// Shared entry validation: dimension match plus the `alpha <= 1/M_g` cap
/// required by the descent analysis whenever the problem knows its smoothness.
fn validate_entry(
    p: &crate::DcProblem,
    x0: &Array1<f64>,
    cfg: &crate::SolverConfig,
    cap_alpha: bool,
) -> Result<()> {
    cfg.validate()?;
    if x0.len() != p.dim() {
        return Err(DcError::DimensionMismatch {
            expected: p.dim(),
            got: x0.len(),
        });
    }
    if cap_alpha {
        if let Some(m) = p.smoothness() {
            let limit = 1.0 / m;
            // Tiny slack so alpha = 1/M_g survives the division's rounding.
            if cfg.alpha > limit * (1.0 + 1e-12) {
                return Err(DcError::StepTooLarge {
                    alpha: cfg.alpha,
                    limit,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn box_lmo_sign_rule() {
        let lmo = lmo_box(array![-1.0, -1.0], array![1.0, 1.0]).unwrap();
        assert_eq!(lmo.minimize(&array![0.3, -2.0]), array![-1.0, 1.0]);
        // Zero component ties to lo.
        assert_eq!(lmo.minimize(&array![0.0, 1.0]), array![-1.0, -1.0]);
        assert!(lmo.contains(&array![0.5, -0.5]));
        assert!(!lmo.contains(&array![1.5, 0.0]));
        assert!((lmo.diameter() - 8.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ball_lmo_antipodal_rule() {
        let lmo = lmo_ball(Array1::zeros(2), 2.0).unwrap();
        assert_eq!(lmo.minimize(&array![0.0, 5.0]), array![0.0, -2.0]);
        assert_eq!(lmo.minimize(&array![0.0, 0.0]), array![0.0, 0.0]);
        assert_eq!(lmo.diameter(), 4.0);
    }

    // The LMO really minimizes the linear form: compare against sampled
    // feasible points.
    #[test]
    fn lmo_linear_optimality_sampled() {
        use crate::rng::{stream_rng, streams};
        use rand::Rng;
        let mut rng = stream_rng(3, streams::SAMPLING);
        let lo = array![-1.0, 0.0, -2.0];
        let hi = array![2.0, 0.5, -1.0];
        let box_lmo = lmo_box(lo.clone(), hi.clone()).unwrap();
        let ball_lmo = lmo_ball(array![1.0, -1.0, 0.0], 1.5).unwrap();
        for _ in 0..200 {
            let c = Array1::from_iter((0..3).map(|_| rng.random_range(-2.0..2.0f64)));
            let s_box = box_lmo.minimize(&c);
            assert!(box_lmo.contains(&s_box));
            let s_ball = ball_lmo.minimize(&c);
            assert!(ball_lmo.contains(&s_ball));
            for _ in 0..50 {
                let x_box = Array1::from_iter(
                    (0..3).map(|i| rng.random_range(lo[i]..=hi[i])),
                );
                assert!(s_box.dot(&c) <= x_box.dot(&c) + 1e-12);
                let dir = Array1::from_iter((0..3).map(|_| rng.random_range(-1.0..1.0f64)));
                let norm = dir.dot(&dir).sqrt().max(1e-9);
                let radius: f64 = rng.random_range(0.0..1.5);
                let x_ball = array![1.0, -1.0, 0.0] + dir * (radius / norm);
                assert!(s_ball.dot(&c) <= x_ball.dot(&c) + 1e-12);
            }
        }
    }
}
