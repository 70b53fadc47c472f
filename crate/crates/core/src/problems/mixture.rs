//! Two-component Gaussian mixture likelihood in natural-parameter form.
//! The decision variable is theta = (eta0, eta1, pi) in R^5; the negative
//! log-likelihood is smooth on the feasible set, and the constraints (a ball
//! and the margin eta_2 <= -eps per component, pi in [0, 1]) enter through an
//! indicator phi whose prox is a blockwise projection.

use std::sync::Arc;

use ndarray::{array, Array1};

use crate::error::DcError;
use crate::ops::project_ball;
use crate::problem::{DcProblem, ExtReal};
use crate::Result;

/// Tolerance for feasibility membership checks. The projection is exact up
/// to rounding; the slack absorbs the few ulps downstream arithmetic adds
/// when iterates are rebuilt from projected blocks.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

/// Default margin keeping eta_2 strictly inside the domain eta_2 < 0.
pub const DEFAULT_MARGIN: f64 = 1e-3;

/// Log-partition function of the Gaussian natural family,
/// A(eta) = -eta_1^2 / (4 eta_2) - (1/2) ln(-2 eta_2); finite iff eta_2 < 0.
fn log_partition(e1: f64, e2: f64) -> f64 {
    -e1 * e1 / (4.0 * e2) - 0.5 * (-2.0 * e2).ln()
}

/// Gradient of [`log_partition`].
fn log_partition_grad(e1: f64, e2: f64) -> (f64, f64) {
    (-e1 / (2.0 * e2), e1 * e1 / (4.0 * e2 * e2) - 1.0 / (2.0 * e2))
}

/// A mixture likelihood instance.
#[derive(Debug, Clone)]
pub struct MixtureInstance {
    /// Observed scalar samples.
    pub samples: Array1<f64>,
    /// Ball radii for the two natural-parameter blocks.
    pub r0: f64,
    pub r1: f64,
    /// Domain margin eps > 0 enforcing eta_2 <= -eps.
    pub eps: f64,
}

impl MixtureInstance {
    pub fn new(samples: Array1<f64>, r0: f64, r1: f64) -> Result<Self> {
        Self::with_margin(samples, r0, r1, DEFAULT_MARGIN)
    }

    pub fn with_margin(samples: Array1<f64>, r0: f64, r1: f64, eps: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(DcError::EmptySequence("mixture samples"));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(DcError::NonFinite {
                context: format!("mixture sample {bad}"),
            });
        }
        for (name, v) in [("R0", r0), ("R1", r1), ("eps", eps)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DcError::InvalidParam {
                    name,
                    reason: format!("must be positive, got {v}"),
                });
            }
        }
        if eps >= r0.min(r1) {
            return Err(DcError::InvalidParam {
                name: "eps",
                reason: format!(
                    "margin {eps} must be smaller than both radii ({r0}, {r1}); otherwise the feasible set has no interior"
                ),
            });
        }
        Ok(MixtureInstance { samples, r0, r1, eps })
    }
}

/// Exact Euclidean projection of one natural-parameter block onto
/// ball(0, r) intersected with the halfspace {v_2 <= -eps}. In two
/// dimensions the projection has a closed form: if clamping v_2 lands in
/// the ball that is the answer; else if radial scaling onto the sphere
/// satisfies the margin that is the answer; else both constraints are
/// active and the projection is the cap corner (+-sqrt(r^2-eps^2), -eps).
/// Points already in the intersection pass through bitwise unchanged, and
/// re-projecting any output reproduces it bitwise.
fn project_block(v0: f64, v1: f64, r: f64, eps: f64) -> (f64, f64) {
    let h1 = v1.min(-eps);
    if (v0 * v0 + h1 * h1).sqrt() <= r {
        return (v0, h1);
    }
    let b = project_ball(&array![v0, v1], &Array1::zeros(2), r).expect("radius validated positive");
    if b[1] <= -eps {
        return (b[0], b[1]);
    }
    let c0 = (r * r - eps * eps).sqrt();
    (if v0 >= 0.0 { c0 } else { -c0 }, -eps)
}

/// Blockwise projection of theta = (eta0, eta1, pi) onto the feasible
/// product set: exact ball-and-margin projection per eta block, clamp
/// for pi.
pub fn project_mixture(theta: &Array1<f64>, r0: f64, r1: f64, eps: f64) -> Array1<f64> {
    let (a0, a1) = project_block(theta[0], theta[1], r0, eps);
    let (b0, b1) = project_block(theta[2], theta[3], r1, eps);
    array![a0, a1, b0, b1, theta[4].clamp(0.0, 1.0)]
}

/// Membership in the feasible set, with [`FEASIBILITY_SLACK`] tolerance.
pub fn mixture_feasible(theta: &Array1<f64>, r0: f64, r1: f64, eps: f64) -> bool {
    let s = FEASIBILITY_SLACK;
    let n0 = (theta[0] * theta[0] + theta[1] * theta[1]).sqrt();
    let n1 = (theta[2] * theta[2] + theta[3] * theta[3]).sqrt();
    n0 <= r0 + s
        && n1 <= r1 + s
        && theta[1] <= -eps + s
        && theta[3] <= -eps + s
        && (-s..=1.0 + s).contains(&theta[4])
}

/// g(theta) = -sum_i ln(pi e^{s0(y_i)} + (1-pi) e^{s1(y_i)}) with
/// s_j(y) = eta_j1 y + eta_j2 y^2 - A(eta_j); h = 0; phi = the indicator of
/// the feasible set with the blockwise projection as prox. Evaluations with
/// eta_2 >= 0 return +infinity (outside the likelihood's domain).
pub fn make_gaussian_mixture_nll(inst: &MixtureInstance) -> Result<DcProblem> {
    let samples = Arc::new(inst.samples.clone());
    let samples_g = Arc::clone(&samples);
    let (r0, r1, eps) = (inst.r0, inst.r1, inst.eps);
    DcProblem::builder(5)
        .smooth(
            move |t| {
                let (e01, e02, e11, e12, pi) = (t[0], t[1], t[2], t[3], t[4]);
                if e02 >= 0.0 || e12 >= 0.0 {
                    return f64::INFINITY;
                }
                let (a0, a1) = (log_partition(e01, e02), log_partition(e11, e12));
                let mut nll = 0.0;
                for &y in samples.iter() {
                    let s0 = e01 * y + e02 * y * y - a0;
                    let s1 = e11 * y + e12 * y * y - a1;
                    let m = s0.max(s1);
                    let mix = pi * (s0 - m).exp() + (1.0 - pi) * (s1 - m).exp();
                    nll -= m + mix.ln();
                }
                nll
            },
            move |t| {
                let (e01, e02, e11, e12, pi) = (t[0], t[1], t[2], t[3], t[4]);
                if e02 >= 0.0 || e12 >= 0.0 {
                    return Array1::from_elem(5, f64::NAN);
                }
                let (a0, a1) = (log_partition(e01, e02), log_partition(e11, e12));
                let da0 = log_partition_grad(e01, e02);
                let da1 = log_partition_grad(e11, e12);
                let mut g = Array1::zeros(5);
                for &y in samples_g.iter() {
                    let s0 = e01 * y + e02 * y * y - a0;
                    let s1 = e11 * y + e12 * y * y - a1;
                    let m = s0.max(s1);
                    let (w0, w1) = ((s0 - m).exp(), (s1 - m).exp());
                    let mix = pi * w0 + (1.0 - pi) * w1;
                    let (p0, p1) = (pi * w0 / mix, (1.0 - pi) * w1 / mix);
                    g[0] -= p0 * (y - da0.0);
                    g[1] -= p0 * (y * y - da0.1);
                    g[2] -= p1 * (y - da1.0);
                    g[3] -= p1 * (y * y - da1.1);
                    g[4] -= (w0 - w1) / mix;
                }
                g
            },
        )
        .prox(
            move |t| {
                if mixture_feasible(t, r0, r1, eps) {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::Infeasible
                }
            },
            move |z, _t| project_mixture(z, r0, r1, eps),
        )
        .build()
}
