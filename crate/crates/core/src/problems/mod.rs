//! Builtin problem instances: the four applications (best-subset regression,
//! Tukey robust regression, shape-from-shading, Gaussian-mixture likelihood)
//! and the small analytic toys the test batteries lean on.

pub mod best_subset;
pub mod mixture;
pub mod sfs;
pub mod tukey;

pub use best_subset::{
    brute_force_best_subset, convex_subproblem_residual, make_best_subset, refit_on_support,
    BestSubsetInstance, BruteForceResult,
};
pub use mixture::{make_gaussian_mixture_nll, project_mixture, MixtureInstance};
pub use sfs::{make_sfs, SfsInstance};
pub use tukey::{make_tukey, rho, rho_prime, TukeyInstance};

use ndarray::{Array1, Array2};

use crate::error::DcError;
use crate::linalg::sym_lambda_max;
use crate::ops::sign;
use crate::problem::DcProblem;
use crate::Result;

/// The analytic test functions.
#[derive(Debug, Clone)]
pub enum Toy {
    /// g = half x'Ax - b'x (A symmetric positive semidefinite), h = 0.
    Quadratic { a: Array2<f64>, b: Array1<f64> },
    /// f(x, y) = x^4/4 - x^2/2 + y^2/2 split as g = x^4/4 + y^2/2, h = x^2/2.
    /// Minima at (+/-1, 0), a strict saddle at the origin.
    StrictSaddle,
    /// g = half ||x||^2, h = ||x||_2^q with q in (1, 2): f is continuous but
    /// not smooth at the origin.
    NormPower { q: f64, dim: usize },
    /// g = x^2, h = |x| in one dimension; stationary points exactly {-1/2, 1/2}.
    AbsDc,
}

impl Toy {
    /// Canonical parameterization by name, as accepted on the command line.
    pub fn from_name(name: &str) -> Result<Toy> {
        match name {
            "quadratic" => Ok(Toy::Quadratic {
                a: ndarray::array![[1.0, 0.0], [0.0, 4.0]],
                b: Array1::zeros(2),
            }),
            "strict_saddle" => Ok(Toy::StrictSaddle),
            "norm_power" => Ok(Toy::NormPower { q: 1.5, dim: 2 }),
            "abs_dc" => Ok(Toy::AbsDc),
            other => Err(DcError::InvalidParam {
                name: "toy",
                reason: format!(
                    "unknown toy '{other}'; expected one of quadratic, strict_saddle, \
                     norm_power, abs_dc"
                ),
            }),
        }
    }
}

/// Build the named toy as a [`DcProblem`].
pub fn make_toy(toy: &Toy) -> Result<DcProblem> {
    match toy {
        Toy::Quadratic { a, b } => {
            let (ra, ca) = a.dim();
            if ra != ca || ra == 0 {
                return Err(DcError::InvalidParam {
                    name: "A",
                    reason: format!("need a square nonempty matrix, got {ra}x{ca}"),
                });
            }
            if b.len() != ra {
                return Err(DcError::DimensionMismatch {
                    expected: ra,
                    got: b.len(),
                });
            }
            let asym = a.iter().zip(a.t().iter()).all(|(u, v)| (u - v).abs() <= 1e-12);
            if !asym {
                return Err(DcError::InvalidParam {
                    name: "A",
                    reason: "matrix must be symmetric".into(),
                });
            }
            let m = sym_lambda_max(a)?;
            let (av, ag) = (a.clone(), a.clone());
            let (bv, bg) = (b.clone(), b.clone());
            DcProblem::builder(ra)
                .smooth(
                    move |x| 0.5 * x.dot(&av.dot(x)) - bv.dot(x),
                    move |x| ag.dot(x) - &bg,
                )
                .smoothness(m)
                .build()
        }
        Toy::StrictSaddle => DcProblem::builder(2)
            .smooth(
                |x| 0.25 * x[0].powi(4) + 0.5 * x[1] * x[1],
                |x| ndarray::array![x[0].powi(3), x[1]],
            )
            .convex(|x| 0.5 * x[0] * x[0], |x| ndarray::array![x[0], 0.0])
            .lower_bound(-0.25)
            .build(),
        Toy::NormPower { q, dim } => {
            if !(*q > 1.0 && *q < 2.0) {
                return Err(DcError::InvalidParam {
                    name: "q",
                    reason: format!("norm power must lie in (1, 2), got {q}"),
                });
            }
            if *dim == 0 {
                return Err(DcError::InvalidParam {
                    name: "dim",
                    reason: "dimension must be positive".into(),
                });
            }
            let qv = *q;
            let qg = *q;
            DcProblem::builder(*dim)
                .smooth(|x| 0.5 * x.dot(x), |x| x.clone())
                .convex(
                    move |x| x.dot(x).sqrt().powf(qv),
                    move |x| {
                        let norm = x.dot(x).sqrt();
                        if norm == 0.0 {
                            // 0 is a valid subgradient of ||.||^q at the origin for q > 1.
                            Array1::zeros(x.len())
                        } else {
                            x * (qg * norm.powf(qg - 2.0))
                        }
                    },
                )
                .smoothness(1.0)
                .build()
        }
        Toy::AbsDc => DcProblem::builder(1)
            .smooth(|x| x[0] * x[0], |x| ndarray::array![2.0 * x[0]])
            .convex(|x| x[0].abs(), |x| ndarray::array![sign(x[0])])
            .smoothness(2.0)
            .lower_bound(-0.25)
            .build(),
    }
}
