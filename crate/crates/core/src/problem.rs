//! Problem description: oracles for g, h, and phi plus optional constants.

use ndarray::Array1;

use crate::error::DcError;
use crate::Result;

type ValueFn = Box<dyn Fn(&Array1<f64>) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(&Array1<f64>) -> Array1<f64> + Send + Sync>;
type PhiValueFn = Box<dyn Fn(&Array1<f64>) -> ExtReal + Send + Sync>;
type ProxFn = Box<dyn Fn(&Array1<f64>, f64) -> Array1<f64> + Send + Sync>;

/// Extended-real value of the nonsmooth part `phi`. Indicator functions return
/// [`ExtReal::Infeasible`] outside their set; no sentinel floats are involved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infeasible,
}

impl ExtReal {
    /// Finite payload, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infeasible => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(v) if v.is_finite())
    }
}

/// A difference-of-convex objective `f = g - h + phi`.
///
/// `g` enters through value and gradient oracles, `h` through value and
/// subgradient oracles (any measurable selection of the subdifferential), and
/// `phi` optionally through a value oracle and a prox oracle
/// `prox(z, t) = argmin_w phi(w) + ||w - z||^2 / (2 t)`.
pub struct DcProblem {
    dim: usize,
    smooth_value: ValueFn,
    smooth_grad: GradFn,
    convex_value: ValueFn,
    convex_subgrad: GradFn,
    prox_value: Option<PhiValueFn>,
    prox_map: Option<ProxFn>,
    smoothness: Option<f64>,
    lower_bound: Option<f64>,
}

impl DcProblem {
    /// Start building a problem of the given dimension. `h` and `phi` default
    /// to zero (subgradient zero, no prox part).
    pub fn builder(dim: usize) -> DcProblemBuilder {
        DcProblemBuilder {
            dim,
            smooth_value: None,
            smooth_grad: None,
            convex_value: None,
            convex_subgrad: None,
            prox_value: None,
            prox_map: None,
            smoothness: None,
            lower_bound: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lipschitz constant of `grad g`, when known.
    pub fn smoothness(&self) -> Option<f64> {
        self.smoothness
    }

    /// A known lower bound on `f`, when available.
    pub fn lower_bound(&self) -> Option<f64> {
        self.lower_bound
    }

    /// Whether the problem carries a prox part (`phi` not identically zero).
    pub fn has_prox(&self) -> bool {
        self.prox_map.is_some()
    }

    fn check_dim(&self, x: &Array1<f64>) -> Result<()> {
        if x.len() != self.dim {
            return Err(DcError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `g(x)`.
    pub fn smooth_value(&self, x: &Array1<f64>) -> Result<f64> {
        self.check_dim(x)?;
        Ok((self.smooth_value)(x))
    }

    /// `grad g(x)`.
    pub fn smooth_grad(&self, x: &Array1<f64>) -> Result<Array1<f64>> {
        self.check_dim(x)?;
        Ok((self.smooth_grad)(x))
    }

    /// `h(x)`.
    pub fn convex_value(&self, x: &Array1<f64>) -> Result<f64> {
        self.check_dim(x)?;
        Ok((self.convex_value)(x))
    }

    /// The problem's chosen element of the subdifferential of `h` at `x`.
    pub fn convex_subgrad(&self, x: &Array1<f64>) -> Result<Array1<f64>> {
        self.check_dim(x)?;
        Ok((self.convex_subgrad)(x))
    }

    /// `phi(x)` as an extended real; zero when the problem has no prox part.
    pub fn prox_value(&self, x: &Array1<f64>) -> Result<ExtReal> {
        self.check_dim(x)?;
        match &self.prox_value {
            Some(f) => Ok(f(x)),
            None => Ok(ExtReal::Finite(0.0)),
        }
    }

    /// `prox(z, t) = argmin_w phi(w) + ||w - z||^2 / (2t)`; requires a prox part.
    pub fn prox_map(&self, z: &Array1<f64>, t: f64) -> Result<Array1<f64>> {
        self.check_dim(z)?;
        if t <= 0.0 {
            return Err(DcError::InvalidParam {
                name: "t",
                reason: format!("prox step must be positive, got {t}"),
            });
        }
        match &self.prox_map {
            Some(f) => Ok(f(z, t)),
            None => Err(DcError::MissingProx),
        }
    }

    /// Full objective `f(x) = g(x) - h(x) + phi(x)` as an extended real.
    /// Infeasible exactly when `phi(x)` is.
    pub fn eval_objective(&self, x: &Array1<f64>) -> Result<ExtReal> {
        self.check_dim(x)?;
        let base = (self.smooth_value)(x) - (self.convex_value)(x);
        Ok(match self.prox_value(x)? {
            ExtReal::Finite(p) => ExtReal::Finite(base + p),
            ExtReal::Infeasible => ExtReal::Infeasible,
        })
    }

    /// The gradient surrogate `grad g(x) - u`, `u` the chosen subgradient of `h`.
    /// The prox part contributes through the prox step itself, never here.
    pub fn dc_gradient(&self, x: &Array1<f64>) -> Result<Array1<f64>> {
        self.check_dim(x)?;
        Ok((self.smooth_grad)(x) - (self.convex_subgrad)(x))
    }
}

impl std::fmt::Debug for DcProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DcProblem")
            .field("dim", &self.dim)
            .field("has_prox", &self.has_prox())
            .field("smoothness", &self.smoothness)
            .field("lower_bound", &self.lower_bound)
            .finish()
    }
}

/// Builder for [`DcProblem`]. `smooth` is mandatory; everything else defaults
/// to the zero function/absent constant.
pub struct DcProblemBuilder {
    dim: usize,
    smooth_value: Option<ValueFn>,
    smooth_grad: Option<GradFn>,
    convex_value: Option<ValueFn>,
    convex_subgrad: Option<GradFn>,
    prox_value: Option<PhiValueFn>,
    prox_map: Option<ProxFn>,
    smoothness: Option<f64>,
    lower_bound: Option<f64>,
}

impl DcProblemBuilder {
    pub fn smooth<V, G>(mut self, value: V, grad: G) -> Self
    where
        V: Fn(&Array1<f64>) -> f64 + Send + Sync + 'static,
        G: Fn(&Array1<f64>) -> Array1<f64> + Send + Sync + 'static,
    {
        self.smooth_value = Some(Box::new(value));
        self.smooth_grad = Some(Box::new(grad));
        self
    }

    pub fn convex<V, G>(mut self, value: V, subgrad: G) -> Self
    where
        V: Fn(&Array1<f64>) -> f64 + Send + Sync + 'static,
        G: Fn(&Array1<f64>) -> Array1<f64> + Send + Sync + 'static,
    {
        self.convex_value = Some(Box::new(value));
        self.convex_subgrad = Some(Box::new(subgrad));
        self
    }

    pub fn prox<V, P>(mut self, value: V, map: P) -> Self
    where
        V: Fn(&Array1<f64>) -> ExtReal + Send + Sync + 'static,
        P: Fn(&Array1<f64>, f64) -> Array1<f64> + Send + Sync + 'static,
    {
        self.prox_value = Some(Box::new(value));
        self.prox_map = Some(Box::new(map));
        self
    }

    pub fn smoothness(mut self, m: f64) -> Self {
        self.smoothness = Some(m);
        self
    }

    pub fn lower_bound(mut self, b: f64) -> Self {
        self.lower_bound = Some(b);
        self
    }

    pub fn build(self) -> Result<DcProblem> {
        if self.dim == 0 {
            return Err(DcError::InvalidParam {
                name: "dim",
                reason: "problem dimension must be positive".into(),
            });
        }
        let (smooth_value, smooth_grad) = match (self.smooth_value, self.smooth_grad) {
            (Some(v), Some(g)) => (v, g),
            _ => {
                return Err(DcError::InvalidParam {
                    name: "smooth",
                    reason: "smooth part (value + gradient) is required".into(),
                })
            }
        };
        if let Some(m) = self.smoothness {
            if !(m.is_finite() && m > 0.0) {
                return Err(DcError::InvalidParam {
                    name: "smoothness",
                    reason: format!("must be finite and positive, got {m}"),
                });
            }
        }
        let dim = self.dim;
        let convex_value = self
            .convex_value
            .unwrap_or_else(|| Box::new(|_: &Array1<f64>| 0.0));
        let convex_subgrad = self
            .convex_subgrad
            .unwrap_or_else(|| Box::new(move |_: &Array1<f64>| Array1::zeros(dim)));
        Ok(DcProblem {
            dim,
            smooth_value,
            smooth_grad,
            convex_value,
            convex_subgrad,
            prox_value: self.prox_value,
            prox_map: self.prox_map,
            smoothness: self.smoothness,
            lower_bound: self.lower_bound,
        })
    }
}

/// Shared solver knobs. `alpha` is the fixed step (subgradient/prox solvers and
/// the residual scale for CCCP), `beta` the backtracking ratio, `c0` the
/// Frank-Wolfe curvature constant, `tol` the residual threshold, `seed` the key
/// for any randomness a caller derives for initialization.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub alpha: f64,
    pub beta: f64,
    pub c0: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha: 0.1,
            beta: 0.5,
            c0: 1.0,
            max_iter: 1000,
            tol: 1e-8,
            seed: 0,
        }
    }
}

impl SolverConfig {
    /// Validate fields every solver relies on. Individual solvers add their own
    /// checks (e.g. the 1/M_g cap on `alpha`).
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(DcError::InvalidParam {
                name: "alpha",
                reason: format!("must be finite and positive, got {}", self.alpha),
            });
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(DcError::InvalidParam {
                name: "beta",
                reason: format!("must lie in (0, 1), got {}", self.beta),
            });
        }
        if !(self.c0.is_finite() && self.c0 > 0.0) {
            return Err(DcError::InvalidParam {
                name: "c0",
                reason: format!("must be finite and positive, got {}", self.c0),
            });
        }
        if self.max_iter == 0 {
            return Err(DcError::InvalidParam {
                name: "max_iter",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(DcError::InvalidParam {
                name: "tol",
                reason: format!("must be finite and nonnegative, got {}", self.tol),
            });
        }
        Ok(())
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn abs_dc_problem() -> DcProblem {
        // g = x^2, h = |x| in one dimension; critical points 0 and +-1/2.
        DcProblem::builder(1)
            .smooth(|x| x[0] * x[0], |x| ndarray::array![2.0 * x[0]])
            .convex(|x| x[0].abs(), |x| ndarray::array![x[0].signum() * f64::from(x[0] != 0.0)])
            .smoothness(2.0)
            .build()
            .unwrap()
    }

    #[test]
    fn objective_combines_all_three_parts() {
        // g = ||x||^2 at (1,2) = 5, h = sum(x) = 3, phi = 0.5 fixed.
        let p = DcProblem::builder(2)
            .smooth(
                |x| x.dot(x),
                |x| 2.0 * x,
            )
            .convex(|x| x.sum(), |x| Array1::ones(x.len()))
            .prox(|_| ExtReal::Finite(0.5), |z, _| z.clone())
            .build()
            .unwrap();
        let v = p.eval_objective(&array![1.0, 2.0]).unwrap();
        assert_eq!(v, ExtReal::Finite(5.0 - 3.0 + 0.5));
    }

    #[test]
    fn objective_with_dc_parts_only() {
        let p = abs_dc_problem();
        let v = p.eval_objective(&array![0.5]).unwrap();
        assert_eq!(v.finite().unwrap(), 0.25 - 0.5);
    }

    #[test]
    fn objective_infeasible_iff_phi_infeasible() {
        let p = DcProblem::builder(1)
            .smooth(|x| x[0], |_| array![1.0])
            .prox(
                |x| {
                    if x[0] >= 0.0 {
                        ExtReal::Finite(0.0)
                    } else {
                        ExtReal::Infeasible
                    }
                },
                |z, _| z.mapv(|v| v.max(0.0)),
            )
            .build()
            .unwrap();
        assert!(p.eval_objective(&array![1.0]).unwrap().is_finite());
        assert_eq!(
            p.eval_objective(&array![-1.0]).unwrap(),
            ExtReal::Infeasible
        );
    }

    #[test]
    fn dc_gradient_subtracts_chosen_subgradient() {
        let p = abs_dc_problem();
        // At 0.5: 2*0.5 - sign(0.5) = 0, a critical point.
        assert_eq!(p.dc_gradient(&array![0.5]).unwrap()[0], 0.0);
        // sign(0) = 0 convention: at 0 the surrogate is just grad g = 0.
        assert_eq!(p.dc_gradient(&array![0.0]).unwrap()[0], 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = abs_dc_problem();
        let err = p.eval_objective(&array![1.0, 2.0]).unwrap_err();
        assert!(matches!(
            err,
            DcError::DimensionMismatch {
                expected: 1,
                got: 2
            }
        ));
    }

    #[test]
    fn missing_prox_is_an_error() {
        let p = abs_dc_problem();
        assert!(matches!(
            p.prox_map(&array![1.0], 1.0).unwrap_err(),
            DcError::MissingProx
        ));
    }

    #[test]
    fn config_rejects_bad_fields() {
        let bad = SolverConfig::default().with_alpha(0.0);
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            beta: 1.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            tol: -1.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(SolverConfig::default().validate().is_ok());
    }
}
