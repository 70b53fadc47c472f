//! Robust linear regression with Tukey's biweight loss. The loss saturates at
//! one outside the scale window, so the objective is bounded, smooth, and
//! non-convex; it fits the framework with h = 0 and phi = 0.

use std::sync::Arc;

use ndarray::{Array1, Array2};

use crate::error::DcError;
use crate::linalg::sym_lambda_max;
use crate::problem::DcProblem;
use crate::Result;

/// Tukey biweight: rho(t) = 1 - (1 - (t/lam)^2)^3 for |t| <= lam, else 1.
pub fn rho(t: f64, lam: f64) -> f64 {
    let u = t / lam;
    if u.abs() <= 1.0 {
        1.0 - (1.0 - u * u).powi(3)
    } else {
        1.0
    }
}

/// Derivative of [`rho`]: (6t/lam^2)(1 - (t/lam)^2)^2 inside the window,
/// zero outside (and exactly zero at |t| = lam, so rho is C^1).
pub fn rho_prime(t: f64, lam: f64) -> f64 {
    let u = t / lam;
    if u.abs() <= 1.0 {
        6.0 * t / (lam * lam) * (1.0 - u * u).powi(2)
    } else {
        0.0
    }
}

/// A robust regression instance.
#[derive(Debug, Clone)]
pub struct TukeyInstance {
    /// n x d design matrix of covariate rows z_i.
    pub z: Array2<f64>,
    /// Length-n responses.
    pub y: Array1<f64>,
    /// Scale parameter lambda > 0.
    pub lam: f64,
}

impl TukeyInstance {
    pub fn new(z: Array2<f64>, y: Array1<f64>, lam: f64) -> Result<Self> {
        let (n, d) = z.dim();
        if n == 0 || d == 0 {
            return Err(DcError::InvalidParam {
                name: "Z",
                reason: format!("need a nonempty design, got {n}x{d}"),
            });
        }
        if y.len() != n {
            return Err(DcError::DimensionMismatch { expected: n, got: y.len() });
        }
        if !(lam.is_finite() && lam > 0.0) {
            return Err(DcError::InvalidParam {
                name: "lam",
                reason: format!("scale must be positive, got {lam}"),
            });
        }
        Ok(TukeyInstance { z, y, lam })
    }
}

/// g(mu) = (1/n) sum_i rho(y_i - <z_i, mu>), h = 0, phi = 0. The gradient is
/// -(1/n) sum_i rho'(r_i) z_i; the second derivative of rho is bounded by
/// 36/lam^2 on its support, giving M_g = (36/lam^2) lambda_max((1/n) Z'Z).
pub fn make_tukey(inst: &TukeyInstance) -> Result<DcProblem> {
    let (n, d) = inst.z.dim();
    let scaled_gram = inst.z.t().dot(&inst.z) / n as f64;
    let m_g = 36.0 / (inst.lam * inst.lam) * sym_lambda_max(&scaled_gram)?;
    let design = Arc::new(inst.z.clone());
    let response = Arc::new(inst.y.clone());
    let (zv, zg) = (Arc::clone(&design), Arc::clone(&design));
    let (yv, yg) = (Arc::clone(&response), Arc::clone(&response));
    let lam = inst.lam;
    DcProblem::builder(d)
        .smooth(
            move |mu| {
                let pred = zv.dot(mu);
                let mut acc = 0.0;
                for i in 0..yv.len() {
                    acc += rho(yv[i] - pred[i], lam);
                }
                acc / yv.len() as f64
            },
            move |mu| {
                let pred = zg.dot(mu);
                let mut weights = Array1::zeros(yg.len());
                for i in 0..yg.len() {
                    weights[i] = rho_prime(yg[i] - pred[i], lam);
                }
                zg.t().dot(&weights) * (-1.0 / yg.len() as f64)
            },
        )
        .smoothness(m_g)
        .lower_bound(0.0)
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{default_fd_step, finite_diff_gradient};
    use crate::rng::{stream_rng, streams};
    use ndarray::array;
    use rand::Rng;

    #[test]
    fn rho_frozen_values() {
        assert_eq!(rho(0.0, 1.0), 0.0);
        assert_eq!(rho(0.5, 1.0), 0.578125);
        assert_eq!(rho(1.0, 1.0), 1.0);
        assert_eq!(rho(-3.7, 1.0), 1.0);
        assert_eq!(rho(2.0, 2.0), 1.0);
    }

    #[test]
    fn rho_is_even_bounded_and_flat_outside() {
        for k in 0..200 {
            let t = -4.0 + 0.04 * k as f64;
            let v = rho(t, 1.3);
            assert!((0.0..=1.0).contains(&v));
            assert!((v - rho(-t, 1.3)).abs() < 1e-15);
        }
        assert_eq!(rho_prime(1.3, 1.3), 0.0);
        assert_eq!(rho_prime(-1.3, 1.3), 0.0);
        assert_eq!(rho_prime(5.0, 1.3), 0.0);
    }

    #[test]
    fn rho_prime_matches_difference_quotient() {
        for k in 0..50 {
            let t = -1.2 + 0.05 * k as f64;
            let h = 1e-6;
            let fd = (rho(t + h, 1.0) - rho(t - h, 1.0)) / (2.0 * h);
            assert!((rho_prime(t, 1.0) - fd).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = stream_rng(13, streams::SAMPLING);
        let z = Array2::from_shape_fn((15, 3), |_| rng.random_range(-1.0..1.0f64));
        let y = Array1::from_iter((0..15).map(|_| rng.random_range(-1.0..1.0f64)));
        let inst = TukeyInstance::new(z, y, 1.0).unwrap();
        let p = make_tukey(&inst).unwrap();
        for _ in 0..5 {
            let mu = Array1::from_iter((0..3).map(|_| rng.random_range(-1.0..1.0f64)));
            let analytic = p.dc_gradient(&mu).unwrap();
            let fd = finite_diff_gradient(
                |m| p.smooth_value(m).unwrap(),
                &mu,
                default_fd_step(&mu),
            )
            .unwrap();
            let err = (&analytic - &fd).dot(&(&analytic - &fd)).sqrt()
                / analytic.dot(&analytic).sqrt().max(1.0);
            assert!(err < 1e-5, "relative error {err}");
        }
    }

    #[test]
    fn smoothness_constant_scales_with_lambda() {
        let z = array![[1.0, 0.0], [0.0, 1.0]];
        let y = array![0.0, 0.0];
        let p1 = make_tukey(&TukeyInstance::new(z.clone(), y.clone(), 1.0).unwrap()).unwrap();
        let p2 = make_tukey(&TukeyInstance::new(z, y, 2.0).unwrap()).unwrap();
        // lambda_max((1/2) I) = 1/2, so M_g = 18/lam^2.
        assert!((p1.smoothness().unwrap() - 18.0).abs() < 1e-9);
        assert!((p2.smoothness().unwrap() - 4.5).abs() < 1e-9);
    }

    #[test]
    fn instance_validation() {
        assert!(TukeyInstance::new(array![[1.0]], array![1.0], 0.0).is_err());
        assert!(TukeyInstance::new(array![[1.0]], array![1.0, 2.0], 1.0).is_err());
    }
}
