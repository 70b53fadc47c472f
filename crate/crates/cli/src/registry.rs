//! Problem registry: build any named builtin from a [`ProblemSpec`], with
//! documented defaults for every unset parameter and a seeded default
//! initial point.

use anyhow::{bail, Context};
use dcopt::problems::mixture::project_mixture;
use dcopt::problems::{
    make_best_subset, make_gaussian_mixture_nll, make_toy, make_tukey, BestSubsetInstance,
    MixtureInstance, Toy, TukeyInstance,
};
use dcopt::rng::{stream_rng, streams};
use dcopt::{data, DcProblem};
use ndarray::Array1;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::ProblemSpec;

/// A problem ready to solve: the oracle bundle plus a seeded start point.
#[derive(Debug)]
pub struct BuiltProblem {
    pub problem: DcProblem,
    pub x0: Array1<f64>,
}

/// Regularization weight for the sparse-regression penalty: the usual
/// noise-calibrated `2 sigma sqrt(ln p / n)` rule, stated for the
/// per-sample loss `|y - Xx|^2 / (2n)`, rescaled by `n` to match this
/// problem's unnormalized least-squares objective `|y - Xx|^2`. In that
/// scaling the penalty sits at the level of `|2 X^T noise|_inf`, which is
/// what makes it act as a threshold at all.
pub fn lambda_heuristic(noise_sd: f64, n: usize, p: usize) -> f64 {
    2.0 * noise_sd * (n as f64 * (p as f64).ln()).sqrt()
}

/// Small Gaussian start: each coordinate 0.1 * N(0, 1), drawn from the
/// dedicated initialization stream of `seed`.
pub fn default_init(dim: usize, seed: u64) -> Array1<f64> {
    let mut rng = stream_rng(seed, streams::INIT);
    Array1::from_shape_fn(dim, |_| {
        0.1 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
    })
}

/// Build the named problem. Toy names map to the analytic test functions;
/// `tukey`, `best_subset`, and `mixture` generate synthetic data from the
/// seed and the entry's parameters (falling back to the defaults noted inline).
pub fn build_problem(spec: &ProblemSpec, seed: u64) -> anyhow::Result<BuiltProblem> {
    match spec.name.as_str() {
        "quadratic" | "strict_saddle" | "abs_dc" => {
            let toy = Toy::from_name(&spec.name)?;
            let problem = make_toy(&toy)?;
            let x0 = default_init(problem.dim(), seed);
            Ok(BuiltProblem { problem, x0 })
        }
        "norm_power" => {
            let toy = Toy::NormPower {
                q: spec.q.unwrap_or(1.5),
                dim: spec.dim.unwrap_or(2),
            };
            let problem = make_toy(&toy)?;
            let x0 = default_init(problem.dim(), seed);
            Ok(BuiltProblem { problem, x0 })
        }
        "tukey" => {
            let n = spec.n.unwrap_or(60);
            let p = spec.p.unwrap_or(8);
            let rho = spec.rho.unwrap_or(0.3);
            let s_star = spec.s_star.unwrap_or(3);
            let noise_sd = spec.noise_sd.unwrap_or(0.5);
            let cutoff = spec.cutoff.unwrap_or(1.0);
            let d = data::gen_regression(n, p, rho, s_star, noise_sd, seed)
                .context("generating the robust-regression dataset")?;
            let inst = TukeyInstance::new(d.x, d.y, cutoff)?;
            let problem = make_tukey(&inst)?;
            let x0 = default_init(p, seed);
            Ok(BuiltProblem { problem, x0 })
        }
        "best_subset" => {
            let n = spec.n.unwrap_or(40);
            let p = spec.p.unwrap_or(10);
            let rho = spec.rho.unwrap_or(0.3);
            let s_star = spec.s_star.unwrap_or(3);
            let noise_sd = spec.noise_sd.unwrap_or(0.5);
            let s = spec.s.unwrap_or(s_star);
            let lam = spec
                .lambda
                .unwrap_or_else(|| lambda_heuristic(noise_sd, n, p));
            let d = data::gen_regression(n, p, rho, s_star, noise_sd, seed)
                .context("generating the best-subset dataset")?;
            let inst = BestSubsetInstance::new(d.x, d.y, lam, s)?;
            let problem = make_best_subset(&inst)?;
            let x0 = default_init(p, seed);
            Ok(BuiltProblem { problem, x0 })
        }
        "mixture" => {
            let n = spec.n.unwrap_or(200);
            let pi = spec.pi.unwrap_or(0.4);
            let mu0 = spec.mu0.unwrap_or(-1.0);
            let sd0 = spec.sd0.unwrap_or(0.8);
            let mu1 = spec.mu1.unwrap_or(1.5);
            let sd1 = spec.sd1.unwrap_or(0.6);
            let r0 = spec.r0.unwrap_or(3.0);
            let r1 = spec.r1.unwrap_or(3.0);
            let samples = data::gen_mixture_samples(n, pi, mu0, sd0, mu1, sd1, seed)
                .context("generating the mixture samples")?;
            let inst = MixtureInstance::new(samples, r0, r1)?;
            let problem = make_gaussian_mixture_nll(&inst)?;
            // Start from a feasible interior point: moment-style block
            // parameters jittered by the seeded init stream, then projected
            // onto the constraint set (subgradient and CCCP evaluate the
            // objective at x0, and it is +inf outside).
            let mut rng = stream_rng(seed, streams::INIT);
            let mut x0 = Array1::from_vec(vec![-1.0, -0.6, 1.0, -0.6, 0.5]);
            for v in x0.iter_mut() {
                *v += 0.1 * rng.sample::<f64, _>(StandardNormal);
            }
            let x0 = project_mixture(&x0, inst.r0, inst.r1, inst.eps);
            Ok(BuiltProblem { problem, x0 })
        }
        other => bail!(
            "unknown problem '{other}'; expected one of quadratic, strict_saddle, \
             norm_power, abs_dc, tukey, best_subset, mixture"
        ),
    }
}
