//! Synthetic data generation, the shading renderer used to build round-trip
//! instances, image and CSV input/output, and the estimation-error metric.
//! Every generator is a pure function of its parameters and a seed; draws go
//! through dedicated named streams so results never depend on call order or
//! worker count.

pub mod csv;
pub mod pgm;

pub use csv::{
    read_dataset_csv, read_trace_csv, write_dataset_csv, write_trace_csv, TraceRow,
};
pub use pgm::{load_pgm, parse_pgm, write_pgm};

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::DcError;
use crate::rng::{stream_rng, streams};
use crate::Result;

/// A generated sparse-regression dataset.
#[derive(Debug, Clone)]
pub struct RegressionDataset {
    /// n x p design.
    pub x: Array2<f64>,
    /// Length-n responses y = X xstar + noise.
    pub y: Array1<f64>,
    /// Binary ground-truth coefficients with exactly s_star ones.
    pub xstar: Array1<f64>,
    /// Seed the dataset was generated from (not serialized to CSV).
    pub seed: u64,
}

fn draw_normal(rng: &mut impl Rng) -> f64 {
    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
}

/// Rows i.i.d. N(0, Sigma) with Sigma = (1-rho) I + rho 11', realized as
/// x_i = sqrt(rho) w_i 1 + sqrt(1-rho) eps_i with scalar w_i and vector eps_i
/// standard normal.
pub fn gen_equicorr_design(n: usize, p: usize, rho: f64, seed: u64) -> Result<Array2<f64>> {
    if n == 0 || p == 0 {
        return Err(DcError::InvalidParam {
            name: "n",
            reason: format!("need positive dimensions, got n = {n}, p = {p}"),
        });
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(DcError::InvalidParam {
            name: "rho",
            reason: format!("equicorrelation must lie in [0, 1), got {rho}"),
        });
    }
    let (sr, sc) = (rho.sqrt(), (1.0 - rho).sqrt());
    let mut rng = stream_rng(seed, streams::DESIGN);
    let mut x = Array2::zeros((n, p));
    for i in 0..n {
        let w = draw_normal(&mut rng);
        for j in 0..p {
            x[(i, j)] = sr * w + sc * draw_normal(&mut rng);
        }
    }
    Ok(x)
}

/// Full sparse-regression draw: equicorrelated design, binary coefficients on
/// a uniformly chosen support of size s_star, Gaussian noise of the given
/// standard deviation.
pub fn gen_regression(
    n: usize,
    p: usize,
    rho: f64,
    s_star: usize,
    noise_sd: f64,
    seed: u64,
) -> Result<RegressionDataset> {
    if s_star > p {
        return Err(DcError::SparsityOutOfRange { s: s_star, dim: p });
    }
    if !(noise_sd.is_finite() && noise_sd >= 0.0) {
        return Err(DcError::InvalidParam {
            name: "noise_sd",
            reason: format!("noise level must be nonnegative, got {noise_sd}"),
        });
    }
    let x = gen_equicorr_design(n, p, rho, seed)?;
    let mut support_rng = stream_rng(seed, streams::SUPPORT);
    let support = rand::seq::index::sample(&mut support_rng, p, s_star);
    let mut xstar = Array1::zeros(p);
    for i in support {
        xstar[i] = 1.0;
    }
    let mut noise_rng = stream_rng(seed, streams::NOISE);
    let mut y = x.dot(&xstar);
    for v in y.iter_mut() {
        *v += noise_sd * draw_normal(&mut noise_rng);
    }
    Ok(RegressionDataset { x, y, xstar, seed })
}

/// n scalar draws from pi N(mu0, sd0^2) + (1 - pi) N(mu1, sd1^2):
/// a Bernoulli component pick, then the chosen Gaussian.
pub fn gen_mixture_samples(
    n: usize,
    pi: f64,
    mu0: f64,
    sd0: f64,
    mu1: f64,
    sd1: f64,
    seed: u64,
) -> Result<Array1<f64>> {
    if n == 0 {
        return Err(DcError::InvalidParam {
            name: "n",
            reason: "need at least one sample".into(),
        });
    }
    if !(0.0..=1.0).contains(&pi) {
        return Err(DcError::InvalidParam {
            name: "pi",
            reason: format!("mixing weight must lie in [0, 1], got {pi}"),
        });
    }
    for (name, sd) in [("sd0", sd0), ("sd1", sd1)] {
        if !(sd.is_finite() && sd > 0.0) {
            return Err(DcError::InvalidParam {
                name,
                reason: format!("standard deviation must be positive, got {sd}"),
            });
        }
    }
    let mut rng = stream_rng(seed, streams::MIXTURE);
    let mut out = Array1::zeros(n);
    for v in out.iter_mut() {
        let first = rng.random_range(0.0..1.0f64) < pi;
        let z = draw_normal(&mut rng);
        *v = if first { mu0 + sd0 * z } else { mu1 + sd1 * z };
    }
    Ok(out)
}

/// Lambertian render of a height grid under the given light: per stencil cell
/// the normal N = (nx, ny, 1) from the pixel-coordinate difference quotients,
/// intensity <light, N> / ||N|| clamped to [0, 1]. The last row and column,
/// where the stencil has no forward neighbors, replicate their interior
/// neighbors so the output matches the input shape.
pub fn render_sfs(z: &Array2<f64>, light: [f64; 3]) -> Result<Array2<f64>> {
    let (m, n) = z.dim();
    if m < 2 || n < 2 {
        return Err(DcError::InvalidParam {
            name: "zsurface",
            reason: format!("grid must be at least 2x2, got {m}x{n}"),
        });
    }
    let [l1, l2, l3] = light;
    let mut img = Array2::zeros((m, n));
    for i in 0..m - 1 {
        for j in 0..n - 1 {
            let nx = -(z[(i, j + 1)] - z[(i, j)]);
            let ny = z[(i + 1, j)] - z[(i, j)];
            let norm = (1.0 + nx * nx + ny * ny).sqrt();
            img[(i, j)] = ((l1 * nx + l2 * ny + l3) / norm).clamp(0.0, 1.0);
        }
    }
    for i in 0..m - 1 {
        img[(i, n - 1)] = img[(i, n - 2)];
    }
    for j in 0..n {
        img[(m - 1, j)] = img[(m - 2, j)];
    }
    Ok(img)
}

/// Scale-normalized estimation error ||xhat - xstar||_2 / (sqrt(p) ||xhat||_2).
pub fn estimation_error(xhat: &Array1<f64>, xstar: &Array1<f64>) -> Result<f64> {
    if xhat.len() != xstar.len() {
        return Err(DcError::DimensionMismatch {
            expected: xstar.len(),
            got: xhat.len(),
        });
    }
    let norm = xhat.dot(xhat).sqrt();
    if norm == 0.0 {
        return Err(DcError::ZeroEstimate);
    }
    let d = xhat - xstar;
    Ok(d.dot(&d).sqrt() / ((xhat.len() as f64).sqrt() * norm))
}
