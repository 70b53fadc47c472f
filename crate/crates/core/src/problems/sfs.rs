//! Shape from shading under a Lambertian model: recover surface heights z
//! from observed intensities by minimizing the squared residual of the
//! squared shading equation. The objective is a quartic polynomial in z with
//! no global smoothness constant, so it pairs with backtracking descent.

use std::sync::Arc;

use ndarray::{Array1, Array2};

use crate::error::DcError;
use crate::problem::DcProblem;
use crate::Result;

/// Per-cell stencil geometry, precomputed from the coordinate grids.
#[derive(Debug, Clone, Copy)]
struct Cell {
    /// Flat indices of z_{ij}, z_{i+1,j}, z_{i,j+1}.
    at: usize,
    below: usize,
    right: usize,
    /// Coordinate differences: c1 = y_{i,j+1}-y_{ij}, c2 = y_{i+1,j}-y_{ij},
    /// c3 = x_{i,j+1}-x_{ij}, c4 = x_{i+1,j}-x_{ij}.
    c1: f64,
    c2: f64,
    c3: f64,
    c4: f64,
    /// Denominator c3*c2 - c4*c1.
    d: f64,
    /// Squared observed intensity at (i, j).
    i_sq: f64,
}

impl Cell {
    /// Normal components from the height differences at this cell.
    fn normal(&self, z: &Array1<f64>) -> (f64, f64) {
        let dv = z[self.below] - z[self.at];
        let dh = z[self.right] - z[self.at];
        (
            (self.c1 * dv - self.c2 * dh) / self.d,
            (self.c3 * dv - self.c4 * dh) / self.d,
        )
    }
}

/// A shape-from-shading instance.
#[derive(Debug, Clone)]
pub struct SfsInstance {
    /// m x n observed intensities in [0, 1].
    pub intensity: Array2<f64>,
    /// Light direction (l1, l2, l3).
    pub light: [f64; 3],
    /// Coordinate grids; defaults are pixel coordinates x_{ij} = j, y_{ij} = i.
    pub xg: Array2<f64>,
    pub yg: Array2<f64>,
}

impl SfsInstance {
    /// Instance over the default pixel coordinate grids.
    pub fn new(intensity: Array2<f64>, light: [f64; 3]) -> Result<Self> {
        let (m, n) = intensity.dim();
        let xg = Array2::from_shape_fn((m, n), |(_, j)| j as f64);
        let yg = Array2::from_shape_fn((m, n), |(i, _)| i as f64);
        Self::with_grids(intensity, light, xg, yg)
    }

    /// Instance over caller-supplied coordinate grids.
    pub fn with_grids(
        intensity: Array2<f64>,
        light: [f64; 3],
        xg: Array2<f64>,
        yg: Array2<f64>,
    ) -> Result<Self> {
        let (m, n) = intensity.dim();
        if m < 2 || n < 2 {
            return Err(DcError::InvalidParam {
                name: "intensity",
                reason: format!("grid must be at least 2x2, got {m}x{n}"),
            });
        }
        if xg.dim() != (m, n) || yg.dim() != (m, n) {
            return Err(DcError::DimensionMismatch {
                expected: m * n,
                got: xg.len().min(yg.len()),
            });
        }
        if let Some(bad) = intensity.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(DcError::InvalidParam {
                name: "intensity",
                reason: format!("intensities must lie in [0, 1], found {bad}"),
            });
        }
        let inst = SfsInstance { intensity, light, xg, yg };
        inst.cells()?;
        Ok(inst)
    }

    /// (rows, cols) of the grid.
    pub fn shape(&self) -> (usize, usize) {
        self.intensity.dim()
    }

    /// Precompute stencil geometry for all cells with a full 3-point stencil
    /// (i <= m-2, j <= n-2); errors on a degenerate coordinate denominator.
    fn cells(&self) -> Result<Vec<Cell>> {
        let (m, n) = self.intensity.dim();
        let mut cells = Vec::with_capacity((m - 1) * (n - 1));
        for i in 0..m - 1 {
            for j in 0..n - 1 {
                let c1 = self.yg[(i, j + 1)] - self.yg[(i, j)];
                let c2 = self.yg[(i + 1, j)] - self.yg[(i, j)];
                let c3 = self.xg[(i, j + 1)] - self.xg[(i, j)];
                let c4 = self.xg[(i + 1, j)] - self.xg[(i, j)];
                let d = c3 * c2 - c4 * c1;
                if d.abs() < 1e-12 {
                    return Err(DcError::InvalidParam {
                        name: "coordinate grids",
                        reason: format!("degenerate stencil denominator at ({i}, {j})"),
                    });
                }
                cells.push(Cell {
                    at: i * n + j,
                    below: (i + 1) * n + j,
                    right: i * n + (j + 1),
                    c1,
                    c2,
                    c3,
                    c4,
                    d,
                    i_sq: self.intensity[(i, j)] * self.intensity[(i, j)],
                });
            }
        }
        Ok(cells)
    }
}

/// Row-major flattening of a height grid into a solver vector.
pub fn flatten_grid(z: &Array2<f64>) -> Array1<f64> {
    Array1::from_iter(z.iter().copied())
}

/// Inverse of [`flatten_grid`].
pub fn unflatten_grid(z: &Array1<f64>, m: usize, n: usize) -> Result<Array2<f64>> {
    if z.len() != m * n {
        return Err(DcError::DimensionMismatch { expected: m * n, got: z.len() });
    }
    Ok(Array2::from_shape_fn((m, n), |(i, j)| z[i * n + j]))
}

/// g(z) = sum over stencil cells of
/// [(1 + nx^2 + ny^2) I^2 - (l1 nx + l2 ny + l3)^2]^2, h = 0, phi = 0.
/// The gradient accumulates each cell's contribution over its three heights.
pub fn make_sfs(inst: &SfsInstance) -> Result<DcProblem> {
    let (m, n) = inst.shape();
    let cells = Arc::new(inst.cells()?);
    let cells_g = Arc::clone(&cells);
    let [l1, l2, l3] = inst.light;
    DcProblem::builder(m * n)
        .smooth(
            move |z| {
                let mut acc = 0.0;
                for c in cells.iter() {
                    let (nx, ny) = c.normal(z);
                    let ldn = l1 * nx + l2 * ny + l3;
                    let t = (1.0 + nx * nx + ny * ny) * c.i_sq - ldn * ldn;
                    acc += t * t;
                }
                acc
            },
            move |z| {
                let mut grad = Array1::zeros(z.len());
                for c in cells_g.iter() {
                    let (nx, ny) = c.normal(z);
                    let ldn = l1 * nx + l2 * ny + l3;
                    let t = (1.0 + nx * nx + ny * ny) * c.i_sq - ldn * ldn;
                    let gx = 4.0 * t * (nx * c.i_sq - ldn * l1);
                    let gy = 4.0 * t * (ny * c.i_sq - ldn * l2);
                    grad[c.below] += (gx * c.c1 + gy * c.c3) / c.d;
                    grad[c.right] -= (gx * c.c2 + gy * c.c4) / c.d;
                    grad[c.at] += (gx * (c.c2 - c.c1) + gy * (c.c4 - c.c3)) / c.d;
                }
                grad
            },
        )
        .lower_bound(0.0)
        .build()
}
