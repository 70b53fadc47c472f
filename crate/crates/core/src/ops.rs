//! Closed-form primitives: soft threshold, projections, top-k magnitude sums
//! and their subgradients. These are the building blocks the application
//! problems assemble their `h` and `phi` oracles from.

use ndarray::Array1;

use crate::error::DcError;
use crate::Result;

/// Sign with the crate-wide convention sign(0) = 0 (reproducible subgradient
/// selections depend on it; `f64::signum` maps +-0 to +-1 instead).
pub fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Componentwise soft threshold: the prox of `lam * ||.||_1` at step `t`,
/// i.e. `argmin_w lam*||w||_1 + ||w - z||^2 / (2t)`.
pub fn prox_l1(z: &Array1<f64>, t: f64, lam: f64) -> Result<Array1<f64>> {
    if !(t.is_finite() && t > 0.0) {
        return Err(DcError::InvalidParam {
            name: "t",
            reason: format!("prox step must be positive, got {t}"),
        });
    }
    if !(lam.is_finite() && lam >= 0.0) {
        return Err(DcError::InvalidParam {
            name: "lam",
            reason: format!("l1 weight must be nonnegative, got {lam}"),
        });
    }
    let thresh = t * lam;
    Ok(z.mapv(|v| sign(v) * (v.abs() - thresh).max(0.0)))
}

/// Euclidean projection onto the ball of radius `R` about `center`.
///
/// After the radial scaling the norm is re-checked: if rounding left the point
/// marginally outside, one (1 - 4 eps) shrink pulls it strictly inside so that
/// re-projection is the identity bit for bit.
pub fn project_ball(z: &Array1<f64>, center: &Array1<f64>, r: f64) -> Result<Array1<f64>> {
    if z.len() != center.len() {
        return Err(DcError::DimensionMismatch {
            expected: center.len(),
            got: z.len(),
        });
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(DcError::InvalidParam {
            name: "R",
            reason: format!("radius must be nonnegative, got {r}"),
        });
    }
    let diff = z - center;
    let d = diff.dot(&diff).sqrt();
    if d <= r {
        return Ok(z.clone());
    }
    // Rounding in `center + diff * (r / d)` can leave the recomputed distance a
    // few ulps above `r`, which would make a second projection move the point
    // again. Shrink until the same membership test the next call runs passes,
    // so projecting twice is a bitwise no-op.
    let mut out = center + &(&diff * (r / d));
    let mut eps_mult = 4.0;
    loop {
        let back = &out - center;
        if back.dot(&back).sqrt() <= r {
            return Ok(out);
        }
        out = center + &(&back * (1.0 - eps_mult * f64::EPSILON));
        eps_mult *= 2.0;
    }
}

/// Componentwise clamp onto the box `[lo, hi]`.
pub fn project_box(z: &Array1<f64>, lo: &Array1<f64>, hi: &Array1<f64>) -> Result<Array1<f64>> {
    if z.len() != lo.len() || z.len() != hi.len() {
        return Err(DcError::DimensionMismatch {
            expected: z.len(),
            got: lo.len().min(hi.len()),
        });
    }
    for i in 0..z.len() {
        if lo[i] > hi[i] {
            return Err(DcError::InvalidParam {
                name: "lo/hi",
                reason: format!("lo[{i}] = {} exceeds hi[{i}] = {}", lo[i], hi[i]),
            });
        }
    }
    Ok(Array1::from_iter(
        z.iter()
            .zip(lo.iter().zip(hi.iter()))
            .map(|(&v, (&l, &h))| v.clamp(l, h)),
    ))
}

/// Indices of the `s` largest-magnitude coordinates, ties broken by lowest
/// index. Shared selection rule for the top-k value and its subgradient.
fn topk_indices(x: &Array1<f64>, s: usize) -> Result<Vec<usize>> {
    if s == 0 || s > x.len() {
        return Err(DcError::SparsityOutOfRange { s, dim: x.len() });
    }
    let mut idx: Vec<usize> = (0..x.len()).collect();
    // Stable sort on descending magnitude keeps equal magnitudes in index order.
    idx.sort_by(|&a, &b| {
        x[b].abs()
            .partial_cmp(&x[a].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    idx.truncate(s);
    Ok(idx)
}

/// Sum of the `s` largest coordinate magnitudes.
pub fn topk_abs_value(x: &Array1<f64>, s: usize) -> Result<f64> {
    Ok(topk_indices(x, s)?.iter().map(|&i| x[i].abs()).sum())
}

/// The chosen subgradient of [`topk_abs_value`]: sign(x_i) on the selected
/// coordinates (sign(0) = 0, the coordinate still counts toward `s`), zero
/// elsewhere.
pub fn topk_abs_subgradient(x: &Array1<f64>, s: usize) -> Result<Array1<f64>> {
    let mut out = Array1::zeros(x.len());
    for i in topk_indices(x, s)? {
        out[i] = sign(x[i]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, streams};
    use ndarray::array;
    use rand::Rng;

    #[test]
    fn prox_l1_soft_thresholds() {
        let out = prox_l1(&array![2.0, -0.3, 0.0], 0.5, 1.0).unwrap();
        assert_eq!(out, array![1.5, 0.0, 0.0]);
    }

    #[test]
    fn prox_l1_zero_weight_is_identity() {
        let z = array![2.0, -0.3, 0.7];
        assert_eq!(prox_l1(&z, 0.5, 0.0).unwrap(), z);
    }

    #[test]
    fn prox_l1_full_shrinkage() {
        assert_eq!(
            prox_l1(&array![1.0, -1.0], 1.0, 1.0).unwrap(),
            array![0.0, 0.0]
        );
    }

    #[test]
    fn prox_l1_rejects_nonpositive_step() {
        assert!(prox_l1(&array![1.0], 0.0, 1.0).is_err());
        assert!(prox_l1(&array![1.0], -1.0, 1.0).is_err());
    }

    // prox_l1(z) must beat every perturbation on its defining objective:
    // lam*||w||_1 + ||w-z||^2/(2t).
    #[test]
    fn prox_l1_minimizes_its_objective() {
        let mut rng = stream_rng(11, streams::SAMPLING);
        let obj = |w: &Array1<f64>, z: &Array1<f64>, t: f64, lam: f64| {
            lam * w.iter().map(|v| v.abs()).sum::<f64>()
                + w.iter()
                    .zip(z.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    / (2.0 * t)
        };
        for _ in 0..10 {
            let z = Array1::from_iter((0..5).map(|_| rng.random_range(-3.0..3.0)));
            let t = rng.random_range(0.1..2.0);
            let lam = rng.random_range(0.0..2.0);
            let p = prox_l1(&z, t, lam).unwrap();
            let fp = obj(&p, &z, t, lam);
            for _ in 0..1000 {
                let w = &p + &Array1::from_iter((0..5).map(|_| rng.random_range(-1.0..1.0)));
                assert!(fp <= obj(&w, &z, t, lam) + 1e-12);
            }
        }
    }

    #[test]
    fn ball_projection_matches_hand_values() {
        let c = Array1::zeros(2);
        assert_eq!(
            project_ball(&array![3.0, 4.0], &c, 5.0).unwrap(),
            array![3.0, 4.0]
        );
        let p = project_ball(&array![3.0, 4.0], &c, 1.0).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
        assert_eq!(project_ball(&c, &c, 0.0).unwrap(), c);
    }

    #[test]
    fn box_projection_clamps() {
        let lo = array![-1.0, -1.0];
        let hi = array![1.0, 1.0];
        assert_eq!(
            project_box(&array![2.0, -3.0], &lo, &hi).unwrap(),
            array![1.0, -1.0]
        );
        let inside = array![0.3, -0.4];
        assert_eq!(project_box(&inside, &lo, &hi).unwrap(), inside);
        // Degenerate box collapses to the point.
        assert_eq!(
            project_box(&array![0.5], &array![0.0], &array![0.0]).unwrap(),
            array![0.0]
        );
        assert!(project_box(&array![0.0], &array![1.0], &array![-1.0]).is_err());
    }

    #[test]
    fn projections_idempotent_bitwise() {
        let mut rng = stream_rng(5, streams::SAMPLING);
        let c = array![0.5, -1.0, 2.0];
        let lo = array![-1.0, 0.0, -2.0];
        let hi = array![1.0, 0.5, 2.0];
        for _ in 0..1000 {
            let z = Array1::from_iter((0..3).map(|_| rng.random_range(-10.0..10.0)));
            let r = rng.random_range(0.0..5.0);
            let pb = project_ball(&z, &c, r).unwrap();
            assert_eq!(project_ball(&pb, &c, r).unwrap(), pb);
            let px = project_box(&z, &lo, &hi).unwrap();
            assert_eq!(project_box(&px, &lo, &hi).unwrap(), px);
        }
    }

    #[test]
    fn topk_value_examples() {
        assert_eq!(topk_abs_value(&array![3.0, -1.0, 2.0], 2).unwrap(), 5.0);
        let x = array![3.0, -1.0, 2.0];
        assert_eq!(topk_abs_value(&x, 3).unwrap(), 6.0); // s = dim gives the l1 norm
        assert_eq!(topk_abs_value(&Array1::zeros(4), 2).unwrap(), 0.0);
        assert!(topk_abs_value(&x, 0).is_err());
        assert!(topk_abs_value(&x, 4).is_err());
    }

    #[test]
    fn topk_subgradient_selection() {
        assert_eq!(
            topk_abs_subgradient(&array![3.0, -1.0, 2.0], 2).unwrap(),
            array![1.0, 0.0, 1.0]
        );
        assert_eq!(topk_abs_subgradient(&array![-5.0], 1).unwrap(), array![-1.0]);
        // Tie on magnitude: lowest index wins.
        assert_eq!(
            topk_abs_subgradient(&array![2.0, 2.0], 1).unwrap(),
            array![1.0, 0.0]
        );
        // sign(0) = 0 but the coordinate still occupies a slot.
        assert_eq!(
            topk_abs_subgradient(&array![0.0, 0.0], 1).unwrap(),
            array![0.0, 0.0]
        );
    }

    // Subgradient inequality h(y) >= h(x) + <u, y-x> on random y; the top-k
    // sum is convex, so the chosen u must satisfy it everywhere.
    #[test]
    fn topk_subgradient_inequality_on_random_points() {
        let mut rng = stream_rng(23, streams::SAMPLING);
        for trial in 0..10 {
            let dim = 3 + trial % 3;
            let x = Array1::from_iter((0..dim).map(|_| {
                // Mix in exact zeros and ties to stress the selection rule.
                let v: f64 = rng.random_range(-2.0..2.0);
                if rng.random_range(0.0..1.0) < 0.2 {
                    0.0
                } else if rng.random_range(0.0..1.0) < 0.2 {
                    1.0
                } else {
                    v
                }
            }));
            for s in 1..=dim {
                let hx = topk_abs_value(&x, s).unwrap();
                let u = topk_abs_subgradient(&x, s).unwrap();
                for _ in 0..1000 {
                    let y = Array1::from_iter((0..dim).map(|_| rng.random_range(-3.0..3.0)));
                    let hy = topk_abs_value(&y, s).unwrap();
                    assert!(
                        hy + 1e-12 >= hx + u.dot(&(&y - &x)),
                        "subgradient inequality failed at x={x:?}, y={y:?}, s={s}"
                    );
                }
            }
        }
    }
}
