use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Dataset;
use crate::error::{Error, Result};

/// Start of each spiral arm, in radians along the curve.
pub const SPIRAL_TURN_START: f64 = FRAC_PI_2;
/// End of each spiral arm, in radians along the curve.
pub const SPIRAL_TURN_END: f64 = 3.0 * PI;

/// Radius of an arm point at curve parameter `theta`.
pub fn spiral_radius(theta: f64) -> f64 {
    4.0 * theta / PI
}

/// `m` isotropic unit-variance Gaussian blobs of `n_per_cluster` points in
/// `R^d`, with every pair of centers at least `separation` apart.
/// Points are grouped by cluster and labelled with the cluster index.
///
/// When `m <= d` the centers sit on scaled coordinate axes, so every pair is
/// exactly `separation` apart. Otherwise centers are drawn by rejection
/// sampling.
pub fn generate_gaussian_mixture(
    n_per_cluster: usize,
    d: usize,
    m: usize,
    separation: f64,
    seed: u64,
) -> Result<Dataset> {
    if n_per_cluster == 0 || d == 0 || m == 0 {
        return Err(Error::InvalidArgument(
            "cluster size, dimension and cluster count must be at least 1".into(),
        ));
    }
    if !(separation.is_finite() && separation > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "separation must be positive, got {separation}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = place_centers(&mut rng, d, m, separation);

    let mut values = Vec::with_capacity(n_per_cluster * m * d);
    let mut labels = Vec::with_capacity(n_per_cluster * m);
    for (k, center) in centers.iter().enumerate() {
        for _ in 0..n_per_cluster {
            values.extend(center.iter().map(|&c| {
                let z: f64 = rng.sample(StandardNormal);
                c + z
            }));
            labels.push(k as u32);
        }
    }
    Dataset::numeric(
        format!("gaussian-mixture-{m}x{n_per_cluster}-d{d}"),
        d,
        values,
        Some(labels),
    )
}

fn place_centers(rng: &mut ChaCha8Rng, d: usize, m: usize, separation: f64) -> Vec<Vec<f64>> {
    if m <= d {
        return (0..m)
            .map(|k| {
                let mut c = vec![0.0; d];
                c[k] = separation / SQRT_2;
                c
            })
            .collect();
    }
    let mut half_width = separation * (m as f64).powf(1.0 / d as f64);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut misses = 0;
    while centers.len() < m {
        let candidate: Vec<f64> = (0..d)
            .map(|_| rng.random_range(-half_width..half_width))
            .collect();
        let clear = centers.iter().all(|c| {
            let sq: f64 = c
                .iter()
                .zip(&candidate)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            sq.sqrt() >= separation
        });
        if clear {
            centers.push(candidate);
            misses = 0;
        } else {
            misses += 1;
            if misses == 1000 {
                half_width *= 1.5;
                misses = 0;
            }
        }
    }
    centers
}

/// A planar spiral with `arms` interleaved arms and `n` points in total.
/// Arm `a` is the curve `r = 4 t / pi` rotated by `2 pi a / arms`, sampled
/// uniformly in `t` over `[pi/2, 3 pi]`, plus isotropic Gaussian noise of
/// standard deviation `noise`. Labels are arm indices.
pub fn generate_spiral(n: usize, arms: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if arms == 0 || n < arms {
        return Err(Error::InvalidArgument(format!(
            "need n >= arms >= 1, got n = {n}, arms = {arms}"
        )));
    }
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise must be nonnegative, got {noise}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for arm in 0..arms {
        let count = n / arms + usize::from(arm < n % arms);
        for j in 0..count {
            let t = if count > 1 {
                j as f64 / (count - 1) as f64
            } else {
                0.0
            };
            let theta = SPIRAL_TURN_START + t * (SPIRAL_TURN_END - SPIRAL_TURN_START);
            let r = spiral_radius(theta);
            let phi = theta + 2.0 * PI * arm as f64 / arms as f64;
            let (jx, jy) = if noise > 0.0 {
                let zx: f64 = rng.sample(StandardNormal);
                let zy: f64 = rng.sample(StandardNormal);
                (noise * zx, noise * zy)
            } else {
                (0.0, 0.0)
            };
            values.push(r * phi.cos() + jx);
            values.push(r * phi.sin() + jy);
            labels.push(arm as u32);
        }
    }
    Dataset::numeric(format!("spiral-{arms}x{n}"), 2, values, Some(labels))
}
