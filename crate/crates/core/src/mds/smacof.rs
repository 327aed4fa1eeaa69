use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{stress, Coords};
use crate::error::{Error, Result};
use crate::tree::TreeDistanceMatrix;

const PERTURB_SEED: u64 = 0x5eed_5eed;

#[derive(Clone, Debug)]
pub struct SmacofResult {
    pub coords: Coords,
    /// Stress of the initial configuration followed by the stress after
    /// each Guttman update.
    pub stress_trace: Vec<f64>,
    pub iterations: usize,
    /// False when `max_iter` ran out before the relative decrease fell
    /// below `tol`.
    pub converged: bool,
}

/// Stress majorization (SMACOF) of raw stress
/// `sum_{i<j} (D[i][j] - |y_i - y_j|)^2`, started from `init`.
///
/// Each step applies the Guttman transform, which never increases stress.
/// Iteration stops once the relative decrease drops below `tol` or after
/// `max_iter` updates. An initial configuration with all points coincident
/// is spread by a small seeded perturbation first.
pub fn smacof_mds(
    dist: &TreeDistanceMatrix,
    m: usize,
    init: &Coords,
    max_iter: usize,
    tol: f64,
) -> Result<SmacofResult> {
    let n = dist.len();
    if init.len() != n || init.dim() != m {
        return Err(Error::InvalidArgument(format!(
            "initial configuration is {}x{}, expected {n}x{m}",
            init.len(),
            init.dim()
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }

    let mut x = init.clone();
    if n >= 2 && is_collapsed(&x) {
        spread(&mut x, dist);
    }

    let total: f64 = (0..n)
        .flat_map(|i| dist.row(i)[i + 1..].iter().map(|d| d * d))
        .sum();
    let mut current = stress(dist, &x);
    let mut trace = vec![current];
    let mut iterations = 0;
    let mut converged = current <= 1e-24 * total;
    let mut next = Coords::zeros(n, m);

    while !converged && iterations < max_iter {
        guttman(dist, &x, &mut next);
        std::mem::swap(&mut x, &mut next);
        iterations += 1;
        let updated = stress(dist, &x);
        trace.push(updated);
        converged = current - updated < tol * current || updated <= 1e-24 * total;
        current = updated;
    }

    Ok(SmacofResult {
        coords: x,
        stress_trace: trace,
        iterations,
        converged,
    })
}

/// `X+ = (1/n) B(X) X`, written pointwise as
/// `x+_i = (1/n) sum_{j != i, |x_i - x_j| > 0} D_ij / |x_i - x_j| (x_i - x_j)`.
fn guttman(dist: &TreeDistanceMatrix, x: &Coords, out: &mut Coords) {
    let n = x.len();
    let m = x.dim();
    let inv_n = 1.0 / n as f64;
    let mut acc = vec![0.0; m];
    for i in 0..n {
        acc.iter_mut().for_each(|a| *a = 0.0);
        let xi = x.row(i);
        for (j, &dij) in dist.row(i).iter().enumerate() {
            if j == i {
                continue;
            }
            let xj = x.row(j);
            let len = xi
                .iter()
                .zip(xj)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if len > 0.0 {
                let w = dij / len;
                for k in 0..m {
                    acc[k] += w * (xi[k] - xj[k]);
                }
            }
        }
        for (o, a) in out.row_mut(i).iter_mut().zip(&acc) {
            *o = a * inv_n;
        }
    }
}

fn is_collapsed(x: &Coords) -> bool {
    let first = x.row(0);
    (1..x.len()).all(|i| x.row(i) == first)
}

fn spread(x: &mut Coords, dist: &TreeDistanceMatrix) {
    let n = dist.len();
    let mean = dist.values().iter().sum::<f64>() / (n * n) as f64;
    let scale = if mean > 0.0 { mean } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(PERTURB_SEED);
    for i in 0..n {
        for v in x.row_mut(i) {
            *v += scale * rng.random_range(-0.5..0.5);
        }
    }
}
