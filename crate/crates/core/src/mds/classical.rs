use super::eigen::top_eigenpairs;
use super::Coords;
use crate::error::{Error, Result};
use crate::tree::TreeDistanceMatrix;

/// Output of [`classical_mds`].
#[derive(Clone, Debug)]
pub struct ClassicalMds {
    pub coords: Coords,
    /// Leading eigenvalues of the double-centred matrix, descending and
    /// before clamping.
    pub eigenvalues: Vec<f64>,
}

/// Torgerson scaling: double-centre the squared distances,
/// `B = -1/2 J D^2 J`, and scale the top `m` eigenvectors of `B` by the
/// square roots of their (nonnegative-clamped) eigenvalues.
///
/// `B` is applied implicitly, so no second `N x N` matrix is allocated.
/// Each column is oriented so that its first clearly nonzero entry is
/// positive.
pub fn classical_mds(dist: &TreeDistanceMatrix, m: usize) -> Result<ClassicalMds> {
    let n = dist.len();
    if m == 0 {
        return Err(Error::InvalidDimension {
            dim: m,
            reason: "must be at least 1",
        });
    }
    if m >= n {
        return Err(Error::InvalidDimension {
            dim: m,
            reason: "must be smaller than the number of points",
        });
    }

    let mut centered = vec![0.0; n];
    let pairs = top_eigenpairs(n, m, |x, out| {
        let mean = x.iter().sum::<f64>() / n as f64;
        for (c, v) in centered.iter_mut().zip(x) {
            *c = v - mean;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = dist
                .row(i)
                .iter()
                .zip(&centered)
                .map(|(d, y)| d * d * y)
                .sum();
        }
        let mean = out.iter().sum::<f64>() / n as f64;
        for o in out.iter_mut() {
            *o = -0.5 * (*o - mean);
        }
    });

    let mut coords = Coords::zeros(n, m);
    for (axis, (lambda, mut v)) in pairs.values.iter().zip(pairs.vectors).enumerate() {
        orient(&mut v);
        let s = lambda.max(0.0).sqrt();
        for (i, x) in v.iter().enumerate() {
            coords.row_mut(i)[axis] = x * s;
        }
    }
    Ok(ClassicalMds {
        coords,
        eigenvalues: pairs.values,
    })
}

fn orient(v: &mut [f64]) {
    let peak = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-9 * peak) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}
