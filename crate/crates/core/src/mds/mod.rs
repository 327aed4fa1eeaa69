//! Low-dimensional embedding of tree distances.
//!
//! [`classical_mds`] is the default solver; [`smacof_mds`] refines a
//! configuration by stress majorization. [`embed`] runs either one and
//! attaches the normalized potential axis used for display.

mod classical;
pub(crate) mod eigen;
mod smacof;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intree::PotentialVector;
use crate::tree::TreeDistanceMatrix;

pub use classical::{classical_mds, ClassicalMds};
pub use smacof::{smacof_mds, SmacofResult};

pub const DEFAULT_SMACOF_MAX_ITER: usize = 300;
pub const DEFAULT_SMACOF_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MdsMethod {
    #[default]
    Classical,
    Smacof,
}

impl fmt::Display for MdsMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MdsMethod::Classical => "classical",
            MdsMethod::Smacof => "smacof",
        })
    }
}

impl FromStr for MdsMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(MdsMethod::Classical),
            "smacof" => Ok(MdsMethod::Smacof),
            other => Err(Error::InvalidArgument(format!(
                "unknown MDS method `{other}`"
            ))),
        }
    }
}

/// Row-major `N x m` point coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Coords {
    n: usize,
    dim: usize,
    values: Vec<f64>,
}

impl Coords {
    pub fn zeros(n: usize, dim: usize) -> Self {
        Self {
            n,
            dim,
            values: vec![0.0; n * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>], dim: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::InvalidArgument(format!(
                "row {bad} has {} coordinates, expected {dim}",
                rows[bad].len()
            )));
        }
        Ok(Self {
            n: rows.len(),
            dim,
            values: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on a zero chunk size
        self.values.chunks_exact(self.dim.max(1)).take(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Euclidean distance between rows `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Copy with extra all-zero columns up to `dim`.
    fn padded(&self, dim: usize) -> Coords {
        let mut out = Coords::zeros(self.n, dim);
        for i in 0..self.n {
            out.row_mut(i)[..self.dim].copy_from_slice(self.row(i));
        }
        out
    }
}

/// Raw stress `sum_{i<j} (D[i][j] - |y_i - y_j|)^2`.
pub fn stress(dist: &TreeDistanceMatrix, coords: &Coords) -> f64 {
    let n = dist.len();
    let mut total = 0.0;
    for i in 0..n {
        for (j, &d) in dist.row(i).iter().enumerate().skip(i + 1) {
            let r = d - coords.distance(i, j);
            total += r * r;
        }
    }
    total
}

/// Min-max scaled potential magnitudes: `(|p_i| - min|p|) / (max|p| - min|p|)`,
/// all zeros when every potential is equal.
pub fn normalize_potentials(potentials: &PotentialVector) -> Vec<f64> {
    let mags: Vec<f64> = potentials.values().iter().map(|p| p.abs()).collect();
    let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = mags.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    if spread.is_nan() || spread <= 0.0 {
        return vec![0.0; mags.len()];
    }
    mags.iter().map(|m| (m - lo) / spread).collect()
}

/// Coordinates in `R^m` plus the normalized potential axis of the
/// display space.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub coords: Coords,
    pub potential_axis: Vec<f64>,
    pub stress: f64,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.coords.dim()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn subset(&self, nodes: &[usize], dist: &TreeDistanceMatrix) -> Embedding {
        let rows: Vec<Vec<f64>> = nodes.iter().map(|&i| self.coords.row(i).to_vec()).collect();
        let coords = Coords::from_rows(&rows, self.dim()).expect("rows share the dimension");
        let stress = stress(dist, &coords);
        Embedding {
            coords,
            potential_axis: nodes.iter().map(|&i| self.potential_axis[i]).collect(),
            stress,
        }
    }
}

/// Embed the tree distances in `R^m` with the chosen solver and attach the
/// potential axis. SMACOF starts from the classical solution.
///
/// A set of `N <= m` points spans at most `N - 1` dimensions; such sets are
/// embedded in `N - 1` dimensions and padded with zero columns. A single
/// point sits at the origin.
pub fn embed(
    dist: &TreeDistanceMatrix,
    potentials: &PotentialVector,
    m: usize,
    method: MdsMethod,
) -> Result<Embedding> {
    let n = dist.len();
    if m == 0 {
        return Err(Error::InvalidDimension {
            dim: m,
            reason: "must be at least 1",
        });
    }
    if potentials.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} potentials for {n} nodes",
            potentials.len()
        )));
    }
    let potential_axis = normalize_potentials(potentials);
    if n <= 1 {
        return Ok(Embedding {
            coords: Coords::zeros(n, m),
            potential_axis,
            stress: 0.0,
        });
    }
    let solved = classical_mds(dist, m.min(n - 1))?.coords;
    let mut coords = if solved.dim() < m {
        solved.padded(m)
    } else {
        solved
    };
    if method == MdsMethod::Smacof {
        coords = smacof_mds(
            dist,
            m,
            &coords,
            DEFAULT_SMACOF_MAX_ITER,
            DEFAULT_SMACOF_TOL,
        )?
        .coords;
    }
    let stress = stress(dist, &coords);
    Ok(Embedding {
        coords,
        potential_axis,
        stress,
    })
}
