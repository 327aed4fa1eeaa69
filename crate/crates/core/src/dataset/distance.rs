use super::{Attributes, Dataset, Metric};
use crate::error::{Error, Result};

/// Dense symmetric `N x N` matrix of pairwise distances between points.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
    metric: Metric,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Wrap precomputed values, checking shape, symmetry, zero diagonal and
    /// that every entry is finite and nonnegative.
    pub fn from_values(n: usize, values: Vec<f64>, metric: Metric) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "{} values for a {n}x{n} matrix",
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidArgument(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                let v = values[i * n + j];
                if !(v.is_finite() && v >= 0.0) || v != values[j * n + i] {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i}, {j}) is not a symmetric nonnegative distance"
                    )));
                }
            }
        }
        Ok(Self { n, values, metric })
    }
}

/// All pairwise distances of `ds` under `metric`.
///
/// Euclidean applies to numeric datasets, Hamming to categorical ones.
/// Each unordered pair is evaluated once and mirrored, so the result is
/// exactly symmetric.
pub fn distance_matrix(ds: &Dataset, metric: Metric) -> Result<DistanceMatrix> {
    if metric.attr_kind() != ds.kind() {
        return Err(Error::MetricMismatch {
            metric,
            kind: ds.kind(),
        });
    }
    let n = ds.len();
    let d = ds.dim();
    let mut values = vec![0.0; n * n];
    match ds.attributes() {
        Attributes::Numeric(x) => {
            for i in 0..n {
                let a = &x[i * d..(i + 1) * d];
                for j in i + 1..n {
                    let b = &x[j * d..(j + 1) * d];
                    let sq: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
                    let v = sq.sqrt();
                    values[i * n + j] = v;
                    values[j * n + i] = v;
                }
            }
        }
        Attributes::Categorical(x) => {
            for i in 0..n {
                let a = &x[i * d..(i + 1) * d];
                for j in i + 1..n {
                    let b = &x[j * d..(j + 1) * d];
                    let v = a.iter().zip(b).filter(|(p, q)| p != q).count() as f64;
                    values[i * n + j] = v;
                    values[j * n + i] = v;
                }
            }
        }
    }
    Ok(DistanceMatrix { n, values, metric })
}
