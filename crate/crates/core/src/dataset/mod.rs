//! Datasets, CSV ingest, synthetic generators and pairwise distances.

mod distance;
mod parse;
mod synth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use distance::{distance_matrix, DistanceMatrix};
pub use parse::{content_id, parse_csv, to_csv};
pub use synth::{
    generate_gaussian_mixture, generate_spiral, spiral_radius, SPIRAL_TURN_END, SPIRAL_TURN_START,
};

/// Kind shared by every attribute of a dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrKind {
    Numeric,
    Categorical,
}

impl fmt::Display for AttrKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttrKind::Numeric => "numeric",
            AttrKind::Categorical => "categorical",
        })
    }
}

impl FromStr for AttrKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "numeric" => Ok(AttrKind::Numeric),
            "categorical" => Ok(AttrKind::Categorical),
            other => Err(Error::InvalidArgument(format!(
                "unknown attribute kind `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// L2 distance over numeric attributes.
    Euclidean,
    /// Number of differing categorical attributes.
    Hamming,
}

impl Metric {
    /// The metric that applies to attributes of `kind`.
    pub fn for_kind(kind: AttrKind) -> Metric {
        match kind {
            AttrKind::Numeric => Metric::Euclidean,
            AttrKind::Categorical => Metric::Hamming,
        }
    }

    pub fn attr_kind(self) -> AttrKind {
        match self {
            Metric::Euclidean => AttrKind::Numeric,
            Metric::Hamming => AttrKind::Categorical,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Hamming => "hamming",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "hamming" => Ok(Metric::Hamming),
            other => Err(Error::InvalidArgument(format!("unknown metric `{other}`"))),
        }
    }
}

/// Row-major attribute storage, `n * d` entries.
#[derive(Clone, Debug, PartialEq)]
pub enum Attributes {
    Numeric(Vec<f64>),
    /// Per-column symbol codes; see [`Dataset::symbols`] for the alphabet.
    Categorical(Vec<u32>),
}

/// `N` points with `d` attributes of a single kind and optional
/// ground-truth class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    name: String,
    n: usize,
    d: usize,
    attrs: Attributes,
    symbols: Vec<Vec<String>>,
    labels: Option<Vec<u32>>,
    label_names: Vec<String>,
}

impl Dataset {
    /// Build a numeric dataset from row-major values.
    pub fn numeric(
        name: impl Into<String>,
        d: usize,
        values: Vec<f64>,
        labels: Option<Vec<u32>>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::NoAttributes);
        }
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.len() % d != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} values do not split into rows of {d}",
                values.len()
            )));
        }
        let n = values.len() / d;
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::BadNumber {
                row: pos / d,
                column: pos % d,
                token: values[pos].to_string(),
            });
        }
        let label_names = default_label_names(labels.as_deref(), n)?;
        Ok(Self {
            name: name.into(),
            n,
            d,
            attrs: Attributes::Numeric(values),
            symbols: Vec::new(),
            labels,
            label_names,
        })
    }

    /// Build a categorical dataset from row-major symbol codes and the
    /// per-column alphabets they index into.
    pub fn categorical(
        name: impl Into<String>,
        symbols: Vec<Vec<String>>,
        codes: Vec<u32>,
        labels: Option<Vec<u32>>,
    ) -> Result<Self> {
        let d = symbols.len();
        if d == 0 {
            return Err(Error::NoAttributes);
        }
        if codes.is_empty() {
            return Err(Error::EmptyInput);
        }
        if codes.len() % d != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} codes do not split into rows of {d}",
                codes.len()
            )));
        }
        for (pos, &code) in codes.iter().enumerate() {
            if code as usize >= symbols[pos % d].len() {
                return Err(Error::InvalidArgument(format!(
                    "symbol code {code} outside the alphabet of column {}",
                    pos % d
                )));
            }
        }
        let n = codes.len() / d;
        let label_names = default_label_names(labels.as_deref(), n)?;
        Ok(Self {
            name: name.into(),
            n,
            d,
            attrs: Attributes::Categorical(codes),
            symbols,
            labels,
            label_names,
        })
    }

    pub(crate) fn with_label_names(mut self, names: Vec<String>) -> Self {
        debug_assert!(self
            .labels
            .as_ref()
            .map_or(true, |l| l.iter().all(|&c| (c as usize) < names.len())));
        self.label_names = names;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of attributes per point.
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> AttrKind {
        match self.attrs {
            Attributes::Numeric(_) => AttrKind::Numeric,
            Attributes::Categorical(_) => AttrKind::Categorical,
        }
    }

    pub fn attributes(&self) -> &Attributes {
        &self.attrs
    }

    /// Per-column alphabets of a categorical dataset (empty for numeric).
    pub fn symbols(&self) -> &[Vec<String>] {
        &self.symbols
    }

    pub fn numeric_row(&self, i: usize) -> Option<&[f64]> {
        match &self.attrs {
            Attributes::Numeric(v) => Some(&v[i * self.d..(i + 1) * self.d]),
            Attributes::Categorical(_) => None,
        }
    }

    pub fn categorical_row(&self, i: usize) -> Option<&[u32]> {
        match &self.attrs {
            Attributes::Categorical(v) => Some(&v[i * self.d..(i + 1) * self.d]),
            Attributes::Numeric(_) => None,
        }
    }

    /// Ground-truth class id per point, if known.
    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    /// Display names of the class ids in [`Dataset::labels`].
    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    /// Number of distinct ground-truth classes (0 when unlabeled).
    pub fn class_count(&self) -> usize {
        self.label_names.len()
    }

    /// The points at `indices`, in the given order. Alphabets and label
    /// names are kept whole so codes stay comparable with the parent.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        if indices.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n) {
            return Err(Error::NodeOutOfRange {
                node: bad,
                n: self.n,
            });
        }
        let d = self.d;
        let attrs = match &self.attrs {
            Attributes::Numeric(v) => Attributes::Numeric(
                indices
                    .iter()
                    .flat_map(|&i| v[i * d..(i + 1) * d].iter().copied())
                    .collect(),
            ),
            Attributes::Categorical(v) => Attributes::Categorical(
                indices
                    .iter()
                    .flat_map(|&i| v[i * d..(i + 1) * d].iter().copied())
                    .collect(),
            ),
        };
        Ok(Dataset {
            name: self.name.clone(),
            n: indices.len(),
            d,
            attrs,
            symbols: self.symbols.clone(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
            label_names: self.label_names.clone(),
        })
    }
}

fn default_label_names(labels: Option<&[u32]>, n: usize) -> Result<Vec<String>> {
    let Some(labels) = labels else {
        return Ok(Vec::new());
    };
    if labels.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} labels for {n} points",
            labels.len()
        )));
    }
    let classes = labels.iter().max().map_or(0, |&m| m as usize + 1);
    Ok((0..classes).map(|c| c.to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_and_kind_round_trip_through_strings() {
        for m in [Metric::Euclidean, Metric::Hamming] {
            assert_eq!(m.to_string().parse::<Metric>().unwrap(), m);
            assert_eq!(Metric::for_kind(m.attr_kind()), m);
        }
        assert!("manhattan".parse::<Metric>().is_err());
    }

    #[test]
    fn numeric_rejects_non_finite_values() {
        let err = Dataset::numeric("x", 2, vec![0.0, f64::NAN], None).unwrap_err();
        assert!(matches!(
            err,
            Error::BadNumber {
                row: 0,
                column: 1,
                ..
            }
        ));
    }

    #[test]
    fn subset_keeps_labels_aligned() {
        let ds = Dataset::numeric("x", 1, vec![0.0, 1.0, 2.0], Some(vec![0, 1, 2])).unwrap();
        let sub = ds.subset(&[2, 0]).unwrap();
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.numeric_row(0), Some(&[2.0][..]));
        assert_eq!(sub.labels(), Some(&[2, 0][..]));
        assert_eq!(sub.class_count(), 3);
        assert!(ds.subset(&[3]).is_err());
    }
}
