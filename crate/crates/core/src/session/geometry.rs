use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinates a click is matched in: the embedding plus the potential
/// axis (`rp`, `m + 1` values), or the embedding alone (`r`, `m` values).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClickSpace {
    #[default]
    Rp,
    R,
}

impl fmt::Display for ClickSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClickSpace::Rp => "rp",
            ClickSpace::R => "r",
        })
    }
}

impl FromStr for ClickSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rp" => Ok(ClickSpace::Rp),
            "r" => Ok(ClickSpace::R),
            other => Err(Error::InvalidArgument(format!(
                "unknown click space `{other}`"
            ))),
        }
    }
}

/// Squared distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance_sq(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut ab2 = 0.0;
    let mut ap_ab = 0.0;
    for k in 0..p.len() {
        let ab = b[k] - a[k];
        ab2 += ab * ab;
        ap_ab += (p[k] - a[k]) * ab;
    }
    let t = if ab2 > 0.0 {
        (ap_ab / ab2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (0..p.len())
        .map(|k| {
            let q = a[k] + t * (b[k] - a[k]);
            (p[k] - q) * (p[k] - q)
        })
        .sum()
}
