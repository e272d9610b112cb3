//! Special functions and root finding used by the power formulas.

mod bvn;
mod chisq;
mod normal;
mod roots;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use bvn::{bvn_cdf, bvn_upper};
pub use chisq::{chisq_cdf, chisq_upper_quantile, noncentral_chisq_cdf, required_ncp};
pub use normal::{normal_cdf, normal_pdf, normal_quantile, normal_sf};
pub use roots::{
    brent_root, golden_section_min, smallest_root, solve_monotone_min_integer, RootBracket,
};

/// A probability in `[0, 1]`. Out-of-range values are rejected, never clamped.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(invalid("probability", value, "must lie in [0, 1]"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = crate::error::Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}
