//! Ratios between the required numbers of egonetworks of different tests.

use serde::{Deserialize, Serialize};

use super::TestSpec;
use crate::error::{Error, Result};
use crate::model::{DesignParams, EffectSizes};

/// `K_a / K_b` for the pairs used to compare tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KRatios {
    pub delta_over_tau: f64,
    pub joint_over_tau: f64,
    pub joint_over_delta: f64,
    pub tau_over_overall: f64,
    pub delta_over_overall: f64,
    pub joint_over_overall: f64,
}

/// Closed-form ratios in terms of `r = Δτ/Δδ`.
pub fn k_ratios(design: &DesignParams, effects: &EffectSizes, spec: &TestSpec) -> Result<KRatios> {
    design.validate()?;
    spec.validate()?;
    if effects.delta_tau == 0.0 || !effects.delta_tau.is_finite() {
        return Err(Error::ZeroEffect("tau"));
    }
    if effects.delta_delta == 0.0 || !effects.delta_delta.is_finite() {
        return Err(Error::ZeroEffect("delta"));
    }
    if effects.overall(design.n) == 0.0 {
        return Err(Error::ZeroEffect("overall effect"));
    }
    let (n, p, rho) = (design.n, design.p, design.rho_y);
    let r = effects.ratio();
    let u = spec.joint_ncp()? / spec.z_sum_sq();
    let w = (1.0 - p) * (1.0 - rho);
    let m = 1.0 + n * rho;
    let tau_term = n * w + m;
    let delta_term = w + n * m;
    let joint_share = 1.0 / (r * r + n);

    Ok(KRatios {
        delta_over_tau: delta_term / (n * n * w + n * m) * r * r,
        joint_over_tau: u * m * (n + 1.0) / tau_term * r * r * joint_share,
        joint_over_delta: u * m * n * (n + 1.0) / delta_term * joint_share,
        tau_over_overall: tau_term / ((n + 1.0).powi(2) * m) * (1.0 + n / r).powi(2),
        delta_over_overall: delta_term / (n * (n + 1.0).powi(2) * m) * (r + n).powi(2),
        joint_over_overall: u / (n + 1.0) * (r * r + 2.0 * n * r + n * n) * joint_share,
    })
}
