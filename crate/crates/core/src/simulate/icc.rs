//! One-way ANOVA moment estimator of the outcome ICC.

use serde::{Deserialize, Serialize};

use super::dataset::EgoNetworkDataset;
use crate::error::{Error, Result};

pub const ICC_MAX: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IccEstimate {
    /// `σ̂²_u / (σ̂²_u + σ̂²_e)`, clamped to `[0, 0.999]`.
    pub rho: f64,
    pub sigma2_between: f64,
    pub sigma2_within: f64,
}

impl IccEstimate {
    pub fn sigma2_total(&self) -> f64 {
        self.sigma2_between + self.sigma2_within
    }
}

/// Moment estimator on residuals from the four role×arm cell means, pooled
/// over all networks. Each network is one ANOVA group of `n + 1` units.
pub fn estimate_icc(data: &EgoNetworkDataset) -> Result<IccEstimate> {
    let k = data.k();
    let m = data.n() + 1;
    if data.n() == 0 {
        return Err(Error::InsufficientData(
            "networks have a single unit; within-network variation is not identified".into(),
        ));
    }
    if k < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 networks, got {k}"
        )));
    }

    // Cell means: [arm][role], role 0 = index, 1 = member.
    let mut sum = [[0.0; 2]; 2];
    let mut cnt = [[0usize; 2]; 2];
    for net in data.networks() {
        let arm = usize::from(net.treated);
        sum[arm][0] += net.index_outcome();
        cnt[arm][0] += 1;
        sum[arm][1] += net.member_outcomes().iter().sum::<f64>();
        cnt[arm][1] += data.n();
    }
    let mean = |arm: usize, role: usize| {
        if cnt[arm][role] == 0 {
            0.0
        } else {
            sum[arm][role] / cnt[arm][role] as f64
        }
    };
    let arms = (0..2).filter(|&a| cnt[a][0] > 0).count();

    let mut ss_within = 0.0;
    let mut net_means = Vec::with_capacity(k);
    let mut resid = vec![0.0; m];
    for net in data.networks() {
        let arm = usize::from(net.treated);
        for (unit, (&y, r)) in net.y.iter().zip(resid.iter_mut()).enumerate() {
            *r = y - mean(arm, usize::from(unit > 0));
        }
        let rbar = resid.iter().sum::<f64>() / m as f64;
        ss_within += resid.iter().map(|r| (r - rbar).powi(2)).sum::<f64>();
        net_means.push(rbar);
    }
    let grand = net_means.iter().sum::<f64>() / k as f64;
    let ss_between = m as f64 * net_means.iter().map(|r| (r - grand).powi(2)).sum::<f64>();

    // Each arm spends one degree of freedom on its level (between networks)
    // and one on the index-member contrast (within networks).
    let df_within = (k * (m - 1) - arms).max(1) as f64;
    let df_between = k.saturating_sub(arms).max(1) as f64;
    let ms_within = ss_within / df_within;
    let ms_between = ss_between / df_between;

    let sigma2_within = ms_within;
    let sigma2_between = ((ms_between - ms_within) / m as f64).max(0.0);
    let total = sigma2_between + sigma2_within;
    let rho = if total > 0.0 {
        (sigma2_between / total).clamp(0.0, ICC_MAX)
    } else {
        0.0
    };
    Ok(IccEstimate {
        rho,
        sigma2_between,
        sigma2_within,
    })
}
