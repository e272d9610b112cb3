//! The separate-regression estimator: index-only OLS for τ and member-only
//! GLS for δ.

use serde::{Deserialize, Serialize};

use super::dataset::EgoNetworkDataset;
use super::gls::check_both_arms;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::model::DesignParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltFit {
    /// Control mean of index outcomes.
    pub gamma_tau: f64,
    pub tau_hat: f64,
    pub var_tau_hat: f64,
    /// Control mean of member outcomes.
    pub gamma_delta: f64,
    pub delta_hat: f64,
    pub var_delta_hat: f64,
}

impl AltFit {
    pub fn t_tau(&self) -> f64 {
        self.tau_hat / self.var_tau_hat.sqrt()
    }

    pub fn t_delta(&self) -> f64 {
        self.delta_hat / self.var_delta_hat.sqrt()
    }
}

/// Fits both regressions with the design's `ρ_Y`, `σ²_Y` and index variance.
pub fn alt_fit(data: &EgoNetworkDataset, design: &DesignParams) -> Result<AltFit> {
    design.validate()?;
    let n = data.n();
    if n == 0 {
        return Err(Error::DegenerateDesign("networks have no members".into()));
    }
    if n as f64 != design.n {
        return Err(Error::Format(format!(
            "dataset has {n} members per network, design says {}",
            design.n
        )));
    }
    check_both_arms(data, 1)?;

    // Index-only OLS on (1, z): a difference in arm means.
    let (mut s, mut c) = ([0.0; 2], [0usize; 2]);
    for net in data.networks() {
        let arm = usize::from(net.treated);
        s[arm] += net.index_outcome();
        c[arm] += 1;
    }
    let m0 = s[0] / c[0] as f64;
    let m1 = s[1] / c[1] as f64;
    let var_tau_hat = design.index_variance() * (1.0 / c[0] as f64 + 1.0 / c[1] as f64);

    // Member-only GLS on (1, g) with V_S⁻¹ = cI + d_S J over n members.
    let (nf, rho) = (n as f64, design.rho_y);
    let cc = 1.0 / (1.0 - rho);
    let ds = -rho / ((1.0 - rho) * (1.0 + (nf - 1.0) * rho));
    let mut a: Mat<2> = [[0.0; 2]; 2];
    let mut b = [0.0; 2];
    for net in data.networks() {
        let g = if net.treated { 1.0 } else { 0.0 };
        let total: f64 = net.member_outcomes().iter().sum();
        let one = [nf, nf * g];
        let gtg = [[nf, nf * g], [nf * g, nf * g]];
        let gty = [total, g * total];
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] += cc * gtg[i][j] + ds * one[i] * one[j];
            }
            b[i] += cc * gty[i] + ds * one[i] * total;
        }
    }
    let a_inv = linalg::invert(&a)
        .ok_or_else(|| Error::DegenerateDesign("member information matrix is singular".into()))?;
    let theta = linalg::mat_vec(&a_inv, &b);

    Ok(AltFit {
        gamma_tau: m0,
        tau_hat: m1 - m0,
        var_tau_hat,
        gamma_delta: theta[0],
        delta_hat: theta[1],
        var_delta_hat: design.sigma2_y * a_inv[1][1],
    })
}
