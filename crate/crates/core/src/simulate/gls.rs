//! Closed-form GLS fit of the random-intercept model.

use serde::{Deserialize, Serialize};

use super::dataset::EgoNetworkDataset;
use super::icc::estimate_icc;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::model::{DesignParams, ModelCoefficients};

/// Where the working covariance comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IccMode {
    /// `ρ_Y` and `σ²_Y` taken from the design.
    #[default]
    KnownIcc,
    /// Both estimated from the data by [`estimate_icc`].
    EstimatedIcc,
}

/// Wald statistics of one fit. Each `t_*` is an estimate over its standard
/// error; `q_joint` is the 2-df quadratic form in `(τ̂, δ̂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestStatistics {
    pub t_tau: f64,
    pub t_delta: f64,
    pub t_overall: f64,
    pub q_joint: f64,
}

impl TestStatistics {
    /// Builds the joint statistic from the two Z statistics and their correlation.
    pub fn from_z(t_tau: f64, t_delta: f64, t_overall: f64, corr: f64) -> Self {
        let q_joint =
            (t_tau * t_tau - 2.0 * corr * t_tau * t_delta + t_delta * t_delta) / (1.0 - corr * corr);
        Self {
            t_tau,
            t_delta,
            t_overall,
            q_joint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlsFit {
    pub theta_hat: ModelCoefficients,
    /// `σ²(Σ D'V⁻¹D)⁻¹`, ordered `(γ, τ, δ)`.
    pub cov_hat: Mat<3>,
    /// `(τ̂ + nδ̂)/(n+1)`
    pub overall_hat: f64,
    pub var_overall_hat: f64,
    pub test_stats: TestStatistics,
    pub rho_used: f64,
    pub sigma2_used: f64,
    pub k: usize,
    pub n: usize,
}

impl GlsFit {
    pub fn se_tau(&self) -> f64 {
        self.cov_hat[1][1].sqrt()
    }

    pub fn se_delta(&self) -> f64 {
        self.cov_hat[2][2].sqrt()
    }

    pub fn se_overall(&self) -> f64 {
        self.var_overall_hat.sqrt()
    }
}

pub(crate) fn check_both_arms(data: &EgoNetworkDataset, min_per_arm: usize) -> Result<()> {
    let treated = data.n_treated();
    let control = data.k() - treated;
    if treated == 0 || control == 0 {
        return Err(Error::DegenerateDesign(format!(
            "all {} egonetworks are in one arm",
            data.k()
        )));
    }
    if treated.min(control) < min_per_arm {
        return Err(Error::InsufficientData(format!(
            "need {min_per_arm} egonetworks per arm, got {treated} treated and {control} control"
        )));
    }
    Ok(())
}

/// GLS with `V⁻¹ = cI + dJ` accumulated network by network:
/// `D'V⁻¹D = c D'D + d (D'1)(1'D)`, `D'V⁻¹Y = c D'Y + d (D'1)(1'Y)`.
pub fn gls_fit(data: &EgoNetworkDataset, design: &DesignParams, mode: IccMode) -> Result<GlsFit> {
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
    check_both_arms(data, if mode == IccMode::EstimatedIcc { 2 } else { 1 })?;

    let (rho, sigma2) = match mode {
        IccMode::KnownIcc => (design.rho_y, design.sigma2_y),
        IccMode::EstimatedIcc => {
            let est = estimate_icc(data)?;
            (est.rho, est.sigma2_total())
        }
    };
    let nf = n as f64;
    let c = 1.0 / (1.0 - rho);
    let d = -rho / ((1.0 - rho) * (1.0 + nf * rho));

    let mut a: Mat<3> = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for net in data.networks() {
        let z = if net.treated { 1.0 } else { 0.0 };
        let total: f64 = net.y.iter().sum();
        let y1 = net.index_outcome();
        let one = [nf + 1.0, z, nf * z];
        let dtd = [
            [nf + 1.0, z, nf * z],
            [z, z, 0.0],
            [nf * z, 0.0, nf * z],
        ];
        let dty = [total, z * y1, z * (total - y1)];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += c * dtd[i][j] + d * one[i] * one[j];
            }
            b[i] += c * dty[i] + d * one[i] * total;
        }
    }

    let a_inv = linalg::invert(&a)
        .ok_or_else(|| Error::DegenerateDesign("information matrix is singular".into()))?;
    let theta = linalg::mat_vec(&a_inv, &b);
    let cov = linalg::scale(&a_inv, sigma2);

    let w = 1.0 / (nf + 1.0);
    let overall_hat = w * (theta[1] + nf * theta[2]);
    let var_overall_hat =
        w * w * (cov[1][1] + 2.0 * nf * cov[1][2] + nf * nf * cov[2][2]);
    let corr = cov[1][2] / (cov[1][1] * cov[2][2]).sqrt();
    let test_stats = TestStatistics::from_z(
        theta[1] / cov[1][1].sqrt(),
        theta[2] / cov[2][2].sqrt(),
        overall_hat / var_overall_hat.sqrt(),
        corr,
    );

    Ok(GlsFit {
        theta_hat: ModelCoefficients::from_array(theta),
        cov_hat: cov,
        overall_hat,
        var_overall_hat,
        test_stats,
        rho_used: rho,
        sigma2_used: sigma2,
        k: data.k(),
        n,
    })
}
