//! Design and effect types, and the closed-form variance algebra of the GLS
//! estimator for the random-intercept model
//!
//! ```text
//! Y_ik = γ + τ Z_ik + δ G_ik + u_k + ε_ik,   u_k ~ N(0, ρσ²),  ε_ik ~ N(0, (1-ρ)σ²)
//! ```
//!
//! fitted to `K` egonetworks of one index participant and `n` members each.
//! Every variance here is "K-scaled": the variance of the estimator is the
//! returned value divided by `K`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Mat};

/// One design point of an egocentric network-based randomized trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignParams {
    /// Network members per index participant. Real-valued for analytic work.
    pub n: f64,
    /// Probability that an index participant is assigned to treatment.
    pub p: f64,
    /// Outcome intra-class correlation within an egonetwork.
    pub rho_y: f64,
    /// Total outcome variance `σ²_u + σ²_e`.
    pub sigma2_y: f64,
    /// Index-participant outcome variance used by the separate-regression
    /// estimator. Falls back to `sigma2_y` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2_y1: Option<f64>,
}

impl DesignParams {
    pub fn new(n: f64, p: f64, rho_y: f64, sigma2_y: f64) -> Result<Self> {
        let design = Self {
            n,
            p,
            rho_y,
            sigma2_y,
            sigma2_y1: None,
        };
        design.validate()?;
        Ok(design)
    }

    pub fn with_index_variance(mut self, sigma2_y1: f64) -> Result<Self> {
        if !(sigma2_y1 > 0.0) || !sigma2_y1.is_finite() {
            return Err(invalid("sigma2_y1", sigma2_y1, "must be finite and > 0"));
        }
        self.sigma2_y1 = Some(sigma2_y1);
        Ok(self)
    }

    pub fn with_n(mut self, n: f64) -> Self {
        self.n = n;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_rho(mut self, rho_y: f64) -> Self {
        self.rho_y = rho_y;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n > 0.0) || !self.n.is_finite() {
            return Err(invalid("n", self.n, "must be finite and > 0"));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(invalid("p", self.p, "must lie in (0, 1)"));
        }
        if !(self.rho_y >= 0.0 && self.rho_y < 1.0) {
            return Err(invalid("rho_y", self.rho_y, "must lie in [0, 1)"));
        }
        if !(self.sigma2_y > 0.0) || !self.sigma2_y.is_finite() {
            return Err(invalid("sigma2_y", self.sigma2_y, "must be finite and > 0"));
        }
        if let Some(v) = self.sigma2_y1 {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid("sigma2_y1", v, "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Network size as an integer, for simulation.
    pub fn integer_n(&self) -> Result<usize> {
        if self.n >= 1.0 && self.n.fract() == 0.0 && self.n <= u32::MAX as f64 {
            Ok(self.n as usize)
        } else {
            Err(invalid("n", self.n, "simulation needs an integer n >= 1"))
        }
    }

    /// Between-network variance `σ²_u = ρσ²`.
    pub fn sigma2_u(&self) -> f64 {
        self.rho_y * self.sigma2_y
    }

    /// Within-network variance `σ²_e = (1-ρ)σ²`.
    pub fn sigma2_e(&self) -> f64 {
        (1.0 - self.rho_y) * self.sigma2_y
    }

    pub fn index_variance(&self) -> f64 {
        self.sigma2_y1.unwrap_or(self.sigma2_y)
    }

    /// Bernoulli assignment variance `p(1-p)`.
    pub fn sigma2_z(&self) -> f64 {
        self.p * (1.0 - self.p)
    }

    pub(crate) fn m1(&self) -> f64 {
        self.p * (1.0 - self.p / (self.n + 1.0))
    }

    pub(crate) fn m2(&self) -> f64 {
        self.p * (1.0 - self.n * self.p / (self.n + 1.0))
    }

    /// Diagonal coefficient of `V⁻¹ = cI + dJ`.
    pub fn c(&self) -> f64 {
        1.0 / (1.0 - self.rho_y)
    }

    /// Off-diagonal coefficient of `V⁻¹ = cI + dJ`.
    pub fn d(&self) -> f64 {
        -self.rho_y / ((1.0 - self.rho_y) * (1.0 + self.n * self.rho_y))
    }
}

/// Hypothesized individual (AIE) and spillover (ASpE) effects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectSizes {
    pub delta_tau: f64,
    pub delta_delta: f64,
}

impl EffectSizes {
    pub fn new(delta_tau: f64, delta_delta: f64) -> Self {
        Self {
            delta_tau,
            delta_delta,
        }
    }

    pub fn equal(delta: f64) -> Self {
        Self::new(delta, delta)
    }

    /// Overall effect `(Δτ + nΔδ)/(n+1)` for networks of `n` members.
    pub fn overall(&self, n: f64) -> f64 {
        (self.delta_tau + n * self.delta_delta) / (n + 1.0)
    }

    /// `Δτ/Δδ`; infinite or NaN when `Δδ = 0`.
    pub fn ratio(&self) -> f64 {
        self.delta_tau / self.delta_delta
    }
}

/// Coefficients `θ = (γ, τ, δ)'` of the outcome model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelCoefficients {
    pub gamma: f64,
    pub tau: f64,
    pub delta: f64,
}

impl ModelCoefficients {
    pub fn new(gamma: f64, tau: f64, delta: f64) -> Self {
        Self { gamma, tau, delta }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.gamma, self.tau, self.delta]
    }

    pub fn from_array(theta: [f64; 3]) -> Self {
        Self::new(theta[0], theta[1], theta[2])
    }

    /// Overall effect `(τ + nδ)/(n+1)`.
    pub fn overall(&self, n: f64) -> f64 {
        (self.tau + n * self.delta) / (n + 1.0)
    }
}

/// Asymptotic (K-scaled) second moments of `(τ̂, δ̂)` and of the overall contrast.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceComponents {
    pub var_tau: f64,
    pub var_delta: f64,
    pub cov_tau_delta: f64,
    pub var_overall: f64,
    pub corr: f64,
}

impl VarianceComponents {
    pub fn matrix(&self) -> Mat<2> {
        [
            [self.var_tau, self.cov_tau_delta],
            [self.cov_tau_delta, self.var_delta],
        ]
    }

    /// `Δ' Σ⁻¹ Δ` for `Δ = (Δτ, Δδ)'`.
    pub fn mahalanobis(&self, effects: &EffectSizes) -> f64 {
        let det = self.var_tau * self.var_delta - self.cov_tau_delta * self.cov_tau_delta;
        let (a, b) = (effects.delta_tau, effects.delta_delta);
        (a * a * self.var_delta - 2.0 * a * b * self.cov_tau_delta + b * b * self.var_tau) / det
    }
}

/// Variances for the separate-regression estimator: index-only OLS for τ and
/// member-only GLS for δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltVarianceComponents {
    pub var_tau_alt: f64,
    pub var_delta_alt: f64,
    pub sigma2_y1: f64,
}

/// Limiting information matrix `U_I = lim (1/K) Σ D_k' V_k⁻¹ D_k` in the block
/// form built from `c`, `d`, `n` and `p`.
pub fn information_matrix(design: &DesignParams) -> Result<Mat<3>> {
    design.validate()?;
    let DesignParams { n, p, .. } = *design;
    let (c, d) = (design.c(), design.d());
    let e = c + (n + 1.0) * d;
    Ok([
        [e * (n + 1.0), e * p, e * n * p],
        [e * p, (c + d) * p, n * p * d],
        [e * n * p, n * p * d, (c + n * d) * n * p],
    ])
}

/// Closed-form asymptotic variances of `τ̂`, `δ̂`, their covariance and the
/// variance of the overall contrast `(τ̂ + nδ̂)/(n+1)`.
pub fn variance_components(design: &DesignParams) -> Result<VarianceComponents> {
    design.validate()?;
    let DesignParams {
        n,
        p,
        rho_y: rho,
        sigma2_y: s2,
        ..
    } = *design;
    let sz = design.sigma2_z();
    let var_tau = s2 * (n * (1.0 - p) * (1.0 - rho) + (1.0 + n * rho)) / ((n + 1.0) * sz);
    let var_delta = s2 * ((1.0 - p) * (1.0 - rho) + n * (1.0 + n * rho)) / (n * (n + 1.0) * sz);
    let cov_tau_delta = s2 * (p * (1.0 + n * rho) + (1.0 - p) * (n + 1.0) * rho) / ((n + 1.0) * sz);
    let var_overall = s2 * (1.0 + n * rho) / ((n + 1.0) * sz);
    Ok(VarianceComponents {
        var_tau,
        var_delta,
        cov_tau_delta,
        var_overall,
        corr: cov_tau_delta / (var_tau * var_delta).sqrt(),
    })
}

/// The same 2×2 block written with the `c, d, m₁, m₂` scalars of the Schur
/// complement derivation. Kept as a second algebraic route.
pub fn variance_block_schur(design: &DesignParams) -> Result<Mat<2>> {
    design.validate()?;
    let (n, p, s2) = (design.n, design.p, design.sigma2_y);
    let (c, d, m1, m2, sz) = (design.c(), design.d(), design.m1(), design.m2(), design.sigma2_z());
    let denom = c * p * sz * (c + d * (1.0 + n));
    let off = s2 * (c * (p - m1) - d * sz) / denom;
    Ok([
        [s2 * (c * m2 + n * d * sz) / denom, off],
        [off, s2 * (c * m1 + d * sz) / (n * denom)],
    ])
}

/// Limiting information matrix of the member-only GLS fit,
/// `U_S = c S + d_S T` with `d_S = -ρ/{(1-ρ)(1+(n-1)ρ)}`.
pub fn member_information_matrix(design: &DesignParams) -> Result<Mat<2>> {
    design.validate()?;
    let (n, p, rho) = (design.n, design.p, design.rho_y);
    let c = 1.0 / (1.0 - rho);
    let d = -rho / ((1.0 - rho) * (1.0 + (n - 1.0) * rho));
    let s = [[n, n * p], [n * p, n * p]];
    let t = [[n * n, n * n * p], [n * n * p, n * n * p]];
    let mut u = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            u[i][j] = c * s[i][j] + d * t[i][j];
        }
    }
    Ok(u)
}

/// Variances of the separate-regression estimators.
pub fn alt_variance_components(
    design: &DesignParams,
    sigma2_y1: f64,
) -> Result<AltVarianceComponents> {
    design.validate()?;
    if !(sigma2_y1 > 0.0) || !sigma2_y1.is_finite() {
        return Err(invalid("sigma2_y1", sigma2_y1, "must be finite and > 0"));
    }
    let (n, rho, s2, sz) = (design.n, design.rho_y, design.sigma2_y, design.sigma2_z());
    Ok(AltVarianceComponents {
        var_tau_alt: sigma2_y1 / sz,
        var_delta_alt: s2 * (1.0 + (n - 1.0) * rho) / (n * sz),
        sigma2_y1,
    })
}

/// `σ²·U⁻¹` restricted to the `(τ, δ)` block, by numerical inversion.
pub fn numerical_variance_block(design: &DesignParams) -> Result<Mat<2>> {
    let u = information_matrix(design)?;
    let inv = linalg::invert(&u)
        .ok_or_else(|| Error::DegenerateDesign("information matrix is singular".into()))?;
    let s2 = design.sigma2_y;
    Ok([
        [s2 * inv[1][1], s2 * inv[1][2]],
        [s2 * inv[2][1], s2 * inv[2][2]],
    ])
}
