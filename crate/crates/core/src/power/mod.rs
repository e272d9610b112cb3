//! Analytic power and the design inversions built on it: required number of
//! egonetworks, minimum detectable effects, required network size, optimal
//! allocation probability and sample-size ratios.

mod mde;
mod netsize;
mod optimal;
mod ratios;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{alt_variance_components, variance_components, DesignParams, EffectSizes};
use crate::numerics::{
    brent_root, bvn_upper, chisq_upper_quantile, noncentral_chisq_cdf, normal_cdf,
    normal_quantile, required_ncp, solve_monotone_min_integer, RootBracket,
};

pub use mde::{mde, FixedEffect};
pub use netsize::{solve_network_size, NetworkSizeSearch};
pub use optimal::{optimal_p, optimal_p_numeric};
pub use ratios::{k_ratios, KRatios};

/// Default upper bound for the conjunctive-test integer search.
pub const DEFAULT_K_MAX: u64 = 1_000_000;

/// The hypothesis tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    /// Individual effect τ.
    Hie,
    /// Spillover effect δ.
    Hspe,
    /// Joint 2-df Wald test of (τ, δ).
    Hispj,
    /// Conjunctive test: both τ and δ significant.
    Hispc,
    /// Overall effect (τ + nδ)/(n+1).
    Hoe,
    /// τ from the index-only regression.
    HieAlt,
    /// δ from the member-only mixed model.
    HspeAlt,
}

impl TestKind {
    pub const ALL: [TestKind; 7] = [
        TestKind::Hie,
        TestKind::Hspe,
        TestKind::Hispj,
        TestKind::Hispc,
        TestKind::Hoe,
        TestKind::HieAlt,
        TestKind::HspeAlt,
    ];

    /// The five tests on the single-model GLS fit.
    pub const GLS: [TestKind; 5] = [
        TestKind::Hie,
        TestKind::Hspe,
        TestKind::Hispj,
        TestKind::Hispc,
        TestKind::Hoe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TestKind::Hie => "hie",
            TestKind::Hspe => "hspe",
            TestKind::Hispj => "hispj",
            TestKind::Hispc => "hispc",
            TestKind::Hoe => "hoe",
            TestKind::HieAlt => "hie_alt",
            TestKind::HspeAlt => "hspe_alt",
        }
    }

    /// True when `K` has a closed form (everything except the conjunctive test).
    pub fn has_closed_form(self) -> bool {
        self != TestKind::Hispc
    }

    pub fn is_alt(self) -> bool {
        matches!(self, TestKind::HieAlt | TestKind::HspeAlt)
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        TestKind::ALL
            .into_iter()
            .find(|k| k.as_str() == norm)
            .ok_or_else(|| Error::Unsupported(format!("unknown test `{s}`")))
    }
}

/// Two-sided Type I error rate and target power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSpec {
    pub alpha: f64,
    pub power_target: f64,
}

impl Default for TestSpec {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            power_target: 0.8,
        }
    }
}

impl TestSpec {
    pub fn new(alpha: f64, power_target: f64) -> Result<Self> {
        let spec = Self {
            alpha,
            power_target,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid("alpha", self.alpha, "must lie in (0, 1)"));
        }
        if !(self.power_target > 0.0 && self.power_target < 1.0) {
            return Err(invalid("power", self.power_target, "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// `z_{1-α/2}`
    pub fn z_alpha(&self) -> f64 {
        normal_quantile(1.0 - self.alpha / 2.0).expect("alpha validated")
    }

    /// `z_π`
    pub fn z_power(&self) -> f64 {
        normal_quantile(self.power_target).expect("power validated")
    }

    /// `(z_{1-α/2} + z_π)²`
    pub fn z_sum_sq(&self) -> f64 {
        (self.z_alpha() + self.z_power()).powi(2)
    }

    /// `χ²_{1-α}(2)`
    pub fn chisq_crit(&self) -> f64 {
        chisq_upper_quantile(self.alpha, 2).expect("alpha validated")
    }

    /// `υ(χ²_{1-α}(2), π, 2)`: the non-centrality giving power π to the joint test.
    pub fn joint_ncp(&self) -> Result<f64> {
        required_ncp(self.chisq_crit(), self.power_target, 2)
    }
}

/// Required number of egonetworks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeResult {
    pub k_required: u64,
    pub k_continuous: f64,
    pub achieved_power: f64,
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(invalid("k", k, "number of egonetworks must be finite and > 0"));
    }
    Ok(())
}

/// Two-sided Z-test power with standardized mean `mu`, including the far tail.
fn z_test_power(mu: f64, z: f64) -> f64 {
    normal_cdf(mu - z) + normal_cdf(-z - mu)
}

/// Power at a real-valued number of egonetworks.
pub fn power_at(
    kind: TestKind,
    design: &DesignParams,
    effects: &EffectSizes,
    spec: &TestSpec,
    k: f64,
) -> Result<f64> {
    design.validate()?;
    spec.validate()?;
    check_k(k)?;
    let z = spec.z_alpha();
    let sk = k.sqrt();
    let power = match kind {
        TestKind::Hie | TestKind::Hspe | TestKind::Hoe => {
            let v = variance_components(design)?;
            let (delta, var) = match kind {
                TestKind::Hie => (effects.delta_tau, v.var_tau),
                TestKind::Hspe => (effects.delta_delta, v.var_delta),
                _ => (effects.overall(design.n), v.var_overall),
            };
            z_test_power(sk * delta / var.sqrt(), z)
        }
        TestKind::HieAlt | TestKind::HspeAlt => {
            let a = alt_variance_components(design, design.index_variance())?;
            let (delta, var) = if kind == TestKind::HieAlt {
                (effects.delta_tau, a.var_tau_alt)
            } else {
                (effects.delta_delta, a.var_delta_alt)
            };
            z_test_power(sk * delta / var.sqrt(), z)
        }
        TestKind::Hispj => {
            let v = variance_components(design)?;
            let ncp = k * v.mahalanobis(effects);
            1.0 - noncentral_chisq_cdf(spec.chisq_crit(), 2, ncp)?
        }
        TestKind::Hispc => {
            let v = variance_components(design)?;
            let mt = sk * effects.delta_tau / v.var_tau.sqrt();
            let md = sk * effects.delta_delta / v.var_delta.sqrt();
            let r = v.corr;
            bvn_upper(z - mt, z - md, r)?
                + bvn_upper(z - mt, z + md, -r)?
                + bvn_upper(z + mt, z - md, -r)?
                + bvn_upper(z + mt, z + md, r)?
        }
    };
    Ok(power.clamp(0.0, 1.0))
}

/// Analytic power with `k` egonetworks.
pub fn analytic_power(
    kind: TestKind,
    design: &DesignParams,
    effects: &EffectSizes,
    spec: &TestSpec,
    k: u64,
) -> Result<f64> {
    power_at(kind, design, effects, spec, k as f64)
}

/// Pre-ceiling `K` from the closed-form sample-size equations. The two-sided
/// Z tests drop the far-tail term, as is conventional.
pub fn k_closed_form(
    kind: TestKind,
    design: &DesignParams,
    effects: &EffectSizes,
    spec: &TestSpec,
) -> Result<f64> {
    design.validate()?;
    spec.validate()?;
    let zz = spec.z_sum_sq();
    let nonzero = |d: f64, what: &'static str| {
        if d == 0.0 || !d.is_finite() {
            Err(Error::ZeroEffect(what))
        } else {
            Ok(d * d)
        }
    };
    match kind {
        TestKind::Hie => {
            let v = variance_components(design)?;
            Ok(v.var_tau * zz / nonzero(effects.delta_tau, "tau")?)
        }
        TestKind::Hspe => {
            let v = variance_components(design)?;
            Ok(v.var_delta * zz / nonzero(effects.delta_delta, "delta")?)
        }
        TestKind::Hoe => {
            let v = variance_components(design)?;
            Ok(v.var_overall * zz / nonzero(effects.overall(design.n), "overall effect")?)
        }
        TestKind::HieAlt => {
            let a = alt_variance_components(design, design.index_variance())?;
            Ok(a.var_tau_alt * zz / nonzero(effects.delta_tau, "tau")?)
        }
        TestKind::HspeAlt => {
            let a = alt_variance_components(design, design.index_variance())?;
            Ok(a.var_delta_alt * zz / nonzero(effects.delta_delta, "delta")?)
        }
        TestKind::Hispj => {
            let (n, rho) = (design.n, design.rho_y);
            let denom = effects.delta_tau.powi(2) + n * effects.delta_delta.powi(2);
            if denom == 0.0 || !denom.is_finite() {
                return Err(Error::ZeroEffect("tau and delta"));
            }
            let ups = spec.joint_ncp()?;
            Ok(ups * design.sigma2_y * (1.0 + n * rho) / (design.sigma2_z() * denom))
        }
        TestKind::Hispc => Err(Error::Unsupported(
            "the conjunctive test has no closed-form K".into(),
        )),
    }
}

/// Real `K` at which the conjunctive test reaches the target power, found by
/// Brent on the continuous power curve.
pub fn k_continuous_conjunctive(
    design: &DesignParams,
    effects: &EffectSizes,
    spec: &TestSpec,
    k_max: u64,
) -> Result<f64> {
    check_conjunctive_effects(effects)?;
    let target = spec.power_target;
    let f = |k: f64| {
        power_at(TestKind::Hispc, design, effects, spec, k)
            .map(|p| p - target)
            .unwrap_or(f64::NAN)
    };
    let mut lo = 1e-6;
    if f(lo) >= 0.0 {
        return Ok(lo);
    }
    let mut hi = 1.0_f64;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 2.0 * k_max as f64 {
            return Err(Error::NotFoundWithinBound { bound: k_max });
        }
    }
    brent_root(f, RootBracket::new(lo, hi)?)
}

fn check_conjunctive_effects(effects: &EffectSizes) -> Result<()> {
    if effects.delta_tau == 0.0 || !effects.delta_tau.is_finite() {
        return Err(Error::ZeroEffect("tau"));
    }
    if effects.delta_delta == 0.0 || !effects.delta_delta.is_finite() {
        return Err(Error::ZeroEffect("delta"));
    }
    Ok(())
}

/// Required number of egonetworks, with the default conjunctive search bound.
pub fn required_k(
    kind: TestKind,
    design: &DesignParams,
    effects: &EffectSizes,
    spec: &TestSpec,
) -> Result<SampleSizeResult> {
    required_k_bounded(kind, design, effects, spec, DEFAULT_K_MAX)
}

/// As [`required_k`], with an explicit upper bound for the integer search.
pub fn required_k_bounded(
    kind: TestKind,
    design: &DesignParams,
    effects: &EffectSizes,
    spec: &TestSpec,
    k_max: u64,
) -> Result<SampleSizeResult> {
    let (k_required, k_continuous) = if kind.has_closed_form() {
        let kc = k_closed_form(kind, design, effects, spec)?;
        let k = kc.ceil().max(1.0);
        if k > u64::MAX as f64 / 2.0 {
            return Err(Error::NotFoundWithinBound { bound: u64::MAX / 2 });
        }
        (k as u64, kc)
    } else {
        design.validate()?;
        spec.validate()?;
        check_conjunctive_effects(effects)?;
        let target = spec.power_target;
        let k = solve_monotone_min_integer(
            |k| {
                analytic_power(kind, design, effects, spec, k)
                    .map(|p| p >= target)
                    .unwrap_or(false)
            },
            k_max,
        )?;
        (k, k_continuous_conjunctive(design, effects, spec, k_max)?)
    };
    let achieved_power = analytic_power(kind, design, effects, spec, k_required)?;
    Ok(SampleSizeResult {
        k_required,
        k_continuous,
        achieved_power,
    })
}
