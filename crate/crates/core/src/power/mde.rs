//! Minimum detectable effects at a fixed number of egonetworks.

use serde::{Deserialize, Serialize};

use super::{power_at, TestKind, TestSpec};
use crate::error::{invalid, Error, Result};
use crate::model::{alt_variance_components, variance_components, DesignParams, EffectSizes};
use crate::numerics::{brent_root, RootBracket};

/// For the two-parameter tests: hold one effect at a given value and solve
/// for the other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedEffect {
    Tau(f64),
    Delta(f64),
}

/// Smallest detectable `|Δ|` with `k` egonetworks.
///
/// For `Hie`/`Hspe`/`Hoe` and the alternative-model tests this is the
/// effect the test is about. For `Hispj` and `Hispc`, `fixed_other` pins one
/// of `Δτ`, `Δδ` and the other is returned; with `None` both effects are
/// taken equal and their common magnitude is returned.
pub fn mde(
    kind: TestKind,
    design: &DesignParams,
    spec: &TestSpec,
    k: u64,
    fixed_other: Option<FixedEffect>,
) -> Result<f64> {
    design.validate()?;
    spec.validate()?;
    if k == 0 {
        return Err(invalid("k", 0.0, "number of egonetworks must be >= 1"));
    }
    let kf = k as f64;
    let zz = spec.z_sum_sq();
    match kind {
        TestKind::Hie | TestKind::Hspe | TestKind::Hoe => {
            let v = variance_components(design)?;
            let var = match kind {
                TestKind::Hie => v.var_tau,
                TestKind::Hspe => v.var_delta,
                _ => v.var_overall,
            };
            Ok((var * zz / kf).sqrt())
        }
        TestKind::HieAlt | TestKind::HspeAlt => {
            let a = alt_variance_components(design, design.index_variance())?;
            let var = if kind == TestKind::HieAlt {
                a.var_tau_alt
            } else {
                a.var_delta_alt
            };
            Ok((var * zz / kf).sqrt())
        }
        TestKind::Hispj => {
            let n = design.n;
            let budget = spec.joint_ncp()? * design.sigma2_y * (1.0 + n * design.rho_y)
                / (kf * design.sigma2_z());
            let radicand = match fixed_other {
                None => budget / (1.0 + n),
                Some(FixedEffect::Delta(d)) => budget - n * d * d,
                Some(FixedEffect::Tau(t)) => (budget - t * t) / n,
            };
            if radicand <= 0.0 {
                return Err(Error::Infeasible(format!(
                    "the fixed effect alone already exceeds what {k} egonetworks can detect"
                )));
            }
            Ok(radicand.sqrt())
        }
        TestKind::Hispc => conjunctive_mde(design, spec, kf, fixed_other),
    }
}

fn conjunctive_mde(
    design: &DesignParams,
    spec: &TestSpec,
    k: f64,
    fixed_other: Option<FixedEffect>,
) -> Result<f64> {
    let effects_for = |x: f64| match fixed_other {
        None => EffectSizes::equal(x),
        Some(FixedEffect::Tau(t)) => EffectSizes::new(t, x),
        Some(FixedEffect::Delta(d)) => EffectSizes::new(x, d),
    };
    let target = spec.power_target;
    let f = |x: f64| {
        power_at(TestKind::Hispc, design, &effects_for(x), spec, k)
            .map(|p| p - target)
            .unwrap_or(f64::NAN)
    };
    let lo = 0.0;
    if f(lo) >= 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0_f64;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Infeasible(
                "the fixed effect caps conjunctive power below the target".into(),
            ));
        }
    }
    brent_root(f, RootBracket::new(lo, hi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::required_k;

    fn base() -> DesignParams {
        DesignParams::new(2.0, 0.5, 0.1, 1.0).unwrap()
    }

    #[test]
    fn base_row_at_186() {
        let s = TestSpec::default();
        let m = |kind| mde(kind, &base(), &s, 186, None).unwrap();
        assert!((m(TestKind::Hie) - 0.34).abs() < 0.005);
        assert!((m(TestKind::Hspe) - 0.28).abs() < 0.005);
        assert!((m(TestKind::Hoe) - 0.26).abs() < 0.005);
    }

    #[test]
    fn shrinks_like_root_k() {
        let s = TestSpec::default();
        assert!(mde(TestKind::Hie, &base(), &s, 1_000_000_000, None).unwrap() < 1e-3);
        let a = mde(TestKind::Hoe, &base(), &s, 100, None).unwrap();
        let b = mde(TestKind::Hoe, &base(), &s, 400, None).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn joint_round_trip_with_fixed_effect() {
        let s = TestSpec::default();
        let dt = mde(TestKind::Hispj, &base(), &s, 150, Some(FixedEffect::Delta(0.2))).unwrap();
        let r = required_k(TestKind::Hispj, &base(), &EffectSizes::new(dt, 0.2), &s).unwrap();
        assert!(r.k_required == 150 || r.k_required == 151);

        let dd = mde(TestKind::Hispj, &base(), &s, 150, Some(FixedEffect::Tau(-0.2))).unwrap();
        let r = required_k(TestKind::Hispj, &base(), &EffectSizes::new(-0.2, dd), &s).unwrap();
        assert!(r.k_required == 150 || r.k_required == 151);
    }

    #[test]
    fn joint_infeasible_when_fixed_effect_is_large() {
        let s = TestSpec::default();
        let err = mde(TestKind::Hispj, &base(), &s, 500, Some(FixedEffect::Delta(5.0))).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn conjunctive_round_trip() {
        let s = TestSpec::default();
        let m = mde(TestKind::Hispc, &base(), &s, 195, None).unwrap();
        let r = required_k(TestKind::Hispc, &base(), &EffectSizes::equal(m), &s).unwrap();
        assert!(r.k_required == 195 || r.k_required == 196, "{}", r.k_required);
        assert!(m > 0.34 && m < 0.36);
    }

    #[test]
    fn conjunctive_infeasible_with_tiny_fixed_effect() {
        let s = TestSpec::default();
        let err = mde(TestKind::Hispc, &base(), &s, 50, Some(FixedEffect::Tau(0.01))).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }
}
