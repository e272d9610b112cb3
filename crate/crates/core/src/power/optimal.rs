//! Allocation probability minimizing the required number of egonetworks.

use super::{k_closed_form, k_continuous_conjunctive, TestKind, TestSpec, DEFAULT_K_MAX};
use crate::error::{invalid, Error, Result};
use crate::model::{DesignParams, EffectSizes};
use crate::numerics::golden_section_min;

/// Analytic optimum of `p` for every kind except the conjunctive test.
///
/// * individual effect: the root in (0,1) of `(1-ρ)n p² − 2(n+1)p + (n+1)`;
/// * spillover effect: the root in (0,1) of `(1-ρ)p² − 2Ap + A`,
///   `A = n²ρ + n − ρ + 1`;
/// * everything else is symmetric in `p ↔ 1-p` and sits at 1/2.
pub fn optimal_p(kind: TestKind, n: f64, rho_y: f64) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(invalid("n", n, "must be finite and > 0"));
    }
    if !(rho_y >= 0.0 && rho_y < 1.0) {
        return Err(invalid("rho_y", rho_y, "must lie in [0, 1)"));
    }
    let q = 1.0 - rho_y;
    match kind {
        TestKind::Hie => Ok(((n + 1.0) - ((n + 1.0) * (1.0 + n * rho_y)).sqrt()) / (q * n)),
        TestKind::Hspe => {
            let a = n * n * rho_y + n - rho_y + 1.0;
            Ok((a - (a * a - q * a).sqrt()) / q)
        }
        TestKind::Hoe | TestKind::Hispj | TestKind::HieAlt | TestKind::HspeAlt => Ok(0.5),
        TestKind::Hispc => Err(Error::Unsupported(
            "no analytic optimum for the conjunctive test; use optimal_p_numeric".into(),
        )),
    }
}

fn k_continuous(kind: TestKind, design: &DesignParams, effects: &EffectSizes, spec: &TestSpec) -> Result<f64> {
    if kind.has_closed_form() {
        k_closed_form(kind, design, effects, spec)
    } else {
        k_continuous_conjunctive(design, effects, spec, DEFAULT_K_MAX)
    }
}

/// Numerical minimization of the continuous `K` over `p`: a 0.01-step grid on
/// `[0.01, 0.99]` followed by golden-section refinement around the best
/// grid point. `design.p` is ignored.
pub fn optimal_p_numeric(
    kind: TestKind,
    design: &DesignParams,
    effects: &EffectSizes,
    spec: &TestSpec,
) -> Result<f64> {
    let k_at = |p: f64| k_continuous(kind, &design.with_p(p), effects, spec);
    let mut best = (f64::INFINITY, 0.5);
    for i in 1..100 {
        let p = i as f64 / 100.0;
        let k = k_at(p)?;
        if k < best.0 {
            best = (k, p);
        }
    }
    let lo = (best.1 - 0.01).max(1e-4);
    let hi = (best.1 + 0.01).min(1.0 - 1e-4);
    Ok(golden_section_min(
        |p| k_at(p).unwrap_or(f64::INFINITY),
        lo,
        hi,
        1e-7,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_optima() {
        assert!((optimal_p(TestKind::Hie, 2.0, 0.1).unwrap() - 0.6126).abs() < 1e-4);
        assert!((optimal_p(TestKind::Hspe, 2.0, 0.1).unwrap() - 0.5397).abs() < 1e-4);
        assert_eq!(optimal_p(TestKind::Hoe, 5.0, 0.2).unwrap(), 0.5);
        assert_eq!(optimal_p(TestKind::Hispj, 3.0, 0.7).unwrap(), 0.5);
        assert!(optimal_p(TestKind::Hispc, 2.0, 0.1).is_err());
    }

    #[test]
    fn roots_satisfy_stationarity() {
        for &(n, rho) in &[(1.0, 0.0), (2.0, 0.1), (5.0, 0.4), (10.0, 0.9)] {
            let p = optimal_p(TestKind::Hie, n, rho).unwrap();
            let g = (1.0 - rho) * n * p * p - 2.0 * (n + 1.0) * p + (n + 1.0);
            assert!(g.abs() < 1e-10 && p > 0.0 && p < 1.0);
            let p = optimal_p(TestKind::Hspe, n, rho).unwrap();
            let a = n * n * rho + n - rho + 1.0;
            let g = (1.0 - rho) * p * p - 2.0 * a * p + a;
            assert!(g.abs() < 1e-10 && p > 0.0 && p < 1.0);
        }
    }

    #[test]
    fn numeric_agrees_with_closed_form() {
        let d = DesignParams::new(2.0, 0.5, 0.1, 1.0).unwrap();
        let e = EffectSizes::equal(-0.35);
        let s = TestSpec::default();
        for kind in [TestKind::Hie, TestKind::Hspe, TestKind::Hoe, TestKind::Hispj] {
            let num = optimal_p_numeric(kind, &d, &e, &s).unwrap();
            let exact = optimal_p(kind, 2.0, 0.1).unwrap();
            assert!((num - exact).abs() < 1e-5, "{kind}: {num} vs {exact}");
        }
    }

    #[test]
    fn conjunctive_optimum_is_interior() {
        let d = DesignParams::new(2.0, 0.5, 0.1, 1.0).unwrap();
        let p = optimal_p_numeric(TestKind::Hispc, &d, &EffectSizes::equal(-0.35), &TestSpec::default())
            .unwrap();
        assert!(p > 0.45 && p < 0.65, "{p}");
    }
}
