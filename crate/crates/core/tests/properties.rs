use enr_design::model::{numerical_variance_block, variance_components, DesignParams, EffectSizes};
use enr_design::power::{
    k_closed_form, mde, optimal_p, power_at, required_k, solve_network_size, NetworkSizeSearch,
    TestKind, TestSpec,
};
use proptest::prelude::*;

const CLOSED: [TestKind; 4] = [TestKind::Hie, TestKind::Hspe, TestKind::Hispj, TestKind::Hoe];

fn design_strategy() -> impl Strategy<Value = DesignParams> {
    (1.0..20.0_f64, 0.05..0.95_f64, 0.0..0.9_f64, 0.2..4.0_f64)
        .prop_map(|(n, p, rho, s2)| DesignParams::new(n, p, rho, s2).unwrap())
}

fn magnitude() -> impl Strategy<Value = f64> {
    (0.1..1.5_f64, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

fn kind_strategy() -> impl Strategy<Value = TestKind> {
    prop::sample::select(CLOSED.to_vec())
}

fn k(kind: TestKind, d: &DesignParams, e: &EffectSizes) -> f64 {
    k_closed_form(kind, d, e, &TestSpec::default()).unwrap()
}

proptest! {
    #[test]
    fn covariance_block_is_positive_definite(d in design_strategy()) {
        let v = variance_components(&d).unwrap();
        prop_assert!(v.var_tau > 0.0 && v.var_delta > 0.0);
        prop_assert!(v.var_tau * v.var_delta > v.cov_tau_delta.powi(2));
        prop_assert!(v.corr > 0.0 && v.corr < 1.0);
        let n = d.n;
        let contrast = (v.var_tau + 2.0 * n * v.cov_tau_delta + n * n * v.var_delta) / (n + 1.0).powi(2);
        prop_assert!((contrast / v.var_overall - 1.0).abs() < 1e-12);
        let num = numerical_variance_block(&d).unwrap();
        prop_assert!((num[0][1] - num[1][0]).abs() < 1e-12 * num[0][0]);
    }

    #[test]
    fn k_increases_with_icc(d in design_strategy(), dt in magnitude(), dd in magnitude(), kind in kind_strategy(), bump in 0.005..0.09_f64) {
        let e = EffectSizes::new(dt, dd);
        prop_assume!(e.overall(d.n).abs() > 1e-3);
        prop_assert!(k(kind, &d.with_rho(d.rho_y + bump), &e) > k(kind, &d, &e));
    }

    #[test]
    fn k_decreases_with_network_size(d in design_strategy(), dt in magnitude(), kind in kind_strategy(), extra in 0.1..5.0_f64) {
        // Equal effects keep the overall contrast fixed as n grows.
        let e = EffectSizes::equal(dt);
        prop_assert!(k(kind, &d.with_n(d.n + extra), &e) < k(kind, &d, &e));
    }

    #[test]
    fn k_decreases_with_effect_magnitude(d in design_strategy(), dt in magnitude(), dd in magnitude(), kind in kind_strategy(), scale in 1.01..3.0_f64) {
        let e = EffectSizes::new(dt, dd);
        prop_assume!(e.overall(d.n).abs() > 1e-3);
        let bigger = EffectSizes::new(dt * scale, dd * scale);
        prop_assert!(k(kind, &d, &bigger) < k(kind, &d, &e));
    }

    #[test]
    fn k_is_even_in_the_effect_sign(d in design_strategy(), dt in magnitude(), dd in magnitude(), kind in kind_strategy()) {
        let e = EffectSizes::new(dt, dd);
        prop_assume!(e.overall(d.n).abs() > 1e-3);
        let flipped = EffectSizes::new(-dt, -dd);
        prop_assert!((k(kind, &d, &e) / k(kind, &d, &flipped) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn required_k_is_ceiling_with_target_power(d in design_strategy(), dt in magnitude(), dd in magnitude(), kind in kind_strategy()) {
        let e = EffectSizes::new(dt, dd);
        prop_assume!(e.overall(d.n).abs() > 1e-3);
        let s = TestSpec::default();
        let r = required_k(kind, &d, &e, &s).unwrap();
        prop_assert_eq!(r.k_required, r.k_continuous.ceil() as u64);
        prop_assert!(r.achieved_power >= s.power_target - 1e-9);
        let pw = power_at(kind, &d, &e, &s, r.k_required as f64).unwrap();
        prop_assert!((pw - r.achieved_power).abs() < 1e-12);
    }

    #[test]
    fn power_increases_with_k(d in design_strategy(), dt in magnitude(), dd in magnitude(), kind in prop::sample::select(TestKind::GLS.to_vec()), k0 in 2.0..400.0_f64) {
        // conjunctive: only when the effect signs agree with the sign of the
        // z-correlation; otherwise power can dip first (see the test below)
        let dd = if kind == TestKind::Hispc && dt * dd * variance_components(&d).unwrap().corr < 0.0 { -dd } else { dd };
        let e = EffectSizes::new(dt, dd);
        prop_assume!(e.overall(d.n).abs() > 1e-3);
        let s = TestSpec::default();
        let a = power_at(kind, &d, &e, &s, k0).unwrap();
        let b = power_at(kind, &d, &e, &s, k0 * 1.5).unwrap();
        prop_assert!(b >= a - 1e-12, "{} -> {}", a, b);
    }

    #[test]
    fn optimal_p_is_a_minimum(n in 1.0..20.0_f64, rho in 0.0..0.9_f64, dv in magnitude(), kind in kind_strategy(), h in 0.002..0.2_f64) {
        let p = optimal_p(kind, n, rho).unwrap();
        prop_assert!(p > 0.0 && p < 1.0);
        let e = EffectSizes::equal(dv);
        let at = |q: f64| k(kind, &DesignParams::new(n, q, rho, 1.0).unwrap(), &e);
        for q in [p - h, p + h] {
            if q > 0.0 && q < 1.0 {
                prop_assert!(at(q) >= at(p) * (1.0 - 1e-12));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjunctive_needs_at_least_both_marginals(d in design_strategy(), dt in magnitude(), dd in magnitude()) {
        let e = EffectSizes::new(dt, dd);
        let s = TestSpec::default();
        let c = required_k(TestKind::Hispc, &d, &e, &s).unwrap();
        let t = required_k(TestKind::Hie, &d, &e, &s).unwrap().k_required;
        let dl = required_k(TestKind::Hspe, &d, &e, &s).unwrap().k_required;
        prop_assert!(c.k_required + 1 >= t.max(dl), "{} vs {} {}", c.k_required, t, dl);
        prop_assert!(c.achieved_power >= s.power_target - 1e-9);
        prop_assert!(power_at(TestKind::Hispc, &d, &e, &s, c.k_required as f64 - 1.0).unwrap() < s.power_target);
    }

    #[test]
    fn mde_round_trip(d in design_strategy(), kind in prop::sample::select(TestKind::GLS.to_vec()), k0 in 20_u64..2000) {
        let s = TestSpec::default();
        if let Ok(m) = mde(kind, &d, &s, k0, None) {
            let back = required_k(kind, &d, &EffectSizes::equal(m), &s).unwrap().k_required;
            prop_assert!(back >= k0 && back <= k0 + 1, "K {} -> mde {} -> K {}", k0, m, back);
        }
    }

    #[test]
    fn network_size_round_trip(d in design_strategy(), dv in magnitude(), kind in prop::sample::select(TestKind::GLS.to_vec()), k0 in 20_u64..2000) {
        let s = TestSpec::default();
        let search = NetworkSizeSearch::default();
        let e = EffectSizes::equal(dv);
        if let Ok(n) = solve_network_size(kind, &d, &e, &s, k0, &search) {
            let back = required_k(kind, &d.with_n(n), &e, &s).unwrap().k_required;
            prop_assert!(back <= k0 + 1, "n {} gives K {} > {}", n, back, k0 + 1);
            if n > search.n_min {
                prop_assert!(back >= k0, "n {} gives K {} < {}", n, back, k0);
            }
        }
    }
}

// Opposite-sign effects against a positive z-correlation: mass leaves the
// likely (+,+)/(−,−) quadrants before reaching (+,−), so conjunctive power
// falls below its K→0 value before rising. The required-K search is unaffected
// (the dip sits far below any sensible target).
#[test]
fn conjunctive_power_dips_for_opposite_signs() {
    let d = DesignParams::new(1.0, 0.05, 0.5308450629787705, 3.3908256155803342).unwrap();
    assert!(variance_components(&d).unwrap().corr > 0.0);
    let e = EffectSizes::new(0.1, -0.27898470598471903);
    let s = TestSpec::default();
    let pw = |k: f64| power_at(TestKind::Hispc, &d, &e, &s, k).unwrap();
    assert!(pw(3.0) < pw(2.0));
    assert!(pw(20.0) < pw(2.0));
    let r = required_k(TestKind::Hispc, &d, &e, &s).unwrap();
    assert!(r.achieved_power >= 0.8);
    assert!(pw(r.k_required as f64 - 1.0) < 0.8);
}
