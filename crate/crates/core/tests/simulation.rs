use enr_design::model::{DesignParams, EffectSizes, ModelCoefficients};
use enr_design::power::{analytic_power, TestKind, TestSpec};
use enr_design::simulate::{
    decide, empirical_power, estimate_icc, generate_dataset, generate_replicate, gls_fit,
    EgoNetworkDataset, IccMode, SimulationConfig, TestStatistics,
};
use enr_design::Error;

fn base() -> DesignParams {
    DesignParams::new(2.0, 0.5, 0.1, 1.0).unwrap()
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, v.sqrt())
}

#[test]
fn pure_noise_variance() {
    let d = DesignParams::new(2.0, 0.5, 0.0, 1.0).unwrap();
    let data = generate_dataset(&d, 100_000, &ModelCoefficients::default(), 5).unwrap();
    let ys: Vec<f64> = data.networks().flat_map(|net| net.y.to_vec()).collect();
    let (_, sd) = mean_sd(&ys);
    let se = (2.0 / ys.len() as f64).sqrt();
    assert!((sd * sd - 1.0).abs() < 3.0 * se, "{}", sd * sd);
}

#[test]
fn control_networks_centre_on_the_intercept() {
    let truth = ModelCoefficients::new(0.53, -0.32, -0.34);
    let mut means = Vec::new();
    for rep in 0..400 {
        let data = generate_replicate(&base(), 186, &truth, 11, rep).unwrap();
        let ys: Vec<f64> = data.networks().filter(|n| !n.treated).flat_map(|n| n.y.to_vec()).collect();
        means.push(ys.iter().sum::<f64>() / ys.len() as f64);
    }
    let (m, sd) = mean_sd(&means);
    assert!((m - 0.53).abs() < 3.0 * sd / (means.len() as f64).sqrt(), "{m}");
}

#[test]
fn within_network_correlation_matches_icc() {
    // Pooled Pearson correlation of index and first member over control networks.
    let truth = ModelCoefficients::new(0.53, -0.32, -0.34);
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for rep in 0..10_000 {
        let data = generate_replicate(&base(), 100, &truth, 12, rep).unwrap();
        for net in data.networks().filter(|n| !n.treated) {
            let (x, y) = (net.index_outcome(), net.member_outcomes()[0]);
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
            m += 1.0;
        }
    }
    let cov = sxy / m - (sx / m) * (sy / m);
    let r = cov / ((sxx / m - (sx / m).powi(2)) * (syy / m - (sy / m).powi(2))).sqrt();
    let se = (1.0 - 0.01) / m.sqrt();
    assert!((r - 0.1).abs() < 3.0 * se, "r = {r}, se = {se}");
}

#[test]
fn icc_estimator_is_consistent() {
    let truth = ModelCoefficients::new(0.53, -0.32, -0.34);
    let d = DesignParams::new(2.0, 0.5, 0.115, 1.0).unwrap();
    let est = estimate_icc(&generate_dataset(&d, 10_000, &truth, 3).unwrap()).unwrap();
    assert!((est.rho - 0.115).abs() < 0.01, "{}", est.rho);

    let d = DesignParams::new(2.0, 0.5, 0.0, 1.0).unwrap();
    let est = estimate_icc(&generate_dataset(&d, 10_000, &truth, 4).unwrap()).unwrap();
    assert!(est.rho.abs() < 0.02, "{}", est.rho);
}

#[test]
fn icc_needs_members() {
    let mut data = EgoNetworkDataset::new(0);
    for i in 0..10 {
        data.push(i, i % 2 == 0, &[0.1 * i as f64]).unwrap();
    }
    assert!(matches!(estimate_icc(&data), Err(Error::InsufficientData(_))));
}

#[test]
fn noiseless_fit_recovers_truth() {
    let d = DesignParams::new(3.0, 0.4, 0.2, 1e-12).unwrap();
    let truth = ModelCoefficients::new(0.53, -0.32, -0.34);
    let data = generate_dataset(&d, 50, &truth, 9).unwrap();
    let fit = gls_fit(&data, &d, IccMode::KnownIcc).unwrap();
    for (a, b) in fit.theta_hat.as_array().iter().zip(truth.as_array()) {
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
    let alt = enr_design::simulate::alt_fit(&data, &d).unwrap();
    assert!((alt.tau_hat + 0.32).abs() < 1e-6 && (alt.delta_hat + 0.34).abs() < 1e-6);
}

#[test]
fn gls_is_unbiased_at_large_k() {
    let truth = ModelCoefficients::new(0.53, -0.32, -0.34);
    let mut cfg = SimulationConfig::new(base(), truth, 100_000, 200, 21);
    cfg.kinds = vec![TestKind::Hie];
    let r = empirical_power(&cfg).unwrap();
    let e = &r.estimates;
    assert!(e.tau.bias.abs() < 3.0 * e.tau.mc_se, "{:?}", e.tau);
    assert!(e.delta.bias.abs() < 3.0 * e.delta.mc_se, "{:?}", e.delta);
    assert!(e.overall.bias.abs() < 3.0 * e.overall.mc_se, "{:?}", e.overall);
}

#[test]
fn plug_in_means_identify_effects() {
    let truth = ModelCoefficients::new(0.53, -0.32, -0.34);
    let (mut taus, mut deltas) = (Vec::new(), Vec::new());
    for rep in 0..40 {
        let data = generate_replicate(&base(), 100_000, &truth, 31, rep).unwrap();
        let (mut treated_index, mut exposed, mut untreated) = ((0.0, 0.0), (0.0, 0.0), (0.0, 0.0));
        for net in data.networks() {
            if net.treated {
                treated_index.0 += net.index_outcome();
                treated_index.1 += 1.0;
                exposed.0 += net.member_outcomes().iter().sum::<f64>();
                exposed.1 += net.member_outcomes().len() as f64;
            } else {
                untreated.0 += net.y.iter().sum::<f64>();
                untreated.1 += net.y.len() as f64;
            }
        }
        let base_mean = untreated.0 / untreated.1;
        taus.push(treated_index.0 / treated_index.1 - base_mean);
        deltas.push(exposed.0 / exposed.1 - base_mean);
    }
    for (xs, want) in [(&taus, -0.32), (&deltas, -0.34)] {
        let (m, sd) = mean_sd(xs);
        assert!((m - want).abs() < 3.0 * sd / (xs.len() as f64).sqrt(), "{m} vs {want}");
    }
}

#[test]
fn overall_estimate_is_role_mixture() {
    let truth = ModelCoefficients::new(0.53, -0.32, -0.34);
    for n in [1.0, 2.0, 5.0] {
        let d = DesignParams::new(n, 0.5, 0.1, 1.0).unwrap();
        let fit = gls_fit(&generate_dataset(&d, 300, &truth, 8).unwrap(), &d, IccMode::KnownIcc).unwrap();
        let mix = fit.theta_hat.tau / (n + 1.0) + fit.theta_hat.delta * n / (n + 1.0);
        assert!((fit.overall_hat - mix).abs() < 1e-14);
    }
}

#[test]
fn plug_in_variance_matches_closed_form() {
    let truth = ModelCoefficients::new(0.53, -0.32, -0.34);
    let data = generate_dataset(&base(), 10_000, &truth, 41).unwrap();
    let fit = gls_fit(&data, &base(), IccMode::EstimatedIcc).unwrap();
    let k = 10_000.0;
    assert!((fit.cov_hat[1][1] * k / 2.8 - 1.0).abs() < 0.05);
    assert!((fit.cov_hat[2][2] * k / 1.9 - 1.0).abs() < 0.05);
    assert!((fit.cov_hat[1][2] * k / 1.0 - 1.0).abs() < 0.05);
}

#[test]
fn alt_estimator_variance() {
    let truth = ModelCoefficients::new(0.53, -0.35, -0.35);
    let mut cfg = SimulationConfig::new(base(), truth, 180, 10_000, 51);
    cfg.kinds = vec![TestKind::HieAlt, TestKind::HspeAlt];
    let r = empirical_power(&cfg).unwrap();
    let alt = r.estimates.tau_alt.as_ref().unwrap();
    let want = 1.0 / (0.25 * 180.0);
    assert!((alt.variance / want - 1.0).abs() < 0.05, "{} vs {want}", alt.variance);
    assert!((alt.analytic_variance / want - 1.0).abs() < 1e-12);
    assert!(alt.variance > r.estimates.tau.variance);
    let dalt = r.estimates.delta_alt.as_ref().unwrap();
    assert!((dalt.variance / dalt.analytic_variance - 1.0).abs() < 0.05);
}

#[test]
fn null_sizes_including_conjunctive() {
    let mut cfg = SimulationConfig::new(base(), ModelCoefficients::new(0.53, 0.0, 0.0), 200, 10_000, 61);
    cfg.kinds = TestKind::GLS.to_vec();
    let r = empirical_power(&cfg).unwrap();
    for t in &r.tests {
        let target = if t.kind == TestKind::Hispc { t.analytic_power } else { 0.05 };
        assert!(t.z_score(target) < 3.0, "{:?}", t);
    }
    assert!(r.test(TestKind::Hispc).unwrap().analytic_power < 0.05);
}

#[test]
fn power_calibrated_against_analytic() {
    let truth = ModelCoefficients::new(0.53, -0.35, -0.35);
    let mut cfg = SimulationConfig::new(base(), truth, 180, 10_000, 71);
    cfg.kinds = vec![TestKind::Hie];
    let t = empirical_power(&cfg).unwrap().tests[0].clone();
    let a = analytic_power(TestKind::Hie, &base(), &EffectSizes::equal(-0.35), &TestSpec::default(), 180).unwrap();
    assert!(t.z_score(a) < 3.0, "{:?} vs {a}", t);
    assert!((t.analytic_power - a).abs() < 1e-15);
}

#[test]
fn decision_rules() {
    let d = decide(&TestStatistics::from_z(5.0, 0.0, 3.0, 0.43), &TestSpec::default());
    assert!(d.hie && !d.hspe && !d.hispc && d.hispj);
}

#[test]
fn rejection_rate_grows_with_k() {
    let truth = ModelCoefficients::new(0.53, -0.2, -0.2);
    let mut last = vec![0.0; 5];
    for (i, k) in [50, 100, 200, 400].into_iter().enumerate() {
        let r = empirical_power(&SimulationConfig::new(base(), truth, k, 10_000, 80 + i as u64)).unwrap();
        for (j, t) in r.tests.iter().enumerate() {
            assert!(t.rate >= last[j] - 3.0 * t.mc_se, "{} at K={k}: {} < {}", t.kind, t.rate, last[j]);
            last[j] = t.rate;
        }
    }
}

#[test]
fn degenerate_draws_are_counted() {
    let d = DesignParams::new(2.0, 0.5, 0.1, 1.0).unwrap();
    let r = empirical_power(&SimulationConfig::new(d, ModelCoefficients::default(), 3, 1000, 90)).unwrap();
    // two of eight arm patterns put all three networks in one arm
    assert!(r.degenerate > 150 && r.degenerate < 350, "{}", r.degenerate);
    assert_eq!(r.completed + r.degenerate, 1000);
}

#[test]
fn reports_are_reproducible() {
    let truth = ModelCoefficients::new(0.53, -0.3, -0.3);
    let mut cfg = SimulationConfig::new(base(), truth, 150, 300, 99);
    let a = empirical_power(&cfg).unwrap().to_json().unwrap();
    let b = empirical_power(&cfg).unwrap().to_json().unwrap();
    assert_eq!(a, b);
    cfg.threads = Some(3);
    assert_eq!(a, empirical_power(&cfg).unwrap().to_json().unwrap());
    cfg.seed = 100;
    assert_ne!(a, empirical_power(&cfg).unwrap().to_json().unwrap());
}

#[test]
fn dataset_csv_round_trip() {
    let data = generate_dataset(&base(), 25, &ModelCoefficients::new(0.5, 1.0, 2.0), 1).unwrap();
    let mut buf = Vec::new();
    data.write_csv(&mut buf).unwrap();
    assert!(buf.starts_with(b"network_id,unit_id,role,z,g,y\n"));
    let back = EgoNetworkDataset::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, data);
}
