use enr_design::exhibits::{
    curve, linspace_step, table_k, table_mde, Axis, CurveMeasure, CurveRequest, SweepGrid,
};
use enr_design::model::{DesignParams, EffectSizes};
use enr_design::power::{NetworkSizeSearch, TestKind, TestSpec};

fn request<'a>(kinds: &'a [TestKind], xs: &'a [f64], design: DesignParams, measure: CurveMeasure, effects: EffectSizes) -> CurveRequest<'a> {
    CurveRequest {
        kinds,
        design,
        effects,
        spec: TestSpec::default(),
        axis: Axis::Rho,
        xs,
        measure,
        k_max: 1_000_000,
        search: NetworkSizeSearch::default(),
    }
}

#[test]
fn single_member_k_curves_overlap() {
    let xs = linspace_step(0.0, 0.9, 0.01);
    for p in [0.3, 0.5, 0.7] {
        let d = DesignParams::new(1.0, p, 0.1, 1.0).unwrap();
        let pts = curve(&request(&[TestKind::Hie, TestKind::Hspe], &xs, d, CurveMeasure::K, EffectSizes::equal(-0.35))).unwrap();
        assert!(pts.iter().all(|pt| pt.values[0] == pt.values[1]));
    }
}

#[test]
fn network_size_grows_with_icc() {
    let xs = linspace_step(0.0, 0.9, 0.01);
    let d = DesignParams::new(1.0, 0.5, 0.0, 1.0).unwrap();
    let pts = curve(&request(&TestKind::GLS, &xs, d, CurveMeasure::N { k: 30 }, EffectSizes::equal(1.0))).unwrap();
    for j in 0..5 {
        let mut last = 0.0;
        let mut ended = false;
        for pt in &pts {
            match pt.values[j] {
                Some(n) => {
                    assert!(!ended, "{} solvable again at rho {}", TestKind::GLS[j], pt.x);
                    assert!(n >= last - 1e-9, "{} at rho {}: {n} < {last}", TestKind::GLS[j], pt.x);
                    last = n;
                }
                None => ended = true,
            }
        }
    }
}

#[test]
fn joint_test_unsolvable_at_high_icc() {
    let xs = linspace_step(0.0, 0.9, 0.01);
    let d = DesignParams::new(1.0, 0.5, 0.0, 1.0).unwrap();
    let pts = curve(&request(&[TestKind::Hispj], &xs, d, CurveMeasure::N { k: 30 }, EffectSizes::equal(1.0))).unwrap();
    for pt in pts {
        if pt.x > 0.775 {
            assert!(pt.values[0].is_none(), "rho {} -> {:?}", pt.x, pt.values[0]);
        } else if pt.x < 0.74 {
            assert!(pt.values[0].is_some(), "rho {}", pt.x);
        }
    }
}

#[test]
fn table_layouts_follow_grid_order() {
    let spec = TestSpec::default();
    let rows = table_k(&SweepGrid::reference_k_table(), 1.0, &spec, 1_000_000).unwrap();
    assert_eq!(rows.len(), 81);
    let pts = SweepGrid::reference_k_table().points();
    assert!(rows.iter().zip(&pts).all(|(r, p)| r.point == *p));

    let mde = table_mde(&SweepGrid::reference_design_rows(EffectSizes::equal(-0.35)), 1.0, &spec, 186).unwrap();
    let first = &mde[0];
    assert_eq!(
        [first.mde_tau, first.mde_delta, first.mde_overall].map(|v| (v * 100.0).round() / 100.0),
        [0.34, 0.28, 0.26]
    );
}
