//! Grids of design points evaluated in the three table layouts (required K,
//! MDE, required n) and one-dimensional sweeps for plotting.
//!
//! Grid points are evaluated in parallel; output order always follows the
//! grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DesignParams, EffectSizes};
use crate::power::{
    mde, required_k_bounded, solve_network_size, NetworkSizeSearch, TestKind, TestSpec,
};

/// Column order of every table layout.
pub const TABLE_KINDS: [TestKind; 5] = [
    TestKind::Hspe,
    TestKind::Hie,
    TestKind::Hispj,
    TestKind::Hispc,
    TestKind::Hoe,
];

/// Cartesian sweep grid. Points are ordered `n`, then `ρ`, then `p`, then effects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub n: Vec<f64>,
    pub rho: Vec<f64>,
    pub p: Vec<f64>,
    pub effects: Vec<EffectSizes>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: f64,
    pub rho: f64,
    pub p: f64,
    pub effects: EffectSizes,
}

impl SweepGrid {
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &rho in &self.rho {
                for &p in &self.p {
                    for &effects in &self.effects {
                        out.push(GridPoint { n, rho, p, effects });
                    }
                }
            }
        }
        out
    }

    /// The grid behind the published required-K table: `n = 2`,
    /// `ρ ∈ {0.1, 0.2, 0.05}`, `p ∈ {0.5, 0.3, 0.7}`, and for each
    /// `Δτ ∈ {−0.35, −0.525, −0.70}` the spillover blocks
    /// `Δδ ∈ {−0.35, −0.175, −0.525}`.
    pub fn reference_k_table() -> Self {
        let mut effects = Vec::new();
        for dt in [-0.35, -0.525, -0.70] {
            for dd in [-0.35, -0.175, -0.525] {
                effects.push(EffectSizes::new(dt, dd));
            }
        }
        Self {
            n: vec![2.0],
            rho: vec![0.1, 0.2, 0.05],
            p: vec![0.5, 0.3, 0.7],
            effects,
        }
    }

    /// `ρ × p` rows of the published MDE and network-size tables.
    pub fn reference_design_rows(effects: EffectSizes) -> Self {
        Self {
            n: vec![2.0],
            rho: vec![0.1, 0.2, 0.05],
            p: vec![0.5, 0.3, 0.7],
            effects: vec![effects],
        }
    }
}

fn point_design(pt: &GridPoint, sigma2: f64) -> Result<DesignParams> {
    DesignParams::new(pt.n, pt.p, pt.rho, sigma2)
}

fn no_solution_to_none<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_no_solution() || matches!(e, Error::Infeasible(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Required-K row; columns follow [`TABLE_KINDS`]. `None` marks a search
/// that hit its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KRow {
    pub point: GridPoint,
    pub k_delta: Option<u64>,
    pub k_tau: Option<u64>,
    pub k_joint: Option<u64>,
    pub k_conj: Option<u64>,
    pub k_overall: Option<u64>,
}

impl KRow {
    pub fn values(&self) -> [Option<u64>; 5] {
        [self.k_delta, self.k_tau, self.k_joint, self.k_conj, self.k_overall]
    }
}

pub fn table_k(grid: &SweepGrid, sigma2: f64, spec: &TestSpec, k_max: u64) -> Result<Vec<KRow>> {
    grid.points()
        .par_iter()
        .map(|pt| {
            let d = point_design(pt, sigma2)?;
            let k = |kind| {
                no_solution_to_none(required_k_bounded(kind, &d, &pt.effects, spec, k_max))
                    .map(|r| r.map(|r| r.k_required))
            };
            Ok(KRow {
                point: *pt,
                k_delta: k(TestKind::Hspe)?,
                k_tau: k(TestKind::Hie)?,
                k_joint: k(TestKind::Hispj)?,
                k_conj: k(TestKind::Hispc)?,
                k_overall: k(TestKind::Hoe)?,
            })
        })
        .collect()
}

/// MDE row. The two-parameter tests report the common magnitude with
/// `Δτ = Δδ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdeRow {
    pub point: GridPoint,
    pub mde_tau: f64,
    pub mde_delta: f64,
    pub mde_joint: Option<f64>,
    pub mde_conj: Option<f64>,
    pub mde_overall: f64,
}

/// MDE layout. Effect sizes in the grid are ignored; one row per `(n, ρ, p)`.
pub fn table_mde(grid: &SweepGrid, sigma2: f64, spec: &TestSpec, k: u64) -> Result<Vec<MdeRow>> {
    let mut g = grid.clone();
    g.effects = vec![EffectSizes::equal(0.0)];
    g.points()
        .par_iter()
        .map(|pt| {
            let d = point_design(pt, sigma2)?;
            Ok(MdeRow {
                point: *pt,
                mde_tau: mde(TestKind::Hie, &d, spec, k, None)?,
                mde_delta: mde(TestKind::Hspe, &d, spec, k, None)?,
                mde_joint: no_solution_to_none(mde(TestKind::Hispj, &d, spec, k, None))?,
                mde_conj: no_solution_to_none(mde(TestKind::Hispc, &d, spec, k, None))?,
                mde_overall: mde(TestKind::Hoe, &d, spec, k, None)?,
            })
        })
        .collect()
}

/// Required network size row; `None` means no solution in the bracket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NRow {
    pub point: GridPoint,
    pub n_tau: Option<f64>,
    pub n_delta: Option<f64>,
    pub n_joint: Option<f64>,
    pub n_conj: Option<f64>,
    pub n_overall: Option<f64>,
}

/// Network-size layout. The grid's `n` values are ignored.
pub fn table_n(
    grid: &SweepGrid,
    sigma2: f64,
    spec: &TestSpec,
    k: u64,
    search: &NetworkSizeSearch,
) -> Result<Vec<NRow>> {
    let mut g = grid.clone();
    g.n = vec![1.0];
    g.points()
        .par_iter()
        .map(|pt| {
            let d = point_design(pt, sigma2)?;
            let n = |kind| no_solution_to_none(solve_network_size(kind, &d, &pt.effects, spec, k, search));
            Ok(NRow {
                point: *pt,
                n_tau: n(TestKind::Hie)?,
                n_delta: n(TestKind::Hspe)?,
                n_joint: n(TestKind::Hispj)?,
                n_conj: n(TestKind::Hispc)?,
                n_overall: n(TestKind::Hoe)?,
            })
        })
        .collect()
}

/// The swept design parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Rho,
    P,
    N,
    /// Scales both effects by the swept value.
    Effect,
}

/// What a curve reports at each swept value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMeasure {
    /// Required K (integer) per test.
    K,
    /// Required network size per test at fixed K.
    N { k: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    /// One entry per requested test, in request order.
    pub values: Vec<Option<f64>>,
}

pub struct CurveRequest<'a> {
    pub kinds: &'a [TestKind],
    pub design: DesignParams,
    pub effects: EffectSizes,
    pub spec: TestSpec,
    pub axis: Axis,
    pub xs: &'a [f64],
    pub measure: CurveMeasure,
    pub k_max: u64,
    pub search: NetworkSizeSearch,
}

pub fn curve(req: &CurveRequest<'_>) -> Result<Vec<CurvePoint>> {
    req.xs
        .par_iter()
        .map(|&x| {
            let (mut d, mut e) = (req.design, req.effects);
            match req.axis {
                Axis::Rho => d.rho_y = x,
                Axis::P => d.p = x,
                Axis::N => d.n = x,
                Axis::Effect => {
                    e = EffectSizes::new(e.delta_tau * x, e.delta_delta * x);
                }
            }
            let values = req
                .kinds
                .iter()
                .map(|&kind| match req.measure {
                    CurveMeasure::K => no_solution_to_none(required_k_bounded(kind, &d, &e, &req.spec, req.k_max))
                        .map(|r| r.map(|r| r.k_required as f64)),
                    CurveMeasure::N { k } => {
                        no_solution_to_none(solve_network_size(kind, &d, &e, &req.spec, k, &req.search))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CurvePoint { x, values })
        })
        .collect()
}

/// `start, start + step, …` up to `stop` inclusive (with a small tolerance).
pub fn linspace_step(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return Vec::new();
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start + i as f64 * step).collect()
}
