//! The Monte Carlo loop: replicate, fit, test, aggregate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::alt::{alt_fit, AltFit};
use super::dataset::generate_replicate;
use super::decision::{run_tests, TestDecisions};
use super::gls::{gls_fit, GlsFit, IccMode};
use crate::error::{invalid, Error, Result};
use crate::model::{
    alt_variance_components, variance_components, DesignParams, EffectSizes, ModelCoefficients,
};
use crate::power::{analytic_power, TestKind, TestSpec};

pub const MIN_REPLICATES: usize = 100;

/// Everything that determines a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub kinds: Vec<TestKind>,
    pub design: DesignParams,
    pub truth: ModelCoefficients,
    pub spec: TestSpec,
    pub k: usize,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub mode: IccMode,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
}

impl SimulationConfig {
    pub fn new(design: DesignParams, truth: ModelCoefficients, k: usize, replicates: usize, seed: u64) -> Self {
        Self {
            kinds: TestKind::GLS.to_vec(),
            design,
            truth,
            spec: TestSpec::default(),
            k,
            replicates,
            seed,
            mode: IccMode::KnownIcc,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub kind: TestKind,
    pub rejections: usize,
    pub rate: f64,
    /// `√(r(1-r)/completed)`
    pub mc_se: f64,
    /// Analytic power at the simulated `K` and true effects.
    pub analytic_power: f64,
}

impl TestReport {
    /// `|rate − target| / mc_se`; infinite when the rate is exactly 0 or 1 and differs.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.rate - target).abs() / self.mc_se
    }
}

/// Monte Carlo summary of one estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    pub truth: f64,
    pub mean: f64,
    pub bias: f64,
    /// Sample variance across replicates.
    pub variance: f64,
    /// Standard error of `mean`.
    pub mc_se: f64,
    /// Asymptotic variance divided by `K`.
    pub analytic_variance: f64,
    /// Share of replicates whose nominal `1 − α` Wald interval covers the truth.
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub tau: EstimateSummary,
    pub delta: EstimateSummary,
    pub overall: EstimateSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_alt: Option<EstimateSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_alt: Option<EstimateSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub replicates: usize,
    /// Replicates that produced a fit.
    pub completed: usize,
    /// Replicates whose randomization put every network in one arm (or, in
    /// estimated mode, fewer than two per arm). Excluded from every rate.
    pub degenerate: usize,
    pub tests: Vec<TestReport>,
    pub estimates: EstimateReport,
    pub seed_scheme: String,
}

impl SimulationReport {
    pub fn test(&self, kind: TestKind) -> Option<&TestReport> {
        self.tests.iter().find(|t| t.kind == kind)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

struct Replicate {
    gls: GlsFit,
    decisions: TestDecisions,
    alt: Option<AltFit>,
}

fn one_replicate(cfg: &SimulationConfig, index: usize, with_alt: bool) -> Result<Option<Replicate>> {
    let data = generate_replicate(&cfg.design, cfg.k, &cfg.truth, cfg.seed, index as u64)?;
    let gls = match gls_fit(&data, &cfg.design, cfg.mode) {
        Ok(fit) => fit,
        Err(Error::DegenerateDesign(_) | Error::InsufficientData(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let decisions = run_tests(&gls, &cfg.spec);
    let alt = if with_alt {
        Some(alt_fit(&data, &cfg.design)?)
    } else {
        None
    };
    Ok(Some(Replicate {
        gls,
        decisions,
        alt,
    }))
}

fn summarize(truth: f64, analytic_variance: f64, z: f64, draws: &[(f64, f64)]) -> EstimateSummary {
    let m = draws.len() as f64;
    let mean = draws.iter().map(|d| d.0).sum::<f64>() / m;
    let variance = draws.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let covered = draws
        .iter()
        .filter(|(est, se)| (est - truth).abs() <= z * se)
        .count();
    EstimateSummary {
        truth,
        mean,
        bias: mean - truth,
        variance,
        mc_se: (variance / m).sqrt(),
        analytic_variance,
        coverage: covered as f64 / m,
    }
}

/// Runs `cfg.replicates` independent trials and aggregates rejection rates
/// and estimator moments.
///
/// Replicates run in parallel but are reduced in index order, so the report
/// is bit-identical for any thread count.
pub fn empirical_power(cfg: &SimulationConfig) -> Result<SimulationReport> {
    cfg.design.validate()?;
    cfg.design.integer_n()?;
    cfg.spec.validate()?;
    if cfg.replicates < MIN_REPLICATES {
        return Err(invalid(
            "replicates",
            cfg.replicates as f64,
            "need at least 100 replicates",
        ));
    }
    if cfg.k == 0 {
        return Err(invalid("k", 0.0, "need at least one egonetwork"));
    }
    let with_alt = cfg.kinds.iter().any(|k| k.is_alt());

    let run = || -> Vec<Result<Option<Replicate>>> {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|i| one_replicate(cfg, i, with_alt))
            .collect()
    };
    let outcomes = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut fits = Vec::with_capacity(cfg.replicates);
    let mut degenerate = 0;
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(Some(r)) => fits.push(r),
            Ok(None) => degenerate += 1,
            Err(e) => {
                return Err(Error::Replicate {
                    index,
                    source: Box::new(e),
                })
            }
        }
    }
    let completed = fits.len();
    if completed < 2 {
        return Err(Error::DegenerateDesign(format!(
            "only {completed} of {} replicates produced a fit",
            cfg.replicates
        )));
    }

    let effects = EffectSizes::new(cfg.truth.tau, cfg.truth.delta);
    let kf = cfg.k as u64;
    let mut tests = Vec::with_capacity(cfg.kinds.len());
    for &kind in &cfg.kinds {
        let rejections = fits
            .iter()
            .filter(|r| match kind.is_alt() {
                false => r.decisions.get(kind).unwrap_or(false),
                true => {
                    let alt = r.alt.as_ref().expect("alt fit computed");
                    let t = if kind == TestKind::HieAlt { alt.t_tau() } else { alt.t_delta() };
                    t.abs() > cfg.spec.z_alpha()
                }
            })
            .count();
        let rate = rejections as f64 / completed as f64;
        tests.push(TestReport {
            kind,
            rejections,
            rate,
            mc_se: (rate * (1.0 - rate) / completed as f64).sqrt(),
            analytic_power: analytic_power(kind, &cfg.design, &effects, &cfg.spec, kf)?,
        });
    }

    let z = cfg.spec.z_alpha();
    let k = cfg.k as f64;
    let v = variance_components(&cfg.design)?;
    let n = cfg.design.n;
    let pick = |f: &dyn Fn(&Replicate) -> (f64, f64)| fits.iter().map(f).collect::<Vec<_>>();
    let estimates = EstimateReport {
        tau: summarize(
            cfg.truth.tau,
            v.var_tau / k,
            z,
            &pick(&|r| (r.gls.theta_hat.tau, r.gls.se_tau())),
        ),
        delta: summarize(
            cfg.truth.delta,
            v.var_delta / k,
            z,
            &pick(&|r| (r.gls.theta_hat.delta, r.gls.se_delta())),
        ),
        overall: summarize(
            cfg.truth.overall(n),
            v.var_overall / k,
            z,
            &pick(&|r| (r.gls.overall_hat, r.gls.se_overall())),
        ),
        tau_alt: None,
        delta_alt: None,
    };
    let estimates = if with_alt {
        let a = alt_variance_components(&cfg.design, cfg.design.index_variance())?;
        EstimateReport {
            tau_alt: Some(summarize(
                cfg.truth.tau,
                a.var_tau_alt / k,
                z,
                &pick(&|r| {
                    let alt = r.alt.as_ref().expect("alt fit computed");
                    (alt.tau_hat, alt.var_tau_hat.sqrt())
                }),
            )),
            delta_alt: Some(summarize(
                cfg.truth.delta,
                a.var_delta_alt / k,
                z,
                &pick(&|r| {
                    let alt = r.alt.as_ref().expect("alt fit computed");
                    (alt.delta_hat, alt.var_delta_hat.sqrt())
                }),
            )),
            ..estimates
        }
    } else {
        estimates
    };

    Ok(SimulationReport {
        config: cfg.clone(),
        replicates: cfg.replicates,
        completed,
        degenerate,
        tests,
        estimates,
        seed_scheme: "chacha8 keyed by (seed, replicate, network, tag)".into(),
    })
}
