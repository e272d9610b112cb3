use enr_design::exhibits::linspace_step;
use enr_design::model::{DesignParams, EffectSizes};
use enr_design::power::{NetworkSizeSearch, TestKind, TestSpec, DEFAULT_K_MAX};
use serde::Serialize;

use crate::args::{AxisArg, Command, Format, Inputs, Layout, Measure, Mode};
use crate::error::CliError;

const REF_ICC: [f64; 3] = [0.1, 0.2, 0.05];
const REF_P: [f64; 3] = [0.5, 0.3, 0.7];
const REF_DTAU: [f64; 3] = [-0.35, -0.525, -0.70];
const REF_DDELTA: [f64; 3] = [-0.35, -0.175, -0.525];

/// The fully resolved inputs of one run; echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub tests: Vec<TestKind>,
    pub format: Format,
    /// Unset for tables, whose grid carries the design values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub icc: Option<f64>,
    pub var: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var_index: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dtau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ddelta: Option<f64>,
    pub alpha: f64,
    pub power: f64,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    pub kmax: u64,
    pub nmax: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fix_dtau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fix_ddelta: Option<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub numeric: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<TableConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimConfig>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableConfig {
    pub layout: Layout,
    pub grid_n: Vec<f64>,
    pub grid_icc: Vec<f64>,
    pub grid_p: Vec<f64>,
    pub grid_dtau: Vec<f64>,
    pub grid_ddelta: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveConfig {
    pub axis: AxisArg,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub measure: Measure,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimConfig {
    pub seed: u64,
    pub reps: usize,
    pub mode: Mode,
    pub null: bool,
    pub gamma: f64,
}

impl RunConfig {
    pub fn design(&self) -> Result<DesignParams, CliError> {
        let d = DesignParams::new(
            self.n.unwrap_or(2.0),
            self.p.unwrap_or(0.5),
            self.icc.unwrap_or(0.0),
            self.var,
        )?;
        Ok(match self.var_index {
            Some(v) => d.with_index_variance(v)?,
            None => d,
        })
    }

    pub fn spec(&self) -> Result<TestSpec, CliError> {
        Ok(TestSpec::new(self.alpha, self.power)?)
    }

    /// Effect sizes, which the command must have required during resolution.
    pub fn effects(&self) -> EffectSizes {
        EffectSizes::new(self.dtau.unwrap_or(0.0), self.ddelta.unwrap_or(0.0))
    }

    pub fn k(&self) -> u64 {
        self.k.expect("K checked during resolution")
    }

    pub fn search(&self) -> NetworkSizeSearch {
        NetworkSizeSearch {
            n_max: self.nmax,
            ..NetworkSizeSearch::default()
        }
    }

    pub fn curve_xs(&self) -> Vec<f64> {
        let c = self.curve.as_ref().expect("curve config");
        linspace_step(c.from, c.to, c.step)
    }
}

fn require<T>(v: Option<T>, flag: &str, command: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("`{command}` needs --{flag}")))
}

/// Applies defaults and per-command requirements. Returns the config and any
/// warnings about values that were filled in.
pub fn resolve(command: &Command, inputs: Inputs) -> Result<(RunConfig, Vec<String>), CliError> {
    let name = command.name();
    let mut warnings = Vec::new();

    let needs_effects = match command {
        Command::Power(_) | Command::Samplesize(_) | Command::Netsize(_) | Command::Curve(_) => true,
        Command::Simulate(_) => !inputs.null,
        Command::OptimalP(_) => {
            inputs.numeric
                || inputs.test.as_ref().is_some_and(|t| t.0.contains(&TestKind::Hispc))
        }
        Command::Mde(_) | Command::Table(_) => false,
    };
    let needs_k = match command {
        Command::Power(_) | Command::Mde(_) | Command::Netsize(_) | Command::Simulate(_) => true,
        Command::Table(_) => inputs.layout.unwrap_or(Layout::K) != Layout::K,
        Command::Curve(_) => inputs.measure == Some(Measure::N),
        _ => false,
    };

    let (mut dtau, mut ddelta) = (inputs.dtau, inputs.ddelta);
    match (dtau, ddelta) {
        (Some(t), None) if needs_effects => {
            ddelta = Some(t);
            warnings.push(format!("--ddelta not given; using --dtau = {t}"));
        }
        (None, Some(d)) if needs_effects => {
            dtau = Some(d);
            warnings.push(format!("--dtau not given; using --ddelta = {d}"));
        }
        (None, None) if needs_effects => {
            return Err(CliError::Usage(format!("`{name}` needs --dtau and/or --ddelta")));
        }
        _ => {}
    }
    let k = if needs_k { Some(require(inputs.k, "K", name)?) } else { inputs.k };

    let is_table = matches!(command, Command::Table(_));
    let icc = match inputs.icc {
        Some(v) => Some(v),
        None if is_table => None,
        None => Some(require(None, "icc", name)?),
    };

    let default_tests = match command {
        Command::OptimalP(_) if !needs_effects => {
            vec![TestKind::Hie, TestKind::Hspe, TestKind::Hispj, TestKind::Hoe]
        }
        _ => TestKind::GLS.to_vec(),
    };
    let format = inputs.format.unwrap_or(match command {
        Command::Table(_) | Command::Curve(_) => Format::Csv,
        Command::Simulate(_) => Format::Json,
        _ => Format::Text,
    });

    let table = match command {
        Command::Table(_) => {
            let mut grid = |given: Option<crate::args::FloatList>, flag: &str, reference: &[f64]| {
                given.map(|l| l.0).unwrap_or_else(|| {
                    if reference.is_empty() {
                        return Vec::new();
                    }
                    warnings.push(format!("--{flag} not given; using the reference grid {reference:?}"));
                    reference.to_vec()
                })
            };
            let layout = inputs.layout.unwrap_or(Layout::K);
            // the network-size layout follows the published table at a single effect pair
            let (ref_dtau, ref_ddelta): (&[f64], &[f64]) = match layout {
                Layout::N => (&[-0.35], &[-0.35]),
                Layout::K => (&REF_DTAU, &REF_DDELTA),
                Layout::Mde => (&[], &[]),
            };
            Some(TableConfig {
                layout,
                grid_n: grid(inputs.grid_n, "grid-n", &[2.0]),
                grid_icc: grid(inputs.grid_icc, "grid-icc", &REF_ICC),
                grid_p: grid(inputs.grid_p, "grid-p", &REF_P),
                grid_dtau: grid(inputs.grid_dtau, "grid-dtau", ref_dtau),
                grid_ddelta: grid(inputs.grid_ddelta, "grid-ddelta", ref_ddelta),
            })
        }
        _ => None,
    };

    let curve = match command {
        Command::Curve(_) => {
            let axis = inputs.axis.unwrap_or(AxisArg::Icc);
            let (from, to, step) = match axis {
                AxisArg::Icc => (0.0, 0.9, 0.01),
                AxisArg::P => (0.05, 0.95, 0.01),
                AxisArg::N => (1.0, 20.0, 1.0),
                AxisArg::Effect => (0.1, 2.0, 0.05),
            };
            Some(CurveConfig {
                axis,
                from: inputs.from.unwrap_or(from),
                to: inputs.to.unwrap_or(to),
                step: inputs.step.unwrap_or(step),
                measure: inputs.measure.unwrap_or(Measure::K),
            })
        }
        _ => None,
    };

    let simulation = match command {
        Command::Simulate(_) => Some(SimConfig {
            seed: inputs.seed.unwrap_or(1),
            reps: inputs.reps.unwrap_or(1000),
            mode: inputs.mode.unwrap_or(Mode::Known),
            null: inputs.null,
            gamma: inputs.gamma.unwrap_or(0.0),
        }),
        _ => None,
    };

    let cfg = RunConfig {
        command: name,
        tests: inputs.test.map(|t| t.0).unwrap_or(default_tests),
        format,
        n: if is_table { inputs.n } else { Some(inputs.n.unwrap_or(2.0)) },
        p: if is_table { inputs.p } else { Some(inputs.p.unwrap_or(0.5)) },
        icc,
        var: inputs.var.unwrap_or(1.0),
        var_index: inputs.var_index,
        dtau,
        ddelta,
        alpha: inputs.alpha.unwrap_or(0.05),
        power: inputs.power.unwrap_or(0.8),
        k,
        kmax: inputs.kmax.unwrap_or(DEFAULT_K_MAX),
        nmax: inputs.nmax.unwrap_or(NetworkSizeSearch::default().n_max),
        fix_dtau: inputs.fix_dtau,
        fix_ddelta: inputs.fix_ddelta,
        numeric: inputs.numeric,
        table,
        curve,
        simulation,
        threads: inputs.threads,
    };
    Ok((cfg, warnings))
}
