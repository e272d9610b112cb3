use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use enr_design::power::TestKind;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "enr", version, about = "Power and sample-size calculator for egocentric network randomized trials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic power at a fixed number of egonetworks.
    #[command(allow_negative_numbers = true)]
    Power(Inputs),
    /// Required number of egonetworks.
    #[command(allow_negative_numbers = true)]
    Samplesize(Inputs),
    /// Minimum detectable effect at a fixed number of egonetworks.
    #[command(allow_negative_numbers = true)]
    Mde(Inputs),
    /// Required network size at a fixed number of egonetworks.
    #[command(allow_negative_numbers = true)]
    Netsize(Inputs),
    /// Allocation probability minimizing the required number of egonetworks.
    #[command(name = "optimal-p", allow_negative_numbers = true)]
    OptimalP(Inputs),
    /// Grid of required K, MDE, or network size (one row per grid point).
    #[command(allow_negative_numbers = true)]
    Table(Inputs),
    /// One-dimensional sweep of required K or network size.
    #[command(allow_negative_numbers = true)]
    Curve(Inputs),
    /// Monte Carlo check of the analytic results.
    #[command(allow_negative_numbers = true)]
    Simulate(Inputs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Power(_) => "power",
            Command::Samplesize(_) => "samplesize",
            Command::Mde(_) => "mde",
            Command::Netsize(_) => "netsize",
            Command::OptimalP(_) => "optimal-p",
            Command::Table(_) => "table",
            Command::Curve(_) => "curve",
            Command::Simulate(_) => "simulate",
        }
    }

    pub fn inputs(&self) -> &Inputs {
        match self {
            Command::Power(i)
            | Command::Samplesize(i)
            | Command::Mde(i)
            | Command::Netsize(i)
            | Command::OptimalP(i)
            | Command::Table(i)
            | Command::Curve(i)
            | Command::Simulate(i) => i,
        }
    }
}

/// Every setting, from flags or a TOML config file. Flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Inputs {
    /// TOML file with any of these settings (keys as flag names).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Output format [default: text; csv for table/curve; json for simulate].
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Test(s): hie, hspe, hispj, hispc, hoe, hie-alt, hspe-alt, comma separated, or `all`.
    #[arg(long)]
    pub test: Option<TestList>,

    /// Members per egonetwork.
    #[arg(long)]
    pub n: Option<f64>,
    /// Allocation probability of index participants.
    #[arg(long)]
    pub p: Option<f64>,
    /// Intraclass correlation of the outcome.
    #[arg(long)]
    pub icc: Option<f64>,
    /// Total outcome variance.
    #[arg(long)]
    pub var: Option<f64>,
    /// Index-participant outcome variance (separate-regression tests).
    #[arg(long)]
    pub var_index: Option<f64>,
    /// Individual effect size.
    #[arg(long)]
    pub dtau: Option<f64>,
    /// Spillover effect size.
    #[arg(long)]
    pub ddelta: Option<f64>,
    /// Two-sided type I error rate.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Target power.
    #[arg(long)]
    pub power: Option<f64>,
    /// Number of egonetworks.
    #[arg(long = "K", visible_alias = "k")]
    #[serde(alias = "K")]
    pub k: Option<u64>,

    /// Search bound for K (conjunctive test).
    #[arg(long)]
    pub kmax: Option<u64>,
    /// Upper end of the network-size bracket.
    #[arg(long)]
    pub nmax: Option<f64>,

    /// Fix Δτ and solve the MDE for Δδ.
    #[arg(long)]
    pub fix_dtau: Option<f64>,
    /// Fix Δδ and solve the MDE for Δτ.
    #[arg(long)]
    pub fix_ddelta: Option<f64>,
    /// Minimize numerically for every test (optimal-p).
    #[arg(long, action = ArgAction::SetTrue)]
    #[serde(default)]
    pub numeric: bool,

    /// Table layout.
    #[arg(long, value_enum)]
    pub layout: Option<Layout>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_n: Option<FloatList>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_icc: Option<FloatList>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_p: Option<FloatList>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_dtau: Option<FloatList>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_ddelta: Option<FloatList>,

    /// Swept parameter (curve).
    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Quantity along the curve; `n` needs --K.
    #[arg(long, value_enum)]
    pub measure: Option<Measure>,

    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Variance components: known from the design, or estimated per replicate.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Simulate with zero effects (test size).
    #[arg(long, action = ArgAction::SetTrue)]
    #[serde(default)]
    pub null: bool,
    /// Intercept of the generating model.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

macro_rules! prefer_flags {
    ($flags:ident, $file:ident; $($field:ident),*) => {
        $( $flags.$field = $flags.$field.take().or($file.$field); )*
    };
}

impl Inputs {
    /// Fills every unset flag from `file`.
    pub fn merged_with(mut self, file: Inputs) -> Inputs {
        prefer_flags!(self, file; format, test, n, p, icc, var, var_index, dtau, ddelta,
            alpha, power, k, kmax, nmax, fix_dtau, fix_ddelta, layout, grid_n, grid_icc,
            grid_p, grid_dtau, grid_ddelta, axis, from, to, step, measure, seed, reps, mode,
            gamma, threads);
        self.numeric |= file.numeric;
        self.null |= file.null;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    K,
    Mde,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisArg {
    Icc,
    P,
    N,
    Effect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    K,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Known,
    Estimated,
}

/// Comma-separated numbers; the empty string is the empty list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ListRepr<f64>", into = "Vec<f64>")]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
            .collect::<Result<_, _>>()
            .map(FloatList)
    }
}

impl From<FloatList> for Vec<f64> {
    fn from(l: FloatList) -> Self {
        l.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ListRepr<String>", into = "Vec<TestKind>")]
pub struct TestList(pub Vec<TestKind>);

impl FromStr for TestList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(TestList(TestKind::GLS.to_vec()));
        }
        let kinds = s
            .split(',')
            .map(|t| t.parse::<TestKind>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        if kinds.is_empty() {
            return Err("no test given".into());
        }
        Ok(TestList(kinds))
    }
}

impl From<TestList> for Vec<TestKind> {
    fn from(l: TestList) -> Self {
        l.0
    }
}

/// Config files may give lists either as arrays or as comma-separated strings.
#[derive(Deserialize)]
#[serde(untagged)]
enum ListRepr<T> {
    Items(Vec<T>),
    Joined(String),
}

impl TryFrom<ListRepr<f64>> for FloatList {
    type Error = String;

    fn try_from(r: ListRepr<f64>) -> Result<Self, String> {
        match r {
            ListRepr::Items(v) => Ok(FloatList(v)),
            ListRepr::Joined(s) => s.parse(),
        }
    }
}

impl TryFrom<ListRepr<String>> for TestList {
    type Error = String;

    fn try_from(r: ListRepr<String>) -> Result<Self, String> {
        match r {
            ListRepr::Items(v) => v.join(",").parse(),
            ListRepr::Joined(s) => s.parse(),
        }
    }
}
