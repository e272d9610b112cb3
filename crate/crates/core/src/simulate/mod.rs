//! Monte Carlo oracle for the analytic formulas: data generation from the
//! random-intercept model, GLS and separate-regression fits, test decisions,
//! and replicated power/size/variance summaries.

mod alt;
mod dataset;
mod decision;
mod gls;
mod icc;
mod report;
mod rng;

pub use alt::{alt_fit, AltFit};
pub use dataset::{generate_dataset, generate_replicate, EgoNetworkDataset, Network};
pub use decision::{decide, run_tests, TestDecisions};
pub use gls::{gls_fit, GlsFit, IccMode, TestStatistics};
pub use icc::{estimate_icc, IccEstimate, ICC_MAX};
pub use report::{
    empirical_power, EstimateReport, EstimateSummary, SimulationConfig, SimulationReport,
    TestReport, MIN_REPLICATES,
};
pub use rng::{stream_rng, StreamTag};
