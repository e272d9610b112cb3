//! Design calculations for egocentric network-based randomized trials.
//!
//! Index participants are randomized with probability `p`; their `n`
//! nominated network members are never treated but are exposed through them.
//! With outcome ICC `ρ_Y` and variance `σ²_Y`, the crate gives
//!
//! * the GLS variance algebra ([`model`]),
//! * power, required number of egonetworks, minimum detectable effects,
//!   required network size, optimal `p` and sample-size ratios for the
//!   individual, spillover, joint, conjunctive and overall tests ([`power`]),
//! * a Monte Carlo oracle that simulates trials and checks all of the above
//!   ([`simulate`]),
//! * table and curve sweeps ([`exhibits`]).
//!
//! ```
//! use enr_design::model::{DesignParams, EffectSizes};
//! use enr_design::power::{required_k, TestKind, TestSpec};
//!
//! let design = DesignParams::new(2.0, 0.5, 0.1, 1.0)?;
//! let effects = EffectSizes::equal(-0.35);
//! let r = required_k(TestKind::Hspe, &design, &effects, &TestSpec::default())?;
//! assert_eq!(r.k_required, 122);
//! # Ok::<(), enr_design::Error>(())
//! ```

pub mod error;
pub mod exhibits;
pub mod linalg;
pub mod model;
pub mod numerics;
pub mod power;
pub mod simulate;

pub use error::{Error, Result};
