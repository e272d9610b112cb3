//! Reject/accept decisions for each test from one fit.

use serde::{Deserialize, Serialize};

use super::gls::{GlsFit, TestStatistics};
use crate::power::{TestKind, TestSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestDecisions {
    pub hie: bool,
    pub hspe: bool,
    pub hispj: bool,
    pub hispc: bool,
    pub hoe: bool,
}

impl TestDecisions {
    /// Decision for one of the five GLS tests; `None` for the alternative-model kinds.
    pub fn get(&self, kind: TestKind) -> Option<bool> {
        match kind {
            TestKind::Hie => Some(self.hie),
            TestKind::Hspe => Some(self.hspe),
            TestKind::Hispj => Some(self.hispj),
            TestKind::Hispc => Some(self.hispc),
            TestKind::Hoe => Some(self.hoe),
            TestKind::HieAlt | TestKind::HspeAlt => None,
        }
    }
}

/// Applies the decision rules: two-sided Z tests against `z_{1-α/2}`, the
/// joint test against `χ²_{1-α}(2)`, and the conjunctive test requiring
/// both `|T_τ|` and `|T_δ|` past `z_{1-α/2}`.
pub fn decide(stats: &TestStatistics, spec: &TestSpec) -> TestDecisions {
    let z = spec.z_alpha();
    let hie = stats.t_tau.abs() > z;
    let hspe = stats.t_delta.abs() > z;
    TestDecisions {
        hie,
        hspe,
        hispj: stats.q_joint > spec.chisq_crit(),
        hispc: hie && hspe,
        hoe: stats.t_overall.abs() > z,
    }
}

pub fn run_tests(fit: &GlsFit, spec: &TestSpec) -> TestDecisions {
    decide(&fit.test_stats, spec)
}
