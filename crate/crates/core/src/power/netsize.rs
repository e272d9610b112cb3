//! Solving the sample-size equations for the network size `n` at a fixed
//! number of egonetworks.

use serde::{Deserialize, Serialize};

use super::{k_closed_form, power_at, TestKind, TestSpec};
use crate::error::{invalid, Error, Result};
use crate::model::{DesignParams, EffectSizes};
use crate::numerics::smallest_root;

/// Search interval for `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkSizeSearch {
    pub n_min: f64,
    pub n_max: f64,
    /// Grid points per segment of the sign-change scan.
    pub grid: usize,
}

impl Default for NetworkSizeSearch {
    fn default() -> Self {
        Self {
            n_min: 1e-3,
            n_max: 1e4,
            grid: 400,
        }
    }
}

/// Smallest `n` in `[n_min, n_max]` at which `k` egonetworks suffice.
///
/// `design.n` is ignored. Closed-form kinds solve `K(n) = k`; the
/// conjunctive test solves `π_C(n) = π`. When `k` already suffices at
/// `n_min`, `n_min` is returned.
pub fn solve_network_size(
    kind: TestKind,
    design: &DesignParams,
    effects: &EffectSizes,
    spec: &TestSpec,
    k: u64,
    search: &NetworkSizeSearch,
) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k", 0.0, "number of egonetworks must be >= 1"));
    }
    if !(search.n_min > 0.0 && search.n_min < search.n_max) {
        return Err(invalid("n_max", search.n_max, "need 0 < n_min < n_max"));
    }
    let at = |n: f64| design.with_n(n);
    at(search.n_min).validate()?;
    spec.validate()?;
    let kf = k as f64;

    let f = |n: f64| -> f64 {
        let d = at(n);
        let v = if kind.has_closed_form() {
            k_closed_form(kind, &d, effects, spec).map(|kc| kc - kf)
        } else {
            power_at(kind, &d, effects, spec, kf).map(|p| spec.power_target - p)
        };
        v.unwrap_or(f64::NAN)
    };
    // Surface effect-size errors before scanning.
    if kind.has_closed_form() {
        k_closed_form(kind, &at(search.n_min), effects, spec)?;
    } else if effects.delta_tau == 0.0 || effects.delta_delta == 0.0 {
        return Err(Error::ZeroEffect(if effects.delta_tau == 0.0 { "tau" } else { "delta" }));
    }

    if f(search.n_min) <= 0.0 {
        return Ok(search.n_min);
    }
    smallest_root(f, search.n_min, search.n_max, search.grid)?.ok_or_else(|| {
        Error::NoSolution(format!(
            "no network size in [{}, {}] lets {k} egonetworks reach power {} for {kind}",
            search.n_min, search.n_max, spec.power_target
        ))
    })
}
