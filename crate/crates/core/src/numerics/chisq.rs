//! Central and non-central χ² distribution functions.
//!
//! The non-central CDF is the Poisson mixture
//!
//! ```text
//! F(x; k, λ) = Σ_j  e^{-λ/2} (λ/2)^j / j!  ·  P(k/2 + j, x/2)
//! ```
//!
//! summed outward from the Poisson mode and truncated once a geometric bound on
//! the unsummed Poisson mass drops below `1e-14`.

use statrs::function::gamma::{gamma_lr, ln_gamma};

use super::roots::{brent_root, RootBracket};
use crate::error::{invalid, Error, Result};

const TAIL_TOL: f64 = 1e-14;

fn check_df(df: u32) -> Result<()> {
    if df == 0 {
        Err(invalid("df", 0.0, "degrees of freedom must be positive"))
    } else {
        Ok(())
    }
}

/// Central χ² CDF.
pub fn chisq_cdf(x: f64, df: u32) -> Result<f64> {
    check_df(df)?;
    if !(x >= 0.0) {
        return Err(invalid("x", x, "must be >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(gamma_lr(0.5 * df as f64, 0.5 * x))
}

/// Upper quantile `χ²_{1-α}(df)`: the point with right-tail mass `alpha`.
pub fn chisq_upper_quantile(alpha: f64, df: u32) -> Result<f64> {
    check_df(df)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", alpha, "must lie in (0, 1)"));
    }
    if df == 2 {
        return Ok(-2.0 * alpha.ln());
    }
    let mut hi = df as f64 + 10.0;
    while chisq_cdf(hi, df)? < 1.0 - alpha {
        hi *= 2.0;
    }
    let f = |x: f64| chisq_cdf(x, df).map(|c| c - (1.0 - alpha)).unwrap_or(f64::NAN);
    brent_root(f, RootBracket::new(0.0, hi)?)
}

fn poisson_log_weight(j: u64, mean: f64) -> f64 {
    -mean + j as f64 * mean.ln() - ln_gamma(j as f64 + 1.0)
}

/// Non-central χ² CDF `P(X ≤ x)` with `df` degrees of freedom and
/// non-centrality `ncp`.
pub fn noncentral_chisq_cdf(x: f64, df: u32, ncp: f64) -> Result<f64> {
    check_df(df)?;
    if !(x >= 0.0) {
        return Err(invalid("x", x, "must be >= 0"));
    }
    if !(ncp >= 0.0) || !ncp.is_finite() {
        return Err(invalid("ncp", ncp, "must be finite and >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let mean = 0.5 * ncp;
    if mean == 0.0 {
        return chisq_cdf(x, df);
    }

    let half_df = 0.5 * df as f64;
    let half_x = 0.5 * x;
    let term = |j: u64| -> f64 {
        poisson_log_weight(j, mean).exp() * gamma_lr(half_df + j as f64, half_x)
    };

    let mode = mean.floor() as u64;
    let mut sum = term(mode);

    // Upward: w_{j+1}/w_j = mean/(j+1) < 1 past the mode.
    let mut j = mode + 1;
    loop {
        let w = poisson_log_weight(j, mean).exp();
        sum += w * gamma_lr(half_df + j as f64, half_x);
        let ratio = mean / (j as f64 + 2.0);
        if ratio < 1.0 && w * ratio / (1.0 - ratio) < TAIL_TOL {
            break;
        }
        j += 1;
        if j > mode + 100_000 {
            break;
        }
    }

    // Downward: w_{j-1}/w_j = j/mean < 1 below the mode.
    let mut j = mode;
    while j > 0 {
        j -= 1;
        let w = poisson_log_weight(j, mean).exp();
        sum += w * gamma_lr(half_df + j as f64, half_x);
        let ratio = j as f64 / mean;
        if ratio < 1.0 && w * ratio / (1.0 - ratio) < TAIL_TOL {
            break;
        }
    }

    Ok(sum.clamp(0.0, 1.0))
}

/// Non-centrality `λ` at which a non-central χ²(df) variable exceeds `q` with
/// probability `pi`.
///
/// Returns `0` when the central distribution already reaches `pi`.
pub fn required_ncp(q: f64, pi: f64, df: u32) -> Result<f64> {
    check_df(df)?;
    if !(q > 0.0) || !q.is_finite() {
        return Err(invalid("q", q, "must be finite and > 0"));
    }
    if !(pi > 0.0 && pi < 1.0) {
        return Err(invalid("pi", pi, "must lie in (0, 1)"));
    }
    let exceed = |lambda: f64| noncentral_chisq_cdf(q, df, lambda).map(|c| 1.0 - c);
    if exceed(0.0)? >= pi {
        return Ok(0.0);
    }
    let mut hi = 1.0_f64.max(q);
    while exceed(hi)? < pi {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::NoSolution(format!(
                "power {pi} not attainable for chi-square with {df} df"
            )));
        }
    }
    let f = |lambda: f64| exceed(lambda).map(|e| e - pi).unwrap_or(f64::NAN);
    brent_root(f, RootBracket::new(0.0, hi)?)
}
