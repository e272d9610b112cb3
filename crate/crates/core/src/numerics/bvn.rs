//! Upper-orthant probabilities of the standard bivariate normal.
//!
//! Genz's BVNU: Gauss-Legendre quadrature of the Drezner-Wesolowsky
//! reduction, with 6, 12 or 20 nodes depending on `|r|` and a separate
//! expansion for `|r| ≥ 0.925`. Absolute accuracy is close to machine
//! precision.

use std::f64::consts::PI;

use super::normal::normal_cdf;
use crate::error::{invalid, Result};

const TWO_PI: f64 = 2.0 * PI;

// Half of each symmetric Gauss-Legendre rule (negative nodes).
const W6: [f64; 3] = [0.171_324_492_379_170_5, 0.360_761_573_048_138_4, 0.467_913_934_572_690_4];
const X6: [f64; 3] = [-0.932_469_514_203_152_2, -0.661_209_386_466_264_7, -0.238_619_186_083_197];
const W12: [f64; 6] = [
    0.047_175_336_386_511_77,
    0.106_939_325_995_318_3,
    0.160_078_328_543_346_4,
    0.203_167_426_723_065_9,
    0.233_492_536_538_354_7,
    0.249_147_045_813_402_9,
];
const X12: [f64; 6] = [
    -0.981_560_634_246_719_1,
    -0.904_117_256_370_475,
    -0.769_902_674_194_305,
    -0.587_317_954_286_617_1,
    -0.367_831_498_998_180_2,
    -0.125_233_408_511_469_2,
];
const W20: [f64; 10] = [
    0.017_614_007_139_152_12,
    0.040_601_429_800_386_94,
    0.062_672_048_334_109_06,
    0.083_276_741_576_704_75,
    0.101_930_119_817_240_4,
    0.118_194_531_961_518_4,
    0.131_688_638_449_176_6,
    0.142_096_109_318_382_1,
    0.149_172_986_472_603_7,
    0.152_753_387_130_725_9,
];
const X20: [f64; 10] = [
    -0.993_128_599_185_094_9,
    -0.963_971_927_277_913_8,
    -0.912_234_428_251_325_9,
    -0.839_116_971_822_218_8,
    -0.746_331_906_460_150_8,
    -0.636_053_680_726_515,
    -0.510_867_001_950_827_1,
    -0.373_706_088_715_419_6,
    -0.227_785_851_141_645_1,
    -0.076_526_521_133_497_33,
];

/// `P(X > h, Y > k)` for standard normals with correlation `r ∈ (-1, 1)`.
pub fn bvn_upper(h: f64, k: f64, r: f64) -> Result<f64> {
    if !(r > -1.0 && r < 1.0) {
        return Err(invalid("r", r, "correlation must lie in (-1, 1)"));
    }
    if h.is_nan() || k.is_nan() {
        return Err(invalid("h/k", f64::NAN, "limits must not be NaN"));
    }
    Ok(bvnu(h, k, r).clamp(0.0, 1.0))
}

/// `P(X ≤ h, Y ≤ k)`.
pub fn bvn_cdf(h: f64, k: f64, r: f64) -> Result<f64> {
    bvn_upper(-h, -k, r)
}

#[allow(clippy::many_single_char_names)]
fn bvnu(h: f64, k: f64, r: f64) -> f64 {
    let (w, x): (&[f64], &[f64]) = if r.abs() < 0.3 {
        (&W6, &X6)
    } else if r.abs() < 0.75 {
        (&W12, &X12)
    } else {
        (&W20, &X20)
    };

    let mut k = k;
    let mut hk = h * k;
    let mut bvn = 0.0;

    if r.abs() < 0.925 {
        let hs = 0.5 * (h * h + k * k);
        let asr = r.asin();
        for (wi, xi) in w.iter().zip(x) {
            let sn = (asr * (xi + 1.0) / 2.0).sin();
            bvn += wi * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            let sn = (asr * (1.0 - xi) / 2.0).sin();
            bvn += wi * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
        }
        return bvn * asr / (2.0 * TWO_PI) + normal_cdf(-h) * normal_cdf(-k);
    }

    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    let as_ = (1.0 - r) * (1.0 + r);
    let mut a = as_.sqrt();
    let bs = (h - k) * (h - k);
    let c = (4.0 - hk) / 8.0;
    let d = (12.0 - hk) / 16.0;
    bvn = a
        * (-(bs / as_ + hk) / 2.0).exp()
        * (1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0);
    if hk > -160.0 {
        let b = bs.sqrt();
        bvn -= (-hk / 2.0).exp()
            * TWO_PI.sqrt()
            * normal_cdf(-b / a)
            * b
            * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (wi, xi) in w.iter().zip(x) {
        let xs = (a * (xi + 1.0)).powi(2);
        let rs = (1.0 - xs).sqrt();
        bvn += a
            * wi
            * ((-bs / (2.0 * xs) - hk / (1.0 + rs)).exp() / rs
                - (-(bs / xs + hk) / 2.0).exp() * (1.0 + c * xs * (1.0 + d * xs)));
        let xs = as_ * (1.0 - xi).powi(2) / 4.0;
        let rs = (1.0 - xs).sqrt();
        bvn += a
            * wi
            * (-(bs / xs + hk) / 2.0).exp()
            * ((-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs
                - (1.0 + c * xs * (1.0 + d * xs)));
    }
    bvn = -bvn / TWO_PI;

    if r > 0.0 {
        bvn + normal_cdf(-h.max(k))
    } else {
        let mut out = -bvn;
        if k > h {
            if h < 0.0 {
                out += normal_cdf(k) - normal_cdf(h);
            } else {
                out += normal_cdf(-h) - normal_cdf(-k);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::normal::{normal_pdf, normal_sf};
    use proptest::prelude::*;

    /// `∫_h^∞ φ(x) Φ̄((k - r x)/√(1-r²)) dx` by composite Simpson on a long
    /// finite interval.
    fn simpson_oracle(h: f64, k: f64, r: f64) -> f64 {
        let lo = h.max(-12.0);
        let hi = 12.0_f64;
        if lo >= hi {
            return 0.0;
        }
        let s = (1.0 - r * r).sqrt();
        let f = |x: f64| normal_pdf(x) * normal_sf((k - r * x) / s);
        let m = 20_000;
        let step = (hi - lo) / m as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..m {
            let x = lo + i as f64 * step;
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        acc * step / 3.0
    }

    #[test]
    fn whole_plane() {
        for r in [-0.99, -0.5, 0.0, 0.4, 0.95] {
            assert!((bvn_upper(-30.0, -30.0, r).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn independent_quadrant() {
        assert!((bvn_upper(0.0, 0.0, 0.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn orthant_closed_form() {
        for r in [-0.95_f64, -0.6, -0.1, 0.2, 0.5, 0.8, 0.93, 0.999] {
            let expected = 0.25 + r.asin() / TWO_PI;
            assert!((bvn_upper(0.0, 0.0, r).unwrap() - expected).abs() < 1e-7, "r = {r}");
        }
        assert!((bvn_upper(0.0, 0.0, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-7);
    }

    #[test]
    fn matches_simpson_oracle() {
        let hs = [-2.5, -0.7, 0.0, 0.4, 1.96, 3.1];
        let rs = [-0.97, -0.8, -0.5, -0.2, 0.0, 0.25, 0.43, 0.7, 0.9, 0.95, 0.99];
        for &h in &hs {
            for &k in &hs {
                for &r in &rs {
                    let got = bvn_upper(h, k, r).unwrap();
                    let want = simpson_oracle(h, k, r);
                    assert!((got - want).abs() < 1e-7, "h={h} k={k} r={r}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn rejects_degenerate_correlation() {
        assert!(bvn_upper(0.0, 0.0, 1.0).is_err());
        assert!(bvn_upper(0.0, 0.0, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn quadrants_sum_to_one(h in -5.0_f64..5.0, k in -5.0_f64..5.0, r in -0.99_f64..0.99) {
            let total = bvn_upper(h, k, r).unwrap()
                + bvn_upper(-h, k, -r).unwrap()
                + bvn_upper(h, -k, -r).unwrap()
                + bvn_upper(-h, -k, r).unwrap();
            prop_assert!((total - 1.0).abs() < 1e-7);
        }

        #[test]
        fn independence_factorises(h in -6.0_f64..6.0, k in -6.0_f64..6.0) {
            let got = bvn_upper(h, k, 0.0).unwrap();
            prop_assert!((got - normal_sf(h) * normal_sf(k)).abs() < 1e-9);
        }

        #[test]
        fn marginal_bound(h in -5.0_f64..5.0, k in -5.0_f64..5.0, r in -0.99_f64..0.99) {
            let p = bvn_upper(h, k, r).unwrap();
            prop_assert!(p <= normal_sf(h).min(normal_sf(k)) + 1e-12);
            prop_assert!(p >= (normal_sf(h) + normal_sf(k) - 1.0).max(0.0) - 1e-12);
        }
    }
}
