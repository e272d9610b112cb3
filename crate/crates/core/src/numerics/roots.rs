//! Bracketed root finding, monotone integer search and a small 1-D minimiser.

use crate::error::{invalid, Error, Result};

const MAX_ITER: usize = 300;
const XTOL: f64 = 1e-12;

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    lo: f64,
    hi: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(invalid("bracket", hi - lo, "need finite lo < hi"));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Brent's method. Stops when the bracket is narrower than
/// `1e-12 + 4ε|x|` or `f` hits zero exactly.
#[allow(clippy::many_single_char_names)]
pub fn brent_root<F>(mut f: F, bracket: RootBracket) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::InvalidBracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidBracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * XTOL;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::InvalidBracket {
                lo: bracket.lo,
                hi: bracket.hi,
                f_lo: fa,
                f_hi: fb,
            });
        }
    }
    Ok(b)
}

/// Smallest positive integer `K ≤ k_max` with `pred(K)`, for a predicate that
/// is monotone non-decreasing in `K`.
///
/// Gallops `1, 2, 4, …` to bracket the switch, then bisects.
pub fn solve_monotone_min_integer<P>(mut pred: P, k_max: u64) -> Result<u64>
where
    P: FnMut(u64) -> bool,
{
    if k_max == 0 {
        return Err(Error::NotFoundWithinBound { bound: 0 });
    }
    let mut last_false = 0_u64;
    let mut probe = 1_u64;
    let first_true = loop {
        if pred(probe) {
            break probe;
        }
        last_false = probe;
        if probe == k_max {
            return Err(Error::NotFoundWithinBound { bound: k_max });
        }
        probe = probe.saturating_mul(2).min(k_max);
    };
    let (mut lo, mut hi) = (last_false, first_true);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest root of `f` on `[lo, hi]`: scans a grid that is linear up to
/// `min(hi, 10)` and geometric beyond, then polishes the first sign change
/// with Brent. `None` when `f` never changes sign on the grid.
pub fn smallest_root<F>(mut f: F, lo: f64, hi: f64, points: usize) -> Result<Option<f64>>
where
    F: FnMut(f64) -> f64,
{
    let grid = scan_grid(lo, hi, points);
    let mut prev_x = grid[0];
    let mut prev_f = f(prev_x);
    if prev_f == 0.0 {
        return Ok(Some(prev_x));
    }
    for &x in &grid[1..] {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(Some(x));
        }
        if fx.is_finite() && prev_f.is_finite() && fx.signum() != prev_f.signum() {
            return brent_root(&mut f, RootBracket::new(prev_x, x)?).map(Some);
        }
        prev_x = x;
        prev_f = fx;
    }
    Ok(None)
}

fn scan_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let points = points.max(4);
    let split = hi.min(10.0).max(lo);
    let mut grid = Vec::with_capacity(2 * points);
    if split > lo {
        for i in 0..points {
            grid.push(lo + (split - lo) * i as f64 / (points - 1) as f64);
        }
    } else {
        grid.push(lo);
    }
    if hi > split {
        let ratio = (hi / split).ln();
        for i in 1..points {
            grid.push(split * (ratio * i as f64 / (points - 1) as f64).exp());
        }
    }
    grid
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}
