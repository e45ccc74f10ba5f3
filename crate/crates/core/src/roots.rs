//! Scalar root finding for increasing functions.
//!
//! The Riemann solvers reduce to a single strictly increasing equation
//! `f(x) = 0`. [`newton_bisect`] is the production solver; [`bisect`] is a
//! plain bisection kept as an independent cross-check.

use crate::error::{Error, Result};

/// Iteration cap shared by both solvers.
pub const MAX_ITER: usize = 200;

/// Grow `[-1, 1]` geometrically until it brackets a sign change of an
/// increasing function.
pub fn bracket<F: Fn(f64) -> f64>(f: &F) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    for _ in 0..64 {
        let (flo, fhi) = (f(lo), f(hi));
        if flo.is_nan() || fhi.is_nan() {
            return Err(Error::numerical("bracket", f64::NAN));
        }
        if flo <= 0.0 && fhi >= 0.0 {
            return Ok((lo, hi));
        }
        if flo > 0.0 {
            lo *= 2.0;
        }
        if fhi < 0.0 {
            hi *= 2.0;
        }
    }
    Err(Error::numerical("bracket", f64::INFINITY))
}

/// Safeguarded Newton iteration with bisection fallback.
///
/// `f` must be increasing and `df` its derivative. Stops when
/// `|f(x)| <= tol` or when the bracket cannot shrink further.
pub fn newton_bisect<F, D>(f: F, df: D, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = bracket(&f)?;
    let mut x = 0.0_f64.clamp(lo, hi);
    let mut fx = f(x);
    for _ in 0..MAX_ITER {
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        let next = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == x || hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()) {
            return Ok(x);
        }
        x = next;
        fx = f(x);
    }
    if fx.abs() <= tol.max(1e-12) {
        Ok(x)
    } else {
        Err(Error::numerical("newton_bisect", fx.abs()))
    }
}

/// Plain bisection on an increasing function; runs until the bracket
/// collapses to adjacent floats.
pub fn bisect<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    let (mut lo, mut hi) = bracket(&f)?;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if f(hi).abs() < f(lo).abs() { hi } else { lo })
}

/// Bisection on `[lo, hi]` for a predicate that is true on a prefix:
/// returns the largest point where `ok` holds (to float resolution).
pub fn largest_true<F: Fn(f64) -> bool>(ok: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let f = |x: f64| x * x * x + x - 3.0;
        let df = |x: f64| 3.0 * x * x + 1.0;
        let a = newton_bisect(f, df, 1e-14).unwrap();
        let b = bisect(f).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(f(a).abs() < 1e-13);
    }

    #[test]
    fn far_root_needs_growth() {
        let f = |x: f64| x - 1e6;
        let r = newton_bisect(f, |_| 1.0, 1e-14).unwrap();
        assert_eq!(r, 1e6);
    }

    #[test]
    fn largest_true_finds_threshold() {
        let t = largest_true(|x| x * x <= 2.0, 0.0, 4.0);
        assert!((t - 2f64.sqrt()).abs() < 1e-14);
    }
}
