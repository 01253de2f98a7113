//! One-dimensional bounded extremum search.
//!
//! Every max/min in the crate goes through [`maximize`]: a coarse scan of
//! [`SCAN_POINTS`] samples (logarithmic when the interval is positive) picks a
//! bracket around the best sample, then golden-section search shrinks it to a
//! relative width of [`GOLDEN_REL_WIDTH`]. Ties go to the smallest argument.
//! When the best point sits on an end of the interval the result is flagged
//! rather than extended.

use crate::error::{Error, Result};

pub const SCAN_POINTS: usize = 64;
pub const GOLDEN_REL_WIDTH: f64 = 1e-8;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub arg: f64,
    pub value: f64,
    /// The extremum was found on an end of the search interval.
    pub at_boundary: bool,
}

fn scan_points(lo: f64, hi: f64) -> Vec<f64> {
    let n = SCAN_POINTS;
    let mut xs = Vec::with_capacity(n);
    if lo > 0.0 {
        let (a, b) = (lo.ln(), hi.ln());
        for i in 0..n {
            xs.push((a + (b - a) * i as f64 / (n - 1) as f64).exp());
        }
    } else {
        for i in 0..n {
            xs.push(lo + (hi - lo) * i as f64 / (n - 1) as f64);
        }
    }
    xs[0] = lo;
    xs[n - 1] = hi;
    xs
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximizes `f` on `[lo, hi]`.
pub fn maximize<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> Result<Extremum> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::Domain(format!("invalid search interval [{lo}, {hi}]")));
    }
    let xs = scan_points(lo, hi);
    let ys: Vec<f64> = xs.iter().map(|&x| sanitize(f(x))).collect();
    let mut best = 0;
    for (i, &y) in ys.iter().enumerate() {
        if y > ys[best] {
            best = i;
        }
    }
    if ys[best] == f64::NEG_INFINITY {
        return Err(Error::Unbracketed(format!(
            "objective undefined everywhere on [{lo}, {hi}]"
        )));
    }

    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(xs.len() - 1)];
    let (xg, yg) = golden(&mut f, a, b);

    let mut result = if yg > ys[best] {
        Extremum { arg: xg, value: yg, at_boundary: false }
    } else {
        Extremum { arg: xs[best], value: ys[best], at_boundary: false }
    };
    let n = xs.len();
    let near_lo = best <= 1
        && result.arg - lo <= 4.0 * GOLDEN_REL_WIDTH * xs[1].abs().max(lo.abs());
    let near_hi = best >= n - 2 && hi - result.arg <= 4.0 * GOLDEN_REL_WIDTH * hi.abs();
    if near_lo {
        result.at_boundary = true;
        if ys[0] >= result.value {
            result.arg = lo;
            result.value = ys[0];
        }
    } else if near_hi {
        result.at_boundary = true;
        if ys[n - 1] > result.value {
            result.arg = hi;
            result.value = ys[n - 1];
        }
    }
    Ok(result)
}

/// Minimizes `f` on `[lo, hi]`; same policy as [`maximize`].
pub fn minimize<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> Result<Extremum> {
    let e = maximize(|x| -f(x), lo, hi)?;
    Ok(Extremum { value: -e.value, ..e })
}

fn golden<F: FnMut(f64) -> f64>(f: &mut F, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = sanitize(f(c));
    let mut fd = sanitize(f(d));
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        if (b - a) <= GOLDEN_REL_WIDTH * scale {
            break;
        }
        // `>=` keeps the left point on ties
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = sanitize(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = sanitize(f(d));
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_maximum() {
        let e = maximize(|x| -(x - 3.0).powi(2), 0.1, 100.0).unwrap();
        assert!((e.arg - 3.0).abs() < 1e-6);
        assert!(!e.at_boundary);
    }

    #[test]
    fn boundary_maximum_is_flagged() {
        let e = maximize(|x| -x, 0.5, 10.0).unwrap();
        assert_eq!(e.arg, 0.5);
        assert!(e.at_boundary);
        let e = maximize(|x| x, 0.5, 10.0).unwrap();
        assert_eq!(e.arg, 10.0);
        assert!(e.at_boundary);
    }

    #[test]
    fn flat_region_prefers_smallest_argument() {
        let e = maximize(|_| 1.0, 1.0, 2.0).unwrap();
        assert_eq!(e.arg, 1.0);
    }

    #[test]
    fn linear_interval_for_non_positive_bounds() {
        let e = minimize(|x| (x + 0.25).powi(2), -1.0, 1.0).unwrap();
        assert!((e.arg + 0.25).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(maximize(|x| x, 2.0, 1.0).is_err());
    }
}
