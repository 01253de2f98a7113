//! Shape-preserving interpolants.
//!
//! [`MonotoneCubic`] is the Fritsch–Carlson/Butland piecewise cubic Hermite
//! interpolant: monotone data give a monotone curve. [`ShapeSpline`] is a
//! C¹ piecewise quadratic with one extra knot per interval (Schumaker's
//! construction) that preserves monotonicity *and* convexity/concavity of
//! the data, which the Legendre-type maximizations rely on.

use crate::error::{Error, Result};

fn check_knots(x: &[f64], y: &[f64], min: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InsufficientData(format!(
            "{} abscissae but {} ordinates",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min {
        return Err(Error::InsufficientData(format!(
            "need at least {min} knots, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Parse("non-finite knot data".into()));
    }
    if x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parse("knots must be strictly increasing".into()));
    }
    Ok(())
}

/// Index `i` with `x[i] <= t <= x[i+1]`, clamped to the end intervals.
fn locate(x: &[f64], t: f64) -> usize {
    let n = x.len();
    if t <= x[0] {
        return 0;
    }
    if t >= x[n - 1] {
        return n - 2;
    }
    x.partition_point(|&k| k <= t).saturating_sub(1).min(n - 2)
}

fn secants(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| (yw[1] - yw[0]) / (xw[1] - xw[0]))
        .collect()
}

/// Monotone piecewise cubic Hermite interpolant.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_knots(&x, &y, 2)?;
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta = secants(&x, &y);
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
            return Ok(Self { x, y, d });
        }
        for k in 1..n - 1 {
            let (s1, s2) = (delta[k - 1], delta[k]);
            if s1 == 0.0 || s2 == 0.0 || s1.signum() != s2.signum() {
                d[k] = 0.0;
            } else {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / s1 + w2 / s2);
            }
        }
        d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Ok(Self { x, y, d })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    /// Evaluates inside the knot hull; outside, the end cubic is continued.
    pub fn eval(&self, t: f64) -> f64 {
        let i = locate(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = locate(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let s2 = s * s;
        let dh00 = (6.0 * s2 - 6.0 * s) / h;
        let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
        let dh01 = (-6.0 * s2 + 6.0 * s) / h;
        let dh11 = 3.0 * s2 - 2.0 * s;
        dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1
    }
}

// Three-point end slope, limited so the end interval stays monotone.
fn edge_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() || m0 == 0.0 {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy)]
struct QuadPiece {
    t0: f64,
    z0: f64,
    s0: f64,
    // half the (constant) second derivative
    c: f64,
}

impl QuadPiece {
    fn eval(&self, t: f64) -> f64 {
        let dt = t - self.t0;
        self.z0 + dt * (self.s0 + self.c * dt)
    }
    fn derivative(&self, t: f64) -> f64 {
        self.s0 + 2.0 * self.c * (t - self.t0)
    }
}

/// Convexity- and monotonicity-preserving C¹ quadratic spline.
#[derive(Debug, Clone)]
pub struct ShapeSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
    // two pieces per interval, split at the inserted knot
    pieces: Vec<(QuadPiece, f64, QuadPiece)>,
}

impl ShapeSpline {
    /// Builds the spline; knot slopes are estimated from the data when
    /// `slopes` is `None`. Supplied or estimated slopes are clamped to be
    /// consistent with the local shape of the data.
    pub fn new(x: Vec<f64>, y: Vec<f64>, slopes: Option<Vec<f64>>) -> Result<Self> {
        check_knots(&x, &y, 2)?;
        let n = x.len();
        let delta = secants(&x, &y);
        let mut d = match slopes {
            Some(s) => {
                if s.len() != n || s.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InsufficientData(
                        "slope vector does not match knots".into(),
                    ));
                }
                s
            }
            None => estimate_slopes(&x, &delta),
        };
        clamp_slopes(&mut d, &delta);

        let mut pieces = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            pieces.push(build_interval(x[i], x[i + 1], y[i], y[i + 1], d[i], d[i + 1]));
        }
        Ok(Self { x, y, slopes: d, pieces })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn hull(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn eval(&self, t: f64) -> f64 {
        if let Ok(k) = self.x.binary_search_by(|p| p.total_cmp(&t)) {
            return self.y[k];
        }
        let (p0, xi, p1) = &self.pieces[locate(&self.x, t)];
        if t <= *xi {
            p0.eval(t)
        } else {
            p1.eval(t)
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if let Ok(k) = self.x.binary_search_by(|p| p.total_cmp(&t)) {
            return self.slopes[k];
        }
        let (p0, xi, p1) = &self.pieces[locate(&self.x, t)];
        if t <= *xi {
            p0.derivative(t)
        } else {
            p1.derivative(t)
        }
    }

    /// Second derivative; piecewise constant.
    pub fn second_derivative(&self, t: f64) -> f64 {
        let (p0, xi, p1) = &self.pieces[locate(&self.x, t)];
        if t <= *xi {
            2.0 * p0.c
        } else {
            2.0 * p1.c
        }
    }
}

fn estimate_slopes(x: &[f64], delta: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (h[i] * delta[i - 1] + h[i - 1] * delta[i]) / (h[i - 1] + h[i]);
    }
    d[0] = ((2.0 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1]);
    d[n - 1] = ((2.0 * h[n - 2] + h[n - 3]) * delta[n - 2] - h[n - 2] * delta[n - 3])
        / (h[n - 3] + h[n - 2]);
    d
}

// Interior slopes must lie between the adjacent secants; end slopes must lie
// on the far side of the end secant (the side the curvature points to) and
// keep the sign of the data trend.
fn clamp_slopes(d: &mut [f64], delta: &[f64]) {
    let n = d.len();
    for i in 1..n - 1 {
        let (a, b) = (delta[i - 1], delta[i]);
        d[i] = d[i].clamp(a.min(b), a.max(b));
    }
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return;
    }
    // a concave left end needs a slope above its secant, a concave right
    // end one below; convex data mirror this
    let clamp_end = |slope: f64, end: f64, inner: f64, right: bool| -> f64 {
        let concave = if right { end < inner } else { inner < end };
        let convex = if right { end > inner } else { inner > end };
        let above = concave != right;
        let mut s = slope;
        if concave || convex {
            s = if above { s.max(end) } else { s.min(end) };
        } else {
            s = end;
        }
        if end != 0.0 && s.signum() != end.signum() {
            s = 0.0;
        }
        s
    };
    d[0] = clamp_end(d[0], delta[0], delta[1], false);
    d[n - 1] = clamp_end(d[n - 1], delta[n - 2], delta[n - 3], true);
}

fn build_interval(t1: f64, t2: f64, z1: f64, z2: f64, s1: f64, s2: f64) -> (QuadPiece, f64, QuadPiece) {
    let h = t2 - t1;
    let delta = (z2 - z1) / h;
    // normalize to the concave orientation (s1 >= s2)
    let sign = if s1 >= s2 { 1.0 } else { -1.0 };
    let (a1, a2, dl) = (sign * s1, sign * s2, sign * delta);
    let span = a1 - a2;
    let alpha = if span <= 1e-300 {
        0.5
    } else {
        let p = (a1 - dl).max(0.0);
        let q = (dl - a2).max(0.0);
        let lo = ((q - p) / span).max(0.0);
        let hi = (2.0 * q / span).min(1.0);
        if hi > lo {
            0.5 * (lo + hi)
        } else {
            0.5
        }
    };
    let xi = t1 + alpha * h;
    let sbar = 2.0 * delta - s1 * alpha - s2 * (1.0 - alpha);
    let left = QuadPiece {
        t0: t1,
        z0: z1,
        s0: s1,
        c: if alpha > 0.0 { (sbar - s1) / (2.0 * (xi - t1)) } else { 0.0 },
    };
    let zxi = z1 + 0.5 * (s1 + sbar) * (xi - t1);
    let right = QuadPiece {
        t0: xi,
        z0: zxi,
        s0: sbar,
        c: if alpha < 1.0 { (s2 - sbar) / (2.0 * (t2 - xi)) } else { 0.0 },
    };
    (left, xi, right)
}
