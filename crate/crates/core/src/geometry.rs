//! Kinetic potentials, K-functions and envelope bounds.
//!
//! With `s` the mean kinetic energy of a trial state, the ground-state curve
//! and the kinetic potential are a Legendre pair:
//!
//! ```text
//! F(v)   = min_s [s + v fbar(s)]
//! fbar(s) = max_v [(F(v) - s)/v]
//! ```
//!
//! and the K-function `K(r) = max_v [F(v) - v f(r)]` turns the energy into a
//! minimum over `r`: `F(v) = min_r [K(r) + v f(r)]`.
//!
//! Maximizations over `v` are restricted to the curve's hull. A maximizer on
//! an end of the hull is flagged, never extrapolated.

use std::io::Write;

use crate::curve::{AnalyticCurve, SpectralCurve};
use crate::error::{Error, Result};
use crate::numerics::{maximize, minimize, Extremum, MonotoneCubic, ShapeSpline};
use crate::potential::PotentialShape;

/// Radii searched by `min_r` when nothing narrower is known.
const R_SEARCH: (f64, f64) = (1e-6, 1e5);
/// Kinetic energies searched for analytic kinetic potentials.
const S_SEARCH: (f64, f64) = (1e-10, 1e8);
/// Relative step for centered differences of interpolated curves.
const FD_STEP: f64 = 1e-3;

/// `fbar(s) = max_v [(F(v) - s)/v]`, with the maximizing coupling.
pub fn kinetic_potential_from_curve(curve: &SpectralCurve, s: f64) -> Result<Extremum> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("kinetic energy must be > 0, got {s}")));
    }
    let (lo, hi) = curve.hull();
    maximize(|v| curve.eval(v).map(|e| (e - s) / v).unwrap_or(f64::NAN), lo, hi)
}

/// `K(r) = max_v [F(v) - v f(r)]`, with the maximizing coupling.
pub fn k_function_from_curve(curve: &SpectralCurve, shape: &PotentialShape, r: f64) -> Result<Extremum> {
    let f = shape.eval(r)?;
    k_from_value(curve, f)
}

fn k_from_value(curve: &SpectralCurve, f: f64) -> Result<Extremum> {
    let (lo, hi) = curve.hull();
    maximize(|v| curve.eval(v).map(|e| e - v * f).unwrap_or(f64::NAN), lo, hi)
}

/// `min_u [F(u) - u F'(u) + v F'(u)]`: the tangent-line envelope of `F`
/// evaluated at `v`. Equal to `F(v)` for concave `F`.
pub fn energy_from_coupling_param(curve: &SpectralCurve, v: f64) -> Result<Extremum> {
    let (lo, hi) = curve.hull();
    if v < lo || v > hi {
        return Err(Error::OutOfRange { value: v, lo, hi });
    }
    let slope = |u: f64| -> Result<f64> {
        if curve.analytic_model().is_some() {
            return curve.derivative(u);
        }
        let d = FD_STEP * u;
        let (a, b) = ((u - d).max(lo), (u + d).min(hi));
        Ok((curve.eval(b)? - curve.eval(a)?) / (b - a))
    };
    minimize(
        |u| match (curve.eval(u), slope(u)) {
            (Ok(e), Ok(d)) => e - u * d + v * d,
            _ => f64::NAN,
        },
        lo,
        hi,
    )
}

#[derive(Debug, Clone)]
enum KineticModel {
    /// `-sqrt(m s)`
    Coulomb { mass: f64 },
    /// `-(sqrt(4 m s/a^2 + 1) - 1)/2`
    Hulthen { a: f64, mass: f64 },
    Dual(SpectralCurve),
    Sampled(ShapeSpline),
}

/// Monotone decreasing, convex `fbar(s)`.
#[derive(Debug, Clone)]
pub struct KineticPotential {
    model: KineticModel,
    source: String,
}

impl KineticPotential {
    pub fn coulomb(mass: f64) -> Self {
        Self { model: KineticModel::Coulomb { mass }, source: "analytic coulomb".into() }
    }

    pub fn hulthen(a: f64, mass: f64) -> Self {
        Self { model: KineticModel::Hulthen { a, mass }, source: format!("analytic hulthen a={a}") }
    }

    /// Exact closed form when the curve is analytic, else the numerical dual.
    pub fn from_curve(curve: &SpectralCurve) -> Self {
        match curve.analytic_model() {
            Some(AnalyticCurve::Coulomb { mass }) => Self::coulomb(mass),
            Some(AnalyticCurve::Hulthen { a, mass }) => Self::hulthen(a, mass),
            None => Self::dual_of(curve),
        }
    }

    /// Numerical Legendre dual of any curve.
    pub fn dual_of(curve: &SpectralCurve) -> Self {
        Self {
            model: KineticModel::Dual(curve.clone()),
            source: format!("dual of {:?} curve", curve.provenance()).to_lowercase(),
        }
    }

    pub fn from_samples(s: Vec<f64>, fbar: Vec<f64>, source: &str) -> Result<Self> {
        Ok(Self {
            model: KineticModel::Sampled(ShapeSpline::new(s, fbar, None)?),
            source: source.to_string(),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Kinetic energies over which `fbar` is known.
    pub fn domain(&self) -> Result<(f64, f64)> {
        match &self.model {
            KineticModel::Coulomb { .. } | KineticModel::Hulthen { .. } => Ok(S_SEARCH),
            KineticModel::Dual(c) => {
                let (lo, hi) = c.hull();
                let s = |v: f64| -> Result<f64> { Ok(c.eval(v)? - v * c.derivative(v)?) };
                let (a, b) = (s(lo)?, s(hi)?);
                Ok((a.max(S_SEARCH.0), b))
            }
            KineticModel::Sampled(sp) => Ok(sp.hull()),
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("kinetic energy must be > 0, got {s}")));
        }
        match &self.model {
            KineticModel::Coulomb { mass } => Ok(-(mass * s).sqrt()),
            KineticModel::Hulthen { a, mass } => {
                Ok(-((4.0 * mass * s / (a * a) + 1.0).sqrt() - 1.0) / 2.0)
            }
            KineticModel::Dual(c) => Ok(kinetic_potential_from_curve(c, s)?.value),
            KineticModel::Sampled(sp) => {
                let (lo, hi) = sp.hull();
                if s < lo || s > hi {
                    return Err(Error::OutOfRange { value: s, lo, hi });
                }
                Ok(sp.eval(s))
            }
        }
    }

    /// Samples `fbar` on the given kinetic energies.
    pub fn sample(&self, s: &[f64]) -> Result<Vec<(f64, f64)>> {
        s.iter().map(|&x| Ok((x, self.eval(x)?))).collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W, s: &[f64]) -> Result<()> {
        write_xy(writer, &self.source, &self.sample(s)?)
    }
}

/// `F(v) = min_s [s + v fbar(s)]`, with the minimizing kinetic energy.
pub fn energy_from_kinetic_potential(fbar: &KineticPotential, v: f64) -> Result<Extremum> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("coupling must be > 0, got {v}")));
    }
    let (lo, hi) = fbar.domain()?;
    minimize(|s| fbar.eval(s).map(|f| s + v * f).unwrap_or(f64::NAN), lo, hi)
}

#[derive(Debug, Clone)]
enum KModel {
    /// `1/(m r^2)`
    Coulomb { mass: f64 },
    Dual { curve: SpectralCurve, shape: PotentialShape },
    // ln K against ln r
    Sampled(MonotoneCubic),
}

/// Positive, decreasing `K(r)`.
#[derive(Debug, Clone)]
pub struct KFunction {
    model: KModel,
    source: String,
}

impl KFunction {
    pub fn coulomb(mass: f64) -> Self {
        Self { model: KModel::Coulomb { mass }, source: "analytic coulomb".into() }
    }

    pub fn from_curve(curve: &SpectralCurve, shape: &PotentialShape) -> Self {
        Self {
            model: KModel::Dual { curve: curve.clone(), shape: shape.clone() },
            source: format!("{:?} curve with shape {shape}", curve.provenance()).to_lowercase(),
        }
    }

    pub fn from_samples(r: &[f64], k: &[f64], source: &str) -> Result<Self> {
        if k.iter().any(|&x| !(x > 0.0)) || r.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::Domain("K-function samples must be positive".into()));
        }
        let lr = r.iter().map(|x| x.ln()).collect();
        let lk = k.iter().map(|x| x.ln()).collect();
        Ok(Self { model: KModel::Sampled(MonotoneCubic::new(lr, lk)?), source: source.into() })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn domain(&self) -> (f64, f64) {
        match &self.model {
            KModel::Sampled(p) => {
                let x = p.knots();
                (x[0].exp(), x[x.len() - 1].exp())
            }
            _ => R_SEARCH,
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radius must be > 0, got {r}")));
        }
        match &self.model {
            KModel::Coulomb { mass } => Ok(1.0 / (mass * r * r)),
            KModel::Dual { curve, shape } => Ok(k_function_from_curve(curve, shape, r)?.value),
            KModel::Sampled(p) => {
                let (lo, hi) = self.domain();
                if r < lo * (1.0 - 1e-12) || r > hi * (1.0 + 1e-12) {
                    return Err(Error::OutOfRange { value: r, lo, hi });
                }
                Ok(p.eval(r.ln()).exp())
            }
        }
    }

    pub fn sample(&self, r: &[f64]) -> Result<Vec<(f64, f64)>> {
        r.iter().map(|&x| Ok((x, self.eval(x)?))).collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W, r: &[f64]) -> Result<()> {
        write_xy(writer, &self.source, &self.sample(r)?)
    }
}

/// `min_r [K_h(r) + v f(r)]`. An upper bound on the ground-state energy of
/// `f = g(h)` when `g` is concave, a lower bound when `g` is convex, and
/// exact when `f = h`.
pub fn envelope_energy_bound(k: &KFunction, shape: &PotentialShape, v: f64) -> Result<Extremum> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("coupling must be > 0, got {v}")));
    }
    let (lo, hi) = k.domain();
    let e = minimize(|r| k.eval(r).map(|x| x + v * shape.value(r)).unwrap_or(f64::NAN), lo, hi)?;
    if e.at_boundary {
        return Err(Error::Unbracketed(format!(
            "envelope minimum sits at r = {} on the edge of [{lo}, {hi}]",
            e.arg
        )));
    }
    Ok(e)
}

fn write_xy<W: Write>(mut writer: W, source: &str, rows: &[(f64, f64)]) -> Result<()> {
    writeln!(writer, "# source: {source}")?;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "y"])?;
    for (x, y) in rows {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
