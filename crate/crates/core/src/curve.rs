//! Ground-state spectral curves `E = F(v)`.

use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::ShapeSpline;

/// Relative slack allowed when evaluating at the edge of a sampled hull, so
/// that products such as `10/3 * 2.0136` land inside `[.., 6.712]`.
const HULL_EDGE_TOL: f64 = 1e-12;

/// Relative tolerance on second differences before data is called non-concave.
const CONCAVITY_TOL: f64 = 1e-6;

/// Default search hull for analytic curves, above the critical coupling.
const ANALYTIC_HULL: (f64, f64) = (1e-6, 1e3);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Solver,
    Dataset,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalCoupling {
    pub value: f64,
    /// Extrapolated from data rather than computed from a shape.
    pub estimated: bool,
}

/// Closed-form ground-state curves of `-(1/m) u'' + v f u = E u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticCurve {
    /// `E = -m v^2/4`
    Coulomb { mass: f64 },
    /// `E = -(a^2/m) ((m v/a^2 - 1)/2)^2` for `f = -1/(exp(a r) - 1)`.
    Hulthen { a: f64, mass: f64 },
}

impl AnalyticCurve {
    pub fn critical(&self) -> f64 {
        match *self {
            AnalyticCurve::Coulomb { .. } => 0.0,
            AnalyticCurve::Hulthen { a, mass } => a * a / mass,
        }
    }

    pub fn eval(&self, v: f64) -> f64 {
        match *self {
            AnalyticCurve::Coulomb { mass } => -mass * v * v / 4.0,
            AnalyticCurve::Hulthen { a, mass } => {
                let k = (mass * v / (a * a) - 1.0) / 2.0;
                -(a * a / mass) * k * k
            }
        }
    }

    pub fn derivative(&self, v: f64) -> f64 {
        match *self {
            AnalyticCurve::Coulomb { mass } => -mass * v / 2.0,
            AnalyticCurve::Hulthen { a, mass } => -(mass * v / (a * a) - 1.0) / 2.0,
        }
    }

    pub fn second_derivative(&self) -> f64 {
        match *self {
            AnalyticCurve::Coulomb { mass } => -mass / 2.0,
            AnalyticCurve::Hulthen { a, mass } => -mass / (2.0 * a * a),
        }
    }
}

#[derive(Debug, Clone)]
enum Model {
    Analytic(AnalyticCurve),
    Spline(ShapeSpline),
}

/// Samples of `F(v)` with a concave, decreasing interpolant.
#[derive(Debug, Clone)]
pub struct SpectralCurve {
    couplings: Vec<f64>,
    energies: Vec<f64>,
    model: Model,
    hull: (f64, f64),
    critical: CriticalCoupling,
    provenance: Provenance,
}

impl SpectralCurve {
    /// Exact curve sampled at `couplings`; evaluable anywhere above `v1`.
    pub fn analytic(curve: AnalyticCurve, couplings: &[f64]) -> Result<Self> {
        let v1 = curve.critical();
        let lo = v1 + ANALYTIC_HULL.0 * v1.max(1.0);
        let mut cs = couplings.to_vec();
        cs.sort_by(f64::total_cmp);
        cs.dedup();
        if let Some(&bad) = cs.iter().find(|&&v| v <= v1) {
            return Err(Error::NoBoundState {
                coupling: bad,
                evidence: format!("analytic critical coupling is {v1}"),
            });
        }
        let energies = cs.iter().map(|&v| curve.eval(v)).collect();
        Ok(Self {
            couplings: cs,
            energies,
            model: Model::Analytic(curve),
            hull: (lo, ANALYTIC_HULL.1.max(lo * 10.0)),
            critical: CriticalCoupling { value: v1, estimated: false },
            provenance: Provenance::Analytic,
        })
    }

    pub fn coulomb(mass: f64, couplings: &[f64]) -> Result<Self> {
        Self::analytic(AnalyticCurve::Coulomb { mass }, couplings)
    }

    pub fn hulthen(a: f64, mass: f64, couplings: &[f64]) -> Result<Self> {
        Self::analytic(AnalyticCurve::Hulthen { a, mass }, couplings)
    }

    /// Interpolated curve through samples. Slopes `dF/dv` at the samples are
    /// used when known; otherwise they are estimated. When `critical` is
    /// `None` it is extrapolated from the first two samples and flagged.
    pub fn from_samples(
        couplings: Vec<f64>,
        energies: Vec<f64>,
        slopes: Option<Vec<f64>>,
        critical: Option<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        check_samples(&couplings, &energies)?;
        let critical = match critical {
            Some(v1) => CriticalCoupling { value: v1, estimated: false },
            None => CriticalCoupling {
                value: estimate_critical(&couplings, &energies, slopes.as_deref()),
                estimated: true,
            },
        };
        if let Some(&v) = couplings.iter().find(|&&v| v <= critical.value) {
            return Err(Error::Domain(format!(
                "sample at v = {v} is not above the critical coupling {}",
                critical.value
            )));
        }
        let spline = ShapeSpline::new(couplings.clone(), energies.clone(), slopes)?;
        let hull = spline.hull();
        Ok(Self {
            couplings,
            energies,
            model: Model::Spline(spline),
            hull,
            critical,
            provenance,
        })
    }

    /// Restricts the maximization hull of an analytic curve.
    pub fn with_hull(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || lo <= self.critical.value {
            return Err(Error::Domain(format!("invalid hull [{lo}, {hi}]")));
        }
        if let Model::Spline(_) = self.model {
            let (a, b) = self.hull;
            if lo < a || hi > b {
                return Err(Error::OutOfRange { value: if lo < a { lo } else { hi }, lo: a, hi: b });
            }
        }
        self.hull = (lo, hi);
        Ok(self)
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.couplings.iter().copied().zip(self.energies.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.couplings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.couplings.is_empty()
    }

    pub fn critical(&self) -> CriticalCoupling {
        self.critical
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn analytic_model(&self) -> Option<AnalyticCurve> {
        match self.model {
            Model::Analytic(a) => Some(a),
            Model::Spline(_) => None,
        }
    }

    /// Coupling range used by maximizations over `v`.
    pub fn hull(&self) -> (f64, f64) {
        self.hull
    }

    fn check(&self, v: f64) -> Result<f64> {
        match self.model {
            Model::Analytic(a) => {
                if v > a.critical() && v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::OutOfRange { value: v, lo: a.critical(), hi: f64::INFINITY })
                }
            }
            Model::Spline(_) => {
                let (lo, hi) = self.hull;
                if v >= lo && v <= hi {
                    Ok(v)
                } else if v < lo && v >= lo - HULL_EDGE_TOL * lo.abs() {
                    Ok(lo)
                } else if v > hi && v <= hi + HULL_EDGE_TOL * hi.abs() {
                    Ok(hi)
                } else {
                    Err(Error::OutOfRange { value: v, lo, hi })
                }
            }
        }
    }

    /// `F(v)`; outside the sampled range this is an error, never an
    /// extrapolation.
    pub fn eval(&self, v: f64) -> Result<f64> {
        let v = self.check(v)?;
        Ok(match &self.model {
            Model::Analytic(a) => a.eval(v),
            Model::Spline(s) => s.eval(v),
        })
    }

    /// `F'(v)`.
    pub fn derivative(&self, v: f64) -> Result<f64> {
        let v = self.check(v)?;
        Ok(match &self.model {
            Model::Analytic(a) => a.derivative(v),
            Model::Spline(s) => s.derivative(v),
        })
    }

    /// `F''(v)`; piecewise constant for interpolated curves.
    pub fn second_derivative(&self, v: f64) -> Result<f64> {
        let v = self.check(v)?;
        Ok(match &self.model {
            Model::Analytic(a) => a.second_derivative(),
            Model::Spline(s) => s.second_derivative(v),
        })
    }

    /// Reads a `v,E` CSV. Rows may come in any order.
    pub fn from_csv<R: Read>(reader: R, provenance: Provenance) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "v" || &headers[1] != "E" {
            return Err(Error::Parse(format!(
                "expected header 'v,E', got '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse(format!("bad number on data row {}", i + 1)))
            };
            rows.push((parse(0)?, parse(1)?));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (v, e) = rows.into_iter().unzip();
        Self::from_samples(v, e, None, None, provenance)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P, provenance: Provenance) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?, provenance)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["v", "E"])?;
        for (v, e) in self.samples() {
            w.write_record([v.to_string(), e.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_samples(v: &[f64], e: &[f64]) -> Result<()> {
    if v.len() != e.len() {
        return Err(Error::InsufficientData(format!(
            "{} couplings but {} energies",
            v.len(),
            e.len()
        )));
    }
    if v.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 samples, got {}",
            v.len()
        )));
    }
    if v.iter().chain(e).any(|x| !x.is_finite()) {
        return Err(Error::InsufficientData("non-finite sample".into()));
    }
    for i in 1..v.len() {
        if v[i] <= v[i - 1] || e[i] >= e[i - 1] {
            return Err(Error::NonMonotone { at: v[i] });
        }
    }
    for i in 1..v.len() - 1 {
        let d0 = (e[i] - e[i - 1]) / (v[i] - v[i - 1]);
        let d1 = (e[i + 1] - e[i]) / (v[i + 1] - v[i]);
        if d1 - d0 > CONCAVITY_TOL * (d0.abs() + d1.abs()) {
            return Err(Error::NonConcave {
                triple: [(v[i - 1], e[i - 1]), (v[i], e[i]), (v[i + 1], e[i + 1])],
            });
        }
    }
    Ok(())
}

/// Vertex of the parabola `-c (v - v1)^2` matching the first sample and its
/// slope, floored at 0. Exact for the Coulomb and Hulthén families.
fn estimate_critical(v: &[f64], e: &[f64], slopes: Option<&[f64]>) -> f64 {
    let d0 = match slopes {
        Some(s) => s[0],
        None => {
            // one-sided quadratic estimate, as used by the interpolant
            if v.len() >= 3 {
                let (h0, h1) = (v[1] - v[0], v[2] - v[1]);
                let (s0, s1) = ((e[1] - e[0]) / h0, (e[2] - e[1]) / h1);
                ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1)
            } else {
                (e[1] - e[0]) / (v[1] - v[0])
            }
        }
    };
    if d0 >= 0.0 {
        return 0.0;
    }
    (v[0] - 2.0 * e[0] / d0).max(0.0).min(v[0] * (1.0 - 1e-9))
}
