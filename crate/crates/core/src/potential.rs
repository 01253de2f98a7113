//! Radial potential shapes `f(r)`, the problem setup, and the coupling and
//! exchange-mass relations between models.
//!
//! All built-in shapes are attractive, monotone non-decreasing and at most
//! Coulomb-singular at the origin: `f(r) = g(r)/r` with `g(0) < 0` and
//! `g' >= 0`. Inside that class the ground-state curve `E = F(v)` fixes the
//! shape uniquely, which is what makes the inversion well posed.

use std::f64::consts::PI;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::curve::SpectralCurve;
use crate::error::{Error, Result};
use crate::numerics::MonotoneCubic;

/// Below this radius the Hulthén shape is evaluated from its series.
const HULTHEN_SERIES_RADIUS: f64 = 1e-4;

/// Relative noise level below which tabulated `r f` counts as non-decreasing
/// and a tail counts as unscreened.
const TABLE_NOISE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityClass {
    /// `r f(r) -> g(0) < 0` as `r -> 0`.
    Coulombic,
    Bounded,
}

#[derive(Debug, Clone)]
pub enum PotentialShape {
    /// `-1/r`
    Coulomb,
    /// `-exp(-mu r)/r`
    Yukawa { mu: f64 },
    /// `-1/(exp(a r) - 1)`
    Hulthen { a: f64 },
    Tabulated(TabulatedShape),
}

impl PotentialShape {
    pub fn yukawa(mu: f64) -> Result<Self> {
        let s = PotentialShape::Yukawa { mu };
        s.validate()?;
        Ok(s)
    }

    pub fn hulthen(a: f64) -> Result<Self> {
        let s = PotentialShape::Hulthen { a };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialShape::Yukawa { mu } if !(mu > 0.0 && mu.is_finite()) => Err(
                Error::InvalidShape(format!("yukawa exchange mass must be > 0, got {mu}")),
            ),
            PotentialShape::Hulthen { a } if !(a > 0.0 && a.is_finite()) => Err(
                Error::InvalidShape(format!("hulthen screening must be > 0, got {a}")),
            ),
            PotentialShape::Tabulated(ref t) if t.r.is_empty() => {
                Err(Error::InvalidShape("tabulated shape has an empty table".into()))
            }
            _ => Ok(()),
        }
    }

    /// `f(r)` for `r > 0`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("radius must be > 0, got {r}")));
        }
        self.validate()?;
        Ok(self.value(r))
    }

    /// Unchecked evaluation; `r > 0` and a valid shape are assumed.
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            PotentialShape::Coulomb => -1.0 / r,
            PotentialShape::Yukawa { mu } => -(-mu * r).exp() / r,
            PotentialShape::Hulthen { a } => {
                let x = a * r;
                if x < HULTHEN_SERIES_RADIUS {
                    -1.0 / x + 0.5 - x / 12.0
                } else {
                    -1.0 / x.exp_m1()
                }
            }
            PotentialShape::Tabulated(ref t) => t.value(r),
        }
    }

    pub fn singularity_class(&self) -> SingularityClass {
        match self {
            PotentialShape::Tabulated(t) => t.singularity_class(),
            _ => SingularityClass::Coulombic,
        }
    }

    /// Coefficients of `r f(r) = g0 + g1 r + O(r^2)` at the origin. Bounded
    /// shapes report `g0 = 0` and `g1 = f(0)`.
    pub fn origin_expansion(&self) -> (f64, f64) {
        match *self {
            PotentialShape::Coulomb => (-1.0, 0.0),
            PotentialShape::Yukawa { mu } => (-1.0, mu),
            PotentialShape::Hulthen { a } => (-1.0 / a, 0.5),
            PotentialShape::Tabulated(ref t) => match t.core {
                Core::Coulombic { g0, g1 } => (g0, g1),
                Core::Bounded { f0 } => (0.0, f0),
            },
        }
    }

    pub fn is_attractive_somewhere(&self) -> bool {
        match self {
            PotentialShape::Tabulated(t) => {
                matches!(t.core, Core::Coulombic { .. }) || t.f.iter().any(|&v| v < 0.0)
            }
            _ => true,
        }
    }

    /// Whether the tail falls off like `1/r` (infinitely many bound states,
    /// zero critical coupling).
    pub fn has_coulomb_tail(&self) -> bool {
        match self {
            PotentialShape::Coulomb => true,
            PotentialShape::Tabulated(t) => {
                matches!(t.tail, Tail::Screened { beta, .. } if beta == 0.0)
            }
            _ => false,
        }
    }

    /// Radius beyond which the shape is effectively zero (or constant).
    pub fn range_scale(&self) -> f64 {
        match *self {
            PotentialShape::Coulomb => f64::INFINITY,
            PotentialShape::Yukawa { mu } => 1.0 / mu,
            PotentialShape::Hulthen { a } => 1.0 / a,
            PotentialShape::Tabulated(ref t) => {
                let last = t.r[t.r.len() - 1];
                match t.tail {
                    Tail::Screened { beta, .. } if beta > 0.0 => last + 1.0 / beta,
                    Tail::Screened { .. } => f64::INFINITY,
                    Tail::Hold(_) => last,
                }
            }
        }
    }

    /// Tabulates the shape on the given knots.
    pub fn tabulate(&self, knots: &[f64]) -> Result<TabulatedShape> {
        let f = knots.iter().map(|&r| self.eval(r)).collect::<Result<Vec<_>>>()?;
        let class = self.singularity_class();
        TabulatedShape::with_class(knots.to_vec(), f, Some(class))
    }

    /// Parses the `name[:key=value,...]` mini-grammar: `coulomb`,
    /// `yukawa:mu=0.5`, `hulthen:a=1`, `table:path.csv`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (spec.trim(), ""),
        };
        if name.eq_ignore_ascii_case("table") {
            if rest.is_empty() {
                return Err(Error::Parse("table shape needs a path: table:path.csv".into()));
            }
            return Ok(PotentialShape::Tabulated(TabulatedShape::from_csv_path(rest)?));
        }
        let mut params = Vec::new();
        for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number in '{kv}'")))?;
            params.push((k.trim().to_ascii_lowercase(), v));
        }
        let get = |key: &str, default: Option<f64>| -> Result<f64> {
            params
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .or(default)
                .ok_or_else(|| Error::Parse(format!("shape '{name}' needs parameter {key}")))
        };
        let shape = match name.to_ascii_lowercase().as_str() {
            "coulomb" => PotentialShape::Coulomb,
            "yukawa" => PotentialShape::Yukawa { mu: get("mu", None)? },
            "hulthen" => PotentialShape::Hulthen { a: get("a", Some(1.0))? },
            other => return Err(Error::Parse(format!("unknown shape '{other}'"))),
        };
        for (k, _) in &params {
            let known = matches!((&shape, k.as_str()), (PotentialShape::Yukawa { .. }, "mu")
                | (PotentialShape::Hulthen { .. }, "a"));
            if !known {
                return Err(Error::Parse(format!("unknown parameter '{k}' for '{name}'")));
            }
        }
        shape.validate()?;
        Ok(shape)
    }
}

impl FromStr for PotentialShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PotentialShape::from_spec(s)
    }
}

impl fmt::Display for PotentialShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialShape::Coulomb => write!(f, "coulomb"),
            PotentialShape::Yukawa { mu } => write!(f, "yukawa:mu={mu}"),
            PotentialShape::Hulthen { a } => write!(f, "hulthen:a={a}"),
            PotentialShape::Tabulated(t) => write!(f, "table[{} knots]", t.r.len()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Core {
    /// `f(r) = (g0 + g1 r)/r` below the first knot.
    Coulombic { g0: f64, g1: f64 },
    /// `f(r) = f0` below the first knot.
    Bounded { f0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// `f(r) = -c exp(-beta r)/r` beyond the last knot.
    Screened { c: f64, beta: f64 },
    /// Last tabulated value held constant.
    Hold(f64),
}

#[derive(Debug, Clone)]
enum Interp {
    // g = r f as a function of ln r; used when g is non-positive and
    // non-decreasing, which keeps f monotone and resolves the 1/r core
    Product(MonotoneCubic),
    Direct(MonotoneCubic),
}

/// A shape known on strictly increasing knots, interpolated monotonically.
#[derive(Debug, Clone)]
pub struct TabulatedShape {
    r: Vec<f64>,
    f: Vec<f64>,
    interp: Interp,
    core: Core,
    tail: Tail,
}

impl TabulatedShape {
    pub fn new(r: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        Self::with_class(r, f, None)
    }

    /// Builds a table, inferring the origin behaviour when `class` is `None`.
    pub fn with_class(r: Vec<f64>, f: Vec<f64>, class: Option<SingularityClass>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidShape("tabulated shape has an empty table".into()));
        }
        if r.len() != f.len() {
            return Err(Error::InvalidShape(format!(
                "{} radii but {} values",
                r.len(),
                f.len()
            )));
        }
        if r.len() < 2 {
            return Err(Error::InvalidShape("tabulated shape needs at least two knots".into()));
        }
        if r.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape("non-finite table entry".into()));
        }
        if r[0] <= 0.0 {
            return Err(Error::InvalidShape("table radii must be > 0".into()));
        }
        if let Some(w) = r.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidShape(format!(
                "radii must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }

        let n = r.len();
        let g: Vec<f64> = r.iter().zip(&f).map(|(a, b)| a * b).collect();
        let x: Vec<f64> = r.iter().map(|v| v.ln()).collect();

        let g_scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let product = g.iter().all(|&v| v <= 0.0)
            && g.windows(2).all(|w| w[1] >= w[0] - TABLE_NOISE * g_scale);
        let interp = if product {
            Interp::Product(MonotoneCubic::new(x, g.clone())?)
        } else {
            Interp::Direct(MonotoneCubic::new(x, f.clone())?)
        };

        let raw_slope = (g[1] - g[0]) / (r[1] - r[0]);
        let g0_raw = g[0] - raw_slope * r[0];
        let coulombic = match class {
            Some(c) => c == SingularityClass::Coulombic,
            None => g0_raw < 0.0 && g0_raw.abs() > 0.5 * g[0].abs(),
        };
        let core = if coulombic {
            let g1 = raw_slope.max(0.0);
            let g0 = g[0] - g1 * r[0];
            if g0 >= 0.0 {
                return Err(Error::InvalidShape(
                    "table declared coulombic but r f(r) does not tend to a negative limit"
                        .into(),
                ));
            }
            Core::Coulombic { g0, g1 }
        } else {
            Core::Bounded { f0: f[0] }
        };

        let (fa, fb) = (f[n - 2], f[n - 1]);
        let tail = if fa < fb && fb < 0.0 {
            let ratio = (g[n - 2] / g[n - 1]).ln();
            let beta = if ratio < TABLE_NOISE { 0.0 } else { ratio / (r[n - 1] - r[n - 2]) };
            let c = -g[n - 1] * (beta * r[n - 1]).exp();
            Tail::Screened { c, beta }
        } else {
            Tail::Hold(fb)
        };

        Ok(Self { r, f, interp, core, tail })
    }

    pub fn knots(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn core(&self) -> Core {
        self.core
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn singularity_class(&self) -> SingularityClass {
        match self.core {
            Core::Coulombic { .. } => SingularityClass::Coulombic,
            Core::Bounded { .. } => SingularityClass::Bounded,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        let n = self.r.len();
        if r < self.r[0] {
            return match self.core {
                Core::Coulombic { g0, g1 } => (g0 + g1 * r) / r,
                Core::Bounded { f0 } => f0,
            };
        }
        if r > self.r[n - 1] {
            return match self.tail {
                Tail::Screened { c, beta } => -c * (-beta * r).exp() / r,
                Tail::Hold(v) => v,
            };
        }
        match &self.interp {
            Interp::Product(p) => p.eval(r.ln()) / r,
            Interp::Direct(p) => p.eval(r.ln()),
        }
    }

    /// Reads a two-column `r,f` CSV with exactly that header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "f" {
            return Err(Error::Parse(format!(
                "expected header 'r,f', got '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut r = Vec::new();
        let mut f = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse(format!("bad number on data row {}", line + 1)))
            };
            r.push(parse(0)?);
            f.push(parse(1)?);
        }
        Self::new(r, f)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["r", "f"])?;
        for (r, f) in self.r.iter().zip(&self.f) {
            w.write_record([r.to_string(), f.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSetup {
    /// Kinetic coefficient is `1/mass`: `-(1/m) u'' + v f u = E u`.
    pub mass: f64,
    pub coupling: f64,
}

impl ProblemSetup {
    pub fn new(mass: f64, coupling: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!("mass must be > 0, got {mass}")));
        }
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(Error::Domain(format!("coupling must be > 0, got {coupling}")));
        }
        Ok(Self { mass, coupling })
    }

    pub fn with_coupling(self, coupling: f64) -> Result<Self> {
        Self::new(self.mass, coupling)
    }
}

/// `v = g1 g2 / (16 pi m1 m2)` for one-boson exchange between scalars.
pub fn coupling_from_field_theory(g1: f64, g2: f64, m1: f64, m2: f64) -> Result<f64> {
    if !(m1 > 0.0 && m2 > 0.0) {
        return Err(Error::Domain(format!("masses must be > 0, got {m1}, {m2}")));
    }
    Ok(g1 * g2 / (16.0 * PI * m1 * m2))
}

/// Ground-state energy at exchange mass `mu2` predicted from the curve `F1`
/// measured at `mu1`, with `ratio = mu1/mu2`: `E2(v) = F1(ratio v)/ratio^2`.
///
/// Exact for every shape of the form `f(mu r)/r`; the curve is never
/// extrapolated beyond its domain.
pub fn scaled_energy(curve: &SpectralCurve, ratio: f64, v: f64) -> Result<f64> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::Domain(format!("mass ratio must be > 0, got {ratio}")));
    }
    Ok(curve.eval(ratio * v)? / (ratio * ratio))
}

/// Energy of `-(1/m) Laplacian + v f(mu r)/r` from the reference curve of
/// `-Laplacian + v f(r)/r`: `E = (mu^2/m) F(m v/mu)`.
///
/// With a `-Laplacian/(2 m')` kinetic term this is the familiar
/// `(mu^2/2m') F(2 m' v/mu)`; here `m = 2 m'`.
pub fn exchange_mass_energy(reference: &SpectralCurve, mu: f64, mass: f64, v: f64) -> Result<f64> {
    if !(mu > 0.0 && mass > 0.0) {
        return Err(Error::Domain(format!("need mu > 0 and m > 0, got {mu}, {mass}")));
    }
    Ok(mu * mu / mass * reference.eval(mass * v / mu)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn analytic_values() {
        assert_eq!(PotentialShape::Coulomb.eval(2.0).unwrap(), -0.5);
        let y = PotentialShape::yukawa(0.5).unwrap();
        assert_relative_eq!(y.eval(1.0).unwrap(), -(-0.5f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(y.eval(1.0).unwrap(), -0.606531, epsilon = 1e-6);
        let h = PotentialShape::hulthen(1.0).unwrap();
        assert_relative_eq!(h.eval(1.0).unwrap(), -0.581977, epsilon = 1e-6);
        assert_relative_eq!(
            h.eval(1.0).unwrap(),
            -1.0 / (std::f64::consts::E - 1.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn hulthen_near_origin_matches_series() {
        let h = PotentialShape::hulthen(1.0).unwrap();
        for r in [1e-9, 1e-6, 5e-5, 2e-4, 1e-3] {
            let series = -1.0 / r + 0.5 - r / 12.0;
            assert!((h.value(r) - series).abs() < 1e-9, "r = {r}");
        }
        // continuity across the switch
        let below = h.value(HULTHEN_SERIES_RADIUS * (1.0 - 1e-12));
        let above = h.value(HULTHEN_SERIES_RADIUS * (1.0 + 1e-12));
        assert!((below - above).abs() < 1e-6);
    }

    #[test]
    fn coulombic_limit() {
        for shape in [PotentialShape::yukawa(0.5).unwrap(), PotentialShape::hulthen(1.0).unwrap()] {
            for r in [1e-7, 5e-7, 9e-7] {
                assert!((r * shape.value(r) + 1.0).abs() < 1e-5, "{shape} at {r}");
            }
        }
    }

    #[test]
    fn decay_at_infinity() {
        assert!(PotentialShape::yukawa(0.5).unwrap().value(200.0).abs() < 1e-40);
        assert!(PotentialShape::hulthen(1.0).unwrap().value(200.0).abs() < 1e-80);
        let c = PotentialShape::Coulomb.value(1e8);
        assert!(c < 0.0 && c > -1e-7);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(PotentialShape::Coulomb.eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(PotentialShape::Coulomb.eval(-1.0), Err(Error::Domain(_))));
        assert!(PotentialShape::yukawa(0.0).is_err());
        assert!(matches!(
            TabulatedShape::new(vec![], vec![]),
            Err(Error::InvalidShape(_))
        ));
    }

    #[test]
    fn coupling_map() {
        let g = (16.0 * PI).sqrt();
        assert_relative_eq!(coupling_from_field_theory(g, g, 1.0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            coupling_from_field_theory(2.0, 3.0, 1.0, 2.0).unwrap(),
            0.0596831,
            epsilon = 1e-7
        );
        let (g, m) = (3.0, 1.7);
        assert_relative_eq!(
            coupling_from_field_theory(g, g, m, m).unwrap(),
            g * g / (16.0 * PI * m * m),
            epsilon = 1e-15
        );
        assert!(coupling_from_field_theory(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(coupling_from_field_theory(1.0, 1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn spec_grammar() {
        assert!(matches!(PotentialShape::from_spec("coulomb").unwrap(), PotentialShape::Coulomb));
        assert!(matches!(
            PotentialShape::from_spec("yukawa:mu=0.5").unwrap(),
            PotentialShape::Yukawa { mu } if mu == 0.5
        ));
        assert!(matches!(
            PotentialShape::from_spec("hulthen").unwrap(),
            PotentialShape::Hulthen { a } if a == 1.0
        ));
        assert!(PotentialShape::from_spec("yukawa").is_err());
        assert!(PotentialShape::from_spec("yukawa:mu=0.5,x=2").is_err());
        assert!(PotentialShape::from_spec("square").is_err());
        assert!(PotentialShape::from_spec("table:").is_err());
    }

    #[test]
    fn tabulated_coulomb_is_exact() {
        let knots: Vec<f64> = (0..60).map(|i| 0.05 * (200f64).powf(i as f64 / 59.0)).collect();
        let t = PotentialShape::Coulomb.tabulate(&knots).unwrap();
        assert_eq!(t.singularity_class(), SingularityClass::Coulombic);
        for r in [1e-4, 0.01, 0.07, 0.33, 1.0, 4.2, 9.99, 30.0, 500.0] {
            assert_relative_eq!(t.value(r), -1.0 / r, max_relative = 1e-12);
        }
    }

    #[test]
    fn tabulated_yukawa_tail_and_core() {
        let knots: Vec<f64> = (0..60).map(|i| 0.05 * (200f64).powf(i as f64 / 59.0)).collect();
        let y = PotentialShape::yukawa(0.5).unwrap();
        let t = y.tabulate(&knots).unwrap();
        match t.tail() {
            Tail::Screened { beta, .. } => assert!((beta - 0.5).abs() < 1e-10),
            other => panic!("unexpected tail {other:?}"),
        }
        for r in [12.0, 40.0] {
            assert_relative_eq!(t.value(r), y.value(r), max_relative = 1e-9);
        }
        for r in [0.1, 0.5, 2.0, 7.0] {
            assert_relative_eq!(t.value(r), y.value(r), max_relative = 1e-4);
        }
        let (g0, _) = PotentialShape::Tabulated(t.clone()).origin_expansion();
        assert!((g0 + 1.0).abs() < 2e-3);
    }

    #[test]
    fn bounded_table_is_detected() {
        let r: Vec<f64> = (1..30).map(|i| 0.1 * i as f64).collect();
        let f: Vec<f64> = r.iter().map(|x| -1.0 + 0.2 * x).collect();
        let t = TabulatedShape::new(r, f).unwrap();
        assert_eq!(t.singularity_class(), SingularityClass::Bounded);
        assert_eq!(t.value(0.01), -1.0 + 0.02);
    }

    #[test]
    fn csv_round_trip_and_header() {
        let text = "r,f\n0.5,-2\n1,-1\n2,-0.5\n";
        let t = TabulatedShape::from_csv(text.as_bytes()).unwrap();
        assert_eq!(t.knots(), &[0.5, 1.0, 2.0]);
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
        assert!(TabulatedShape::from_csv("x,y\n1,2\n2,3\n".as_bytes()).is_err());
        assert!(TabulatedShape::from_csv("r,f\n1,2\n1,3\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn builtin_shapes_are_monotone(mu in 0.01f64..5.0, a in 0.1f64..5.0,
                                       r1 in 1e-6f64..50.0, dr in 1e-6f64..50.0) {
            let r2 = r1 + dr;
            for s in [PotentialShape::Coulomb, PotentialShape::Yukawa { mu }, PotentialShape::Hulthen { a }] {
                prop_assert!(s.value(r1) <= s.value(r2), "{} at {} {}", s, r1, r2);
            }
        }

        #[test]
        fn tabulated_interpolant_is_monotone(mu in 0.05f64..3.0, r1 in 0.01f64..30.0, dr in 1e-4f64..5.0) {
            let knots: Vec<f64> = (0..25).map(|i| 0.05 * (200f64).powf(i as f64 / 24.0)).collect();
            let t = PotentialShape::Yukawa { mu }.tabulate(&knots).unwrap();
            prop_assert!(t.value(r1) <= t.value(r1 + dr) + 1e-15);
        }
    }
}
