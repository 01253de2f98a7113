//! Bethe–Salpeter ground-state couplings for scalar constituents of mass 1
//! bound by exchange of a boson of mass `mu`, and the exchange-mass scaling
//! comparison built on them.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::curve::{Provenance, SpectralCurve};
use crate::eigensolver::ground_state;
use crate::error::{Error, Result};
use crate::potential::{scaled_energy, PotentialShape, ProblemSetup};

/// Binding energies shared by every series, as written.
pub const ENERGIES: [&str; 6] = ["-0.01", "-0.05", "-0.10", "-0.20", "-0.50", "-1.00"];

/// Constituent mass of the bundled data.
pub const CONSTITUENT_MASS: f64 = 1.0;

const LADDER_015: [Option<&str>; 6] = [Some("0.5716"), None, Some("1.437"), Some("2.100"), Some("3.611"), Some("5.315")];
const LADDER_05: [Option<&str>; 6] =
    [Some("1.440"), Some("2.01"), Some("2.498"), Some("3.251"), Some("4.901"), Some("6.712")];
const LCL_05: [Option<&str>; 6] = [Some("1.21"), Some("1.62"), Some("1.93"), Some("2.42"), Some("3.47"), Some("4.56")];
const YUKAWA_05: [Option<&str>; 6] =
    [Some("1.034"), Some("1.285"), Some("1.532"), Some("1.848"), Some("2.204"), Some("2.918")];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SeriesId {
    #[serde(rename = "ladder-0.15")]
    Ladder015,
    #[serde(rename = "ladder-0.5")]
    Ladder05,
    #[serde(rename = "lcl-0.5")]
    LadderCrossLadder05,
    /// Non-relativistic Yukawa couplings at the same energies.
    #[serde(rename = "yukawa-0.5")]
    Yukawa05,
}

impl SeriesId {
    pub const ALL: [SeriesId; 4] = [Self::Ladder015, Self::Ladder05, Self::LadderCrossLadder05, Self::Yukawa05];

    /// The three Bethe–Salpeter series.
    pub const BETHE_SALPETER: [SeriesId; 3] = [Self::Ladder015, Self::Ladder05, Self::LadderCrossLadder05];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ladder015 => "ladder-0.15",
            Self::Ladder05 => "ladder-0.5",
            Self::LadderCrossLadder05 => "lcl-0.5",
            Self::Yukawa05 => "yukawa-0.5",
        }
    }

    pub fn mu(self) -> f64 {
        match self {
            Self::Ladder015 => 0.15,
            _ => 0.5,
        }
    }

    fn mu_str(self) -> &'static str {
        match self {
            Self::Ladder015 => "0.15",
            _ => "0.5",
        }
    }

    fn raw(self) -> &'static [Option<&'static str>; 6] {
        match self {
            Self::Ladder015 => &LADDER_015,
            Self::Ladder05 => &LADDER_05,
            Self::LadderCrossLadder05 => &LCL_05,
            Self::Yukawa05 => &YUKAWA_05,
        }
    }
}

impl fmt::Display for SeriesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeriesId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown series `{s}` (expected ladder-0.15, ladder-0.5, lcl-0.5 or yukawa-0.5)")))
    }
}

/// A table cell: a coupling, or the explicit absence of one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entry {
    Value(f64),
    Missing,
}

impl Entry {
    pub fn value(self) -> Option<f64> {
        match self {
            Entry::Value(v) => Some(v),
            Entry::Missing => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BSDataset {
    mass: f64,
}

impl Default for BSDataset {
    fn default() -> Self {
        builtin_dataset()
    }
}

pub fn builtin_dataset() -> BSDataset {
    BSDataset { mass: CONSTITUENT_MASS }
}

fn parse(s: &str) -> f64 {
    s.parse().expect("embedded decimal")
}

impl BSDataset {
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn energies(&self) -> [f64; 6] {
        ENERGIES.map(parse)
    }

    /// Row-aligned entries of a series.
    pub fn entries(&self, id: SeriesId) -> Vec<(f64, Entry)> {
        ENERGIES
            .iter()
            .zip(id.raw())
            .map(|(e, v)| (parse(e), v.map_or(Entry::Missing, |v| Entry::Value(parse(v)))))
            .collect()
    }

    /// `(v, E)` pairs of a series, missing rows skipped.
    pub fn points(&self, id: SeriesId) -> Vec<(f64, f64)> {
        self.entries(id).into_iter().filter_map(|(e, v)| v.value().map(|v| (v, e))).collect()
    }

    /// Coupling at a tabulated energy.
    pub fn lookup(&self, id: SeriesId, energy: f64) -> Result<Entry> {
        self.entries(id)
            .into_iter()
            .find(|(e, _)| (e - energy).abs() < 1e-12)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Domain(format!("no row at E = {energy}")))
    }

    pub fn curve(&self, id: SeriesId) -> Result<SpectralCurve> {
        curve_from_points(&self.points(id))
    }

    /// SHA-256 over the embedded decimals in export order.
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        for id in SeriesId::ALL {
            for (e, v) in ENERGIES.iter().zip(id.raw()) {
                hasher.update(format!("{},{},{},{}\n", id.name(), id.mu_str(), v.unwrap_or(""), e));
            }
        }
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// CSV `series,mu,v,E` with the decimals exactly as embedded; a missing
    /// row has an empty `v`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["series", "mu", "v", "E"])?;
        for id in SeriesId::ALL {
            for (e, v) in ENERGIES.iter().zip(id.raw()) {
                w.write_record([id.name(), id.mu_str(), v.unwrap_or(""), e])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// One series read from a `series,mu,v,E` file.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesData {
    pub name: String,
    pub mu: f64,
    /// `(v, E)` pairs; rows with an empty `v` are dropped.
    pub points: Vec<(f64, f64)>,
}

/// Reads `series,mu,v,E` data, grouping rows by series in file order.
pub fn read_series_csv<R: Read>(reader: R) -> Result<Vec<SeriesData>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["series", "mu", "v", "E"] {
        return Err(Error::Parse(format!("expected header `series,mu,v,E`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out: Vec<SeriesData> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse().map_err(|_| Error::Parse(format!("row {}: bad number `{}`", line + 2, &rec[i])))
        };
        let name = rec[0].to_string();
        let mu = num(1)?;
        let idx = match out.iter().position(|s| s.name == name) {
            Some(i) => i,
            None => {
                out.push(SeriesData { name, mu, points: Vec::new() });
                out.len() - 1
            }
        };
        if !rec[2].is_empty() {
            out[idx].points.push((num(2)?, num(3)?));
        }
    }
    Ok(out)
}

/// Concave monotone interpolated curve through discrete `(v, E)` points,
/// with the critical coupling extrapolated and flagged as an estimate.
pub fn curve_from_points(points: &[(f64, f64)]) -> Result<SpectralCurve> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!("need at least 3 points, got {}", points.len())));
    }
    let (v, e): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    SpectralCurve::from_samples(v, e, None, None, Provenance::Dataset)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowOrigin {
    /// A reference point carried to the observed exchange mass exactly.
    Mapped,
    /// An observed point compared with the interpolated reference curve.
    Observed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub origin: RowOrigin,
    pub v: f64,
    pub e_actual: Option<f64>,
    pub e_scaled: Option<f64>,
    pub discrepancy: Option<f64>,
    /// Whether both energies were available without leaving a data hull.
    pub in_hull: bool,
}

impl ScalingRow {
    fn new(origin: RowOrigin, v: f64, e_actual: Option<f64>, e_scaled: Option<f64>) -> Self {
        let discrepancy = e_actual.zip(e_scaled).map(|(a, s)| s - a);
        Self { origin, v, e_actual, e_scaled, discrepancy, in_hull: discrepancy.is_some() }
    }
}

/// Compares `observed` points (exchange mass `mu_obs`) with
/// `E(v) = F_ref(R v)/R^2`, `R = mu_ref/mu_obs`, built from the `reference`
/// points, both ways: each reference point mapped to `(v/R, E/R^2)`, and each
/// observed point against the interpolated reference curve.
pub fn compare_scaling(
    reference: &[(f64, f64)],
    observed: &[(f64, f64)],
    mu_ref: f64,
    mu_obs: f64,
) -> Result<Vec<ScalingRow>> {
    if !(mu_ref > 0.0 && mu_obs > 0.0 && mu_ref.is_finite() && mu_obs.is_finite()) {
        return Err(Error::Domain(format!("exchange masses must be > 0, got {mu_ref}, {mu_obs}")));
    }
    let ratio = mu_ref / mu_obs;
    // multiplying by mu_obs/mu_ref keeps decimal inputs exact where dividing by R would not
    let q = mu_obs / mu_ref;
    let ref_curve = curve_from_points(reference)?;
    let obs_curve = curve_from_points(observed)?;
    let mut rows = Vec::with_capacity(reference.len() + observed.len());
    for &(v, e) in reference {
        let vm = v * q;
        rows.push(ScalingRow::new(RowOrigin::Mapped, vm, obs_curve.eval(vm).ok(), Some(e * q * q)));
    }
    for &(v, e) in observed {
        rows.push(ScalingRow::new(RowOrigin::Observed, v, Some(e), scaled_energy(&ref_curve, ratio, v).ok()));
    }
    if rows.iter().all(|r| !r.in_hull) {
        return Err(Error::InsufficientData("the scaled reference and the observed data do not overlap".into()));
    }
    Ok(rows)
}

/// The bundled comparison: ladder `mu = 0.5` as reference for ladder
/// `mu = 0.15`, ratio 10/3.
pub fn scaling_comparison(dataset: &BSDataset) -> Result<Vec<ScalingRow>> {
    compare_scaling(
        &dataset.points(SeriesId::Ladder05),
        &dataset.points(SeriesId::Ladder015),
        SeriesId::Ladder05.mu(),
        SeriesId::Ladder015.mu(),
    )
}

/// Solver-generated check of the scaling identity for Yukawa shapes: the
/// ground state at `mu_obs` and coupling `v` against the one at `mu_ref` and
/// `R v`, scaled by `1/R^2`.
pub fn synthetic_scaling(mu_ref: f64, mu_obs: f64, couplings: &[f64], mass: f64) -> Result<Vec<ScalingRow>> {
    let ratio = mu_ref / mu_obs;
    let reference = PotentialShape::yukawa(mu_ref)?;
    let observed = PotentialShape::yukawa(mu_obs)?;
    couplings
        .par_iter()
        .map(|&v| {
            let actual = ground_state(&observed, ProblemSetup::new(mass, v)?)?.energy;
            let scaled = ground_state(&reference, ProblemSetup::new(mass, ratio * v)?)?.energy / (ratio * ratio);
            Ok(ScalingRow::new(RowOrigin::Observed, v, Some(actual), Some(scaled)))
        })
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |x| x.to_string())
}

/// CSV `origin,v,E_actual,E_scaled,discrepancy,in_hull`; unavailable values
/// are empty.
pub fn write_scaling_csv<W: Write>(rows: &[ScalingRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["origin", "v", "E_actual", "E_scaled", "discrepancy", "in_hull"])?;
    for r in rows {
        let origin = match r.origin {
            RowOrigin::Mapped => "mapped",
            RowOrigin::Observed => "observed",
        };
        w.write_record([
            origin.to_string(),
            r.v.to_string(),
            opt(r.e_actual),
            opt(r.e_scaled),
            opt(r.discrepancy),
            r.in_hull.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups() {
        let d = builtin_dataset();
        assert_eq!(d.lookup(SeriesId::Ladder05, -1.0).unwrap(), Entry::Value(6.712));
        assert_eq!(d.lookup(SeriesId::LadderCrossLadder05, -0.2).unwrap(), Entry::Value(2.42));
        assert_eq!(d.lookup(SeriesId::Ladder015, -0.05).unwrap(), Entry::Missing);
        assert!(d.lookup(SeriesId::Ladder05, -0.3).is_err());
    }

    #[test]
    fn checksum_is_pinned() {
        assert_eq!(
            builtin_dataset().checksum(),
            "e18feafa5fac1a679219b7d91f903e479553c4fab1a783f6f478d14bc8b17dda"
        );
    }

    #[test]
    fn yukawa_closer_to_crossed_ladder() {
        let d = builtin_dataset();
        let y = d.points(SeriesId::Yukawa05);
        let l = d.points(SeriesId::Ladder05);
        let c = d.points(SeriesId::LadderCrossLadder05);
        for i in 0..6 {
            assert!((y[i].0 - c[i].0).abs() < (y[i].0 - l[i].0).abs(), "row {i}");
        }
    }

    #[test]
    fn series_are_monotone() {
        let d = builtin_dataset();
        for id in SeriesId::ALL {
            let p = d.points(id);
            assert!(p.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1), "{id}");
        }
        assert_eq!(d.points(SeriesId::Ladder015).len(), 5);
    }

    #[test]
    fn series_names_round_trip() {
        for id in SeriesId::ALL {
            assert_eq!(id.name().parse::<SeriesId>().unwrap(), id);
        }
        assert!("ladder".parse::<SeriesId>().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let d = builtin_dataset();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("series,mu,v,E\n"));
        assert!(text.contains("ladder-0.15,0.15,,-0.05\n"));
        assert!(text.contains("ladder-0.5,0.5,1.440,-0.01\n"));
        let back = read_series_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 4);
        for (s, id) in back.iter().zip(SeriesId::ALL) {
            assert_eq!(s.name, id.name());
            assert_eq!(s.points, d.points(id));
        }
    }

    #[test]
    fn bundled_scaling_rows() {
        let rows = scaling_comparison(&builtin_dataset()).unwrap();
        let top = rows.iter().find(|r| r.origin == RowOrigin::Mapped && r.v == 2.0136).unwrap();
        assert_eq!(top.e_scaled, Some(-0.09));
        assert!(top.in_hull);
        // 10/3 * 2.1 = 7 lies beyond the mu = 0.5 data
        let out = rows.iter().find(|r| r.origin == RowOrigin::Observed && r.v == 2.1).unwrap();
        assert!(!out.in_hull && out.e_scaled.is_none());
    }

    #[test]
    fn identity_scaling_has_no_discrepancy() {
        let p = builtin_dataset().points(SeriesId::Ladder05);
        let rows = compare_scaling(&p, &p, 0.5, 0.5).unwrap();
        assert!(rows.iter().all(|r| r.discrepancy.unwrap().abs() < 1e-12));
    }

    #[test]
    fn small_inputs_rejected() {
        assert!(matches!(curve_from_points(&[(1.0, -0.25), (2.0, -1.0)]), Err(Error::InsufficientData(_))));
    }
}
