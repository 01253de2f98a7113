//! Reconstruction of a potential shape from its ground-state curve.
//!
//! Each stage forward-solves the current iterate `f[n]` to get `F[n]`, then
//!
//! ```text
//! K[n](r)   = max_u [F[n](u) - u f[n](r)]
//! f[n+1](r) = max_v [(F(v) - K[n](r))/v]
//! ```
//!
//! on a fixed radial grid. Both maximizations run over the coupling hull of
//! the target data. Where `f[n](r)` lies outside the slope range of `F[n]`
//! the maximizers sit on the hull ends and the update reduces to a constant
//! shift, so a shape that already reproduces the target is left unchanged.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{Provenance, SpectralCurve};
use crate::eigensolver::{critical_coupling, ground_state_with, GroundState, SolverOptions};
use crate::error::{Error, Result};
use crate::numerics::maximize;
use crate::potential::{PotentialShape, ProblemSetup, SingularityClass, TabulatedShape};

/// Largest decrease between neighbouring knots that is treated as rounding
/// noise and projected away.
const REPAIR_LIMIT: f64 = 1e-9;
/// Couplings closer than this factor above an iterate's critical coupling are
/// skipped when they cannot be resolved.
const THRESHOLD_GAP: f64 = 1.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    knots: Vec<f64>,
}

impl RadialGrid {
    /// `n` logarithmically spaced knots on `[r_min, r_max]`.
    pub fn log(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) || n < 2 {
            return Err(Error::Domain(format!(
                "log grid needs 0 < r_min < r_max and n >= 2, got [{r_min}, {r_max}], n = {n}"
            )));
        }
        let (a, b) = (r_min.ln(), r_max.ln());
        let mut knots: Vec<f64> =
            (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
        knots[0] = r_min;
        knots[n - 1] = r_max;
        Ok(Self { knots })
    }

    pub fn from_knots(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots[0] <= 0.0 || knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(
                "radial grid must be positive and strictly increasing".into(),
            ));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self::log(0.05, 10.0, 60).expect("default grid is valid")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InversionConfig {
    pub grid: RadialGrid,
    pub iterations: usize,
    pub mass: f64,
    /// Forward solves use at least this many couplings.
    pub min_couplings: usize,
    /// Coupling range of the maximizations; the target's sample range when
    /// `None`.
    pub hull: Option<(f64, f64)>,
    pub solver: SolverOptions,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            grid: RadialGrid::default(),
            iterations: 8,
            mass: 1.0,
            min_couplings: 12,
            hull: None,
            solver: SolverOptions::default(),
        }
    }
}

impl InversionConfig {
    pub fn validate(&self) -> Result<()> {
        RadialGrid::from_knots(self.grid.knots.clone())?;
        if self.iterations < 1 {
            return Err(Error::Domain("at least one iteration is required".into()));
        }
        ProblemSetup::new(self.mass, 1.0)?;
        Ok(())
    }
}

/// One pass `f[n] -> F[n] -> K[n] -> f[n+1]`.
#[derive(Debug, Clone)]
pub struct InversionStage {
    /// `F[n]` on the forward-solve couplings.
    pub curve: SpectralCurve,
    /// `K[n]` on the radial grid.
    pub k: Vec<f64>,
    /// Sup-norm of `f[n+1] - f[n]` on the grid.
    pub step_norm: f64,
    /// Maximizations of `K[n]` that landed on a hull end.
    pub k_boundary: usize,
    /// Maximizations of `f[n+1]` that landed on a hull end.
    pub f_boundary: usize,
}

#[derive(Debug, Clone)]
pub struct InversionTrace {
    grid: RadialGrid,
    mass: f64,
    couplings: Vec<f64>,
    hull: (f64, f64),
    /// `f[0..=n]` on the grid.
    iterates: Vec<Vec<f64>>,
    stages: Vec<InversionStage>,
    /// Forward-solved curve of the last iterate.
    final_curve: SpectralCurve,
}

#[derive(Debug, Serialize)]
struct StageSummary {
    stage: usize,
    step_norm: f64,
    k_boundary_max: usize,
    f_boundary_max: usize,
}

#[derive(Debug, Serialize)]
struct TraceManifest<'a> {
    iterations: usize,
    mass: f64,
    grid_points: usize,
    r_min: f64,
    r_max: f64,
    hull: (f64, f64),
    couplings: &'a [f64],
    stages: Vec<StageSummary>,
    files: Vec<String>,
}

impl InversionTrace {
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn iterations(&self) -> usize {
        self.stages.len()
    }

    /// Couplings used for the forward solves.
    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn hull(&self) -> (f64, f64) {
        self.hull
    }

    pub fn iterate(&self, n: usize) -> Option<&[f64]> {
        self.iterates.get(n).map(|v| v.as_slice())
    }

    pub fn stages(&self) -> &[InversionStage] {
        &self.stages
    }

    pub fn final_curve(&self) -> &SpectralCurve {
        &self.final_curve
    }

    /// Curve `F[n]` of iterate `n`, including the last.
    pub fn curve(&self, n: usize) -> Option<&SpectralCurve> {
        if n < self.stages.len() {
            Some(&self.stages[n].curve)
        } else if n == self.stages.len() {
            Some(&self.final_curve)
        } else {
            None
        }
    }

    /// Iterate `n` as an evaluable shape.
    pub fn shape(&self, n: usize) -> Result<PotentialShape> {
        let f = self.iterate(n).ok_or_else(|| {
            Error::Domain(format!("trace has iterates 0..={}", self.stages.len()))
        })?;
        iterate_shape(&self.grid, f)
    }

    pub fn final_shape(&self) -> Result<PotentialShape> {
        self.shape(self.stages.len())
    }

    /// Writes `f{n}.csv`, `spectrum{n}.csv`, `k{n}.csv` and `manifest.json`
    /// into `dir`; returns the paths written.
    pub fn export(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for (n, f) in self.iterates.iter().enumerate() {
            let p = dir.join(format!("f{n}.csv"));
            let t = TabulatedShape::new(self.grid.knots.clone(), f.clone())?;
            t.write_csv(fs::File::create(&p)?)?;
            files.push(p);
            let p = dir.join(format!("spectrum{n}.csv"));
            self.curve(n).expect("one curve per iterate").write_csv(fs::File::create(&p)?)?;
            files.push(p);
        }
        for (n, s) in self.stages.iter().enumerate() {
            let p = dir.join(format!("k{n}.csv"));
            let mut w = csv::Writer::from_path(&p)?;
            w.write_record(["r", "K"])?;
            for (r, k) in self.grid.knots.iter().zip(&s.k) {
                w.write_record([r.to_string(), k.to_string()])?;
            }
            w.flush()?;
            files.push(p);
        }
        let manifest_path = dir.join("manifest.json");
        let mut names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
            .collect();
        names.push("manifest.json".into());
        let manifest = TraceManifest {
            iterations: self.stages.len(),
            mass: self.mass,
            grid_points: self.grid.knots.len(),
            r_min: self.grid.knots[0],
            r_max: self.grid.knots[self.grid.knots.len() - 1],
            hull: self.hull,
            couplings: &self.couplings,
            stages: self
                .stages
                .iter()
                .enumerate()
                .map(|(i, s)| StageSummary {
                    stage: i,
                    step_norm: s.step_norm,
                    k_boundary_max: s.k_boundary,
                    f_boundary_max: s.f_boundary,
                })
                .collect(),
            files: names,
        };
        fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        files.push(manifest_path);
        Ok(files)
    }
}

fn iterate_shape(grid: &RadialGrid, f: &[f64]) -> Result<PotentialShape> {
    Ok(PotentialShape::Tabulated(TabulatedShape::with_class(
        grid.knots.clone(),
        f.to_vec(),
        Some(SingularityClass::Coulombic),
    )?))
}

/// Forward curve `F[n]` of an iterate on the inversion couplings. An
/// iterate may stop binding inside the hull; below its critical coupling
/// `v1` the bottom of the spectrum is `E = 0`, and a sample `(v1, 0)` with
/// zero slope closes the curve.
fn forward_curve(
    shape: &PotentialShape,
    couplings: &[f64],
    config: &InversionConfig,
    stage: usize,
) -> Result<SpectralCurve> {
    let fail = |v: f64, e: Error| Error::Inversion { stage, coupling: v, cause: e.to_string() };
    let v1 = critical_coupling(shape, config.mass).map_err(|e| fail(f64::NAN, e))?;
    let mut vs: Vec<f64> = Vec::new();
    vs.extend(couplings.iter().copied().filter(|&v| v > v1));
    let solved: Vec<(f64, Result<GroundState>)> = vs
        .par_iter()
        .map(|&v| {
            (v, ProblemSetup::new(config.mass, v).and_then(|s| ground_state_with(shape, s, &config.solver)))
        })
        .collect();
    let (mut cv, mut ce, mut cs) = (Vec::new(), Vec::new(), Vec::new());
    if v1 > 0.0 {
        cv.push(v1);
        ce.push(0.0);
        cs.push(0.0);
    }
    for (v, r) in solved {
        match r {
            Ok(gs) => {
                cv.push(v);
                ce.push(gs.energy);
                cs.push(gs.slope);
            }
            // just above an estimated threshold the state may not resolve
            Err(Error::NoBoundState { .. } | Error::Convergence { .. }) if v < THRESHOLD_GAP * v1 => {}
            Err(e) => return Err(fail(v, e)),
        }
    }
    if cv.len() < 2 {
        return Err(fail(v1, Error::InsufficientData("iterate binds at too few couplings".into())));
    }
    let critical = if v1 > 0.0 { v1 * (1.0 - 1e-12) } else { 0.0 };
    SpectralCurve::from_samples(cv, ce, Some(cs), Some(critical), Provenance::Solver)
        .map_err(|e| fail(f64::NAN, e))
}

/// Sample couplings with evenly spaced points inserted until there are at
/// least `min` of them.
pub fn densify(couplings: &[f64], min: usize) -> Vec<f64> {
    let n = couplings.len();
    if n >= min || n < 2 {
        return couplings.to_vec();
    }
    let per = (min - n).div_ceil(n - 1);
    let mut out = Vec::with_capacity(n + per * (n - 1));
    for w in couplings.windows(2) {
        for j in 0..=per {
            out.push(w[0] + (w[1] - w[0]) * j as f64 / (per + 1) as f64);
        }
    }
    out.push(couplings[n - 1]);
    out
}

fn check_monotone(stage: usize, grid: &[f64], f: &mut [f64]) -> Result<()> {
    for i in 1..f.len() {
        let drop = f[i - 1] - f[i];
        if drop > REPAIR_LIMIT {
            return Err(Error::Admissibility { stage, at: grid[i], drop });
        }
        if drop > 0.0 {
            f[i] = f[i - 1];
        }
    }
    Ok(())
}

/// Runs the inversion for `config.iterations` stages from `seed`.
pub fn invert(target: &SpectralCurve, seed: &PotentialShape, config: &InversionConfig) -> Result<InversionTrace> {
    config.validate()?;
    if target.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "inversion needs at least 4 target samples, got {}",
            target.len()
        )));
    }
    seed.validate()?;
    if seed.singularity_class() != SingularityClass::Coulombic {
        return Err(Error::InvalidShape("seed must be coulombic at the origin".into()));
    }
    let grid = config.grid.clone();
    let r = grid.knots();
    let mut f0: Vec<f64> = r.iter().map(|&x| seed.value(x)).collect();
    check_monotone(0, r, &mut f0)
        .map_err(|_| Error::InvalidShape("seed is not monotone non-decreasing".into()))?;

    let samples = target.couplings();
    let (a_s, b_s) = (samples[0], samples[samples.len() - 1]);
    let hull = match config.hull {
        Some(h) => h,
        None => {
            let (lo, hi) = target.hull();
            (lo.max(a_s), hi.min(b_s))
        }
    };
    let couplings: Vec<f64> = densify(samples, config.min_couplings)
        .into_iter()
        .filter(|&v| v >= hull.0 && v <= hull.1)
        .collect();
    let forward = |stage: usize, shape: &PotentialShape| -> Result<SpectralCurve> {
        forward_curve(shape, &couplings, config, stage)
    };

    let mut iterates = vec![f0];
    let mut stages = Vec::with_capacity(config.iterations);
    let mut shape = seed.clone();
    for n in 0..config.iterations {
        let curve = forward(n, &shape)?;
        let f = &iterates[n];
        let threshold = curve.hull().0;
        let spectrum = |u: f64| if u < threshold { Ok(0.0) } else { curve.eval(u) };
        let k: Vec<(f64, bool)> = f
            .par_iter()
            .map(|&fi| {
                let e = maximize(|u| spectrum(u).map(|c| c - u * fi).unwrap_or(f64::NAN), hull.0, hull.1)?;
                Ok((e.value, e.at_boundary))
            })
            .collect::<Result<_>>()
            .map_err(|e: Error| Error::Inversion { stage: n, coupling: f64::NAN, cause: e.to_string() })?;
        let next: Vec<(f64, bool)> = k
            .par_iter()
            .map(|&(ki, _)| {
                let e = maximize(|v| target.eval(v).map(|t| (t - ki) / v).unwrap_or(f64::NAN), hull.0, hull.1)?;
                Ok((e.value, e.at_boundary))
            })
            .collect::<Result<_>>()
            .map_err(|e: Error| Error::Inversion { stage: n, coupling: f64::NAN, cause: e.to_string() })?;

        let mut f_next: Vec<f64> = next.iter().map(|p| p.0).collect();
        check_monotone(n + 1, r, &mut f_next)?;
        let step_norm = f_next.iter().zip(f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        stages.push(InversionStage {
            curve,
            k: k.iter().map(|p| p.0).collect(),
            step_norm,
            k_boundary: k.iter().filter(|p| p.1).count(),
            f_boundary: next.iter().filter(|p| p.1).count(),
        });
        shape = iterate_shape(&grid, &f_next)?;
        iterates.push(f_next);
    }
    let final_curve = forward(config.iterations, &shape)?;
    Ok(InversionTrace {
        grid,
        mass: config.mass,
        couplings,
        hull,
        iterates,
        stages,
        final_curve,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Residual {
    pub coupling: f64,
    pub target: f64,
    pub energy: Option<f64>,
    pub residual: Option<f64>,
    /// Why the sample has no residual.
    pub missing: Option<String>,
    /// The iterate has no bound state at this coupling.
    pub unbound: bool,
}

/// `F_iterate(v_i) - F_target(v_i)` at every target sample.
pub fn forward_residuals(iterate: &PotentialShape, target: &SpectralCurve, mass: f64) -> Vec<Residual> {
    forward_residuals_with(iterate, target, mass, &SolverOptions::default())
}

pub fn forward_residuals_with(
    iterate: &PotentialShape,
    target: &SpectralCurve,
    mass: f64,
    opts: &SolverOptions,
) -> Vec<Residual> {
    let samples: Vec<(f64, f64)> = target.samples().collect();
    samples
        .par_iter()
        .map(|&(v, t)| {
            match ProblemSetup::new(mass, v).and_then(|s| ground_state_with(iterate, s, opts)) {
                Ok(gs) => Residual {
                    coupling: v,
                    target: t,
                    energy: Some(gs.energy),
                    residual: Some(gs.energy - t),
                    missing: None,
                    unbound: false,
                },
                Err(e) => Residual {
                    coupling: v,
                    target: t,
                    energy: None,
                    residual: None,
                    unbound: matches!(e, Error::NoBoundState { .. }),
                    missing: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Largest `|residual|`. An unbound sample counts as `|E_target|`, its
/// distance from the threshold `E = 0`; any other missing sample makes the
/// result infinite.
pub fn max_abs_residual(res: &[Residual]) -> f64 {
    res.iter()
        .map(|r| match r.residual {
            Some(x) => x.abs(),
            None if r.unbound => r.target.abs(),
            None => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

pub fn write_residuals_csv<W: std::io::Write>(writer: W, res: &[Residual]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["v", "E_target", "E", "residual"])?;
    for r in res {
        let opt = |x: Option<f64>| x.map_or_else(|| "missing".to_string(), |v| v.to_string());
        w.write_record([r.coupling.to_string(), r.target.to_string(), opt(r.energy), opt(r.residual)])?;
    }
    w.flush()?;
    Ok(())
}

/// Solver-generated target curve for round-trip checks.
pub fn synthetic_target(shape: &PotentialShape, couplings: &[f64], mass: f64) -> Result<SpectralCurve> {
    let solved = crate::eigensolver::spectral_curve(shape, couplings, mass)?;
    if let Some((v, e)) = solved.failures.into_iter().next() {
        return Err(Error::NoBoundState { coupling: v, evidence: e.to_string() });
    }
    let c = solved.curve;
    SpectralCurve::from_samples(
        c.couplings().to_vec(),
        c.energies().to_vec(),
        None,
        Some(c.critical().value),
        Provenance::Solver,
    )
}
