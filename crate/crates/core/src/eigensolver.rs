//! s-wave ground states of `-(1/m) u'' + v f(r) u = E u`, `u(0) = 0`.
//!
//! Numerov outward integration on a uniform grid. The energy is bracketed by
//! node counting and bisected; the radial domain grows until the Dirichlet
//! condition at `R` no longer moves the energy by more than the tolerance.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{Provenance, SpectralCurve};
use crate::error::{Error, Result};
use crate::numerics::quad::simpson;
use crate::numerics::minimize;
use crate::potential::{PotentialShape, ProblemSetup, Tail};

const RESCALE_LIMIT: f64 = 1e200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the grid step.
    pub max_step: f64,
    /// Grid points per characteristic length of the state.
    pub points_per_length: f64,
    pub min_domain: f64,
    /// Domain size in units of the decay length `1/sqrt(m |E|)`.
    pub decay_lengths: f64,
    pub max_domain: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            max_step: 0.02,
            points_per_length: 400.0,
            min_domain: 20.0,
            decay_lengths: 12.0,
            max_domain: 1e6,
        }
    }
}

impl SolverOptions {
    pub fn tolerance(&self, e: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * e.abs())
    }
}

/// Reduced radial function on `r_i = (i + 1) h`, `i = 0..n`; `u(0) = 0` is
/// implied.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialWavefunction {
    step: f64,
    values: Vec<f64>,
    energy: f64,
    normalized: bool,
}

impl RadialWavefunction {
    pub fn new(step: f64, values: Vec<f64>, energy: f64) -> Result<Self> {
        if !(step > 0.0) || values.len() < 3 {
            return Err(Error::Domain("wavefunction needs h > 0 and at least 3 points".into()));
        }
        let mut w = Self { step, values, energy, normalized: false };
        w.normalized = (w.norm() - 1.0).abs() < 1e-8;
        Ok(w)
    }

    /// Samples `u` at `r_i = (i + 1) h` from a closure.
    pub fn from_fn<F: Fn(f64) -> f64>(step: f64, points: usize, energy: f64, u: F) -> Result<Self> {
        let values = (1..=points).map(|i| u(i as f64 * step)).collect();
        Self::new(step, values, energy)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn radius(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.step
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| self.radius(i))
    }

    pub fn r_max(&self) -> f64 {
        self.radius(self.values.len() - 1)
    }

    /// `int_0^R g(r) u(r)^2 dr` with the origin sample included.
    pub fn integrate_density<G: Fn(f64) -> f64>(&self, g: G, g_origin: f64) -> f64 {
        let mut y = Vec::with_capacity(self.values.len() + 1);
        y.push(g_origin);
        for (i, u) in self.values.iter().enumerate() {
            y.push(g(self.radius(i)) * u * u);
        }
        simpson(&y, self.step)
    }

    pub fn norm(&self) -> f64 {
        self.integrate_density(|_| 1.0, 0.0)
    }

    /// `int r^p u^2 dr` for `p >= 0`.
    pub fn moment(&self, p: f64) -> f64 {
        self.integrate_density(|r| r.powf(p), 0.0)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Unnormalized { norm: n });
        }
        let s = 1.0 / n.sqrt();
        self.values.iter_mut().for_each(|u| *u *= s);
        self.normalized = true;
        Ok(())
    }

    pub fn nodes(&self) -> usize {
        count_sign_changes(&self.values)
    }

    /// `<u|H|u>/<u|u>` with fourth-order differences for `u'`.
    pub fn rayleigh_quotient(&self, shape: &PotentialShape, setup: ProblemSetup) -> f64 {
        let h = self.step;
        let n = self.values.len();
        let u = |i: isize| -> f64 {
            if i <= 0 {
                // odd extension through the origin
                if i == 0 { 0.0 } else { -self.values[(-i - 1) as usize] }
            } else if (i as usize) <= n {
                self.values[i as usize - 1]
            } else {
                0.0
            }
        };
        let mut du2 = Vec::with_capacity(n + 1);
        for i in 0..=n as isize {
            let d = (u(i - 2) - 8.0 * u(i - 1) + 8.0 * u(i + 1) - u(i + 2)) / (12.0 * h);
            du2.push(d * d);
        }
        let kinetic = simpson(&du2, h) / setup.mass;
        let potential = self.integrate_density(|r| shape.value(r), 0.0);
        (kinetic + setup.coupling * potential) / self.norm()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["r", "u"])?;
        for (i, u) in self.values.iter().enumerate() {
            w.write_record([self.radius(i).to_string(), u.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    /// `dE/dv = <f>` by the Hellmann–Feynman theorem.
    pub slope: f64,
    /// Energy tolerance the result was converged to.
    pub tolerance: f64,
    pub domain: f64,
    pub wavefunction: RadialWavefunction,
}

struct Grid<'a> {
    shape: &'a PotentialShape,
    h: f64,
    // f at r = i h; index 0 unused
    f: Vec<f64>,
    g0: f64,
    g1: f64,
}

impl<'a> Grid<'a> {
    fn new(shape: &'a PotentialShape, h: f64) -> Self {
        let (g0, g1) = shape.origin_expansion();
        Self { shape, h, f: vec![0.0], g0, g1 }
    }

    fn points_for(&self, r: f64) -> usize {
        (r / self.h).ceil() as usize
    }

    fn ensure(&mut self, n: usize) {
        let h = self.h;
        let shape = self.shape;
        for i in self.f.len()..=n {
            self.f.push(shape.value(i as f64 * h));
        }
    }
}

struct Shot {
    nodes: usize,
    u_last: f64,
    u_prev: f64,
    rescales: u32,
}

/// Integrates outward to `r = n h`. When `store` is given it receives
/// `u(r_i)` for `i = 1..=n`.
fn shoot(grid: &Grid, mass: f64, v: f64, e: f64, n: usize, mut store: Option<&mut Vec<f64>>) -> Shot {
    let h = grid.h;
    let h2 = h * h;
    let mv = mass * v;
    let a2 = mv * grid.g0 / 2.0;
    let a3 = (mv * grid.g0 * a2 + mv * grid.g1 - mass * e) / 6.0;
    let q = |i: usize| mass * (v * grid.f[i] - e);

    let qu0 = mv * grid.g0;
    let mut y_prev = -h2 * qu0 / 12.0;
    let mut u = h * (1.0 + a2 * h + a3 * h2);
    let mut qi = q(1);
    let mut y = (1.0 - h2 * qi / 12.0) * u;
    let mut u_prev = 0.0;
    let mut nodes = 0;
    let mut rescales = 0;
    let mut sign = u.signum();
    if let Some(s) = store.as_deref_mut() {
        s.clear();
        s.reserve(n);
        s.push(u);
    }
    for i in 1..n {
        let mut y_next = 2.0 * y - y_prev + h2 * qi * u;
        let q_next = q(i + 1);
        if y_next.abs() > RESCALE_LIMIT {
            if store.is_some() {
                // only the divergent tail grows this large; the stored part
                // would underflow if rescaled
                break;
            }
            let s = 1.0 / RESCALE_LIMIT;
            y_next *= s;
            y *= s;
            u *= s;
            rescales += 1;
        }
        let u_next = y_next / (1.0 - h2 * q_next / 12.0);
        if u_next != 0.0 && u_next.signum() != sign {
            nodes += 1;
            sign = u_next.signum();
        }
        if let Some(st) = store.as_deref_mut() {
            st.push(u_next);
        }
        y_prev = y;
        y = y_next;
        u_prev = u;
        u = u_next;
        qi = q_next;
    }
    Shot { nodes, u_last: u, u_prev, rescales }
}

fn count_sign_changes(u: &[f64]) -> usize {
    let mut nodes = 0;
    let mut sign = 0.0;
    for &x in u {
        if x != 0.0 {
            if sign != 0.0 && x.signum() != sign {
                nodes += 1;
            }
            sign = x.signum();
        }
    }
    nodes
}

fn check_inputs(shape: &PotentialShape, setup: ProblemSetup) -> Result<()> {
    shape.validate()?;
    ProblemSetup::new(setup.mass, setup.coupling)?;
    Ok(())
}

/// `min_r [1/(4 m r^2) + v f(r)]`, a lower bound on the ground-state energy.
pub fn energy_lower_bound(shape: &PotentialShape, setup: ProblemSetup) -> Result<f64> {
    check_inputs(shape, setup)?;
    let (m, v) = (setup.mass, setup.coupling);
    let (lo, hi) = (1e-7, 1e5);
    let e = minimize(|r| 1.0 / (4.0 * m * r * r) + v * shape.value(r), lo, hi)?;
    if e.at_boundary && e.arg <= lo * (1.0 + 1e-9) {
        return Err(Error::Unbracketed(format!(
            "lower-bound functional decreases towards r = {lo}; shape is too singular"
        )));
    }
    if e.at_boundary {
        // minimum pushed to large r: the infimum is the limit there
        let tail = match shape {
            PotentialShape::Tabulated(t) => match t.tail() {
                Tail::Hold(f) => v * f.min(0.0),
                Tail::Screened { .. } => 0.0,
            },
            _ => 0.0,
        };
        return Ok(e.value.min(tail));
    }
    Ok(e.value)
}

/// Outer radius cap for the zero-energy test of slowly screened tails.
const ZERO_ENERGY_RANGE: f64 = 2000.0;

/// Whether a bound state with `E < 0` exists, from the zero-energy solution.
/// Returns the evidence used.
pub fn bound_state_exists(shape: &PotentialShape, setup: ProblemSetup) -> Result<(bool, String)> {
    check_inputs(shape, setup)?;
    if shape.has_coulomb_tail() {
        return Ok((true, "coulomb tail binds at every coupling".into()));
    }
    if let PotentialShape::Tabulated(t) = shape {
        if let Tail::Hold(f) = t.tail() {
            if f < 0.0 {
                return Ok((true, "negative asymptotic value binds".into()));
            }
        }
    }
    let (m, v) = (setup.mass, setup.coupling);
    let (g0, _) = shape.origin_expansion();
    let range = shape.range_scale();
    let bohr = if g0 < 0.0 { 2.0 / (m * v * g0.abs()) } else { f64::INFINITY };
    let length = bohr.min(range).min(1.0);
    let h = (length / 400.0).min(0.02);
    let r_end = (40.0 * range).clamp(50.0, ZERO_ENERGY_RANGE);
    let mut grid = Grid::new(shape, h);
    let n = grid.points_for(r_end);
    grid.ensure(n);
    let shot = shoot(&grid, m, v, 0.0, n, None);
    if shot.nodes > 0 {
        return Ok((true, format!("zero-energy solution has {} node(s) below r = {r_end}", shot.nodes)));
    }
    let slope = shot.u_last - shot.u_prev;
    let f_end = grid.f[n];
    if shot.u_last * slope < 0.0 && f_end <= 0.0 {
        return Ok((true, format!("zero-energy solution turns towards a node beyond r = {r_end}")));
    }
    Ok((
        false,
        format!(
            "zero-energy solution is nodeless and non-decreasing on [0, {r_end}] (u = {:.3e}, u' = {:.3e})",
            shot.u_last,
            slope / h
        ),
    ))
}

/// Ground state, with default options.
pub fn ground_state(shape: &PotentialShape, setup: ProblemSetup) -> Result<GroundState> {
    ground_state_with(shape, setup, &SolverOptions::default())
}

pub fn ground_state_with(
    shape: &PotentialShape,
    setup: ProblemSetup,
    opts: &SolverOptions,
) -> Result<GroundState> {
    check_inputs(shape, setup)?;
    let (m, v) = (setup.mass, setup.coupling);
    let e_lb = energy_lower_bound(shape, setup).unwrap_or(-1.0);
    let (g0, _) = shape.origin_expansion();
    let bohr = if g0 < 0.0 { 2.0 / (m * v * g0.abs()) } else { f64::INFINITY };
    let kappa_lb = (m * e_lb.abs()).sqrt().max(1e-12);
    let length = bohr.min(1.0 / kappa_lb);
    let h = (length / opts.points_per_length).min(opts.max_step);
    let mut grid = Grid::new(shape, h);

    // Dirichlet eigenvalue on [0, R]: node-count bisection, then Illinois
    // false position on u(R) once the bracket is narrow. `lo` has no node.
    let mut lo_seed = e_lb - 0.1 * e_lb.abs() - 1e-3;
    let dirichlet = |grid: &mut Grid, r: f64, lo_seed: &mut f64, hint: Option<f64>| -> Result<Option<f64>> {
        let n = grid.points_for(r);
        grid.ensure(n);
        let top = shoot(grid, m, v, 0.0, n, None);
        if top.nodes == 0 {
            return Ok(None);
        }
        let mut hi = (0.0, top);
        let mut lo = None;
        if let Some(e) = hint {
            // a larger domain lowers the Dirichlet eigenvalue
            let at = shoot(grid, m, v, e, n, None);
            let mut d = opts.tolerance(e);
            if at.nodes > 0 {
                hi = (e, at);
                while e - d > *lo_seed {
                    let s = shoot(grid, m, v, e - d, n, None);
                    if s.nodes == 0 {
                        lo = Some((e - d, s));
                        break;
                    }
                    hi = (e - d, s);
                    d *= 8.0;
                }
            } else {
                lo = Some((e, at));
                while e + d < 0.0 {
                    let s = shoot(grid, m, v, e + d, n, None);
                    if s.nodes > 0 {
                        hi = (e + d, s);
                        break;
                    }
                    lo = Some((e + d, s));
                    d *= 8.0;
                }
            }
        }
        let mut lo = match lo {
            Some(l) => l,
            None => {
                let mut e = *lo_seed;
                let mut tries = 0;
                loop {
                    let s = shoot(grid, m, v, e, n, None);
                    if s.nodes == 0 {
                        break (e, s);
                    }
                    e = 2.0 * e - 1.0;
                    tries += 1;
                    if tries > 60 {
                        return Err(Error::Convergence {
                            reason: "could not bracket the ground state from below".into(),
                            residual: e,
                        });
                    }
                }
            }
        };
        *lo_seed = (*lo_seed).min(lo.0);
        let (mut w_lo, mut w_hi) = (1.0, 1.0);
        let mut last_side = 0i8;
        for _ in 0..300 {
            let width = hi.0 - lo.0;
            let tol = 1e-3 * opts.tolerance(0.5 * (lo.0 + hi.0));
            if width <= tol {
                break;
            }
            let narrow = width < 1e-2 * hi.0.abs().max(opts.abs_tol);
            let fl = lo.1.u_last * w_lo;
            let fh = hi.1.u_last * w_hi;
            let mut mid = if hi.0 == 0.0 {
                // shallow states: bisect in log |E| first
                -(lo.0.abs() * opts.abs_tol).sqrt().max(0.5 * lo.0.abs() * 1e-3).min(0.5 * lo.0.abs())
            } else {
                0.5 * (lo.0 + hi.0)
            };
            if narrow && lo.1.rescales == hi.1.rescales && fl > 0.0 && fh < 0.0 {
                let t = lo.0 + width * fl / (fl - fh);
                if t > lo.0 && t < hi.0 {
                    mid = t;
                }
            }
            if mid <= lo.0 || mid >= hi.0 {
                break;
            }
            let s = shoot(grid, m, v, mid, n, None);
            if s.nodes == 0 {
                lo = (mid, s);
                w_lo = 1.0;
                if last_side == -1 {
                    w_hi *= 0.5;
                }
                last_side = -1;
            } else {
                hi = (mid, s);
                w_hi = 1.0;
                if last_side == 1 {
                    w_lo *= 0.5;
                }
                last_side = 1;
            }
            if narrow && (hi.0 - lo.0) > 0.5 * width && mid != 0.5 * (lo.0 + hi.0) {
                // stalled false-position step: fall through to bisection next round
                w_lo = 1.0;
                w_hi = 1.0;
            }
        }
        let (fl, fh) = (lo.1.u_last, hi.1.u_last);
        if lo.1.rescales == hi.1.rescales && fl > 0.0 && fh < 0.0 {
            Ok(Some(lo.0 + (hi.0 - lo.0) * fl / (fl - fh)))
        } else {
            Ok(Some(0.5 * (lo.0 + hi.0)))
        }
    };

    let mut r = opts.min_domain.max(opts.decay_lengths / kappa_lb);
    let mut e = loop {
        if let Some(e) = dirichlet(&mut grid, r, &mut lo_seed, None)? {
            break e;
        }
        if r == opts.min_domain.max(opts.decay_lengths / kappa_lb) {
            let (exists, evidence) = bound_state_exists(shape, setup)?;
            if !exists {
                return Err(Error::NoBoundState { coupling: v, evidence });
            }
        }
        r *= 2.0;
        if r > opts.max_domain {
            return Err(Error::Convergence {
                reason: format!("bound state too shallow to resolve within r = {}", opts.max_domain),
                residual: 0.0,
            });
        }
    };
    loop {
        let need = opts.min_domain.max(opts.decay_lengths / (m * e.abs()).sqrt());
        if need > r {
            r = need;
            if r > opts.max_domain {
                return Err(Error::Convergence {
                    reason: format!("domain exceeds r = {}", opts.max_domain),
                    residual: e,
                });
            }
            e = dirichlet(&mut grid, r, &mut lo_seed, Some(e))?.ok_or_else(|| Error::Convergence {
                reason: "bound state lost while enlarging the domain".into(),
                residual: e,
            })?;
            continue;
        }
        let r2 = 1.25 * r;
        let e2 = dirichlet(&mut grid, r2, &mut lo_seed, Some(e))?.ok_or_else(|| Error::Convergence {
            reason: "bound state lost while enlarging the domain".into(),
            residual: e,
        })?;
        let diff = (e2 - e).abs();
        r = r2;
        e = e2;
        if diff < opts.tolerance(e) {
            break;
        }
        if r > opts.max_domain {
            return Err(Error::Convergence {
                reason: "energy keeps moving as the domain grows".into(),
                residual: diff,
            });
        }
    }

    let n = grid.points_for(r);
    let mut u = Vec::new();
    shoot(&grid, m, v, e, n, Some(&mut u));
    trim_tail(&mut u);
    if u[0] < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    let mut wf = RadialWavefunction::new(h, u, e)?;
    wf.normalize()?;
    if wf.nodes() != 0 {
        return Err(Error::Convergence {
            reason: format!("ground state has {} interior node(s)", wf.nodes()),
            residual: e,
        });
    }
    let mut y = Vec::with_capacity(wf.values.len() + 1);
    y.push(0.0);
    for (i, ui) in wf.values.iter().enumerate() {
        y.push(grid.f[i + 1] * ui * ui);
    }
    let slope = simpson(&y, h);
    Ok(GroundState {
        energy: e,
        slope,
        tolerance: opts.tolerance(e),
        domain: r,
        wavefunction: wf,
    })
}

/// Drops the far tail once `|u|` stops decaying; beyond that point the
/// integration is dominated by the growing solution.
fn trim_tail(u: &mut Vec<f64>) {
    let n = u.len();
    let mut i = 1;
    while i < n && u[i].abs() >= u[i - 1].abs() {
        i += 1;
    }
    while i < n && u[i].abs() <= u[i - 1].abs() && u[i].signum() == u[0].signum() {
        i += 1;
    }
    u.truncate(i.max(3));
}

/// Result of [`spectral_curve`]: the curve over the couplings that solved,
/// plus the couplings that did not.
#[derive(Debug)]
pub struct CurveSolve {
    pub curve: SpectralCurve,
    pub failures: Vec<(f64, Error)>,
}

/// Solves the ground state at every coupling (in parallel) and builds the
/// curve, with Hellmann–Feynman slopes and the critical coupling attached.
pub fn spectral_curve(shape: &PotentialShape, couplings: &[f64], mass: f64) -> Result<CurveSolve> {
    spectral_curve_with(shape, couplings, mass, &SolverOptions::default())
}

pub fn spectral_curve_with(
    shape: &PotentialShape,
    couplings: &[f64],
    mass: f64,
    opts: &SolverOptions,
) -> Result<CurveSolve> {
    shape.validate()?;
    let mut vs = couplings.to_vec();
    vs.sort_by(f64::total_cmp);
    vs.dedup();
    let v1 = critical_coupling(shape, mass)?;
    let results: Vec<(f64, Result<GroundState>)> = vs
        .par_iter()
        .map(|&v| {
            let r = if v <= v1 {
                Err(Error::NoBoundState {
                    coupling: v,
                    evidence: format!("below the critical coupling {v1:.6}"),
                })
            } else {
                ProblemSetup::new(mass, v).and_then(|s| ground_state_with(shape, s, opts))
            };
            (v, r)
        })
        .collect();
    let mut cv = Vec::new();
    let mut ce = Vec::new();
    let mut cs = Vec::new();
    let mut failures = Vec::new();
    for (v, r) in results {
        match r {
            Ok(gs) => {
                cv.push(v);
                ce.push(gs.energy);
                cs.push(gs.slope);
            }
            Err(e) => failures.push((v, e)),
        }
    }
    if cv.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} of {} couplings produced a bound state",
            cv.len(),
            vs.len()
        )));
    }
    let v1 = v1.min(cv[0] * (1.0 - 1e-12));
    let curve = SpectralCurve::from_samples(cv, ce, Some(cs), Some(v1), Provenance::Solver)?;
    Ok(CurveSolve { curve, failures })
}

/// Critical coupling `v1`: bisection on bound-state existence to a relative
/// width of `1e-4`. Zero for shapes with a Coulomb tail.
pub fn critical_coupling(shape: &PotentialShape, mass: f64) -> Result<f64> {
    shape.validate()?;
    if !shape.is_attractive_somewhere() {
        return Err(Error::NoBinding);
    }
    if shape.has_coulomb_tail() {
        return Ok(0.0);
    }
    let exists = |v: f64| -> Result<bool> {
        Ok(bound_state_exists(shape, ProblemSetup::new(mass, v)?)?.0)
    };
    let mut hi = 1.0;
    let mut steps = 0;
    while !exists(hi)? {
        hi *= 2.0;
        steps += 1;
        if steps > 60 {
            return Err(Error::NoBinding);
        }
    }
    let mut lo = hi / 2.0;
    while exists(lo)? {
        hi = lo;
        lo /= 2.0;
        if lo < 1e-12 {
            return Ok(0.0);
        }
    }
    while hi - lo > 1e-4 * hi {
        let mid = 0.5 * (lo + hi);
        if exists(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coupling at which the ground-state energy equals `target < 0`.
///
/// Newton iteration from above using the Hellmann–Feynman slope; concavity
/// of `F` makes the iterates decrease monotonically onto the root.
pub fn coupling_for_energy(shape: &PotentialShape, target: f64, mass: f64) -> Result<f64> {
    coupling_for_energy_with(shape, target, mass, &SolverOptions::default())
}

pub fn coupling_for_energy_with(
    shape: &PotentialShape,
    target: f64,
    mass: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    if !(target < 0.0) {
        return Err(Error::Domain(format!("target energy must be < 0, got {target}")));
    }
    const V_MAX: f64 = 1e6;
    let v1 = critical_coupling(shape, mass)?;
    let v_lo = v1 * (1.0 + 1e-3);
    let solve = |v: f64| ground_state_with(shape, ProblemSetup::new(mass, v)?, opts);

    let (g0, _) = shape.origin_expansion();
    let coulomb_guess = if g0 < 0.0 { 2.0 * (target.abs() / mass).sqrt() / g0.abs() } else { 1.0 };
    let mut v = (2.0 * v1).max(coulomb_guess).max(v_lo * 1.5).max(1e-6);
    let mut gs = solve(v)?;
    while gs.energy >= target {
        v *= 2.0;
        if v > V_MAX {
            return Err(Error::OutOfRange { value: target, lo: f64::NEG_INFINITY, hi: 0.0 });
        }
        gs = solve(v)?;
    }
    let tol = opts.tolerance(target);
    for _ in 0..100 {
        let g = gs.energy - target;
        if g.abs() < tol {
            return Ok(v);
        }
        let step = g / gs.slope;
        let next = v - step;
        if !(next > v_lo && next < v) {
            // Newton left the bracket: fall back to bisection on [v_lo, v]
            return bisect_coupling(&solve, v_lo, v, target, tol);
        }
        v = next;
        gs = solve(v)?;
    }
    Err(Error::Convergence {
        reason: "coupling search did not converge".into(),
        residual: gs.energy - target,
    })
}

fn bisect_coupling<S: Fn(f64) -> Result<GroundState>>(
    solve: &S,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    tol: f64,
) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match solve(mid) {
            Ok(gs) if (gs.energy - target).abs() < tol => return Ok(mid),
            Ok(gs) if gs.energy < target => hi = mid,
            Ok(_) | Err(Error::NoBoundState { .. }) => lo = mid,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Convergence { reason: "coupling bisection exhausted".into(), residual: hi - lo })
}
