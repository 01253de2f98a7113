//! Momentum-space form factors `F(k) = int_0^inf j0(k r) u(r)^2 dr` of
//! normalized s-wave states.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::eigensolver::{ground_state, RadialWavefunction};
use crate::error::{Error, Result};
use crate::numerics::quad::{simpson, simpson_fn};
use crate::potential::{PotentialShape, ProblemSetup};

const NORM_TOLERANCE: f64 = 1e-8;
const SERIES_LIMIT: f64 = 1e-3;
const OSCILLATORY_LIMIT: f64 = 50.0;
const PANELS_PER_HALF_PERIOD: usize = 16;

/// `sin(x)/x`, by its series near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_LIMIT {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `n` evenly spaced momenta on `[k_min, k_max]`.
pub fn linear_k_grid(k_min: f64, k_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(k_min >= 0.0) || !(k_max >= k_min) || n == 0 || !k_max.is_finite() {
        return Err(Error::Domain(format!("bad k grid [{k_min}, {k_max}] with {n} points")));
    }
    if n == 1 {
        return Ok(vec![k_min]);
    }
    Ok((0..n).map(|i| k_min + (k_max - k_min) * i as f64 / (n - 1) as f64).collect())
}

/// 200 points on `[0, 10]`.
pub fn default_k_grid() -> Vec<f64> {
    linear_k_grid(0.0, 10.0, 200).expect("static grid")
}

/// Metadata written next to a form-factor table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormFactorMeta {
    pub source: String,
    pub shape: Option<String>,
    pub coupling: Option<f64>,
    pub mass: Option<f64>,
    pub energy: f64,
    pub norm_residual: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormFactorCurve {
    k: Vec<f64>,
    values: Vec<f64>,
    meta: FormFactorMeta,
}

impl FormFactorCurve {
    pub fn momenta(&self) -> &[f64] {
        &self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.k.iter().copied().zip(self.values.iter().copied())
    }

    pub fn meta(&self) -> &FormFactorMeta {
        &self.meta
    }

    /// Upper bound on the truncated tail `int_R^inf u^2 dr`.
    pub fn tail_bound(&self) -> f64 {
        self.meta.tail_bound
    }

    /// First `k` at which `F` drops to one half, linearly interpolated.
    pub fn half_max_crossing(&self) -> Option<f64> {
        let w = self
            .samples()
            .collect::<Vec<_>>()
            .windows(2)
            .find(|w| w[0].1 > 0.5 && w[1].1 <= 0.5)
            .map(|w| (w[0], w[1]))?;
        let ((k0, f0), (k1, f1)) = w;
        Some(k0 + (k1 - k0) * (f0 - 0.5) / (f0 - f1))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["k", "F"])?;
        for (k, f) in self.samples() {
            w.write_record([k.to_string(), f.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_meta<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, &self.meta)?;
        Ok(())
    }
}

/// Bound on `int_R^inf u^2` assuming exponential decay continues past the
/// last sample.
fn tail_bound(u: &RadialWavefunction) -> f64 {
    let v = u.values();
    let n = v.len();
    let (a, b) = (v[n - 2].abs(), v[n - 1].abs());
    if b == 0.0 {
        return 0.0;
    }
    if a <= b {
        return f64::INFINITY;
    }
    let kappa = (a / b).ln() / u.step();
    b * b / (2.0 * kappa)
}

/// Local cubic interpolation of `u^2` between grid samples (with `u(0) = 0`).
fn density_at(u: &RadialWavefunction, r: f64) -> f64 {
    let h = u.step();
    let v = u.values();
    let n = v.len();
    // samples y_j = u(j h)^2, j = 0..=n
    let y = |j: usize| if j == 0 { 0.0 } else { v[j - 1] * v[j - 1] };
    let x = r / h;
    if x >= n as f64 {
        return y(n);
    }
    let j = (x.floor() as usize).clamp(1, n.saturating_sub(2).max(1));
    let j0 = j - 1;
    let t = x - j0 as f64;
    let p = [y(j0), y(j0 + 1), y(j0 + 2), y((j0 + 3).min(n))];
    // Lagrange on nodes 0, 1, 2, 3
    p[0] * (t - 1.0) * (t - 2.0) * (t - 3.0) / -6.0
        + p[1] * t * (t - 2.0) * (t - 3.0) / 2.0
        + p[2] * t * (t - 1.0) * (t - 3.0) / -2.0
        + p[3] * t * (t - 1.0) * (t - 2.0) / 6.0
}

fn transform(u: &RadialWavefunction, k: f64) -> f64 {
    let h = u.step();
    let r_max = u.r_max();
    if k * r_max <= OSCILLATORY_LIMIT {
        let mut y = Vec::with_capacity(u.values().len() + 1);
        y.push(0.0);
        for (i, ui) in u.values().iter().enumerate() {
            y.push(sinc(k * u.radius(i)) * ui * ui);
        }
        return simpson(&y, h);
    }
    let half = PI / k;
    let panels = ((r_max / half).ceil() as usize).max(1);
    let mut acc = 0.0;
    for j in 0..panels {
        let a = j as f64 * half;
        let b = ((j + 1) as f64 * half).min(r_max);
        if b <= a {
            break;
        }
        let per = PANELS_PER_HALF_PERIOD.max((2.0 * (b - a) / h).ceil() as usize);
        acc += simpson_fn(|r| sinc(k * r) * density_at(u, r), a, b, per);
    }
    acc
}

/// Form factor of a normalized state on the given momenta.
pub fn form_factor(u: &RadialWavefunction, k_grid: &[f64]) -> Result<FormFactorCurve> {
    let norm = u.norm();
    if (norm - 1.0).abs() >= NORM_TOLERANCE {
        return Err(Error::Unnormalized { norm });
    }
    if let Some(&k) = k_grid.iter().find(|k| !(**k >= 0.0) || !k.is_finite()) {
        return Err(Error::Domain(format!("momentum must be finite and >= 0, got {k}")));
    }
    let values: Vec<f64> = k_grid.par_iter().map(|&k| transform(u, k)).collect();
    Ok(FormFactorCurve {
        k: k_grid.to_vec(),
        values,
        meta: FormFactorMeta {
            source: "wavefunction".into(),
            shape: None,
            coupling: None,
            mass: None,
            energy: u.energy(),
            norm_residual: norm - 1.0,
            tail_bound: tail_bound(u),
        },
    })
}

/// Solves for the ground state and transforms its density.
pub fn ground_state_form_factor(
    shape: &PotentialShape,
    setup: ProblemSetup,
    k_grid: &[f64],
) -> Result<FormFactorCurve> {
    let gs = ground_state(shape, setup)?;
    let mut curve = form_factor(&gs.wavefunction, k_grid)?;
    curve.meta.source = "ground state".into();
    curve.meta.shape = Some(shape.to_string());
    curve.meta.coupling = Some(setup.coupling);
    curve.meta.mass = Some(setup.mass);
    Ok(curve)
}
