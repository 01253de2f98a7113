use std::path::Path;

use serde::{Deserialize, Serialize};
use spectral_forge::inversion::{InversionConfig, RadialGrid};
use spectral_forge::observables::linear_k_grid;
use spectral_forge::SolverOptions;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverFile {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub points_per_length: Option<f64>,
    pub min_domain: Option<f64>,
    pub decay_lengths: Option<f64>,
    pub max_domain: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KGridFile {
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub points: Option<usize>,
}

/// Contents of a `--config` JSON file; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub grid: GridFile,
    pub iterations: Option<usize>,
    pub min_couplings: Option<usize>,
    #[serde(default)]
    pub solver: SolverFile,
    #[serde(default)]
    pub k_grid: KGridFile,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    pub fn solver(&self) -> SolverOptions {
        let d = SolverOptions::default();
        let s = &self.solver;
        SolverOptions {
            abs_tol: s.abs_tol.unwrap_or(d.abs_tol),
            rel_tol: s.rel_tol.unwrap_or(d.rel_tol),
            max_step: s.max_step.unwrap_or(d.max_step),
            points_per_length: s.points_per_length.unwrap_or(d.points_per_length),
            min_domain: s.min_domain.unwrap_or(d.min_domain),
            decay_lengths: s.decay_lengths.unwrap_or(d.decay_lengths),
            max_domain: s.max_domain.unwrap_or(d.max_domain),
        }
    }

    /// Inversion settings; `iterations` and `mass` from the command line win.
    pub fn inversion(&self, iterations: Option<usize>, mass: f64) -> Result<InversionConfig, CliError> {
        let d = InversionConfig::default();
        let knots = d.grid.knots();
        let grid = RadialGrid::log(
            self.grid.r_min.unwrap_or(knots[0]),
            self.grid.r_max.unwrap_or(knots[knots.len() - 1]),
            self.grid.points.unwrap_or(knots.len()),
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;
        let config = InversionConfig {
            grid,
            iterations: iterations.or(self.iterations).unwrap_or(d.iterations),
            mass,
            min_couplings: self.min_couplings.unwrap_or(d.min_couplings),
            hull: None,
            solver: self.solver(),
        };
        config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(config)
    }

    pub fn k_grid(&self, k_min: Option<f64>, k_max: Option<f64>, points: Option<usize>) -> Result<KGrid, CliError> {
        let k = KGrid {
            k_min: k_min.or(self.k_grid.k_min).unwrap_or(0.0),
            k_max: k_max.or(self.k_grid.k_max).unwrap_or(10.0),
            points: points.or(self.k_grid.points).unwrap_or(200),
        };
        k.values()?;
        Ok(k)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KGrid {
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
}

impl KGrid {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        linear_k_grid(self.k_min, self.k_max, self.points).map_err(|e| CliError::Usage(e.to_string()))
    }
}
