pub mod curve;
pub mod dataset;
pub mod eigensolver;
pub mod error;
pub mod geometry;
pub mod inversion;
pub mod numerics;
pub mod observables;
pub mod potential;

pub use curve::{AnalyticCurve, CriticalCoupling, Provenance, SpectralCurve};
pub use eigensolver::{
    coupling_for_energy, critical_coupling, energy_lower_bound, ground_state, spectral_curve,
    GroundState, RadialWavefunction, SolverOptions,
};
pub use dataset::{builtin_dataset, curve_from_points, scaling_comparison, BSDataset, SeriesId};
pub use error::{Error, Result};
pub use observables::{form_factor, ground_state_form_factor, FormFactorCurve};
pub use potential::{PotentialShape, ProblemSetup, TabulatedShape};
