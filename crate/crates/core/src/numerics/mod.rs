pub mod optimize;
pub mod quad;
pub mod spline;

pub use optimize::{maximize, minimize, Extremum};
pub use spline::{MonotoneCubic, ShapeSpline};
