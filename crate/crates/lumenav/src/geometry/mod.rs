//! Tubular lumen geometry: centerline splines, tube environments, and
//! procedural generation.

mod procgen;
mod spline;
mod tube;

pub use procgen::{count_bends, generate_environment};
pub use spline::{CenterlineSpline, NearestPointResult, Vec3};
pub use tube::{ProfileTag, TubeEnvironment, TubeEnvironmentFile, TIP_BODY_RADIUS_MM};
