//! Tube environments: a centerline spline swept by the local lumen radius,
//! with signed wall distance queries and JSON (de)serialization.

use serde::{Deserialize, Serialize};

use super::spline::{CenterlineSpline, NearestPointResult, Vec3};
use crate::error::GeometryError;

/// Radius of the robot tip body, mm. Generated environments guarantee a
/// minimum lumen radius of more than twice this value.
pub const TIP_BODY_RADIUS_MM: f64 = 3.0;

/// Which procedural generator produced an environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileTag {
    Simple,
    Complex,
}

impl std::fmt::Display for ProfileTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileTag::Simple => write!(f, "simple"),
            ProfileTag::Complex => write!(f, "complex"),
        }
    }
}

/// A tubular lumen: centerline spline plus radius profile. The wall is the
/// surface at distance `radius_at(s)` from the centerline (hemispherical
/// caps close both ends).
#[derive(Debug, Clone)]
pub struct TubeEnvironment {
    pub centerline: CenterlineSpline,
    pub texture_seed: u64,
    pub profile_tag: ProfileTag,
    pub far_clip: f64,
}

/// On-disk form of [`TubeEnvironment`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TubeEnvironmentFile {
    pub control_points: Vec<[f64; 3]>,
    pub radii: Vec<f64>,
    pub profile_tag: ProfileTag,
    pub texture_seed: u64,
    pub far_clip: f64,
}

impl TubeEnvironment {
    pub fn new(
        centerline: CenterlineSpline,
        texture_seed: u64,
        profile_tag: ProfileTag,
        far_clip: f64,
    ) -> Result<Self, GeometryError> {
        let env = TubeEnvironment {
            centerline,
            texture_seed,
            profile_tag,
            far_clip,
        };
        let min_r = env.min_radius();
        if min_r <= 2.0 * TIP_BODY_RADIUS_MM {
            return Err(GeometryError::NotTraversable {
                min_radius: min_r,
                tip_radius: TIP_BODY_RADIUS_MM,
            });
        }
        Ok(env)
    }

    /// Minimum lumen radius along the centerline (sampled every mm).
    pub fn min_radius(&self) -> f64 {
        let n = (self.centerline.total_length().ceil() as usize).max(2);
        (0..=n)
            .map(|i| {
                let s = self.centerline.total_length() * i as f64 / n as f64;
                self.centerline.radius_at(s).unwrap_or(f64::INFINITY)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Nearest centerline point to `p`.
    pub fn nearest_on_centerline(&self, p: Vec3) -> NearestPointResult {
        self.centerline.nearest(p)
    }

    /// Signed clearance to the lumen wall: positive inside the lumen, zero
    /// at the wall, negative beyond it. Exactly
    /// `radius_at(s_star) - nearest.distance`.
    pub fn wall_distance(&self, p: Vec3) -> f64 {
        let n = self.centerline.nearest(p);
        n.radius_at - n.distance
    }

    /// `wall_distance`, reusing an arclength hint from a nearby query.
    pub fn wall_distance_hinted(&self, p: Vec3, hint_s: f64, window_mm: f64) -> (f64, f64) {
        let n = self.centerline.nearest_with_hint(p, hint_s, window_mm);
        (n.radius_at - n.distance, n.s_star)
    }

    pub fn to_file(&self) -> TubeEnvironmentFile {
        TubeEnvironmentFile {
            control_points: self
                .centerline
                .control_points()
                .iter()
                .map(|p| [p.x, p.y, p.z])
                .collect(),
            radii: self.centerline.control_radii().to_vec(),
            profile_tag: self.profile_tag,
            texture_seed: self.texture_seed,
            far_clip: self.far_clip,
        }
    }

    pub fn from_file(file: &TubeEnvironmentFile) -> Result<Self, GeometryError> {
        let pts: Vec<Vec3> = file
            .control_points
            .iter()
            .map(|p| Vec3::new(p[0], p[1], p[2]))
            .collect();
        let spline = CenterlineSpline::build(&pts, &file.radii)?;
        TubeEnvironment::new(spline, file.texture_seed, file.profile_tag, file.far_clip)
    }
}
