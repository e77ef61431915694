//! The 4-D normalized observation fed to the policy.

use serde::{Deserialize, Serialize};

use super::navpoint::NavigationTarget;
use crate::error::PerceptionError;
use crate::render::CameraIntrinsics;

/// Normalized target encoding; all components in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x_norm: f64,
    pub y_norm: f64,
    pub dx_norm: f64,
    pub dy_norm: f64,
}

impl Observation {
    pub fn zeros() -> Self {
        Observation {
            x_norm: 0.0,
            y_norm: 0.0,
            dx_norm: 0.0,
            dy_norm: 0.0,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x_norm, self.y_norm, self.dx_norm, self.dy_norm]
    }
}

/// How the center-offset components are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationEncoding {
    /// Offset maps the image center to 0: dx = 2(t_x - c_x)/W.
    #[default]
    Centered,
    /// The printed form with the extra -1 term, output clamped to [-1, 1].
    PaperLiteral,
}

/// Encodes a valid navigation target. `(c_x, c_y) = (W/2, H/2)`.
pub fn encode_observation(
    target: &NavigationTarget,
    cam: &CameraIntrinsics,
    encoding: ObservationEncoding,
) -> Result<Observation, PerceptionError> {
    if !target.valid {
        return Err(PerceptionError::InvalidTarget);
    }
    let (w, h) = (cam.width as f64, cam.height as f64);
    let (cx, cy) = cam.center();
    let x_norm = (2.0 * target.t_x / w - 1.0).clamp(-1.0, 1.0);
    let y_norm = (2.0 * target.t_y / h - 1.0).clamp(-1.0, 1.0);
    let (dx, dy) = match encoding {
        ObservationEncoding::Centered => {
            (2.0 * (target.t_x - cx) / w, 2.0 * (target.t_y - cy) / h)
        }
        ObservationEncoding::PaperLiteral => (
            2.0 * (target.t_x - cx) / w - 1.0,
            2.0 * (target.t_y - cy) / h - 1.0,
        ),
    };
    Ok(Observation {
        x_norm,
        y_norm,
        dx_norm: dx.clamp(-1.0, 1.0),
        dy_norm: dy.clamp(-1.0, 1.0),
    })
}
