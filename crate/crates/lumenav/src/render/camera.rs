//! Pinhole camera intrinsics and tip poses.
//!
//! Camera frame convention: `+z` forward (viewing axis), `+x` image-right,
//! `+y` image-down; the triple is right-handed.

use nalgebra::{Rotation3, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::error::RenderError;
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct CameraIntrinsics {
    pub width: usize,
    pub height: usize,
    pub vertical_fov_deg: f64,
    pub far_clip: f64,
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        CameraIntrinsics {
            width: 128,
            height: 128,
            vertical_fov_deg: 120.0,
            far_clip: 300.0,
        }
    }
}

impl CameraIntrinsics {
    pub fn new(
        width: usize,
        height: usize,
        vertical_fov_deg: f64,
        far_clip: f64,
    ) -> Result<Self, RenderError> {
        let cam = CameraIntrinsics {
            width,
            height,
            vertical_fov_deg,
            far_clip,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        if self.width < 16 || self.height < 16 {
            return Err(RenderError::BadIntrinsics(format!(
                "resolution {}x{} below 16x16",
                self.width, self.height
            )));
        }
        if !(20.0..=170.0).contains(&self.vertical_fov_deg) {
            return Err(RenderError::BadIntrinsics(format!(
                "vertical fov {} outside [20, 170] degrees",
                self.vertical_fov_deg
            )));
        }
        if !self.far_clip.is_finite() || self.far_clip <= 0.0 {
            return Err(RenderError::BadIntrinsics(format!(
                "far clip {} must be positive",
                self.far_clip
            )));
        }
        Ok(())
    }

    /// Unit ray direction in camera space through the center of pixel
    /// (`px`, `py`); pixel (0,0) is top-left.
    pub fn ray_dir(&self, px: usize, py: usize) -> Vec3 {
        let half_tan = (self.vertical_fov_deg.to_radians() * 0.5).tan();
        let cy = self.height as f64 * 0.5;
        let x = (px as f64 + 0.5 - self.width as f64 * 0.5) / cy * half_tan;
        let y = (py as f64 + 0.5 - cy) / cy * half_tan;
        Vec3::new(x, y, 1.0).normalize()
    }

    /// Image center in continuous pixel coordinates, (W/2, H/2).
    pub fn center(&self) -> (f64, f64) {
        (self.width as f64 * 0.5, self.height as f64 * 0.5)
    }

    /// Distance from the image center to a corner, px.
    pub fn half_diagonal(&self) -> f64 {
        let (cx, cy) = self.center();
        (cx * cx + cy * cy).sqrt()
    }
}

/// Position and orientation of the tip camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec3,
    pub orientation: UnitQuaternion<f64>,
}

impl Pose {
    /// Pose at `position` looking along `forward`; the camera's up is
    /// aligned with `up_hint` as closely as orthogonality allows.
    pub fn look_along(position: Vec3, forward: Vec3, up_hint: Vec3) -> Pose {
        let z = forward.normalize();
        let mut down = -up_hint + z * up_hint.dot(&z);
        if down.norm() < 1e-9 {
            // Degenerate hint: pick any perpendicular.
            down = z.cross(&Vec3::new(1.0, 0.0, 0.0));
            if down.norm() < 1e-9 {
                down = z.cross(&Vec3::new(0.0, 1.0, 0.0));
            }
        }
        let y = down.normalize();
        let x = y.cross(&z);
        let rot = Rotation3::from_basis_unchecked(&[x, y, z]);
        Pose {
            position,
            orientation: UnitQuaternion::from_rotation_matrix(&rot),
        }
    }

    pub fn forward(&self) -> Vec3 {
        self.orientation * Vec3::new(0.0, 0.0, 1.0)
    }

    pub fn right(&self) -> Vec3 {
        self.orientation * Vec3::new(1.0, 0.0, 0.0)
    }

    pub fn down(&self) -> Vec3 {
        self.orientation * Vec3::new(0.0, 1.0, 0.0)
    }
}
