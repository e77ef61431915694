//! The 3-D continuous tip command.

use serde::{Deserialize, Serialize};

/// Tip motion command, all components in [-1, 1]: `lr` yaws left/right,
/// `ud` pitches up/down, `fw` drives axial translation (gated).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub lr: f64,
    pub ud: f64,
    pub fw: f64,
}

impl Action {
    pub fn new(lr: f64, ud: f64, fw: f64) -> Self {
        Action { lr, ud, fw }.clamped()
    }

    pub fn clamped(self) -> Self {
        Action {
            lr: self.lr.clamp(-1.0, 1.0),
            ud: self.ud.clamp(-1.0, 1.0),
            fw: self.fw.clamp(-1.0, 1.0),
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.lr, self.ud, self.fw]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Action::new(a[0], a[1], a[2])
    }
}
