//! Follow-the-leader endoscopic lumen navigation, end to end: procedural
//! tube environments, a raymarched monocular depth camera with a calibrated
//! degradation model, quantile-contour navigation targeting, a reward-shaped
//! MDP, PPO training, and geometry-aware trajectory metrics.
//!
//! All distances are millimetres; one environment step corresponds to one
//! second of robot time. The guide in `book/` walks through each
//! subsystem; its code snippets run as tests in this crate.
//!
//! ```
//! use lumenav::geometry::{generate_environment, ProfileTag};
//!
//! // Environments are pure functions of (profile, seed).
//! let env = generate_environment(ProfileTag::Simple, 42).unwrap();
//! assert!(env.centerline.total_length() >= 600.0);
//! assert!(env.min_radius() >= 15.0);
//! ```

pub mod config;
pub mod env;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod perception;
pub mod render;
pub mod rl;
pub mod util;

pub use env::{Action, Episode, EpisodeConfig, RewardBreakdown};
pub use geometry::{CenterlineSpline, ProfileTag, TubeEnvironment, Vec3};
pub use perception::{DegradationProfile, Observation};
pub use render::{CameraIntrinsics, DepthImage, Pose, RgbImage};
