//! Raymarched monocular tip camera: ground-truth depth, shaded RGB, and
//! synthetic dataset export.

mod camera;
mod dataset;
mod depth;
mod noise;
mod pfm;
mod ppm;
mod raymarch;

pub use camera::{CameraIntrinsics, Pose};
pub use dataset::{
    export_dataset, sample_interior_pose, DatasetEntry, DatasetManifest, DatasetOptions,
};
pub use depth::{DepthImage, RgbImage};
pub use pfm::{read_pfm, write_pfm};
pub use ppm::{read_ppm, write_ppm};
pub use raymarch::{render_depth, render_rgb, render_rgb_linear, RenderOptions, TubeField};
