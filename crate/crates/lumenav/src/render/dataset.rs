//! Synthetic dataset export: (RGB, depth) pairs rendered from poses sampled
//! inside the lumen with randomized lighting and field of view.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::camera::{CameraIntrinsics, Pose};
use super::pfm::write_pfm;
use super::ppm::write_ppm;
use super::raymarch::{render_depth, render_rgb, RenderOptions};
use crate::error::RenderError;
use crate::geometry::{TubeEnvironment, Vec3};
use crate::util::mix_seeds;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetOptions {
    pub width: usize,
    pub height: usize,
    /// Vertical field-of-view range sampled per image, degrees.
    pub fov_range_deg: (f64, f64),
    /// Headlight intensity range sampled per image.
    pub light_range: (f64, f64),
    pub render: RenderOptions,
    /// Hash of the run configuration, embedded in the manifest.
    pub config_hash: String,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        DatasetOptions {
            width: 128,
            height: 128,
            fov_range_deg: (90.0, 140.0),
            light_range: (0.6, 2.0),
            render: RenderOptions::default(),
            config_hash: String::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DatasetEntry {
    pub rgb: String,
    pub depth: String,
    pub position: [f64; 3],
    pub orientation_wxyz: [f64; 4],
    pub light_intensity: f64,
    pub vertical_fov_deg: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DatasetManifest {
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    /// Depth pixels are range along the pixel ray, not z-depth.
    pub depth_semantics: String,
    pub config_hash: String,
    pub entries: Vec<DatasetEntry>,
}

/// Samples a pose inside the lumen: position offset from the centerline,
/// viewing direction within `tilt_max_deg` of the tangent, random roll.
/// Guaranteed wall clearance > 1 mm.
pub fn sample_interior_pose(
    env: &TubeEnvironment,
    rng: &mut ChaCha8Rng,
    tilt_max_deg: f64,
    max_offset_frac: f64,
) -> Pose {
    let total = env.centerline.total_length();
    loop {
        let s = rng.gen_range(2.0..total - 2.0);
        let c = env.centerline.point_at(s).unwrap();
        let tangent = env.centerline.tangent_at(s).unwrap();
        let radius = env.centerline.radius_at(s).unwrap();

        let (n1, n2) = perpendicular_basis(tangent);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let mag = rng.gen::<f64>().sqrt() * max_offset_frac * (radius - 2.0).max(0.0);
        let position = c + (n1 * phi.cos() + n2 * phi.sin()) * mag;

        let tilt = rng.gen_range(0.0..tilt_max_deg.to_radians());
        let tilt_phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let tilt_axis = n1 * tilt_phi.cos() + n2 * tilt_phi.sin();
        let forward = rotate_about(tangent, tilt_axis, tilt);

        let roll = rng.gen_range(0.0..std::f64::consts::TAU);
        let up = rotate_about(n1, forward, roll);

        if env.wall_distance(position) > 1.0 {
            return Pose::look_along(position, forward, up);
        }
    }
}

fn perpendicular_basis(t: Vec3) -> (Vec3, Vec3) {
    let helper = if t.x.abs() < 0.9 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    let n1 = t.cross(&helper).normalize();
    let n2 = t.cross(&n1);
    (n1, n2)
}

fn rotate_about(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(&v) * s + axis * axis.dot(&v) * (1.0 - c)
}

/// Writes `count` (PPM, PFM) pairs plus a JSON manifest into `out_dir`.
/// Deterministic in `seed`.
pub fn export_dataset(
    env: &TubeEnvironment,
    count: usize,
    seed: u64,
    out_dir: &Path,
    opts: &DatasetOptions,
) -> Result<DatasetManifest, RenderError> {
    if count == 0 {
        return Err(RenderError::EmptyDataset);
    }
    fs::create_dir_all(out_dir)?;

    let mut entries = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seeds(seed, i as u64));
        let pose = sample_interior_pose(env, &mut rng, 35.0, 0.6);
        let fov = rng.gen_range(opts.fov_range_deg.0..=opts.fov_range_deg.1);
        let light = rng.gen_range(opts.light_range.0..=opts.light_range.1);
        let cam = CameraIntrinsics::new(opts.width, opts.height, fov, env.far_clip)?;

        let depth = render_depth(env, &pose, &cam, &opts.render)?;
        let rgb = render_rgb(env, &pose, &cam, light, &opts.render)?;

        let rgb_name = format!("rgb_{i:05}.ppm");
        let depth_name = format!("depth_{i:05}.pfm");
        write_ppm(&out_dir.join(&rgb_name), &rgb)?;
        write_pfm(&out_dir.join(&depth_name), &depth)?;

        let q = pose.orientation.quaternion();
        entries.push(DatasetEntry {
            rgb: rgb_name,
            depth: depth_name,
            position: [pose.position.x, pose.position.y, pose.position.z],
            orientation_wxyz: [q.w, q.i, q.j, q.k],
            light_intensity: light,
            vertical_fov_deg: fov,
        });
    }

    let manifest = DatasetManifest {
        seed,
        width: opts.width,
        height: opts.height,
        depth_semantics: "range_along_ray_mm".to_string(),
        config_hash: opts.config_hash.clone(),
        entries,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(out_dir.join("manifest.json"), json)?;
    Ok(manifest)
}
