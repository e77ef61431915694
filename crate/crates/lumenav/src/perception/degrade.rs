//! Parametric depth degradation: the surrogate for a learned monocular
//! depth estimator. Applies multiplicative log-normal noise, Gaussian
//! spatial blur, and sparse outlier dropout, in that order.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::render::DepthImage;
use crate::util::mix_seeds;

/// How per-frame RNG seeds are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SeedPolicy {
    /// Seed = mix(salt, frame_seed): every frame gets fresh noise.
    PerFrame { salt: u64 },
    /// Identical noise pattern on every frame.
    Fixed { seed: u64 },
}

impl Default for SeedPolicy {
    fn default() -> Self {
        SeedPolicy::PerFrame { salt: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradationProfile {
    /// Std-dev of the multiplicative log-normal noise (dimensionless).
    pub sigma_mult: f64,
    /// Gaussian blur std-dev, px.
    pub blur_radius_px: f64,
    /// Fraction of pixels replaced by locally smoothed outliers, in [0, 0.2].
    pub dropout_rate: f64,
    /// Outlier magnitude: replacement = local mean * exp(U(-1,1) * ln(scale)).
    pub outlier_scale: f64,
    #[serde(default)]
    pub seed_policy: SeedPolicy,
}

impl DegradationProfile {
    pub fn zero_noise() -> Self {
        DegradationProfile {
            sigma_mult: 0.0,
            blur_radius_px: 0.0,
            dropout_rate: 0.0,
            outlier_scale: 1.0,
            seed_policy: SeedPolicy::default(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sigma_mult == 0.0 && self.blur_radius_px < 0.01 && self.dropout_rate == 0.0
    }

    pub fn clamped(mut self) -> Self {
        self.sigma_mult = self.sigma_mult.max(0.0);
        self.blur_radius_px = self.blur_radius_px.max(0.0);
        self.dropout_rate = self.dropout_rate.clamp(0.0, 0.2);
        self.outlier_scale = self.outlier_scale.max(1.0);
        self
    }

    fn frame_seed(&self, frame_seed: u64) -> u64 {
        match self.seed_policy {
            SeedPolicy::PerFrame { salt } => mix_seeds(salt, frame_seed),
            SeedPolicy::Fixed { seed } => seed,
        }
    }
}

/// Spatial correlation length of the multiplicative noise field, relative
/// to the image width. Learned depth estimators err in smooth blobs, not
/// per-pixel speckle; correlated noise keeps depth ranks locally coherent
/// the way a real estimator does.
const NOISE_GRID_FRAC: f64 = 1.0;
/// Correlation length of the outlier-region fields (specular highlights
/// and dark holes fail in patches).
const OUTLIER_GRID_FRAC: f64 = 0.3;

/// A smooth standard-normal field: iid N(0,1) lattice values, bilinearly
/// interpolated and renormalized so every pixel's marginal is exactly
/// N(0,1).
fn smooth_normal_field(w: usize, h: usize, grid_px: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let gw = (w as f64 / grid_px).ceil() as usize + 2;
    let gh = (h as f64 / grid_px).ceil() as usize + 2;
    let grid: Vec<f64> = (0..gw * gh).map(|_| rng.sample(StandardNormal)).collect();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let gy = y as f64 / grid_px;
        let (iy, fy) = (gy.floor() as usize, gy.fract());
        for x in 0..w {
            let gx = x as f64 / grid_px;
            let (ix, fx) = (gx.floor() as usize, gx.fract());
            let w00 = (1.0 - fx) * (1.0 - fy);
            let w10 = fx * (1.0 - fy);
            let w01 = (1.0 - fx) * fy;
            let w11 = fx * fy;
            let v = w00 * grid[iy * gw + ix]
                + w10 * grid[iy * gw + ix + 1]
                + w01 * grid[(iy + 1) * gw + ix]
                + w11 * grid[(iy + 1) * gw + ix + 1];
            let norm = (w00 * w00 + w10 * w10 + w01 * w01 + w11 * w11).sqrt();
            out[y * w + x] = v / norm;
        }
    }
    out
}

/// Standard normal CDF (Abramowitz & Stegun 7.1.26, |err| < 7.5e-8).
fn phi(x: f64) -> f64 {
    let t = 1.0 / (1.0 + 0.2316419 * x.abs());
    let poly = t
        * (0.319381530 + t * (-0.356563782 + t * (1.781477937 + t * (-1.821255978 + t * 1.330274429))));
    let tail = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt() * poly;
    if x >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Degrades a ground-truth depth map. Deterministic in (profile,
/// frame_seed); valid output values are clamped to (0, far_clip_mm].
pub fn degrade_depth(
    gt: &DepthImage,
    profile: &DegradationProfile,
    frame_seed: u64,
    far_clip_mm: f64,
) -> DepthImage {
    if profile.is_identity() {
        return gt.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(profile.frame_seed(frame_seed));
    let (w, h) = (gt.width, gt.height);

    // Stage 1: multiplicative log-normal noise. The exponent mixes a
    // per-frame global component (monocular scale ambiguity, the dominant
    // error mode of learned estimators; rank-preserving) with a smooth
    // spatial field. Marginally each pixel is exactly lognormal(sigma_mult):
    // var = GLOBAL_SHARE + (1 - GLOBAL_SHARE) = 1.
    const GLOBAL_SHARE: f64 = 0.9;
    let z_global: f64 = rng.sample(StandardNormal);
    let field = smooth_normal_field(w, h, w as f64 * NOISE_GRID_FRAC, &mut rng);
    let a = GLOBAL_SHARE.sqrt();
    let b = (1.0 - GLOBAL_SHARE).sqrt();
    let mut noisy = DepthImage::new_invalid(w, h);
    for y in 0..h {
        for x in 0..w {
            if let Some(d) = gt.get(x, y) {
                let z = a * z_global + b * field[y * w + x];
                noisy.set(x, y, d * (profile.sigma_mult * z).exp() as f32);
            }
        }
    }

    // Stage 2: validity-aware Gaussian blur.
    let blurred = if profile.blur_radius_px >= 0.01 {
        gaussian_blur(&noisy, profile.blur_radius_px)
    } else {
        noisy
    };

    // Stage 3: sparse outliers anchored on a locally smoothed base.
    // Selection and magnitude both come from smooth fields so failures
    // form coherent patches; per pixel the selection probability is
    // exactly dropout_rate and the exponent is uniform on
    // [-ln(scale), ln(scale)], same marginals as independent draws.
    let mut out = blurred.clone();
    if profile.dropout_rate > 0.0 {
        let base = if profile.blur_radius_px >= 0.01 {
            blurred.clone()
        } else {
            box3_mean(&blurred)
        };
        let grid = w as f64 * OUTLIER_GRID_FRAC;
        let select = smooth_normal_field(w, h, grid, &mut rng);
        let magnitude = smooth_normal_field(w, h, grid, &mut rng);
        let ln_scale = profile.outlier_scale.max(1.0).ln();
        for y in 0..h {
            for x in 0..w {
                if phi(select[y * w + x]) >= profile.dropout_rate {
                    continue;
                }
                let u = 2.0 * phi(magnitude[y * w + x]) - 1.0;
                if let Some(b) = base.get(x, y) {
                    out.set(x, y, b * (u * ln_scale).exp() as f32);
                }
            }
        }
    }

    // Clamp into the sensor range.
    let mut clamped = DepthImage::new_invalid(w, h);
    for y in 0..h {
        for x in 0..w {
            if let Some(d) = out.get(x, y) {
                clamped.set(x, y, d.clamp(1e-3, far_clip_mm as f32));
            }
        }
    }
    clamped
}

fn gaussian_blur(img: &DepthImage, sigma: f64) -> DepthImage {
    let radius = (3.0 * sigma).ceil() as isize;
    let weights: Vec<f64> = (-radius..=radius)
        .map(|i| (-0.5 * (i as f64 / sigma).powi(2)).exp())
        .collect();

    let (w, h) = (img.width as isize, img.height as isize);
    let pass = |src: &DepthImage, dx: isize, dy: isize| {
        let mut dst = DepthImage::new_invalid(img.width, img.height);
        for y in 0..h {
            for x in 0..w {
                if !src.is_valid(x as usize, y as usize) {
                    continue;
                }
                let mut acc = 0.0;
                let mut wsum = 0.0;
                for (k, wt) in weights.iter().enumerate() {
                    let o = k as isize - radius;
                    let (sx, sy) = (x + o * dx, y + o * dy);
                    if sx < 0 || sy < 0 || sx >= w || sy >= h {
                        continue;
                    }
                    if let Some(v) = src.get(sx as usize, sy as usize) {
                        acc += wt * v as f64;
                        wsum += wt;
                    }
                }
                dst.set(x as usize, y as usize, (acc / wsum) as f32);
            }
        }
        dst
    };
    let horizontal = pass(img, 1, 0);
    pass(&horizontal, 0, 1)
}

fn box3_mean(img: &DepthImage) -> DepthImage {
    let (w, h) = (img.width as isize, img.height as isize);
    let mut dst = DepthImage::new_invalid(img.width, img.height);
    for y in 0..h {
        for x in 0..w {
            if !img.is_valid(x as usize, y as usize) {
                continue;
            }
            let mut acc = 0.0;
            let mut n = 0.0;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (sx, sy) = (x + dx, y + dy);
                    if sx < 0 || sy < 0 || sx >= w || sy >= h {
                        continue;
                    }
                    if let Some(v) = img.get(sx as usize, sy as usize) {
                        acc += v as f64;
                        n += 1.0;
                    }
                }
            }
            dst.set(x as usize, y as usize, (acc / n) as f32);
        }
    }
    dst
}
