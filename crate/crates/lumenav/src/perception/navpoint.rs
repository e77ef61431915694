//! Navigation-point extraction from a depth map.
//!
//! Valid depth values are divided into `n_levels` quantile bins (level 1 =
//! nearest, level `n_levels` = farthest). The target is the area centroid
//! of the largest 4-connected component of the chosen level's pixel set.
//! Quantiles are nearest-rank order statistics, so the extraction is
//! exactly invariant under strictly monotone rescalings of the depth map.

use serde::{Deserialize, Serialize};

use crate::error::PerceptionError;
use crate::render::DepthImage;

/// Default quantile level count ("20 quantile levels").
pub const DEFAULT_N_LEVELS: usize = 20;
/// Default target level ("centroid of the 8th-level depth contour").
pub const DEFAULT_LEVEL: usize = 8;
/// Components smaller than this are rejected as targets.
pub const MIN_COMPONENT_PIXELS: usize = 10;

/// Whether quantile levels count from the nearest depths (level 1 =
/// nearest bin) or from the farthest (level 1 = deepest bin).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelOrdering {
    #[default]
    NearFirst,
    FarFirst,
}

/// Image-plane navigation target in continuous pixel coordinates (the
/// center of pixel (i, j) is at (i + 0.5, j + 0.5)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavigationTarget {
    pub t_x: f64,
    pub t_y: f64,
    pub valid: bool,
    pub level_pixel_count: usize,
}

impl NavigationTarget {
    pub fn invalid() -> Self {
        NavigationTarget {
            t_x: 0.0,
            t_y: 0.0,
            valid: false,
            level_pixel_count: 0,
        }
    }
}

/// Extracts the navigation point from `depth`.
///
/// Level `k` is the pixel set with depth in `(q_{(k-1)/n}, q_{k/n}]` where
/// `q_p` is the nearest-rank quantile of the valid depth values. Returns an
/// invalid target if the selected bin is empty or its largest connected
/// component has fewer than [`MIN_COMPONENT_PIXELS`] pixels.
pub fn extract_navigation_point(
    depth: &DepthImage,
    level: usize,
    n_levels: usize,
) -> Result<NavigationTarget, PerceptionError> {
    extract_navigation_point_ordered(depth, level, n_levels, LevelOrdering::NearFirst)
}

/// As [`extract_navigation_point`], with an explicit level ordering.
pub fn extract_navigation_point_ordered(
    depth: &DepthImage,
    level: usize,
    n_levels: usize,
    ordering: LevelOrdering,
) -> Result<NavigationTarget, PerceptionError> {
    if level < 1 || level > n_levels || n_levels < 1 {
        return Err(PerceptionError::BadLevel { level, n_levels });
    }
    let level = match ordering {
        LevelOrdering::NearFirst => level,
        LevelOrdering::FarFirst => n_levels + 1 - level,
    };
    let mut values: Vec<f32> = depth.valid_pixels().map(|(_, _, d)| d).collect();
    if values.is_empty() {
        return Err(PerceptionError::EmptyDepth);
    }
    values.sort_unstable_by(f32::total_cmp);
    let m = values.len();

    // Nearest-rank quantile: q_{k/n} = sorted[ceil(k*m/n) - 1].
    let rank = |k: usize| -> usize { (k * m).div_ceil(n_levels).max(1) - 1 };
    let hi = values[rank(level)];
    let lo = if level == 1 {
        f32::NEG_INFINITY
    } else {
        values[rank(level - 1)]
    };

    let (w, h) = (depth.width, depth.height);
    let member = |x: usize, y: usize| -> bool {
        depth
            .get(x, y)
            .map(|d| d > lo && d <= hi)
            .unwrap_or(false)
    };

    // Largest 4-connected component, BFS in row-major discovery order;
    // ties keep the earlier component.
    let mut visited = vec![false; w * h];
    let mut best: Option<(usize, u64, u64)> = None; // (size, sum_x, sum_y)
    let mut queue = std::collections::VecDeque::new();
    for sy in 0..h {
        for sx in 0..w {
            if visited[sy * w + sx] || !member(sx, sy) {
                continue;
            }
            visited[sy * w + sx] = true;
            queue.push_back((sx, sy));
            let (mut size, mut sum_x, mut sum_y) = (0usize, 0u64, 0u64);
            while let Some((x, y)) = queue.pop_front() {
                size += 1;
                sum_x += x as u64;
                sum_y += y as u64;
                let mut try_push = |nx: usize, ny: usize| {
                    if !visited[ny * w + nx] && member(nx, ny) {
                        visited[ny * w + nx] = true;
                        queue.push_back((nx, ny));
                    }
                };
                if x > 0 {
                    try_push(x - 1, y);
                }
                if x + 1 < w {
                    try_push(x + 1, y);
                }
                if y > 0 {
                    try_push(x, y - 1);
                }
                if y + 1 < h {
                    try_push(x, y + 1);
                }
            }
            if best.is_none_or(|(s, _, _)| size > s) {
                best = Some((size, sum_x, sum_y));
            }
        }
    }

    match best {
        Some((size, sum_x, sum_y)) if size >= MIN_COMPONENT_PIXELS => Ok(NavigationTarget {
            t_x: sum_x as f64 / size as f64 + 0.5,
            t_y: sum_y as f64 / size as f64 + 0.5,
            valid: true,
            level_pixel_count: size,
        }),
        _ => Ok(NavigationTarget::invalid()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_depth_is_invalid() {
        let img = DepthImage::from_values(16, 16, vec![25.0; 256]);
        let t = extract_navigation_point(&img, 8, 20).unwrap();
        assert!(!t.valid);
    }

    #[test]
    fn bad_level_rejected() {
        let img = DepthImage::from_values(16, 16, vec![25.0; 256]);
        assert!(extract_navigation_point(&img, 0, 20).is_err());
        assert!(extract_navigation_point(&img, 21, 20).is_err());
    }

    #[test]
    fn empty_depth_rejected() {
        let img = DepthImage::new_invalid(8, 8);
        assert!(matches!(
            extract_navigation_point(&img, 8, 20),
            Err(PerceptionError::EmptyDepth)
        ));
    }

    #[test]
    fn symmetric_field_centers_target() {
        // Depth grows with the Chebyshev radius: every level bin is a
        // square annulus (connected at any thickness), centroid at the
        // center by symmetry.
        let (w, h) = (32, 32);
        let mut vals = vec![0.0f32; w * h];
        for y in 0..h {
            for x in 0..w {
                let dx = (x as f64 + 0.5 - 16.0).abs();
                let dy = (y as f64 + 0.5 - 16.0).abs();
                vals[y * w + x] = (5.0 + dx.max(dy)) as f32;
            }
        }
        let img = DepthImage::from_values(w, h, vals);
        let t = extract_navigation_point(&img, 8, 20).unwrap();
        assert!(t.valid);
        assert!((t.t_x - 16.0).abs() < 1e-9, "t_x {}", t.t_x);
        assert!((t.t_y - 16.0).abs() < 1e-9);
    }

    fn smooth_field(w: usize, h: usize) -> Vec<f32> {
        (0..w * h)
            .map(|i| {
                let (x, y) = ((i % w) as f64, (i / w) as f64);
                (20.0 + 3.0 * (x / 5.3).sin() + 4.0 * (y / 4.1).cos() + 2.0 * ((x + 2.0 * y) / 7.7).sin())
                    as f32
            })
            .collect()
    }

    #[test]
    fn monotone_rescale_invariance() {
        let (w, h) = (32, 32);
        let vals = smooth_field(w, h);
        let img = DepthImage::from_values(w, h, vals.clone());
        let transformed =
            DepthImage::from_values(w, h, vals.iter().map(|v| (v / 8.0).exp()).collect());
        for level in [1, 5, 8, 20] {
            let a = extract_navigation_point(&img, level, 20).unwrap();
            let b = extract_navigation_point(&transformed, level, 20).unwrap();
            assert_eq!(a, b, "level {level}");
        }
    }

    #[test]
    fn mirror_equivariance() {
        let (w, h) = (32, 28);
        let vals = smooth_field(w, h);
        let img = DepthImage::from_values(w, h, vals.clone());
        let mut mirrored = vec![0.0f32; w * h];
        for y in 0..h {
            for x in 0..w {
                mirrored[y * w + (w - 1 - x)] = vals[y * w + x];
            }
        }
        let mimg = DepthImage::from_values(w, h, mirrored);
        let a = extract_navigation_point(&img, 3, 5).unwrap();
        let b = extract_navigation_point(&mimg, 3, 5).unwrap();
        assert!(a.valid && b.valid);
        // Continuous coordinates: mirroring maps t_x to W - t_x.
        assert!((b.t_x - (w as f64 - a.t_x)).abs() < 1e-9);
        assert!((b.t_y - a.t_y).abs() < 1e-9);
    }
}
