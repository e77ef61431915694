//! Procedural colon-like tube generation.
//!
//! Paths are planned as alternating straight runs and circular arcs in
//! slowly rolling turn planes, then interpolated by the centerline spline.
//! `simple` profiles use gentle bends only; `complex` profiles add more and
//! sharper bends. Generation is a pure function of (profile, seed): failed
//! candidates advance an attempt counter that is mixed into the RNG seed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::spline::{CenterlineSpline, Vec3};
use super::tube::{ProfileTag, TubeEnvironment};
use crate::error::GeometryError;
use crate::util::mix_seeds;

const MAX_ATTEMPTS: usize = 64;
const CONTROL_SPACING_MM: f64 = 25.0;
const ARC_STEP_RAD: f64 = 0.26; // ~15 degrees between control points on arcs

/// Generates a tube environment deterministically from (profile, seed).
pub fn generate_environment(
    profile: ProfileTag,
    seed: u64,
) -> Result<TubeEnvironment, GeometryError> {
    let profile_salt = match profile {
        ProfileTag::Simple => 0x51,
        ProfileTag::Complex => 0xC0,
    };
    for attempt in 0..MAX_ATTEMPTS {
        let rng_seed = mix_seeds(seed, profile_salt ^ ((attempt as u64) << 32));
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        if let Some(env) = try_generate(profile, seed, &mut rng) {
            return Ok(env);
        }
    }
    Err(GeometryError::GenerationFailed {
        seed,
        attempts: MAX_ATTEMPTS,
    })
}

fn try_generate(profile: ProfileTag, seed: u64, rng: &mut ChaCha8Rng) -> Option<TubeEnvironment> {
    let plan = plan_path(profile, rng);
    let points = trace_path(&plan);
    if points.len() < 8 {
        return None;
    }
    let radii = radius_profile(&points, &plan);
    let spline = CenterlineSpline::build(&points, &radii).ok()?;

    let total = spline.total_length();
    if !(600.0..=1200.0).contains(&total) {
        return None;
    }
    let detected = count_bends(&spline, 0.004, 15.0);
    if detected < plan.bends.len() {
        return None;
    }
    if profile == ProfileTag::Simple && detected > 5 {
        return None;
    }
    if self_intersects(&spline) {
        return None;
    }
    TubeEnvironment::new(spline, mix_seeds(seed, 0x7e47), profile, 300.0).ok()
}

struct BendPlan {
    angle_rad: f64,
    radius_mm: f64,
    roll_rad: f64,
}

struct PathPlan {
    straights: Vec<f64>,
    bends: Vec<BendPlan>,
    base_radius: f64,
    wave: [(f64, f64, f64); 2], // (amplitude, wavelength, phase)
    radius_clamp: (f64, f64),
}

fn plan_path(profile: ProfileTag, rng: &mut ChaCha8Rng) -> PathPlan {
    let (n_bends, base_radius, clamp_hi) = match profile {
        ProfileTag::Simple => (rng.gen_range(3..=5usize), rng.gen_range(17.0..23.0), 25.0),
        ProfileTag::Complex => (rng.gen_range(6..=10usize), rng.gen_range(16.0..20.0), 23.0),
    };

    let mut sharp_idx = Vec::new();
    if profile == ProfileTag::Complex {
        // At least two sharp bends, not adjacent to the entry.
        let a = rng.gen_range(1..n_bends);
        let mut b = rng.gen_range(1..n_bends);
        while b == a {
            b = rng.gen_range(1..n_bends);
        }
        sharp_idx.push(a);
        sharp_idx.push(b);
    }

    let mut bends = Vec::with_capacity(n_bends);
    for i in 0..n_bends {
        let (angle, radius) = match profile {
            ProfileTag::Simple => (
                rng.gen_range(25.0_f64..55.0).to_radians(),
                rng.gen_range(4.5..7.0) * clamp_hi,
            ),
            ProfileTag::Complex => {
                if sharp_idx.contains(&i) {
                    // Sharp enough that cutting the chord contacts the
                    // inner wall: sagitta > typical lumen radius.
                    (
                        rng.gen_range(110.0_f64..150.0).to_radians(),
                        rng.gen_range(33.0..37.0),
                    )
                } else {
                    (
                        rng.gen_range(30.0_f64..70.0).to_radians(),
                        rng.gen_range(2.6..5.0) * clamp_hi,
                    )
                }
            }
        };
        // Roll the turn plane; biased toward alternating turns so the path
        // snakes forward instead of coiling.
        let roll = if i == 0 {
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
        } else {
            std::f64::consts::PI + rng.gen_range(-1.0..1.0)
        };
        bends.push(BendPlan {
            angle_rad: angle,
            radius_mm: radius,
            roll_rad: roll,
        });
    }

    // Straight runs between bends; trim or pad the total toward the length
    // budget after accounting for arc lengths.
    let arc_total: f64 = bends.iter().map(|b| b.angle_rad * b.radius_mm).sum();
    let target = rng.gen_range(700.0..1100.0);
    let straight_budget = (target - arc_total).max(60.0 * (n_bends as f64 + 1.0));
    let mut weights: Vec<f64> = (0..=n_bends).map(|_| rng.gen_range(0.6..1.4)).collect();
    let wsum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w = (*w / wsum * straight_budget).max(55.0);
    }

    PathPlan {
        straights: weights,
        bends,
        base_radius,
        wave: [
            (
                rng.gen_range(1.0..2.2),
                rng.gen_range(200.0..400.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ),
            (
                rng.gen_range(0.4..1.0),
                rng.gen_range(60.0..120.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ),
        ],
        radius_clamp: (15.0, clamp_hi),
    }
}

fn trace_path(plan: &PathPlan) -> Vec<Vec3> {
    let mut points: Vec<Vec3> = Vec::new();
    let mut pos = Vec3::zeros();
    let mut dir = Vec3::new(0.0, 0.0, 1.0);
    let mut lateral = Vec3::new(1.0, 0.0, 0.0);

    let push = |points: &mut Vec<Vec3>, p: Vec3| {
        if points.last().is_none_or(|q| (p - q).norm() > 1e-6) {
            points.push(p);
        }
    };

    push(&mut points, pos);
    for (i, straight) in plan.straights.iter().enumerate() {
        // Straight run with interior control points so the spline stays flat.
        let n = ((straight / CONTROL_SPACING_MM).ceil() as usize).max(2);
        for k in 1..=n {
            push(&mut points, pos + dir * (straight * k as f64 / n as f64));
        }
        pos += dir * *straight;

        if let Some(bend) = plan.bends.get(i) {
            // Rotate the turn plane around the current heading.
            lateral = rotate_about(lateral, dir, bend.roll_rad);
            lateral = (lateral - dir * lateral.dot(&dir)).normalize();

            let steps = ((bend.angle_rad / ARC_STEP_RAD).ceil() as usize).max(2);
            let (p0, d0, l0) = (pos, dir, lateral);
            for k in 1..=steps {
                let a = bend.angle_rad * k as f64 / steps as f64;
                let p = p0 + (d0 * a.sin() + l0 * (1.0 - a.cos())) * bend.radius_mm;
                push(&mut points, p);
            }
            let a = bend.angle_rad;
            pos = p0 + (d0 * a.sin() + l0 * (1.0 - a.cos())) * bend.radius_mm;
            dir = d0 * a.cos() + l0 * a.sin();
            lateral = -d0 * a.sin() + l0 * a.cos();
        }
    }
    points
}

fn radius_profile(points: &[Vec3], plan: &PathPlan) -> Vec<f64> {
    let mut s = 0.0;
    let mut radii = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            s += (p - points[i - 1]).norm();
        }
        let mut r = plan.base_radius;
        for (amp, wavelength, phase) in plan.wave {
            r += amp * (std::f64::consts::TAU * s / wavelength + phase).sin();
        }
        radii.push(r.clamp(plan.radius_clamp.0, plan.radius_clamp.1));
    }
    radii
}

fn rotate_about(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(&v) * s + axis * axis.dot(&v) * (1.0 - c)
}

/// Counts bends: maximal runs of arclength where curvature exceeds
/// `kappa_threshold` (1/mm) whose integrated turn angle reaches
/// `min_turn_deg`.
pub fn count_bends(spline: &CenterlineSpline, kappa_threshold: f64, min_turn_deg: f64) -> usize {
    let step = 2.0;
    let n = (spline.total_length() / step).floor() as usize;
    let mut count = 0;
    let mut run_turn = 0.0;
    for i in 0..=n {
        let s = (i as f64 * step).min(spline.total_length());
        let kappa = spline.curvature_at(s).unwrap_or(0.0);
        if kappa > kappa_threshold {
            run_turn += kappa * step;
        } else {
            if run_turn.to_degrees() >= min_turn_deg {
                count += 1;
            }
            run_turn = 0.0;
        }
    }
    if run_turn.to_degrees() >= min_turn_deg {
        count += 1;
    }
    count
}

/// True when two non-adjacent sections of the tube overlap.
fn self_intersects(spline: &CenterlineSpline) -> bool {
    let step = 4.0;
    let n = (spline.total_length() / step).floor() as usize;
    let samples: Vec<(f64, Vec3, f64)> = (0..=n)
        .map(|i| {
            let s = (i as f64 * step).min(spline.total_length());
            (
                s,
                spline.point_at(s).unwrap(),
                spline.radius_at(s).unwrap(),
            )
        })
        .collect();
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let (si, pi, ri) = samples[i];
            let (sj, pj, rj) = samples[j];
            if sj - si < 80.0 {
                continue;
            }
            if (pi - pj).norm() < ri + rj + 2.0 {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = generate_environment(ProfileTag::Simple, 42).unwrap();
        let b = generate_environment(ProfileTag::Simple, 42).unwrap();
        assert_eq!(
            a.centerline.control_points(),
            b.centerline.control_points()
        );
        assert_eq!(a.centerline.control_radii(), b.centerline.control_radii());
        assert_eq!(a.texture_seed, b.texture_seed);
    }

    #[test]
    fn complex_has_at_least_six_bends() {
        for seed in [1u64, 2, 3] {
            let env = generate_environment(ProfileTag::Complex, seed).unwrap();
            let detected = count_bends(&env.centerline, 0.004, 15.0);
            assert!(detected >= 6, "seed {seed}: {detected} bends");
        }
    }

    #[test]
    fn generated_tubes_are_traversable() {
        for seed in 0..4u64 {
            for profile in [ProfileTag::Simple, ProfileTag::Complex] {
                let env = generate_environment(profile, seed).unwrap();
                assert!(env.min_radius() > 2.0 * super::super::tube::TIP_BODY_RADIUS_MM);
                let len = env.centerline.total_length();
                assert!((600.0..=1200.0).contains(&len), "length {len}");
            }
        }
    }
}
