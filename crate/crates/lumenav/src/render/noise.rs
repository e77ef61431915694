//! Seeded 3-D value noise for mucosal texture: radius perturbation and
//! albedo modulation.

use crate::geometry::Vec3;
use crate::util::splitmix64;

/// Smooth lattice noise; `sample` returns values in [-1, 1].
#[derive(Debug, Clone)]
pub struct ValueNoise {
    seed: u64,
    scale_mm: f64,
}

impl ValueNoise {
    pub fn new(seed: u64, scale_mm: f64) -> Self {
        ValueNoise { seed, scale_mm }
    }

    #[inline]
    fn lattice(&self, ix: i64, iy: i64, iz: i64) -> f64 {
        let h = splitmix64(
            self.seed
                ^ (ix as u64).wrapping_mul(0x9E37_79B1_85EB_CA87)
                ^ (iy as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
                ^ (iz as u64).wrapping_mul(0x1656_67B1_9E37_79F9),
        );
        // Map to [-1, 1).
        (h >> 11) as f64 / ((1u64 << 53) as f64) * 2.0 - 1.0
    }

    pub fn sample(&self, p: Vec3) -> f64 {
        let q = p / self.scale_mm;
        let (x0, y0, z0) = (q.x.floor(), q.y.floor(), q.z.floor());
        let (ix, iy, iz) = (x0 as i64, y0 as i64, z0 as i64);
        let (fx, fy, fz) = (q.x - x0, q.y - y0, q.z - z0);
        let (wx, wy, wz) = (smooth(fx), smooth(fy), smooth(fz));

        let mut acc = 0.0;
        for (dz, vz) in [(0, 1.0 - wz), (1, wz)] {
            for (dy, vy) in [(0, 1.0 - wy), (1, wy)] {
                for (dx, vx) in [(0, 1.0 - wx), (1, wx)] {
                    acc += vx * vy * vz * self.lattice(ix + dx, iy + dy, iz + dz);
                }
            }
        }
        acc
    }
}

/// Two-octave fractal value noise, normalized back to [-1, 1].
#[derive(Debug, Clone)]
pub struct Texture {
    coarse: ValueNoise,
    fine: ValueNoise,
}

impl Texture {
    pub fn new(seed: u64, scale_mm: f64) -> Self {
        Texture {
            coarse: ValueNoise::new(splitmix64(seed ^ 0xA1), scale_mm),
            fine: ValueNoise::new(splitmix64(seed ^ 0xB2), scale_mm * 0.37),
        }
    }

    #[inline]
    pub fn sample(&self, p: Vec3) -> f64 {
        (self.coarse.sample(p) + 0.5 * self.fine.sample(p)) / 1.5
    }
}

#[inline]
fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}
