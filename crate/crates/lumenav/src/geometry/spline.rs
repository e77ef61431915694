//! Centerline splines: Catmull-Rom interpolation with a chordal knot vector,
//! an arclength table, and nearest-point queries.
//!
//! All coordinates and lengths are in millimetres. The spline interpolates
//! every control point, is C¹ across segments, and carries a per-control-point
//! lumen radius interpolated with the same basis.

use nalgebra::Vector3;

use crate::error::GeometryError;

pub type Vec3 = Vector3<f64>;

/// Spacing of the dense arclength table, mm.
const TABLE_STEP_MM: f64 = 0.25;
/// Spacing of the coarse nearest-point index, mm.
const INDEX_STEP_MM: f64 = 2.0;

/// Approximate nearest-point data from the coarse index, used by the ray
/// marcher.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CoarseNearest {
    pub s_star: f64,
    pub distance: f64,
    pub radius: f64,
    pub point: Vec3,
}

/// Result of a nearest-point query against the centerline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestPointResult {
    /// Arclength of the closest centerline point, mm.
    pub s_star: f64,
    /// The closest centerline point.
    pub point: Vec3,
    /// Euclidean distance from the query to `point`, mm.
    pub distance: f64,
    /// Lumen radius at `s_star`, mm.
    pub radius_at: f64,
}

/// An interpolating centerline with per-point lumen radii.
///
/// Construction pads the control polygon with reflected endpoints so the
/// curve passes through all supplied points, then precomputes a dense
/// arclength table (accurate to well under 0.1 mm) and a coarse sample
/// index used to seed nearest-point searches.
#[derive(Debug, Clone)]
pub struct CenterlineSpline {
    /// Padded control points; the originals sit at indices `1..=n`.
    pts: Vec<Vec3>,
    /// Padded per-point radii, aligned with `pts`.
    radii: Vec<f64>,
    /// Chordal knot values, aligned with `pts`.
    knots: Vec<f64>,
    /// Dense (t, s) samples, strictly increasing in both.
    table_t: Vec<f64>,
    table_s: Vec<f64>,
    /// Coarse samples for nearest-point seeding, even spacing in s.
    index_s: Vec<f64>,
    index_pts: Vec<Vec3>,
    index_radii: Vec<f64>,
    total_len: f64,
    n_control: usize,
}

impl CenterlineSpline {
    /// Builds a chordal Catmull-Rom spline through `control_points` with the
    /// given lumen `radii` (one per point).
    pub fn build(control_points: &[Vec3], radii: &[f64]) -> Result<Self, GeometryError> {
        if control_points.len() < 4 {
            return Err(GeometryError::TooFewControlPoints(control_points.len()));
        }
        if control_points.len() != radii.len() {
            return Err(GeometryError::LengthMismatch {
                points: control_points.len(),
                radii: radii.len(),
            });
        }
        for (i, &r) in radii.iter().enumerate() {
            if r <= 0.0 || !r.is_finite() {
                return Err(GeometryError::NonPositiveRadius { index: i, radius: r });
            }
        }
        for (i, pair) in control_points.windows(2).enumerate() {
            if (pair[1] - pair[0]).norm() < 1e-9 {
                return Err(GeometryError::DuplicateControlPoint(i));
            }
        }

        let n = control_points.len();
        let mut pts = Vec::with_capacity(n + 2);
        pts.push(2.0 * control_points[0] - control_points[1]);
        pts.extend_from_slice(control_points);
        pts.push(2.0 * control_points[n - 1] - control_points[n - 2]);

        let mut rad = Vec::with_capacity(n + 2);
        // Linear extrapolation keeps linear tapers exact; clamp away from zero.
        rad.push((2.0 * radii[0] - radii[1]).max(1e-3));
        rad.extend_from_slice(radii);
        rad.push((2.0 * radii[n - 1] - radii[n - 2]).max(1e-3));

        let mut knots = Vec::with_capacity(n + 2);
        knots.push(0.0);
        for i in 1..pts.len() {
            knots.push(knots[i - 1] + (pts[i] - pts[i - 1]).norm());
        }

        let mut spline = CenterlineSpline {
            pts,
            radii: rad,
            knots,
            table_t: Vec::new(),
            table_s: Vec::new(),
            index_s: Vec::new(),
            index_pts: Vec::new(),
            index_radii: Vec::new(),
            total_len: 0.0,
            n_control: n,
        };
        spline.build_tables();
        Ok(spline)
    }

    /// Number of (unpadded) control points.
    pub fn control_point_count(&self) -> usize {
        self.n_control
    }

    /// The original control points.
    pub fn control_points(&self) -> &[Vec3] {
        &self.pts[1..=self.n_control]
    }

    /// The original per-point radii.
    pub fn control_radii(&self) -> &[f64] {
        &self.radii[1..=self.n_control]
    }

    /// Total arclength, mm.
    pub fn total_length(&self) -> f64 {
        self.total_len
    }

    fn build_tables(&mut self) {
        let t_start = self.knots[1];
        let t_end = self.knots[self.n_control];
        let span = t_end - t_start;
        let steps = ((span / TABLE_STEP_MM).ceil() as usize).max(64);

        let mut table_t = Vec::with_capacity(steps + 1);
        let mut table_s = Vec::with_capacity(steps + 1);
        let mut prev = self.eval_pos_at_t(t_start);
        let mut s = 0.0;
        table_t.push(t_start);
        table_s.push(0.0);
        for i in 1..=steps {
            let t = t_start + span * (i as f64) / (steps as f64);
            let p = self.eval_pos_at_t(t);
            s += (p - prev).norm();
            prev = p;
            table_t.push(t);
            table_s.push(s);
        }
        self.total_len = s;
        self.table_t = table_t;
        self.table_s = table_s;

        let n_index = ((self.total_len / INDEX_STEP_MM).ceil() as usize).max(8);
        let mut index_s = Vec::with_capacity(n_index + 1);
        let mut index_pts = Vec::with_capacity(n_index + 1);
        let mut index_radii = Vec::with_capacity(n_index + 1);
        for i in 0..=n_index {
            let s_i = self.total_len * (i as f64) / (n_index as f64);
            let t = self.t_for_s(s_i);
            let p = self.eval_pos_at_t(t);
            index_s.push(s_i);
            index_pts.push(p);
            index_radii.push(self.radius_at_t(t));
        }
        self.index_s = index_s;
        self.index_pts = index_pts;
        self.index_radii = index_radii;
    }

    /// Barry-Goldman evaluation of position only; cheaper than
    /// `eval_at_t` for the nearest-point hot path.
    fn eval_pos_at_t(&self, t: f64) -> Vec3 {
        let seg = self.segment_for_t(t);
        let (p0, p1, p2, p3) = (
            self.pts[seg - 1],
            self.pts[seg],
            self.pts[seg + 1],
            self.pts[seg + 2],
        );
        let (t0, t1, t2, t3) = (
            self.knots[seg - 1],
            self.knots[seg],
            self.knots[seg + 1],
            self.knots[seg + 2],
        );
        let a1 = lerp_pair(p0, p1, t0, t1, t);
        let a2 = lerp_pair(p1, p2, t1, t2, t);
        let a3 = lerp_pair(p2, p3, t2, t3, t);
        let b1 = lerp_pair(a1, a2, t0, t2, t);
        let b2 = lerp_pair(a2, a3, t1, t3, t);
        lerp_pair(b1, b2, t1, t2, t)
    }

    /// Barry-Goldman evaluation of position and d(position)/dt at knot
    /// parameter `t`.
    fn eval_at_t(&self, t: f64) -> (Vec3, Vec3) {
        let seg = self.segment_for_t(t);
        let (p0, p1, p2, p3) = (
            self.pts[seg - 1],
            self.pts[seg],
            self.pts[seg + 1],
            self.pts[seg + 2],
        );
        let (t0, t1, t2, t3) = (
            self.knots[seg - 1],
            self.knots[seg],
            self.knots[seg + 1],
            self.knots[seg + 2],
        );

        let a1 = lerp_pair(p0, p1, t0, t1, t);
        let a2 = lerp_pair(p1, p2, t1, t2, t);
        let a3 = lerp_pair(p2, p3, t2, t3, t);
        let da1 = (p1 - p0) / (t1 - t0);
        let da2 = (p2 - p1) / (t2 - t1);
        let da3 = (p3 - p2) / (t3 - t2);

        let b1 = lerp_pair(a1, a2, t0, t2, t);
        let b2 = lerp_pair(a2, a3, t1, t3, t);
        let db1 = lerp_deriv(a1, a2, da1, da2, t0, t2, t);
        let db2 = lerp_deriv(a2, a3, da2, da3, t1, t3, t);

        let c = lerp_pair(b1, b2, t1, t2, t);
        let dc = lerp_deriv(b1, b2, db1, db2, t1, t2, t);
        (c, dc)
    }

    fn radius_at_t(&self, t: f64) -> f64 {
        let seg = self.segment_for_t(t);
        let (r0, r1, r2, r3) = (
            self.radii[seg - 1],
            self.radii[seg],
            self.radii[seg + 1],
            self.radii[seg + 2],
        );
        let (t0, t1, t2, t3) = (
            self.knots[seg - 1],
            self.knots[seg],
            self.knots[seg + 1],
            self.knots[seg + 2],
        );
        let a1 = lerp_s(r0, r1, t0, t1, t);
        let a2 = lerp_s(r1, r2, t1, t2, t);
        let a3 = lerp_s(r2, r3, t2, t3, t);
        let b1 = lerp_s(a1, a2, t0, t2, t);
        let b2 = lerp_s(a2, a3, t1, t3, t);
        lerp_s(b1, b2, t1, t2, t).max(1e-3)
    }

    /// Index of the segment (left real control point, padded indexing) that
    /// contains `t`.
    fn segment_for_t(&self, t: f64) -> usize {
        let lo = self.knots[1];
        let hi = self.knots[self.n_control];
        let t = t.clamp(lo, hi);
        // Binary search over the real-point knots 1..=n_control.
        let mut a = 1;
        let mut b = self.n_control - 1;
        while a < b {
            let mid = (a + b).div_ceil(2);
            if self.knots[mid] <= t {
                a = mid;
            } else {
                b = mid - 1;
            }
        }
        a.min(self.n_control - 1)
    }

    /// Knot parameter for an arclength via the table, linear interpolation.
    /// The table is near-uniform in s, so an interpolation guess plus a
    /// local walk beats a binary search.
    fn t_for_s(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.total_len);
        let last = self.table_s.len() - 1;
        let mut i = ((s / self.total_len * last as f64) as usize).clamp(1, last);
        while self.table_s[i] < s && i < last {
            i += 1;
        }
        while self.table_s[i - 1] > s && i > 1 {
            i -= 1;
        }
        let (s0, s1) = (self.table_s[i - 1], self.table_s[i]);
        let (t0, t1) = (self.table_t[i - 1], self.table_t[i]);
        let w = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        t0 + w * (t1 - t0)
    }

    fn check_s(&self, s: f64) -> Result<(), GeometryError> {
        if !s.is_finite() || s < -1e-9 || s > self.total_len + 1e-9 {
            return Err(GeometryError::ArclengthOutOfRange {
                s,
                total: self.total_len,
            });
        }
        Ok(())
    }

    /// Centerline point at arclength `s`.
    pub fn point_at(&self, s: f64) -> Result<Vec3, GeometryError> {
        self.check_s(s)?;
        Ok(self.eval_pos_at_t(self.t_for_s(s)))
    }

    /// Unit tangent at arclength `s`.
    pub fn tangent_at(&self, s: f64) -> Result<Vec3, GeometryError> {
        self.check_s(s)?;
        let (_, d) = self.eval_at_t(self.t_for_s(s));
        let n = d.norm();
        if n < 1e-12 {
            return Err(GeometryError::DegenerateTangent { s });
        }
        Ok(d / n)
    }

    /// Lumen radius at arclength `s`.
    pub fn radius_at(&self, s: f64) -> Result<f64, GeometryError> {
        self.check_s(s)?;
        Ok(self.radius_at_t(self.t_for_s(s)))
    }

    /// Curvature magnitude at arclength `s`, 1/mm, via a central difference
    /// of the unit tangent.
    pub fn curvature_at(&self, s: f64) -> Result<f64, GeometryError> {
        self.check_s(s)?;
        let h = 0.5_f64.min(self.total_len / 16.0);
        let s0 = (s - h).max(0.0);
        let s1 = (s + h).min(self.total_len);
        let t0 = self.tangent_at(s0)?;
        let t1 = self.tangent_at(s1)?;
        Ok((t1 - t0).norm() / (s1 - s0))
    }

    /// Closest centerline point to `p`, global search.
    ///
    /// Accurate to better than 0.05 mm in `s_star`.
    pub fn nearest(&self, p: Vec3) -> NearestPointResult {
        let mut best_i = 0;
        let mut best_d2 = f64::INFINITY;
        for (i, q) in self.index_pts.iter().enumerate() {
            let d2 = (p - q).norm_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best_i = i;
            }
        }
        self.refine_nearest(p, best_i, 1e-3)
    }

    /// Closest centerline point to `p`, searching only arclengths within
    /// `window_mm` of `hint_s`. The hint must come from a query point near
    /// `p` (e.g. the previous sample along a ray) for the result to match
    /// the global search.
    pub fn nearest_with_hint(&self, p: Vec3, hint_s: f64, window_mm: f64) -> NearestPointResult {
        let step = self.index_s[1] - self.index_s[0];
        let last = self.index_pts.len() - 1;
        let lo = (((hint_s - window_mm) / step).floor() as isize).clamp(0, last as isize) as usize;
        let hi = (((hint_s + window_mm) / step).ceil() as isize).clamp(0, last as isize) as usize;
        let mut best_i = lo;
        let mut best_d2 = f64::INFINITY;
        for i in lo..=hi {
            let d2 = (p - self.index_pts[i]).norm_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best_i = i;
            }
        }
        if (best_i == lo && lo > 0) || (best_i == hi && hi < last) {
            return self.nearest(p);
        }
        self.refine_nearest(p, best_i, 1e-3)
    }

    /// As `nearest_with_hint` with a caller-chosen refinement bracket, for
    /// the ray marcher's convergence tail.
    pub(crate) fn nearest_with_hint_tol(
        &self,
        p: Vec3,
        hint_s: f64,
        window_mm: f64,
        tol_mm: f64,
    ) -> NearestPointResult {
        let step = self.index_s[1] - self.index_s[0];
        let last = self.index_pts.len() - 1;
        let lo = (((hint_s - window_mm) / step).floor() as isize).clamp(0, last as isize) as usize;
        let hi = (((hint_s + window_mm) / step).ceil() as isize).clamp(0, last as isize) as usize;
        let mut best_i = lo;
        let mut best_d2 = f64::INFINITY;
        for i in lo..=hi {
            let d2 = (p - self.index_pts[i]).norm_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best_i = i;
            }
        }
        if (best_i == lo && lo > 0) || (best_i == hi && hi < last) {
            return self.nearest(p);
        }
        self.refine_nearest(p, best_i, tol_mm)
    }

    /// Fast approximate wall query for ray marching: quadratic fit through
    /// the coarse index around the best sample, no extra spline
    /// evaluations. Falls back to a full index scan when the best sample
    /// sits on the window edge (stale hint).
    pub(crate) fn nearest_coarse(&self, p: Vec3, hint_s: f64, window_mm: f64) -> CoarseNearest {
        let step = self.index_s[1] - self.index_s[0];
        let last = self.index_pts.len() - 1;
        let lo = (((hint_s - window_mm) / step).floor() as isize).clamp(0, last as isize) as usize;
        let hi = (((hint_s + window_mm) / step).ceil() as isize).clamp(0, last as isize) as usize;
        let mut best_i = lo;
        let mut best_d2 = f64::INFINITY;
        for i in lo..=hi {
            let d2 = (p - self.index_pts[i]).norm_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best_i = i;
            }
        }
        if (best_i == lo && lo > 0) || (best_i == hi && hi < last) {
            // Minimum may lie outside the window; rescan globally.
            for (i, q) in self.index_pts.iter().enumerate() {
                let d2 = (p - q).norm_squared();
                if d2 < best_d2 {
                    best_d2 = d2;
                    best_i = i;
                }
            }
        }
        if best_i == 0 || best_i == last {
            return CoarseNearest {
                s_star: self.index_s[best_i],
                distance: best_d2.sqrt(),
                radius: self.index_radii[best_i],
                point: self.index_pts[best_i],
            };
        }
        // Parabola through (s, d²) at the best sample and its neighbours.
        let f0 = (p - self.index_pts[best_i - 1]).norm_squared();
        let f1 = best_d2;
        let f2 = (p - self.index_pts[best_i + 1]).norm_squared();
        let denom = f0 - 2.0 * f1 + f2;
        let (ds, fmin) = if denom.abs() < 1e-12 {
            (0.0, f1)
        } else {
            let x = (0.5 * (f0 - f2) / denom).clamp(-0.5, 0.5); // units of `step`
            (x * step, f1 + 0.5 * (f2 - f0) * x + 0.5 * denom * x * x)
        };
        let s = self.index_s[best_i] + ds;
        let w = ds / step;
        let (radius, point) = if w >= 0.0 {
            (
                self.index_radii[best_i] * (1.0 - w) + self.index_radii[best_i + 1] * w,
                self.index_pts[best_i] * (1.0 - w) + self.index_pts[best_i + 1] * w,
            )
        } else {
            (
                self.index_radii[best_i] * (1.0 + w) - self.index_radii[best_i - 1] * w,
                self.index_pts[best_i] * (1.0 + w) - self.index_pts[best_i - 1] * w,
            )
        };
        CoarseNearest {
            s_star: s,
            distance: fmin.max(0.0).sqrt(),
            radius,
            point,
        }
    }

    /// Local refinement of a nearest-point search seeded at index entry
    /// `best_i`: successive parabolic fits of distance² over s with a
    /// shrinking sample spacing. `tol_mm` bounds the final spacing.
    fn refine_nearest(&self, p: Vec3, best_i: usize, tol_mm: f64) -> NearestPointResult {
        let d2 = |s: f64| {
            let q = self.eval_pos_at_t(self.t_for_s(s));
            (p - q).norm_squared()
        };

        let step = self.index_s[1] - self.index_s[0];
        let mut s = self.index_s[best_i];
        let mut f_s = (p - self.index_pts[best_i]).norm_squared();
        let mut h = step;
        loop {
            let (lo, hi) = ((s - h).max(0.0), (s + h).min(self.total_len));
            let (f_lo, f_hi) = (d2(lo), d2(hi));
            // Parabola through (lo, s, hi); fall back to the best sample.
            if f_lo < f_s || f_hi < f_s {
                if f_lo < f_hi {
                    s = lo;
                    f_s = f_lo;
                } else {
                    s = hi;
                    f_s = f_hi;
                }
            } else {
                // Standard 3-point parabola vertex; handles the uneven
                // spacing that clamping to the ends produces.
                let (x0, x2) = (lo - s, hi - s);
                let num = x0 * x0 * (f_s - f_hi) - x2 * x2 * (f_s - f_lo);
                let den = x0 * (f_s - f_hi) - x2 * (f_s - f_lo);
                if den.abs() > 1e-18 {
                    let v = (0.5 * num / den).clamp(x0, x2);
                    let sv = (s + v).clamp(0.0, self.total_len);
                    let fv = d2(sv);
                    if fv < f_s {
                        s = sv;
                        f_s = fv;
                    }
                }
            }
            if h <= tol_mm {
                break;
            }
            h = (h / 8.0).max(tol_mm);
        }

        let t = self.t_for_s(s);
        let point = self.eval_pos_at_t(t);
        NearestPointResult {
            s_star: s,
            point,
            distance: (p - point).norm(),
            radius_at: self.radius_at_t(t),
        }
    }
}

#[inline]
fn lerp_pair(p: Vec3, q: Vec3, t0: f64, t1: f64, t: f64) -> Vec3 {
    let w = (t - t0) / (t1 - t0);
    p * (1.0 - w) + q * w
}

#[inline]
fn lerp_deriv(p: Vec3, q: Vec3, dp: Vec3, dq: Vec3, t0: f64, t1: f64, t: f64) -> Vec3 {
    let inv = 1.0 / (t1 - t0);
    let w = (t - t0) * inv;
    (q - p) * inv + dp * (1.0 - w) + dq * w
}

#[inline]
fn lerp_s(p: f64, q: f64, t0: f64, t1: f64, t: f64) -> f64 {
    let w = (t - t0) / (t1 - t0);
    p * (1.0 - w) + q * w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn straight_spline() -> CenterlineSpline {
        let pts: Vec<Vec3> = (0..4).map(|i| Vec3::new(0.0, 0.0, 50.0 * i as f64)).collect();
        CenterlineSpline::build(&pts, &[20.0; 4]).unwrap()
    }

    #[test]
    fn straight_tube_arclength() {
        let s = straight_spline();
        assert!((s.total_length() - 150.0).abs() < 0.1);
    }

    #[test]
    fn straight_tube_midpoint() {
        let s = straight_spline();
        let p = s.point_at(75.0).unwrap();
        assert_relative_eq!(p.z, 75.0, epsilon = 0.05);
        assert!(p.x.abs() < 1e-9 && p.y.abs() < 1e-9);
    }

    #[test]
    fn quarter_circle_arclength() {
        let r = 100.0;
        let pts: Vec<Vec3> = (0..4)
            .map(|i| {
                let a = std::f64::consts::FRAC_PI_2 * (i as f64) / 3.0;
                Vec3::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect();
        let s = CenterlineSpline::build(&pts, &[20.0; 4]).unwrap();
        let expected = std::f64::consts::FRAC_PI_2 * r;
        assert!(
            (s.total_length() - expected).abs() < 1.0,
            "arclength {} vs {}",
            s.total_length(),
            expected
        );
    }

    #[test]
    fn too_few_points_rejected() {
        let pts = vec![Vec3::zeros(), Vec3::new(0.0, 0.0, 50.0), Vec3::new(0.0, 0.0, 100.0)];
        assert!(matches!(
            CenterlineSpline::build(&pts, &[20.0; 3]),
            Err(GeometryError::TooFewControlPoints(3))
        ));
    }

    #[test]
    fn nonpositive_radius_rejected() {
        let pts: Vec<Vec3> = (0..4).map(|i| Vec3::new(0.0, 0.0, 50.0 * i as f64)).collect();
        assert!(CenterlineSpline::build(&pts, &[20.0, 20.0, 0.0, 20.0]).is_err());
    }

    #[test]
    fn duplicate_points_rejected() {
        let pts = vec![
            Vec3::zeros(),
            Vec3::zeros(),
            Vec3::new(0.0, 0.0, 50.0),
            Vec3::new(0.0, 0.0, 100.0),
        ];
        assert!(CenterlineSpline::build(&pts, &[20.0; 4]).is_err());
    }

    #[test]
    fn tangent_is_unit_norm() {
        let s = straight_spline();
        for i in 0..=20 {
            let t = s.tangent_at(s.total_length() * i as f64 / 20.0).unwrap();
            assert_relative_eq!(t.norm(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn linear_radius_taper() {
        let pts: Vec<Vec3> = (0..4)
            .map(|i| Vec3::new(0.0, 0.0, 100.0 * i as f64 / 3.0))
            .collect();
        let radii: Vec<f64> = (0..4).map(|i| 20.0 - 10.0 * i as f64 / 3.0).collect();
        let s = CenterlineSpline::build(&pts, &radii).unwrap();
        assert_relative_eq!(s.radius_at(50.0).unwrap(), 15.0, epsilon = 1e-6);
    }

    #[test]
    fn out_of_range_arclength_errors() {
        let s = straight_spline();
        assert!(s.point_at(-1.0).is_err());
        assert!(s.point_at(151.0).is_err());
    }

    #[test]
    fn nearest_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let r = 80.0;
        let pts: Vec<Vec3> = (0..8)
            .map(|i| {
                let a = std::f64::consts::PI * (i as f64) / 7.0;
                Vec3::new(r * a.cos(), r * a.sin(), 10.0 * i as f64)
            })
            .collect();
        let spline = CenterlineSpline::build(&pts, &[20.0; 8]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let q = Vec3::new(
                rng.gen_range(-100.0..100.0),
                rng.gen_range(-20.0..100.0),
                rng.gen_range(-10.0..90.0),
            );
            let got = spline.nearest(q);
            // Brute force over 10^5 arclength samples.
            let mut best = (0.0, f64::INFINITY);
            for k in 0..=100_000 {
                let s = spline.total_length() * k as f64 / 100_000.0;
                let d = (spline.point_at(s).unwrap() - q).norm();
                if d < best.1 {
                    best = (s, d);
                }
            }
            assert!(
                (got.s_star - best.0).abs() < 0.1,
                "s* {} vs brute {}",
                got.s_star,
                best.0
            );
            assert!((got.distance - best.1).abs() < 0.01);
        }
    }

    #[test]
    fn arc_table_roundtrip() {
        let s = straight_spline();
        for i in 0..=30 {
            let s_q = s.total_length() * i as f64 / 30.0;
            let p = s.point_at(s_q).unwrap();
            let n = s.nearest(p);
            assert!((n.s_star - s_q).abs() < 0.1, "{} vs {}", n.s_star, s_q);
            assert!(n.distance < 1e-3);
        }
    }
}
