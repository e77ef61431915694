//! Follow-the-leader body: trailing segments sit on the path the tip has
//! traced, so tip clearance alone determines wall contact.

use crate::geometry::Vec3;

/// Append-only record of tip positions with cumulative path length.
#[derive(Debug, Clone)]
pub struct TipTrace {
    points: Vec<Vec3>,
    cum_len: Vec<f64>,
}

impl TipTrace {
    pub fn new(start: Vec3) -> Self {
        TipTrace {
            points: vec![start],
            cum_len: vec![0.0],
        }
    }

    /// Records a new tip position; no-op for sub-micron moves.
    pub fn push(&mut self, p: Vec3) {
        let last = *self.points.last().unwrap();
        let d = (p - last).norm();
        if d < 1e-9 {
            return;
        }
        self.points.push(p);
        self.cum_len.push(self.cum_len.last().unwrap() + d);
    }

    pub fn total_length(&self) -> f64 {
        *self.cum_len.last().unwrap()
    }

    pub fn tip(&self) -> Vec3 {
        *self.points.last().unwrap()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    /// Point at `path_len` millimetres along the trace from its start,
    /// clamped to the recorded range.
    pub fn point_at_path_length(&self, path_len: f64) -> Vec3 {
        let total = self.total_length();
        let l = path_len.clamp(0.0, total);
        let i = match self
            .cum_len
            .binary_search_by(|v| v.partial_cmp(&l).unwrap())
        {
            Ok(i) => return self.points[i],
            Err(i) => i,
        };
        if i == 0 {
            return self.points[0];
        }
        let (l0, l1) = (self.cum_len[i - 1], self.cum_len[i]);
        let w = (l - l0) / (l1 - l0);
        self.points[i - 1] * (1.0 - w) + self.points[i] * w
    }

    /// Shortest distance from `p` to the trace polyline.
    pub fn distance_to(&self, p: Vec3) -> f64 {
        let mut best = f64::INFINITY;
        for seg in self.points.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let ab = b - a;
            let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
            best = best.min((p - (a + ab * t)).norm());
        }
        if self.points.len() == 1 {
            best = (p - self.points[0]).norm();
        }
        best
    }
}

/// Positions of `n_segments` trailing body segments: segment `i` (1-based)
/// sits `i * segment_spacing` millimetres behind the tip along the traced
/// path; segments beyond the recorded trace clamp to the trace start.
pub fn ftl_body(trace: &TipTrace, segment_spacing: f64, n_segments: usize) -> Vec<Vec3> {
    let total = trace.total_length();
    (1..=n_segments)
        .map(|i| trace.point_at_path_length(total - i as f64 * segment_spacing))
        .collect()
}

/// As [`ftl_body`] but with a tentative tip position appended to the trace,
/// for clearance checks before a move commits.
pub fn ftl_body_with_tip(
    trace: &TipTrace,
    tip: Vec3,
    segment_spacing: f64,
    n_segments: usize,
) -> Vec<Vec3> {
    let extra = (tip - trace.tip()).norm();
    let total = trace.total_length() + extra;
    (1..=n_segments)
        .map(|i| {
            let target = total - i as f64 * segment_spacing;
            if target > trace.total_length() && extra > 1e-12 {
                let w = (target - trace.total_length()) / extra;
                trace.tip() * (1.0 - w) + tip * w
            } else {
                trace.point_at_path_length(target)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_trace_spacing() {
        let mut trace = TipTrace::new(Vec3::zeros());
        for i in 1..=100 {
            trace.push(Vec3::new(0.0, 0.0, i as f64));
        }
        let body = ftl_body(&trace, 10.0, 5);
        for (i, p) in body.iter().enumerate() {
            let expected = 100.0 - 10.0 * (i + 1) as f64;
            assert!((p.z - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn short_trace_clamps_to_start() {
        let mut trace = TipTrace::new(Vec3::zeros());
        trace.push(Vec3::new(0.0, 0.0, 5.0));
        let body = ftl_body(&trace, 10.0, 3);
        for p in &body {
            assert!((p - Vec3::zeros()).norm() < 1e-9);
        }
    }

    #[test]
    fn arc_trace_body_stays_on_arc() {
        // Quarter circle of radius 50 sampled every ~0.5 mm.
        let r = 50.0;
        let mut trace = TipTrace::new(Vec3::new(r, 0.0, 0.0));
        let n = 160;
        for i in 1..=n {
            let a = std::f64::consts::FRAC_PI_2 * i as f64 / n as f64;
            trace.push(Vec3::new(r * a.cos(), r * a.sin(), 0.0));
        }
        let body = ftl_body(&trace, 9.0, 6);
        for p in &body {
            let radial = (p.x * p.x + p.y * p.y).sqrt();
            assert!((radial - r).abs() < 0.5, "body point off arc: {radial}");
        }
    }

    #[test]
    fn duplicate_pushes_ignored() {
        let mut trace = TipTrace::new(Vec3::zeros());
        trace.push(Vec3::zeros());
        trace.push(Vec3::zeros());
        assert_eq!(trace.points().len(), 1);
        assert_eq!(trace.total_length(), 0.0);
    }
}
