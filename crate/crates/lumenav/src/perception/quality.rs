//! Depth-quality metrics over jointly valid pixels.

use crate::error::PerceptionError;
use crate::render::DepthImage;

fn check_dims(pred: &DepthImage, gt: &DepthImage) -> Result<(), PerceptionError> {
    if pred.width != gt.width || pred.height != gt.height {
        return Err(PerceptionError::DimensionMismatch(
            pred.width, pred.height, gt.width, gt.height,
        ));
    }
    Ok(())
}

/// Mean over jointly valid pixels of |pred - gt| / gt.
pub fn abs_rel(pred: &DepthImage, gt: &DepthImage) -> Result<f64, PerceptionError> {
    check_dims(pred, gt)?;
    let mut acc = 0.0;
    let mut n = 0usize;
    for y in 0..gt.height {
        for x in 0..gt.width {
            if let (Some(p), Some(g)) = (pred.get(x, y), gt.get(x, y)) {
                acc += ((p as f64) - (g as f64)).abs() / g as f64;
                n += 1;
            }
        }
    }
    if n == 0 {
        return Err(PerceptionError::NoValidPixels);
    }
    Ok(acc / n as f64)
}

/// Fraction of jointly valid pixels with max(pred/gt, gt/pred) < 1.25.
pub fn delta1(pred: &DepthImage, gt: &DepthImage) -> Result<f64, PerceptionError> {
    check_dims(pred, gt)?;
    let mut hits = 0usize;
    let mut n = 0usize;
    for y in 0..gt.height {
        for x in 0..gt.width {
            if let (Some(p), Some(g)) = (pred.get(x, y), gt.get(x, y)) {
                let (p, g) = (p as f64, g as f64);
                if (p / g).max(g / p) < 1.25 {
                    hits += 1;
                }
                n += 1;
            }
        }
    }
    if n == 0 {
        return Err(PerceptionError::NoValidPixels);
    }
    Ok(hits as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(w: usize, h: usize, v: f32) -> DepthImage {
        DepthImage::from_values(w, h, vec![v; w * h])
    }

    #[test]
    fn perfect_prediction() {
        let gt = constant(8, 8, 10.0);
        assert_eq!(abs_rel(&gt, &gt).unwrap(), 0.0);
        assert_eq!(delta1(&gt, &gt).unwrap(), 1.0);
    }

    #[test]
    fn uniform_scale_errors() {
        let gt = constant(8, 8, 10.0);
        let p125 = constant(8, 8, 12.5);
        assert!((abs_rel(&p125, &gt).unwrap() - 0.25).abs() < 1e-7);
        let p13 = constant(8, 8, 13.0);
        assert_eq!(delta1(&p13, &gt).unwrap(), 0.0);
        let p12 = constant(8, 8, 12.0);
        assert_eq!(delta1(&p12, &gt).unwrap(), 1.0);
    }

    #[test]
    fn split_over_under() {
        let gt = constant(8, 8, 10.0);
        let mut vals = vec![11.0f32; 32];
        vals.extend(vec![9.0f32; 32]);
        let pred = DepthImage::from_values(8, 8, vals);
        assert!((abs_rel(&pred, &gt).unwrap() - 0.1).abs() < 1e-6);
    }

    #[test]
    fn delta1_symmetric_absrel_not() {
        let gt = constant(8, 8, 10.0);
        let pred = constant(8, 8, 14.0);
        assert_eq!(
            delta1(&pred, &gt).unwrap(),
            delta1(&gt, &pred).unwrap()
        );
        assert_ne!(
            abs_rel(&pred, &gt).unwrap(),
            abs_rel(&gt, &pred).unwrap()
        );
    }

    #[test]
    fn no_joint_pixels_errors() {
        let mut a = constant(4, 4, 10.0);
        let mut b = constant(4, 4, 10.0);
        for y in 0..4 {
            for x in 0..4 {
                if (x + y) % 2 == 0 {
                    a.set_invalid(x, y);
                } else {
                    b.set_invalid(x, y);
                }
            }
        }
        assert!(matches!(
            abs_rel(&a, &b),
            Err(PerceptionError::NoValidPixels)
        ));
    }
}
