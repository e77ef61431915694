//! Raster types produced by the tip camera.

/// Per-pixel range along the ray, millimetres, with a validity mask.
/// Invalid pixels (ray exceeded the far clip) carry the value 0.0 and are
/// never NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    pub width: usize,
    pub height: usize,
    data: Vec<f32>,
    valid: Vec<bool>,
}

impl DepthImage {
    pub fn new_invalid(width: usize, height: usize) -> Self {
        DepthImage {
            width,
            height,
            data: vec![0.0; width * height],
            valid: vec![false; width * height],
        }
    }

    pub fn from_values(width: usize, height: usize, values: Vec<f32>) -> Self {
        assert_eq!(values.len(), width * height);
        let valid = values.iter().map(|v| *v > 0.0 && v.is_finite()).collect();
        DepthImage {
            width,
            height,
            data: values,
            valid,
        }
    }

    #[inline]
    pub fn idx(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Option<f32> {
        let i = self.idx(x, y);
        self.valid[i].then_some(self.data[i])
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f32) {
        let i = self.idx(x, y);
        debug_assert!(value > 0.0 && value.is_finite());
        self.data[i] = value;
        self.valid[i] = true;
    }

    #[inline]
    pub fn set_invalid(&mut self, x: usize, y: usize) {
        let i = self.idx(x, y);
        self.data[i] = 0.0;
        self.valid[i] = false;
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[self.idx(x, y)]
    }

    /// Raw value ignoring validity (0.0 where invalid).
    #[inline]
    pub fn raw(&self, x: usize, y: usize) -> f32 {
        self.data[self.idx(x, y)]
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    /// Iterator over (x, y, depth) of valid pixels, row-major.
    pub fn valid_pixels(&self) -> impl Iterator<Item = (usize, usize, f32)> + '_ {
        (0..self.height).flat_map(move |y| {
            (0..self.width).filter_map(move |x| self.get(x, y).map(|d| (x, y, d)))
        })
    }

    pub fn values(&self) -> &[f32] {
        &self.data
    }
}

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn black(width: usize, height: usize) -> Self {
        RgbImage {
            width,
            height,
            data: vec![0; width * height * 3],
        }
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}
