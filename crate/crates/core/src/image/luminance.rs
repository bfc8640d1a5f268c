use std::sync::OnceLock;

use super::{Image, ImageError};

const WEIGHTS: [f64; 3] = [0.2126, 0.7152, 0.0722];
const GAMMA: f64 = 2.2;

/// Gamma-2.2 linearized, Rec.709 weighted, square-root compressed luminance in `[0, 1]`.
pub fn perceptual_luminance(r: f64, g: f64, b: f64) -> f64 {
    (WEIGHTS[0] * r.powf(GAMMA) + WEIGHTS[1] * g.powf(GAMMA) + WEIGHTS[2] * b.powf(GAMMA))
        .sqrt()
        .min(1.0)
}

fn linear_table() -> &'static [f64; 256] {
    static TABLE: OnceLock<[f64; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 256];
        for (i, v) in t.iter_mut().enumerate() {
            *v = (i as f64 / 255.0).powf(GAMMA);
        }
        t
    })
}

#[inline]
fn pixel_luminance(p: [u8; 3]) -> f64 {
    let t = linear_table();
    (WEIGHTS[0] * t[p[0] as usize] + WEIGHTS[1] * t[p[1] as usize] + WEIGHTS[2] * t[p[2] as usize])
        .sqrt()
        .min(1.0)
}

/// A plane of luminance values, one per superpixel cell.
#[derive(Clone, Debug, PartialEq)]
pub struct LuminanceGrid {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl LuminanceGrid {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::InvalidDimensions { width, height });
        }
        if values.len() != width * height {
            return Err(ImageError::DataLength {
                expected: width * height,
                found: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Per-pixel luminance plane of `img`.
    pub fn from_image(img: &Image) -> Self {
        let values = img
            .as_bytes()
            .chunks_exact(3)
            .map(|p| pixel_luminance([p[0], p[1], p[2]]))
            .collect();
        Self {
            width: img.width(),
            height: img.height(),
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    /// Averages `size`×`size` blocks. Edge blocks average only the cells they cover.
    pub fn downsample(&self, size: usize) -> Result<Self, ImageError> {
        if size == 0 {
            return Err(ImageError::ZeroSuperpixel);
        }
        if size == 1 {
            return Ok(self.clone());
        }
        let out_w = self.width.div_ceil(size);
        let out_h = self.height.div_ceil(size);
        // Accumulate offsets from each cell's first pixel so that a uniform
        // cell averages to exactly that pixel's value.
        let anchors: Vec<f64> = (0..out_h)
            .flat_map(|r| (0..out_w).map(move |c| (r, c)))
            .map(|(r, c)| self.get(r * size, c * size))
            .collect();
        let mut sums = vec![0.0; out_w * out_h];
        let mut counts = vec![0usize; out_w * out_h];
        for row in 0..self.height {
            let base = (row / size) * out_w;
            for col in 0..self.width {
                let cell = base + col / size;
                sums[cell] += self.get(row, col) - anchors[cell];
                counts[cell] += 1;
            }
        }
        let values = anchors
            .iter()
            .zip(sums.iter().zip(&counts))
            .map(|(a, (s, &n))| a + s / n as f64)
            .collect();
        Ok(Self {
            width: out_w,
            height: out_h,
            values,
        })
    }
}

/// Luminance superpixel grid of `img` at block size `size`.
pub fn superpixel_downsample(img: &Image, size: usize) -> Result<LuminanceGrid, ImageError> {
    if size == 0 {
        return Err(ImageError::ZeroSuperpixel);
    }
    LuminanceGrid::from_image(img).downsample(size)
}
