//! RGB raster type, color conversion, perceptual luminance and PPM I/O.
//!
//! Pixels are stored as 8-bit RGB triples in row-major order. Metrics read
//! them as reals in `[0, 1]` through [`Image::channel`] and friends.

mod color;
mod luminance;
mod ppm;

pub use color::{hsv_to_rgb, rgb_to_hsv, HsvTriple};
pub use luminance::{perceptual_luminance, superpixel_downsample, LuminanceGrid};
pub use ppm::{decode_ppm, encode_ppm, read_ppm, write_ppm, PpmError};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("invalid image dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("pixel buffer holds {found} bytes, expected {expected}")]
    DataLength { expected: usize, found: usize },
    #[error("superpixel size must be at least 1")]
    ZeroSuperpixel,
    #[error("measure requires at least {min}x{min} pixels, got {width}x{height}")]
    TooSmall {
        min: usize,
        width: usize,
        height: usize,
    },
    #[error(transparent)]
    Ppm(#[from] PpmError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Row-major RGB8 raster.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::InvalidDimensions { width, height });
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or(ImageError::InvalidDimensions { width, height })?;
        if data.len() != expected {
            return Err(ImageError::DataLength {
                expected,
                found: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by calling `f(row, col)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Result<Self, ImageError> {
        let mut data = Vec::with_capacity(width * height * 3);
        for row in 0..height {
            for col in 0..width {
                data.extend_from_slice(&f(row, col));
            }
        }
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self, ImageError> {
        Self::from_fn(width, height, |_, _| rgb)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of pixels, `width * height`.
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let i = (row * self.width + col) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Channel `c` of pixel `(row, col)` scaled to `[0, 1]`.
    #[inline]
    pub fn channel(&self, row: usize, col: usize, c: usize) -> f64 {
        f64::from(self.data[(row * self.width + col) * 3 + c]) / 255.0
    }

    #[inline]
    pub fn rgb(&self, row: usize, col: usize) -> [f64; 3] {
        let [r, g, b] = self.pixel(row, col);
        [
            f64::from(r) / 255.0,
            f64::from(g) / 255.0,
            f64::from(b) / 255.0,
        ]
    }

    /// Iterates pixels in row-major order as `[0, 1]` reals.
    pub fn pixels(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| {
            [
                f64::from(p[0]) / 255.0,
                f64::from(p[1]) / 255.0,
                f64::from(p[2]) / 255.0,
            ]
        })
    }

    /// Left/right mirror image.
    pub fn mirrored_horizontal(&self) -> Self {
        let w = self.width;
        Self::from_fn(w, self.height, |r, c| self.pixel(r, w - 1 - c))
            .expect("dimensions unchanged")
    }

    pub fn rotated_180(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(w, h, |r, c| self.pixel(h - 1 - r, w - 1 - c)).expect("dimensions unchanged")
    }

    /// Replaces every pixel by its Rec.601 luma in all three channels.
    pub fn to_grayscale(&self) -> Self {
        Self::from_fn(self.width, self.height, |r, c| {
            let [red, green, blue] = self.pixel(r, c);
            let y = 0.299 * f64::from(red) + 0.587 * f64::from(green) + 0.114 * f64::from(blue);
            let y = y.round().clamp(0.0, 255.0) as u8;
            [y, y, y]
        })
        .expect("dimensions unchanged")
    }
}

/// Quantizes a `[0, 1]` real to an 8-bit channel value.
#[inline]
pub fn quantize_unit(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_buffers() {
        assert!(matches!(
            Image::new(0, 3, vec![]),
            Err(ImageError::InvalidDimensions { .. })
        ));
        assert!(matches!(
            Image::new(2, 2, vec![0; 11]),
            Err(ImageError::DataLength {
                expected: 12,
                found: 11
            })
        ));
    }

    #[test]
    fn mirror_and_rotate_are_involutions() {
        let img = Image::from_fn(5, 3, |r, c| [(r * 40) as u8, (c * 30) as u8, (r + c) as u8]).unwrap();
        assert_eq!(img.mirrored_horizontal().mirrored_horizontal(), img);
        assert_eq!(img.rotated_180().rotated_180(), img);
        assert_eq!(img.rotated_180().pixel(0, 0), img.pixel(2, 4));
    }

    #[test]
    fn quantize_clamps() {
        assert_eq!(quantize_unit(-0.3), 0);
        assert_eq!(quantize_unit(1.7), 255);
        assert_eq!(quantize_unit(0.5), 128);
    }
}
