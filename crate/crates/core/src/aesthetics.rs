//! The five aesthetic feature measures: mean hue, mean saturation,
//! smoothness, reflectional symmetry and the global contrast factor.
//!
//! Every measure is a pure function of the image. Hue, saturation,
//! smoothness and symmetry lie in `[0, 1]`; GCF is non-negative and
//! unbounded above.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::image::{rgb_to_hsv, Image, ImageError, LuminanceGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureId {
    Hue,
    Saturation,
    Smoothness,
    Symmetry,
    Gcf,
}

impl FeatureId {
    pub const ALL: [FeatureId; 5] = [
        FeatureId::Hue,
        FeatureId::Saturation,
        FeatureId::Smoothness,
        FeatureId::Symmetry,
        FeatureId::Gcf,
    ];

    /// Whether the measure is confined to `[0, 1]`.
    pub fn is_bounded(self) -> bool {
        self != FeatureId::Gcf
    }

    pub fn label(self) -> &'static str {
        match self {
            FeatureId::Hue => "Hue",
            FeatureId::Saturation => "Saturation",
            FeatureId::Smoothness => "Smoothness",
            FeatureId::Symmetry => "Symmetry",
            FeatureId::Gcf => "GCF",
        }
    }

    /// Lowercase identifier used in file names and config.
    pub fn key(self) -> &'static str {
        match self {
            FeatureId::Hue => "hue",
            FeatureId::Saturation => "saturation",
            FeatureId::Smoothness => "smoothness",
            FeatureId::Symmetry => "symmetry",
            FeatureId::Gcf => "gcf",
        }
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown feature {0:?}")]
pub struct UnknownFeature(pub String);

impl FromStr for FeatureId {
    type Err = UnknownFeature;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hue" => Ok(FeatureId::Hue),
            "saturation" | "sat" => Ok(FeatureId::Saturation),
            "smoothness" | "smooth" => Ok(FeatureId::Smoothness),
            "symmetry" | "sym" | "symm" => Ok(FeatureId::Symmetry),
            "gcf" => Ok(FeatureId::Gcf),
            _ => Err(UnknownFeature(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureValue {
    pub feature: FeatureId,
    pub value: f64,
}

pub fn mean_hue(img: &Image) -> f64 {
    let sum: f64 = img.pixels().map(|[r, g, b]| rgb_to_hsv(r, g, b).h).sum();
    sum / img.pixel_count() as f64
}

pub fn mean_saturation(img: &Image) -> f64 {
    let sum: f64 = img.pixels().map(|[r, g, b]| rgb_to_hsv(r, g, b).s).sum();
    sum / img.pixel_count() as f64
}

/// One minus the mean per-channel gradient magnitude.
///
/// The gradient at each pixel uses intermediate differences to the adjoining
/// pixels, with missing neighbours contributing zero. The magnitude is the
/// average of the forward-difference magnitude (right/down neighbours) and
/// the backward-difference magnitude (left/up neighbours), scaled by `1/√2`
/// so it never exceeds 1. Averaging both directions makes the measure
/// invariant under 180° rotation.
pub fn smoothness(img: &Image) -> Result<f64, ImageError> {
    let (w, h) = (img.width(), img.height());
    if w < 2 || h < 2 {
        return Err(ImageError::TooSmall {
            min: 2,
            width: w,
            height: h,
        });
    }
    let bytes = img.as_bytes();
    let at = |r: usize, c: usize, ch: usize| f64::from(bytes[(r * w + c) * 3 + ch]) / 255.0;
    let mut total = 0.0;
    for r in 0..h {
        for c in 0..w {
            for ch in 0..3 {
                let v = at(r, c, ch);
                let fx = if c + 1 < w { at(r, c + 1, ch) - v } else { 0.0 };
                let fy = if r + 1 < h { at(r + 1, c, ch) - v } else { 0.0 };
                let bx = if c > 0 { v - at(r, c - 1, ch) } else { 0.0 };
                let by = if r > 0 { v - at(r - 1, c, ch) } else { 0.0 };
                total += fx.hypot(fy) + bx.hypot(by);
            }
        }
    }
    let mean = total / (2.0 * std::f64::consts::SQRT_2) / (3 * img.pixel_count()) as f64;
    Ok((1.0 - mean).clamp(0.0, 1.0))
}

/// Horizontal, vertical and point-reflection self-similarity scores.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryParts {
    /// Left/right mirror.
    pub horizontal: f64,
    /// Top/bottom mirror.
    pub vertical: f64,
    /// Point reflection through the image centre.
    pub diagonal: f64,
}

impl SymmetryParts {
    pub fn combined(&self) -> f64 {
        (self.horizontal + self.vertical + self.diagonal) / 3.0
    }
}

pub fn symmetry_parts(img: &Image) -> SymmetryParts {
    let (w, h) = (img.width(), img.height());
    let bytes = img.as_bytes();
    let (mut sh, mut sv, mut sd) = (0u64, 0u64, 0u64);
    for r in 0..h {
        for c in 0..w {
            let p = (r * w + c) * 3;
            let mh = (r * w + (w - 1 - c)) * 3;
            let mv = ((h - 1 - r) * w + c) * 3;
            let md = ((h - 1 - r) * w + (w - 1 - c)) * 3;
            for ch in 0..3 {
                let v = bytes[p + ch];
                sh += u64::from(v.abs_diff(bytes[mh + ch]));
                sv += u64::from(v.abs_diff(bytes[mv + ch]));
                sd += u64::from(v.abs_diff(bytes[md + ch]));
            }
        }
    }
    let norm = 255.0 * (3 * img.pixel_count()) as f64;
    SymmetryParts {
        horizontal: 1.0 - sh as f64 / norm,
        vertical: 1.0 - sv as f64 / norm,
        diagonal: 1.0 - sd as f64 / norm,
    }
}

pub fn reflectional_symmetry(img: &Image) -> f64 {
    symmetry_parts(img).combined()
}

/// Mean over cells of the summed absolute luminance difference to the
/// existing 4-neighbours.
pub fn local_contrast_grid(grid: &LuminanceGrid) -> f64 {
    let (w, h) = (grid.width(), grid.height());
    let mut total = 0.0;
    for r in 0..h {
        for c in 0..w {
            let v = grid.get(r, c);
            let mut lc = 0.0;
            if r > 0 {
                lc += (grid.get(r - 1, c) - v).abs();
            }
            if r + 1 < h {
                lc += (grid.get(r + 1, c) - v).abs();
            }
            if c > 0 {
                lc += (grid.get(r, c - 1) - v).abs();
            }
            if c + 1 < w {
                lc += (grid.get(r, c + 1) - v).abs();
            }
            total += lc;
        }
    }
    total / (w * h) as f64
}

/// Superpixel sizes of the nine GCF resolutions, finest first.
pub const GCF_SUPERPIXEL_SIZES: [usize; 9] = [1, 2, 4, 8, 16, 25, 50, 100, 200];

/// Weight of resolution `r` (1-based).
pub fn gcf_weight(r: usize) -> f64 {
    let x = r as f64 / 9.0;
    (-0.406385 * x + 0.334573) * x + 0.0877526
}

pub fn gcf_weights() -> [f64; 9] {
    std::array::from_fn(|i| gcf_weight(i + 1))
}

/// Global contrast factor: weighted sum of mean local contrast over nine
/// superpixel resolutions.
pub fn gcf(img: &Image) -> f64 {
    let plane = LuminanceGrid::from_image(img);
    GCF_SUPERPIXEL_SIZES
        .iter()
        .enumerate()
        .map(|(i, &size)| {
            let grid = plane.downsample(size).expect("sizes are non-zero");
            gcf_weight(i + 1) * local_contrast_grid(&grid)
        })
        .sum()
}

pub fn measure(feature: FeatureId, img: &Image) -> Result<FeatureValue, ImageError> {
    let value = match feature {
        FeatureId::Hue => mean_hue(img),
        FeatureId::Saturation => mean_saturation(img),
        FeatureId::Smoothness => smoothness(img)?,
        FeatureId::Symmetry => reflectional_symmetry(img),
        FeatureId::Gcf => gcf(img),
    };
    Ok(FeatureValue { feature, value })
}

/// All five measures in [`FeatureId::ALL`] order.
pub fn measure_all(img: &Image) -> Result<Vec<FeatureValue>, ImageError> {
    FeatureId::ALL.iter().map(|&f| measure(f, img)).collect()
}
