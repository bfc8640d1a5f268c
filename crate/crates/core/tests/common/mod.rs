//! Brute-force reference implementations of the five measures, written
//! directly from their definitions without sharing code with the library,
//! plus seeded image generators.

#![allow(dead_code)]

use aevo_core::Image;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random image mixing uniform noise, gray pixels, channel ties and extremes.
pub fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Image {
    Image::from_fn(w, h, |_, _| match rng.random_range(0..10) {
        0 => {
            let v = rng.random();
            [v, v, v]
        }
        1 => {
            let (a, b) = (rng.random(), rng.random());
            [a, a, b]
        }
        2 => [0, 0, 0],
        3 => [255, 255, 255],
        4 => [if rng.random() { 255 } else { 0 }, rng.random(), 0],
        _ => [rng.random(), rng.random(), rng.random()],
    })
    .unwrap()
}

/// Every channel either 0 or 255, chosen per channel.
pub fn extreme_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Image {
    Image::from_fn(w, h, |_, _| {
        [0, 1, 2].map(|_| if rng.random() { 255 } else { 0 })
    })
    .unwrap()
}

pub fn checkerboard(side: usize, square: usize) -> Image {
    Image::from_fn(side, side, |r, c| {
        if (r / square + c / square) % 2 == 0 {
            [255; 3]
        } else {
            [0; 3]
        }
    })
    .unwrap()
}

fn px(img: &Image, r: usize, c: usize) -> [f64; 3] {
    img.pixel(r, c).map(|v| v as f64 / 255.0)
}

/// Hexcone HSV in degrees, rescaled to [0, 1].
fn hsv(p: [f64; 3]) -> (f64, f64) {
    let [r, g, b] = p;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let d = max - min;
    let deg = if d == 0.0 {
        0.0
    } else if max == r {
        60.0 * ((g - b) / d)
    } else if max == g {
        60.0 * ((b - r) / d + 2.0)
    } else {
        60.0 * ((r - g) / d + 4.0)
    };
    let deg = if deg < 0.0 { deg + 360.0 } else { deg };
    let s = if max == 0.0 { 0.0 } else { d / max };
    (deg / 360.0, s)
}

pub fn hue(img: &Image) -> f64 {
    let mut sum = 0.0;
    for r in 0..img.height() {
        for c in 0..img.width() {
            sum += hsv(px(img, r, c)).0;
        }
    }
    sum / (img.width() * img.height()) as f64
}

pub fn saturation(img: &Image) -> f64 {
    let mut sum = 0.0;
    for r in 0..img.height() {
        for c in 0..img.width() {
            sum += hsv(px(img, r, c)).1;
        }
    }
    sum / (img.width() * img.height()) as f64
}

/// Sum over pixels and channels of the forward-difference gradient magnitude
/// (zero difference past the last row/column).
pub fn forward_gradient_sum(img: &Image) -> f64 {
    let (w, h) = (img.width(), img.height());
    let mut total = 0.0;
    for r in 0..h {
        for c in 0..w {
            for ch in 0..3 {
                let v = px(img, r, c)[ch];
                let gx = if c == w - 1 { 0.0 } else { px(img, r, c + 1)[ch] - v };
                let gy = if r == h - 1 { 0.0 } else { px(img, r + 1, c)[ch] - v };
                total += (gx * gx + gy * gy).sqrt();
            }
        }
    }
    total
}

fn rotate(img: &Image) -> Image {
    let (w, h) = (img.width(), img.height());
    Image::from_fn(w, h, |r, c| img.pixel(h - 1 - r, w - 1 - c)).unwrap()
}

/// Smoothness from forward differences alone.
pub fn smoothness_forward_only(img: &Image) -> f64 {
    let n = (img.width() * img.height()) as f64;
    1.0 - forward_gradient_sum(img) / 2f64.sqrt() / (3.0 * n)
}

/// Smoothness with the gradient magnitude averaged over the image and its
/// 180° rotation (backward differences are forward differences of the
/// rotated image).
pub fn smoothness(img: &Image) -> f64 {
    let n = (img.width() * img.height()) as f64;
    let g = 0.5 * (forward_gradient_sum(img) + forward_gradient_sum(&rotate(img)));
    1.0 - g / 2f64.sqrt() / (3.0 * n)
}

pub fn symmetry(img: &Image) -> f64 {
    let (w, h) = (img.width(), img.height());
    let n = (w * h * 3) as f64;
    let (mut dh, mut dv, mut dd) = (0.0, 0.0, 0.0);
    for r in 0..h {
        for c in 0..w {
            let p = px(img, r, c);
            let a = px(img, r, w - 1 - c);
            let b = px(img, h - 1 - r, c);
            let d = px(img, h - 1 - r, w - 1 - c);
            for ch in 0..3 {
                dh += (p[ch] - a[ch]).abs();
                dv += (p[ch] - b[ch]).abs();
                dd += (p[ch] - d[ch]).abs();
            }
        }
    }
    ((1.0 - dh / n) + (1.0 - dv / n) + (1.0 - dd / n)) / 3.0
}

pub fn luminance(p: [f64; 3]) -> f64 {
    (0.2126 * p[0].powf(2.2) + 0.7152 * p[1].powf(2.2) + 0.0722 * p[2].powf(2.2))
        .sqrt()
        .min(1.0)
}

pub const GCF_SIZES: [usize; 9] = [1, 2, 4, 8, 16, 25, 50, 100, 200];

pub fn weight(r: usize) -> f64 {
    let x = r as f64 / 9.0;
    -0.406385 * x * x + 0.334573 * x + 0.0877526
}

pub fn gcf(img: &Image) -> f64 {
    let (w, h) = (img.width(), img.height());
    let mut total = 0.0;
    for (k, &s) in GCF_SIZES.iter().enumerate() {
        let gw = (w + s - 1) / s;
        let gh = (h + s - 1) / s;
        let mut grid = vec![vec![0.0; gw]; gh];
        for (a, row) in grid.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                let mut sum = 0.0;
                let mut count = 0;
                for r in a * s..((a + 1) * s).min(h) {
                    for c in b * s..((b + 1) * s).min(w) {
                        sum += luminance(px(img, r, c));
                        count += 1;
                    }
                }
                *cell = sum / count as f64;
            }
        }
        let mut contrast = 0.0;
        for a in 0..gh as isize {
            for b in 0..gw as isize {
                for (da, db) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                    let (x, y) = (a + da, b + db);
                    if x >= 0 && y >= 0 && x < gh as isize && y < gw as isize {
                        contrast +=
                            (grid[x as usize][y as usize] - grid[a as usize][b as usize]).abs();
                    }
                }
            }
        }
        total += weight(k + 1) * contrast / (gw * gh) as f64;
    }
    total
}

/// The closed-form sum of the nine GCF weights:
/// `Σ (a x² + b x + c)` with `x = r/9`, `Σ r = 45`, `Σ r² = 285`.
pub fn gcf_weight_sum() -> f64 {
    -0.406385 * 285.0 / 81.0 + 0.334573 * 45.0 / 9.0 + 9.0 * 0.0877526
}

pub fn all(img: &Image) -> [f64; 5] {
    [hue(img), saturation(img), smoothness(img), symmetry(img), gcf(img)]
}

use aevo_core::genesis::protocol::FrameType;
use aevo_core::genesis::{Dims, Message};

fn random_f32(rng: &mut ChaCha8Rng) -> f32 {
    match rng.random_range(0..12) {
        0 => 0.0,
        1 => -0.0,
        2 => f32::MAX,
        3 => f32::MIN_POSITIVE,
        4 => f32::INFINITY,
        5 => f32::from_bits(1), // smallest subnormal
        _ => (rng.random::<f32>() - 0.5) * 10f32.powi(rng.random_range(-8..8)),
    }
}

pub fn random_dims(rng: &mut ChaCha8Rng) -> Dims {
    Dims {
        latent_dim: rng.random_range(1..=64),
        width: rng.random_range(1..=16),
        height: rng.random_range(1..=16),
    }
}

/// A random message of the given type whose payload fits `dims`.
pub fn random_message(rng: &mut ChaCha8Rng, frame: FrameType, dims: &Dims) -> Message {
    let latent = |rng: &mut ChaCha8Rng| (0..dims.latent_dim).map(|_| random_f32(rng)).collect();
    let rgb = |rng: &mut ChaCha8Rng| (0..dims.image_bytes()).map(|_| rng.random()).collect();
    match frame {
        FrameType::Hello => Message::Hello(Dims {
            latent_dim: rng.random(),
            width: rng.random(),
            height: rng.random(),
        }),
        FrameType::GenReq => Message::GenReq(latent(rng)),
        FrameType::ImgResp => Message::ImgResp(rgb(rng)),
        FrameType::DiscReq => Message::DiscReq {
            latent: latent(rng),
            rgb: rgb(rng),
        },
        FrameType::DiscResp => Message::DiscResp(random_f32(rng)),
        FrameType::Error => {
            let len = rng.random_range(0..40);
            Message::Error(
                (0..len)
                    .map(|_| {
                        char::from_u32(rng.random_range(0x20..0x3000)).unwrap_or('\u{fffd}')
                    })
                    .collect(),
            )
        }
    }
}
