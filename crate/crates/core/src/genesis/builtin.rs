//! Procedural stand-ins for a trained generator/discriminator pair.
//!
//! Both decoders compute `0.5 * (1 + tanh(W z / sqrt(n) + b))` per output
//! channel with `W` and `b` drawn once from the endpoint seed. The linear
//! decoder emits every pixel independently; the coherent decoder runs at
//! 16×16 and is bilinearly upsampled, which gives spatially smooth images.
//!
//! Each weight is `α·A[c][k] + sqrt(1 - α²)·E[o][k]`: a part `A` shared by
//! every output of colour channel `c` plus an independent per-output part
//! `E`, both standard normal. With fully independent weights the mean of
//! any per-pixel statistic over thousands of pixels is nearly the same for
//! every `z`, so image-level features like mean hue could barely be moved;
//! the shared part gives `z` a handle on the global colour balance while
//! every weight keeps unit variance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{GenesisError, RealnessScore};
use crate::image::{quantize_unit, Image};
use crate::search::LatentVector;

/// Side length of the coherent decoder's native grid.
pub const COHERENT_GRID: usize = 16;

/// `α`: standard-deviation share of each weight common to its colour channel.
pub const CHANNEL_SHARED_WEIGHT: f32 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinKind {
    Linear,
    Coherent,
}

/// Affine-tanh decoder with column-major weights (`n` columns of `outputs`).
struct Decoder {
    outputs: usize,
    weights: Vec<f32>,
    bias: Vec<f32>,
}

impl Decoder {
    fn sample(outputs: usize, latent_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || -> f32 {
            let v: f64 = StandardNormal.sample(&mut rng);
            v as f32
        };
        let bias = (0..outputs).map(|_| draw()).collect();
        let shared: Vec<f32> = (0..3 * latent_dim).map(|_| draw()).collect();
        let alpha = CHANNEL_SHARED_WEIGHT;
        let beta = (1.0 - alpha * alpha).sqrt();
        // column-major: column k holds the weights of latent coordinate k;
        // outputs are interleaved RGB, so output o belongs to channel o % 3
        let weights = (0..latent_dim)
            .flat_map(|k| (0..outputs).map(move |o| (k, o)))
            .map(|(k, o)| alpha * shared[k * 3 + o % 3] + beta * draw())
            .collect();
        Self {
            outputs,
            weights,
            bias,
        }
    }

    fn decode(&self, z: &[f64]) -> Vec<f32> {
        let scale = 1.0 / (z.len() as f64).sqrt();
        let mut acc = self.bias.clone();
        for (k, &zk) in z.iter().enumerate() {
            let zk = (zk * scale) as f32;
            if zk == 0.0 {
                continue;
            }
            let col = &self.weights[k * self.outputs..(k + 1) * self.outputs];
            for (a, &w) in acc.iter_mut().zip(col) {
                *a += w * zk;
            }
        }
        for a in &mut acc {
            *a = 0.5 * (1.0 + a.tanh());
        }
        acc
    }
}

pub struct BuiltinGenerator {
    kind: BuiltinKind,
    seed: u64,
    latent_dim: usize,
    width: usize,
    height: usize,
    decoder: Decoder,
}

impl std::fmt::Debug for BuiltinGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BuiltinGenerator")
            .field("kind", &self.kind)
            .field("seed", &self.seed)
            .field("latent_dim", &self.latent_dim)
            .field("width", &self.width)
            .field("height", &self.height)
            .finish()
    }
}

impl BuiltinGenerator {
    pub fn new(
        kind: BuiltinKind,
        seed: u64,
        latent_dim: usize,
        width: usize,
        height: usize,
    ) -> Result<Self, GenesisError> {
        if latent_dim == 0 {
            return Err(GenesisError::Config("latent_dim must be at least 1".into()));
        }
        if width < 2 || height < 2 {
            return Err(GenesisError::Config(format!(
                "image size must be at least 2x2, got {width}x{height}"
            )));
        }
        let outputs = match kind {
            BuiltinKind::Linear => width * height * 3,
            BuiltinKind::Coherent => COHERENT_GRID * COHERENT_GRID * 3,
        };
        Ok(Self {
            kind,
            seed,
            latent_dim,
            width,
            height,
            decoder: Decoder::sample(outputs, latent_dim, seed),
        })
    }

    pub fn kind(&self) -> BuiltinKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn image_size(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn generate(&self, z: &LatentVector) -> Result<Image, GenesisError> {
        self.check_dim(z)?;
        let out = self.decoder.decode(z.as_slice());
        let data = match self.kind {
            BuiltinKind::Linear => out.iter().map(|&v| quantize_unit(f64::from(v))).collect(),
            BuiltinKind::Coherent => upsample_bilinear(&out, COHERENT_GRID, self.width, self.height),
        };
        Ok(Image::new(self.width, self.height, data)?)
    }

    /// Distance of `|z| / sqrt(n)` from the Gaussian typical shell.
    pub fn realness(&self, z: &LatentVector) -> Result<RealnessScore, GenesisError> {
        self.check_dim(z)?;
        Ok(RealnessScore {
            raw: shell_distance(z.as_slice()),
        })
    }

    fn check_dim(&self, z: &LatentVector) -> Result<(), GenesisError> {
        if z.len() != self.latent_dim {
            return Err(GenesisError::DimensionMismatch {
                expected: self.latent_dim,
                found: z.len(),
            });
        }
        Ok(())
    }
}

/// `| |z|_2 / sqrt(n) - 1 |`.
pub fn shell_distance(z: &[f64]) -> f64 {
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    (norm / (z.len() as f64).sqrt() - 1.0).abs()
}

/// Bilinear upsampling of a `side`×`side` RGB grid with pixel-centre alignment.
fn upsample_bilinear(src: &[f32], side: usize, width: usize, height: usize) -> Vec<u8> {
    let map = |dst: usize, out: usize| -> (usize, usize, f64) {
        let pos = ((dst as f64 + 0.5) * side as f64 / out as f64 - 0.5).clamp(0.0, (side - 1) as f64);
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(side - 1);
        (lo, hi, pos - lo as f64)
    };
    let cols: Vec<_> = (0..width).map(|c| map(c, width)).collect();
    let at = |r: usize, c: usize, ch: usize| f64::from(src[(r * side + c) * 3 + ch]);
    let mut data = Vec::with_capacity(width * height * 3);
    for row in 0..height {
        let (r0, r1, fy) = map(row, height);
        for &(c0, c1, fx) in &cols {
            for ch in 0..3 {
                let top = at(r0, c0, ch) * (1.0 - fx) + at(r0, c1, ch) * fx;
                let bottom = at(r1, c0, ch) * (1.0 - fx) + at(r1, c1, ch) * fx;
                data.push(quantize_unit(top * (1.0 - fy) + bottom * fy));
            }
        }
    }
    data
}
