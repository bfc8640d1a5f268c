//! Evolutionary search in a generator's latent space toward images that
//! score high or low on aesthetic feature measures, under a realness
//! constraint from a discriminator-style scorer.
//!
//! The pieces, bottom-up:
//!
//! - [`image`]: RGB raster, HSV, perceptual luminance, superpixels, PPM I/O.
//! - [`aesthetics`]: mean hue, mean saturation, smoothness, reflectional
//!   symmetry and global contrast factor.
//! - [`objective`]: feature terms, cut-off realness factor, combined fitness.
//! - [`search`]: (1+1) EA and CMA-ES over the latent vector.
//! - [`genesis`]: builtin procedural generators and the external-generator
//!   wire protocol.
//! - [`harness`]: experiment configs, grids, CSV/PPM/SVG outputs.

pub mod aesthetics;
pub mod genesis;
pub mod harness;
pub mod image;
pub mod objective;
pub mod search;
pub mod serde_inf;

pub use aesthetics::{measure, FeatureId, FeatureValue};
pub use genesis::{EndpointKind, EndpointSpec, GeneratorEndpoint, RealnessScore};
pub use image::Image;
pub use objective::{Direction, FitnessReport, ObjectiveSpec, Term};
pub use search::{Algorithm, LatentVector, Objective, OptimizerConfig, RunTrace};
