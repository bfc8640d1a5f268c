//! Generator and realness-scorer endpoints.
//!
//! An endpoint maps a latent vector to an image and scores how real the
//! image looks (0 = most real). Builtin endpoints are procedural and fully
//! determined by their seed; external endpoints talk to a separate process
//! over the binary protocol in [`protocol`].

pub mod builtin;
pub mod check;
pub mod client;
pub mod protocol;
pub mod stub;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builtin::{BuiltinGenerator, BuiltinKind};
pub use client::{Connection, ExternalGenerator, Transport};
pub use protocol::{Dims, Message, ProtocolError};

use crate::image::{Image, ImageError};
use crate::search::LatentVector;

#[derive(Debug, Error)]
pub enum GenesisError {
    #[error("latent vector has {found} entries, endpoint expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("endpoint configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Discriminator output; 0 is most real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealnessScore {
    pub raw: f64,
}

#[derive(Debug)]
pub enum GeneratorEndpoint {
    Builtin(BuiltinGenerator),
    External(ExternalGenerator),
}

impl GeneratorEndpoint {
    pub fn builtin(
        kind: BuiltinKind,
        seed: u64,
        latent_dim: usize,
        width: usize,
        height: usize,
    ) -> Result<Self, GenesisError> {
        BuiltinGenerator::new(kind, seed, latent_dim, width, height).map(Self::Builtin)
    }

    pub fn latent_dim(&self) -> usize {
        match self {
            Self::Builtin(g) => g.latent_dim(),
            Self::External(g) => g.dims().latent_dim as usize,
        }
    }

    pub fn image_size(&self) -> (usize, usize) {
        match self {
            Self::Builtin(g) => g.image_size(),
            Self::External(g) => (g.dims().width as usize, g.dims().height as usize),
        }
    }

    pub fn generate(&self, z: &LatentVector) -> Result<Image, GenesisError> {
        if z.len() != self.latent_dim() {
            return Err(GenesisError::DimensionMismatch {
                expected: self.latent_dim(),
                found: z.len(),
            });
        }
        match self {
            Self::Builtin(g) => g.generate(z),
            Self::External(g) => g.generate(z),
        }
    }

    pub fn realness(&self, z: &LatentVector, img: &Image) -> Result<RealnessScore, GenesisError> {
        match self {
            Self::Builtin(g) => g.realness(z),
            Self::External(g) => {
                if z.len() != self.latent_dim() {
                    return Err(GenesisError::DimensionMismatch {
                        expected: self.latent_dim(),
                        found: z.len(),
                    });
                }
                g.realness(z, img)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointKind {
    BuiltinLinear,
    BuiltinCoherent,
    External,
}

/// Serializable description of an endpoint, as found in experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointSpec {
    pub name: String,
    pub kind: EndpointKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_latent_dim")]
    pub latent_dim: usize,
    #[serde(default = "default_side")]
    pub width: usize,
    #[serde(default = "default_side")]
    pub height: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transport: Option<Transport>,
    #[serde(default = "default_connections")]
    pub connections: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_ms: Option<u64>,
}

fn default_latent_dim() -> usize {
    100
}
fn default_side() -> usize {
    128
}
fn default_connections() -> usize {
    1
}

impl EndpointSpec {
    pub fn builtin(name: &str, kind: EndpointKind, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            kind,
            seed,
            latent_dim: default_latent_dim(),
            width: default_side(),
            height: default_side(),
            transport: None,
            connections: 1,
            timeout_ms: None,
        }
    }

    pub fn external(name: &str, transport: Transport) -> Self {
        Self {
            transport: Some(transport),
            ..Self::builtin(name, EndpointKind::External, 0)
        }
    }

    pub fn build(&self) -> Result<GeneratorEndpoint, GenesisError> {
        let builtin = |kind| {
            GeneratorEndpoint::builtin(kind, self.seed, self.latent_dim, self.width, self.height)
        };
        match self.kind {
            EndpointKind::BuiltinLinear => builtin(BuiltinKind::Linear),
            EndpointKind::BuiltinCoherent => builtin(BuiltinKind::Coherent),
            EndpointKind::External => {
                let transport = self.transport.as_ref().ok_or_else(|| {
                    GenesisError::Config(format!("external endpoint {:?} has no transport", self.name))
                })?;
                let ext = ExternalGenerator::connect(
                    transport,
                    self.connections,
                    self.timeout_ms.map(Duration::from_millis),
                )?;
                let dims = ext.dims();
                if dims.latent_dim as usize != self.latent_dim {
                    return Err(GenesisError::DimensionMismatch {
                        expected: self.latent_dim,
                        found: dims.latent_dim as usize,
                    });
                }
                if (dims.width as usize, dims.height as usize) != (self.width, self.height) {
                    return Err(GenesisError::Config(format!(
                        "server advertises {}x{} images, config expects {}x{}",
                        dims.width, dims.height, self.width, self.height
                    )));
                }
                Ok(GeneratorEndpoint::External(ext))
            }
        }
    }
}
