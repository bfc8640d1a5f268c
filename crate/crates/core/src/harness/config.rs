use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::aesthetics::FeatureId;
use crate::genesis::{EndpointKind, EndpointSpec};
use crate::objective::{
    Direction, ObjectiveSpec, RealnessMode, Term, DEFAULT_PAIR_CUTOFF, DEFAULT_SINGLE_CUTOFF,
};
use crate::search::OptimizerConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// The six feature pairs of the dual-feature experiments.
pub const DEFAULT_PAIRS: [[FeatureId; 2]; 6] = [
    [FeatureId::Gcf, FeatureId::Saturation],
    [FeatureId::Gcf, FeatureId::Smoothness],
    [FeatureId::Hue, FeatureId::Saturation],
    [FeatureId::Hue, FeatureId::Symmetry],
    [FeatureId::Saturation, FeatureId::Symmetry],
    [FeatureId::Smoothness, FeatureId::Saturation],
];

/// Cut-offs compared in the default ablation.
pub const DEFAULT_ABLATION_CUTOFFS: [f64; 3] = [0.2, 0.05, 0.02];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveDefaults {
    #[serde(with = "crate::serde_inf")]
    pub single_cutoff: f64,
    #[serde(with = "crate::serde_inf")]
    pub pair_cutoff: f64,
    pub stable_s: f64,
    pub gcf_scale: f64,
    pub realness_mode: RealnessMode,
}

impl Default for ObjectiveDefaults {
    fn default() -> Self {
        Self {
            single_cutoff: DEFAULT_SINGLE_CUTOFF,
            pair_cutoff: DEFAULT_PAIR_CUTOFF,
            stable_s: 0.0,
            gcf_scale: 1.0,
            realness_mode: RealnessMode::Factor,
        }
    }
}

impl ObjectiveDefaults {
    /// Objective for `terms` with the default cut-off for its arity unless one is given.
    pub fn spec(&self, terms: Vec<Term>, cutoff: Option<f64>) -> ObjectiveSpec {
        let default_cutoff = if terms.len() == 2 {
            self.pair_cutoff
        } else {
            self.single_cutoff
        };
        ObjectiveSpec {
            terms,
            cutoff_c: cutoff.unwrap_or(default_cutoff),
            stable_s: self.stable_s,
            gcf_scale: self.gcf_scale,
            realness_mode: self.realness_mode,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SingleGrid {
    pub features: Vec<FeatureId>,
}

impl Default for SingleGrid {
    fn default() -> Self {
        Self {
            features: FeatureId::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairGrid {
    pub pairs: Vec<[FeatureId; 2]>,
}

impl Default for PairGrid {
    fn default() -> Self {
        Self {
            pairs: DEFAULT_PAIRS.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblationSpec {
    pub feature: FeatureId,
    pub direction: Direction,
    #[serde(with = "crate::serde_inf::vec")]
    pub cutoffs: Vec<f64>,
}

impl Default for AblationSpec {
    fn default() -> Self {
        Self {
            feature: FeatureId::Hue,
            direction: Direction::Minimize,
            cutoffs: DEFAULT_ABLATION_CUTOFFS.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSpec {
    pub terms: Vec<Term>,
    #[serde(
        with = "optional_cutoff",
        skip_serializing_if = "Option::is_none"
    )]
    pub cutoff: Option<f64>,
}

impl Default for EvolveSpec {
    fn default() -> Self {
        Self {
            terms: vec![Term::new(FeatureId::Hue, Direction::Minimize)],
            cutoff: None,
        }
    }
}

mod optional_cutoff {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => crate::serde_inf::serialize(x, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "crate::serde_inf")] f64);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

/// A reproducible experiment bundle, stored as one JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default = "default_endpoints")]
    pub endpoints: Vec<EndpointSpec>,
    #[serde(default = "OptimizerConfig::desk_scale")]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub objective: ObjectiveDefaults,
    #[serde(default)]
    pub single: SingleGrid,
    #[serde(default)]
    pub pairs: PairGrid,
    #[serde(default)]
    pub ablation: AblationSpec,
    #[serde(default)]
    pub evolve: EvolveSpec,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_endpoints() -> Vec<EndpointSpec> {
    vec![EndpointSpec::builtin("linear", EndpointKind::BuiltinLinear, 0)]
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("aevo-out")
}

fn default_workers() -> usize {
    1
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            endpoints: default_endpoints(),
            optimizer: OptimizerConfig::desk_scale(),
            objective: ObjectiveDefaults::default(),
            single: SingleGrid::default(),
            pairs: PairGrid::default(),
            ablation: AblationSpec::default(),
            evolve: EvolveSpec::default(),
            seeds: default_seeds(),
            output_dir: default_output_dir(),
            workers: default_workers(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// `output_dir`, placed under `root` when it is relative and a root is given.
    pub fn resolved_output_dir(&self, root: Option<&Path>) -> PathBuf {
        match root {
            Some(r) if self.output_dir.is_relative() => r.join(&self.output_dir),
            _ => self.output_dir.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |m: String| Err(HarnessError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return fail(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.endpoints.is_empty() {
            return fail("at least one endpoint is required".into());
        }
        let mut names = HashSet::new();
        for e in &self.endpoints {
            if e.name.is_empty() || !e.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return fail(format!("endpoint name {:?} must be non-empty [A-Za-z0-9_-]", e.name));
            }
            if !names.insert(e.name.as_str()) {
                return fail(format!("duplicate endpoint name {:?}", e.name));
            }
            if e.latent_dim != self.optimizer.latent_dim {
                return fail(format!(
                    "endpoint {:?} has latent_dim {} but the optimizer uses {}",
                    e.name, e.latent_dim, self.optimizer.latent_dim
                ));
            }
            if e.kind == EndpointKind::External && e.transport.is_none() {
                return fail(format!("external endpoint {:?} needs a transport", e.name));
            }
        }
        self.optimizer
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.seeds.is_empty() {
            return fail("seeds must not be empty".into());
        }
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        if self.single.features.is_empty() {
            return fail("single.features must not be empty".into());
        }
        for [a, b] in &self.pairs.pairs {
            if a == b {
                return fail(format!("pair {a}-{b} repeats a feature"));
            }
        }
        self.validate_ablation()?;
        let evolve = self.objective.spec(self.evolve.terms.clone(), self.evolve.cutoff);
        evolve
            .validate()
            .map_err(|e| HarnessError::Config(format!("evolve: {e}")))?;
        let probe = self.objective.spec(vec![Term::new(FeatureId::Hue, Direction::Minimize)], None);
        probe
            .validate()
            .map_err(|e| HarnessError::Config(format!("objective: {e}")))?;
        Ok(())
    }

    pub fn validate_ablation(&self) -> Result<(), HarnessError> {
        let cutoffs = &self.ablation.cutoffs;
        if cutoffs.len() < 2 {
            return Err(HarnessError::Config(format!(
                "cut-off ablation needs at least 2 cut-offs, got {}",
                cutoffs.len()
            )));
        }
        if let Some(c) = cutoffs.iter().find(|c| c.is_nan() || **c < 0.0) {
            return Err(HarnessError::Config(format!("cut-off {c} must be >= 0")));
        }
        Ok(())
    }
}
