//! Derivative-free optimizers over the latent vector.
//!
//! Two algorithms share one [`Objective`] interface: an elitist (1+1) EA
//! with fixed isotropic Gaussian mutation, and a (μ/μ_w, λ) CMA-ES with
//! rank-one and rank-μ covariance updates and cumulative step-size
//! adaptation. Both minimize.
//!
//! Randomness comes from ChaCha8 seeded with `config.seed`, on stream
//! [`SEARCH_STREAM`]. All random draws happen serially on the driver thread,
//! so traces are bit-identical whether or not candidates are evaluated in
//! parallel.

mod cma;
mod compare;
mod ea;
mod trace;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cma::{cma_run, cma_run_observed, CmaEs, CmaParams, CmaState, EIGEN_FLOOR};
pub use compare::{compare_runs, ComparisonRow, ComparisonTable};
pub use ea::opo_ea_run;
pub use trace::{GenerationRecord, RunTrace};

use crate::objective::{FitnessReport, ObjectiveError};

/// ChaCha stream used for search randomness.
pub const SEARCH_STREAM: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatentVector(Vec<f64>);

impl LatentVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl From<Vec<f64>> for LatentVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Something the optimizers can minimize.
pub trait Objective: Sync {
    fn evaluate(&self, z: &LatentVector) -> Result<FitnessReport, ObjectiveError>;
}

/// Wraps a plain function of the latent vector as an [`Objective`].
pub struct FnObjective<F>(pub F);

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn evaluate(&self, z: &LatentVector) -> Result<FitnessReport, ObjectiveError> {
        Ok(FitnessReport::bare((self.0)(z.as_slice())))
    }
}

/// `sum z_i^2`.
pub fn sphere(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[serde(alias = "one_plus_one")]
    OnePlusOneEa,
    CmaEs,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::OnePlusOneEa => "(1+1) EA",
            Algorithm::CmaEs => "CMA-ES",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub latent_dim: usize,
    pub budget_evals: usize,
    /// CMA-ES generations; the run stops early if the budget runs out.
    pub generations: usize,
    /// CMA-ES λ.
    pub population: usize,
    pub seed: u64,
    pub sigma0: f64,
    pub ea_sigma: f64,
    /// Clamp every coordinate of a candidate into `[-b, b]` before evaluation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latent_clamp: Option<f64>,
    /// Evaluate the candidates of a generation on the rayon pool.
    pub parallel: bool,
}

impl Default for OptimizerConfig {
    /// 2000 generations of λ = 40 (80000 evaluations) in 100 dimensions.
    fn default() -> Self {
        Self {
            algorithm: Algorithm::CmaEs,
            latent_dim: 100,
            budget_evals: 80_000,
            generations: 2000,
            population: 40,
            seed: 0,
            sigma0: 0.5,
            ea_sigma: 0.1,
            latent_clamp: None,
            parallel: false,
        }
    }
}

impl OptimizerConfig {
    /// λ = 16 for 200 generations (3200 evaluations).
    pub fn desk_scale() -> Self {
        Self {
            budget_evals: 3200,
            generations: 200,
            population: 16,
            ..Self::default()
        }
    }

    /// (1+1) EA with the same evaluation budget as `self`.
    pub fn as_one_plus_one(&self) -> Self {
        Self {
            algorithm: Algorithm::OnePlusOneEa,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let fail = |m: String| Err(SearchError::InvalidConfig(m));
        if self.latent_dim == 0 {
            return fail("latent_dim must be at least 1".into());
        }
        if self.budget_evals == 0 {
            return fail("budget_evals must be positive".into());
        }
        if let Some(b) = self.latent_clamp {
            if !(b.is_finite() && b > 0.0) {
                return fail(format!("latent_clamp must be positive, got {b}"));
            }
        }
        match self.algorithm {
            Algorithm::CmaEs => {
                if self.population < 2 {
                    return fail(format!("CMA-ES needs population >= 2, got {}", self.population));
                }
                if self.generations == 0 || self.budget_evals < self.population {
                    return fail("CMA-ES budget allows no complete generation".into());
                }
                if !(self.sigma0.is_finite() && self.sigma0 > 0.0) {
                    return fail(format!("sigma0 must be positive, got {}", self.sigma0));
                }
            }
            Algorithm::OnePlusOneEa => {
                if !(self.ea_sigma.is_finite() && self.ea_sigma > 0.0) {
                    return fail(format!("ea_sigma must be positive, got {}", self.ea_sigma));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(SEARCH_STREAM);
        rng
    }

    pub(crate) fn clamp(&self, v: &mut [f64]) {
        if let Some(b) = self.latent_clamp {
            for x in v {
                *x = x.clamp(-b, b);
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("objective evaluation failed after {} evaluations: {source}", .partial.as_ref().map_or(0, |t| t.eval_count))]
    Objective {
        #[source]
        source: ObjectiveError,
        partial: Option<Box<RunTrace>>,
    },
}

/// Runs whichever algorithm `config` names.
pub fn run(objective: &dyn Objective, config: &OptimizerConfig) -> Result<RunTrace, SearchError> {
    match config.algorithm {
        Algorithm::CmaEs => cma_run(objective, config),
        Algorithm::OnePlusOneEa => opo_ea_run(objective, config),
    }
}

/// Evaluates candidates in index order (or in parallel, collected in index order).
pub(crate) fn evaluate_batch(
    objective: &dyn Objective,
    candidates: &[LatentVector],
    parallel: bool,
) -> Vec<Result<FitnessReport, ObjectiveError>> {
    if parallel {
        candidates.par_iter().map(|z| objective.evaluate(z)).collect()
    } else {
        candidates.iter().map(|z| objective.evaluate(z)).collect()
    }
}

/// Indices sorted by fitness, ties broken by index.
pub(crate) fn rank(fitness: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));
    idx
}
