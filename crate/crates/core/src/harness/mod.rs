//! Experiment orchestration: config bundles, grids of optimizer runs,
//! result tables and plots.
//!
//! Every grid is a deterministic list of cells (endpoint × objective ×
//! seed) run on a rayon pool of `workers` threads. Results are collected
//! in cell order, so the CSV outputs do not depend on scheduling. A failing
//! cell is recorded with its error instead of aborting the grid.
//!
//! Achieved feature values in the tables are measured again from the saved
//! PPM, so they describe exactly the image on disk.

mod config;
mod grid;
mod output;

use std::io;

use thiserror::Error;

pub use config::{
    AblationSpec, EvolveSpec, ExperimentConfig, ObjectiveDefaults, PairGrid, SingleGrid,
    DEFAULT_ABLATION_CUTOFFS, DEFAULT_PAIRS, SCHEMA_VERSION,
};
pub use grid::{
    build_endpoints, eval_features, run_comparison, run_cutoff_ablation, run_evolve,
    run_pair_grid, run_single_grid, CompareTarget, EvolveOutcome, GridOutcome, NamedEndpoint,
    PAIR_CORNERS,
};
pub use output::{
    render_pair_svg, write_atomic, write_features_csv, PlotPoint, ResultRow, ResultTable,
};

use crate::genesis::GenesisError;
use crate::image::ImageError;
use crate::objective::ObjectiveError;
use crate::search::SearchError;

/// Process exit code for an invalid config or arguments.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit code when an endpoint cannot be reached or breaks protocol.
pub const EXIT_ENDPOINT: i32 = 3;
/// Process exit code when some cells of a grid failed.
pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("endpoint {name:?}: {source}")]
    Endpoint {
        name: String,
        #[source]
        source: GenesisError,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => EXIT_CONFIG,
            HarnessError::Endpoint { .. } => EXIT_ENDPOINT,
            HarnessError::Search(SearchError::InvalidConfig(_)) => EXIT_CONFIG,
            HarnessError::Search(SearchError::Objective {
                source: ObjectiveError::Endpoint(_),
                ..
            }) => EXIT_ENDPOINT,
            HarnessError::Search(SearchError::Objective {
                source: ObjectiveError::Spec(_),
                ..
            }) => EXIT_CONFIG,
            _ => 1,
        }
    }
}
