use std::io::Write;
use std::time::Duration;

use serde::Serialize;

use super::{Algorithm, LatentVector};
use crate::objective::FitnessReport;

/// Best-so-far state after one generation (one iteration for the (1+1) EA).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub evals: usize,
    pub best_fitness: f64,
    pub best_features: Vec<f64>,
    pub realness_raw: f64,
}

#[derive(Clone, Debug)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub history: Vec<GenerationRecord>,
    pub best_z: LatentVector,
    pub best_report: FitnessReport,
    /// First point the run evaluated.
    pub initial_z: LatentVector,
    pub initial_report: FitnessReport,
    pub eval_count: usize,
    pub wall_time: Duration,
    pub warnings: Vec<String>,
}

impl RunTrace {
    pub(crate) fn start(
        algorithm: Algorithm,
        seed: u64,
        z: LatentVector,
        report: FitnessReport,
    ) -> Self {
        Self {
            algorithm,
            seed,
            history: Vec::new(),
            best_z: z.clone(),
            best_report: report.clone(),
            initial_z: z,
            initial_report: report,
            eval_count: 0,
            wall_time: Duration::ZERO,
            warnings: Vec::new(),
        }
    }

    /// Replaces the incumbent when `report` is strictly better.
    pub(crate) fn offer(&mut self, z: &LatentVector, report: &FitnessReport) {
        if report.fitness < self.best_report.fitness {
            self.best_z = z.clone();
            self.best_report = report.clone();
        }
    }

    pub(crate) fn close_generation(&mut self, generation: usize) {
        self.history.push(GenerationRecord {
            generation,
            evals: self.eval_count,
            best_fitness: self.best_report.fitness,
            best_features: self.best_report.feature_values.iter().map(|f| f.value).collect(),
            realness_raw: self.best_report.realness_raw,
        });
    }

    pub fn best_fitness(&self) -> f64 {
        self.best_report.fitness
    }

    pub fn best_fitness_series(&self) -> Vec<f64> {
        self.history.iter().map(|r| r.best_fitness).collect()
    }

    /// Equality of everything except wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.algorithm == other.algorithm
            && self.seed == other.seed
            && self.history == other.history
            && self.best_z == other.best_z
            && self.best_report == other.best_report
            && self.initial_z == other.initial_z
            && self.initial_report == other.initial_report
            && self.eval_count == other.eval_count
            && self.warnings == other.warnings
    }

    /// CSV: `generation,evals,best_fitness,<feature...>,realness_raw`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["generation".to_string(), "evals".into(), "best_fitness".into()];
        header.extend(self.best_report.feature_values.iter().map(|f| f.feature.key().to_string()));
        header.push("realness_raw".into());
        w.write_record(&header)?;
        for r in &self.history {
            let mut row = vec![
                r.generation.to_string(),
                r.evals.to_string(),
                r.best_fitness.to_string(),
            ];
            row.extend(r.best_features.iter().map(|v| v.to_string()));
            row.push(r.realness_raw.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
