use std::io::Write;
use std::time::Duration;

use super::{run, Algorithm, Objective, OptimizerConfig, SearchError};

#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub label: String,
    pub algorithm: Algorithm,
    pub budget_evals: usize,
    /// Final best fitness per seed, or the error message for a failed cell.
    pub finals: Vec<Result<f64, String>>,
    pub wall_times: Vec<Duration>,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub median_wall: Duration,
}

impl ComparisonRow {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }

    pub fn failures(&self) -> usize {
        self.finals.iter().filter(|r| r.is_err()).count()
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonTable {
    pub seeds: Vec<u64>,
    pub rows: Vec<ComparisonRow>,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Runs every config over every seed (each config's own seed is replaced).
/// All configs must share one evaluation budget. A failing cell is recorded
/// in its row without stopping the others.
pub fn compare_runs(
    objective: &dyn Objective,
    configs: &[(String, OptimizerConfig)],
    seeds: &[u64],
) -> Result<ComparisonTable, SearchError> {
    let Some((_, first)) = configs.first() else {
        return Err(SearchError::InvalidConfig("no configs to compare".into()));
    };
    if seeds.is_empty() {
        return Err(SearchError::InvalidConfig("no seeds to compare over".into()));
    }
    if let Some((label, c)) = configs.iter().find(|(_, c)| c.budget_evals != first.budget_evals) {
        return Err(SearchError::InvalidConfig(format!(
            "{label} has budget {} but {} was expected",
            c.budget_evals, first.budget_evals
        )));
    }
    for (_, c) in configs {
        c.validate()?;
    }
    let rows = configs
        .iter()
        .map(|(label, config)| {
            let mut finals = Vec::with_capacity(seeds.len());
            let mut wall_times = Vec::with_capacity(seeds.len());
            for &seed in seeds {
                let cell = OptimizerConfig {
                    seed,
                    ..config.clone()
                };
                match run(objective, &cell) {
                    Ok(t) => {
                        finals.push(Ok(t.best_fitness()));
                        wall_times.push(t.wall_time);
                    }
                    Err(e) => finals.push(Err(e.to_string())),
                }
            }
            let mut ok: Vec<f64> = finals.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
            ok.sort_by(f64::total_cmp);
            let mut walls = wall_times.clone();
            walls.sort();
            ComparisonRow {
                label: label.clone(),
                algorithm: config.algorithm,
                budget_evals: config.budget_evals,
                median: quantile(&ok, 0.5),
                q1: quantile(&ok, 0.25),
                q3: quantile(&ok, 0.75),
                median_wall: walls.get(walls.len() / 2).copied().unwrap_or_default(),
                finals,
                wall_times,
            }
        })
        .collect();
    Ok(ComparisonTable {
        seeds: seeds.to_vec(),
        rows,
    })
}

impl ComparisonTable {
    pub fn row(&self, label: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Fitness summary; contains no timing so reruns are byte-identical.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "label", "algorithm", "budget_evals", "seeds", "failures", "median", "q1", "q3", "iqr",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.label.clone(),
                r.algorithm.to_string(),
                r.budget_evals.to_string(),
                self.seeds.len().to_string(),
                r.failures().to_string(),
                r.median.to_string(),
                r.q1.to_string(),
                r.q3.to_string(),
                r.iqr().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_timing_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["label", "median_wall_seconds"])?;
        for r in &self.rows {
            w.write_record([r.label.clone(), r.median_wall.as_secs_f64().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{sphere, FnObjective};

    fn cma(n: usize, lambda: usize, budget: usize) -> OptimizerConfig {
        OptimizerConfig {
            algorithm: Algorithm::CmaEs,
            latent_dim: n,
            population: lambda,
            generations: budget / lambda,
            budget_evals: budget,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn quantiles() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.5), 3.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.5), 2.5);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.25), 2.0);
        assert!(quantile(&[], 0.5).is_nan());
    }

    #[test]
    fn single_config_gives_one_row() {
        let t = compare_runs(
            &FnObjective(sphere),
            &[("cma".into(), cma(5, 6, 600))],
            &[1, 2, 3],
        )
        .unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].finals.len(), 3);
    }

    #[test]
    fn identical_configs_give_identical_rows() {
        let c = cma(5, 6, 600);
        let t = compare_runs(
            &FnObjective(sphere),
            &[("a".into(), c.clone()), ("b".into(), c)],
            &[7, 8],
        )
        .unwrap();
        assert_eq!(t.rows[0].finals, t.rows[1].finals);
        assert_eq!(t.rows[0].median, t.rows[1].median);
    }

    #[test]
    fn unequal_budgets_rejected() {
        let err = compare_runs(
            &FnObjective(sphere),
            &[("a".into(), cma(5, 6, 600)), ("b".into(), cma(5, 6, 1200))],
            &[1],
        );
        assert!(matches!(err, Err(SearchError::InvalidConfig(_))));
    }

    #[test]
    fn cma_beats_ea_on_sphere() {
        let c = cma(20, 40, 20_000);
        let t = compare_runs(
            &FnObjective(sphere),
            &[("cma".into(), c.clone()), ("ea".into(), c.as_one_plus_one())],
            &(0..10).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(t.row("cma").unwrap().median < t.row("ea").unwrap().median);
    }
}
