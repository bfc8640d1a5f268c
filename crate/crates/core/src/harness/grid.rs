use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use super::output::{render_pair_svg, write_atomic, PlotPoint, ResultRow, ResultTable};
use super::{ExperimentConfig, HarnessError, EXIT_PARTIAL};
use crate::aesthetics::{measure, FeatureId, FeatureValue};
use crate::genesis::GeneratorEndpoint;
use crate::image::{encode_ppm, read_ppm};
use crate::objective::{Direction, LatentObjective, ObjectiveSpec, Term};
use crate::search::{
    self, compare_runs, sphere, Algorithm, ComparisonTable, FnObjective, Objective,
    OptimizerConfig, RunTrace, SearchError,
};
use crate::serde_inf;

/// Corner labels of a feature-pair cell, in table order.
pub const PAIR_CORNERS: [&str; 4] = [
    "Min.f1-Min.f2",
    "Min.f1-Max.f2",
    "Max.f1-Min.f2",
    "Max.f1-Max.f2",
];

const CORNER_DIRECTIONS: [(Direction, Direction); 4] = [
    (Direction::Minimize, Direction::Minimize),
    (Direction::Minimize, Direction::Maximize),
    (Direction::Maximize, Direction::Minimize),
    (Direction::Maximize, Direction::Maximize),
];

pub struct NamedEndpoint {
    pub name: String,
    pub endpoint: GeneratorEndpoint,
}

/// Builds (and for external endpoints, connects) every configured endpoint.
pub fn build_endpoints(config: &ExperimentConfig) -> Result<Vec<NamedEndpoint>, HarnessError> {
    config
        .endpoints
        .iter()
        .map(|spec| {
            let endpoint = spec.build().map_err(|source| HarnessError::Endpoint {
                name: spec.name.clone(),
                source,
            })?;
            Ok(NamedEndpoint {
                name: spec.name.clone(),
                endpoint,
            })
        })
        .collect()
}

#[derive(Debug)]
pub struct GridOutcome {
    pub output_dir: PathBuf,
    pub table: ResultTable,
}

impl GridOutcome {
    pub fn failures(&self) -> usize {
        self.table.failures()
    }

    /// 0 when every cell succeeded, [`EXIT_PARTIAL`] otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failures() == 0 {
            0
        } else {
            EXIT_PARTIAL
        }
    }
}

struct Cell {
    endpoint: usize,
    label: String,
    corner: String,
    spec: ObjectiveSpec,
    seed: u64,
    /// Output directory of the cell, relative to the grid root, `/`-separated.
    dir: String,
}

fn slug(d: Direction) -> &'static str {
    match d {
        Direction::Minimize => "min",
        Direction::Maximize => "max",
    }
}

fn write_file(path: PathBuf, bytes: &[u8]) -> Result<(), HarnessError> {
    write_atomic(&path, bytes)
}

fn trace_csv(trace: &RunTrace) -> Result<Vec<u8>, HarnessError> {
    let mut buf = Vec::new();
    trace.write_csv(&mut buf)?;
    Ok(buf)
}

/// Saves a finished run's images and trace, then measures the saved best image.
fn persist_run(
    out: &Path,
    endpoint: &GeneratorEndpoint,
    dir: &str,
    spec: &ObjectiveSpec,
    trace: &RunTrace,
) -> Result<Result<(Vec<FeatureValue>, String), String>, HarnessError> {
    write_file(out.join(dir).join("trace.csv"), &trace_csv(trace)?)?;
    let images = endpoint
        .generate(&trace.best_z)
        .and_then(|best| Ok((best, endpoint.generate(&trace.initial_z)?)));
    let (best, initial) = match images {
        Ok(pair) => pair,
        Err(e) => return Ok(Err(format!("regenerating the best image failed: {e}"))),
    };
    let rel = format!("{dir}/best.ppm");
    write_file(out.join(&rel), &encode_ppm(&best))?;
    write_file(out.join(dir).join("initial.ppm"), &encode_ppm(&initial))?;
    let saved = read_ppm(out.join(&rel))?;
    let values = spec
        .terms
        .iter()
        .map(|t| measure(t.feature, &saved))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Ok((values, rel)))
}

fn run_cell(
    config: &ExperimentConfig,
    out: &Path,
    endpoints: &[NamedEndpoint],
    cell: &Cell,
) -> Result<ResultRow, HarnessError> {
    let ep = &endpoints[cell.endpoint];
    let optimizer = OptimizerConfig {
        seed: cell.seed,
        ..config.optimizer.clone()
    };
    let objective = LatentObjective::new(&ep.endpoint, cell.spec.clone())
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut row = ResultRow {
        endpoint: ep.name.clone(),
        cell: cell.label.clone(),
        corner: cell.corner.clone(),
        cutoff: cell.spec.cutoff_c,
        seed: cell.seed,
        values: Vec::new(),
        realness_raw: f64::NAN,
        fitness: f64::NAN,
        evals: 0,
        error: None,
        image: None,
    };
    match search::run(&objective, &optimizer) {
        Ok(trace) => {
            row.fitness = trace.best_fitness();
            row.realness_raw = trace.best_report.realness_raw;
            row.evals = trace.eval_count;
            for w in &trace.warnings {
                warn!("{} {} {} seed {}: {w}", ep.name, cell.label, cell.corner, cell.seed);
            }
            match persist_run(out, &ep.endpoint, &cell.dir, &cell.spec, &trace)? {
                Ok((values, image)) => {
                    row.values = values;
                    row.image = Some(image);
                }
                Err(e) => row.error = Some(e),
            }
        }
        Err(SearchError::Objective { source, partial }) => {
            if let Some(t) = &partial {
                row.evals = t.eval_count;
                write_file(out.join(&cell.dir).join("trace.csv"), &trace_csv(t)?)?;
            }
            row.error = Some(source.to_string());
        }
        Err(e @ SearchError::InvalidConfig(_)) => return Err(e.into()),
    }
    info!(
        "{} {} {} seed {}: {}",
        row.endpoint,
        row.cell,
        row.corner,
        row.seed,
        row.error.as_deref().unwrap_or("ok")
    );
    Ok(row)
}

fn run_cells(
    config: &ExperimentConfig,
    out: &Path,
    endpoints: &[NamedEndpoint],
    cells: &[Cell],
) -> Result<ResultTable, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start {} workers: {e}", config.workers)))?;
    let rows = pool.install(|| {
        cells
            .par_iter()
            .map(|c| run_cell(config, out, endpoints, c))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(ResultTable { rows })
}

fn prepare(config: &ExperimentConfig, out: &Path) -> Result<Vec<NamedEndpoint>, HarnessError> {
    config.validate()?;
    let endpoints = build_endpoints(config)?;
    write_file(out.join("config.json"), config.to_json().as_bytes())?;
    Ok(endpoints)
}

fn csv_bytes(records: &[Vec<String>]) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.write_record(r)?;
    }
    w.into_inner()
        .map_err(|e| HarnessError::Csv(e.into_error().into()))
}

fn fmt4(v: Option<f64>) -> String {
    v.map_or_else(|| "failed".to_string(), |v| format!("{v:.4}"))
}

/// The most extreme achieved value in direction `dir` among successful rows.
fn extreme<'a>(
    rows: impl Iterator<Item = &'a ResultRow>,
    feature: FeatureId,
    dir: Direction,
) -> Option<f64> {
    let vals = rows.filter(|r| r.is_ok()).filter_map(|r| r.value(feature));
    match dir {
        Direction::Minimize => vals.reduce(f64::min),
        Direction::Maximize => vals.reduce(f64::max),
    }
}

/// Minimizes and maximizes every configured feature on every endpoint and seed.
///
/// Writes `single/results.csv`, the `single/table.csv` summary
/// (`Feature,Min,Max`, one column pair per endpoint) and per-cell
/// `best.ppm`, `initial.ppm` and `trace.csv`.
pub fn run_single_grid(config: &ExperimentConfig, out: &Path) -> Result<GridOutcome, HarnessError> {
    let endpoints = prepare(config, out)?;
    let mut cells = Vec::new();
    for (e, ep) in endpoints.iter().enumerate() {
        for &feature in &config.single.features {
            for dir in Direction::BOTH {
                for &seed in &config.seeds {
                    cells.push(Cell {
                        endpoint: e,
                        label: feature.label().to_string(),
                        corner: dir.short().to_string(),
                        spec: config.objective.spec(vec![Term::new(feature, dir)], None),
                        seed,
                        dir: format!("single/{}/{}-{}/seed{seed}", ep.name, feature.key(), slug(dir)),
                    });
                }
            }
        }
    }
    let table = run_cells(config, out, &endpoints, &cells)?;
    write_file(out.join("single/results.csv"), &table.to_csv_bytes()?)?;

    let mut header = vec!["Feature".to_string()];
    for ep in &endpoints {
        for dir in Direction::BOTH {
            header.push(if endpoints.len() == 1 {
                dir.short().to_string()
            } else {
                format!("{} ({})", dir.short(), ep.name)
            });
        }
    }
    let mut records = vec![header];
    for &feature in &config.single.features {
        let mut rec = vec![feature.label().to_string()];
        for ep in &endpoints {
            for dir in Direction::BOTH {
                let rows = table.rows.iter().filter(|r| {
                    r.endpoint == ep.name && r.cell == feature.label() && r.corner == dir.short()
                });
                rec.push(fmt4(extreme(rows, feature, dir)));
            }
        }
        records.push(rec);
    }
    write_file(out.join("single/table.csv"), &csv_bytes(&records)?)?;
    Ok(GridOutcome {
        output_dir: out.to_path_buf(),
        table,
    })
}

/// Runs the four direction corners of every feature pair.
///
/// Besides `pairs/results.csv`, writes one `pairs/table_<endpoint>.csv` with
/// `"a - b"` cells per corner, and per pair a `plot_<f1>-<f2>.csv` and
/// `.svg` holding the best (lowest-fitness) seed of each corner.
pub fn run_pair_grid(config: &ExperimentConfig, out: &Path) -> Result<GridOutcome, HarnessError> {
    let endpoints = prepare(config, out)?;
    let pair_label = |[a, b]: [FeatureId; 2]| format!("{}-{}", a.label(), b.label());
    let mut cells = Vec::new();
    for (e, ep) in endpoints.iter().enumerate() {
        for &pair in &config.pairs.pairs {
            for (corner, (d1, d2)) in PAIR_CORNERS.iter().zip(CORNER_DIRECTIONS) {
                for &seed in &config.seeds {
                    cells.push(Cell {
                        endpoint: e,
                        label: pair_label(pair),
                        corner: corner.to_string(),
                        spec: config.objective.spec(
                            vec![Term::new(pair[0], d1), Term::new(pair[1], d2)],
                            None,
                        ),
                        seed,
                        dir: format!(
                            "pairs/{}/{}-{}/{}-{}/seed{seed}",
                            ep.name,
                            pair[0].key(),
                            pair[1].key(),
                            slug(d1),
                            slug(d2)
                        ),
                    });
                }
            }
        }
    }
    let table = run_cells(config, out, &endpoints, &cells)?;
    write_file(out.join("pairs/results.csv"), &table.to_csv_bytes()?)?;

    let many_seeds = config.seeds.len() > 1;
    for ep in &endpoints {
        let mut header = vec!["Feature pairs".to_string()];
        header.extend(PAIR_CORNERS.iter().map(|c| c.to_string()));
        let mut records = vec![header];
        for &pair in &config.pairs.pairs {
            for &seed in &config.seeds {
                let mut rec = vec![if many_seeds {
                    format!("{} (seed {seed})", pair_label(pair))
                } else {
                    pair_label(pair)
                }];
                for corner in PAIR_CORNERS {
                    let row = table.rows.iter().find(|r| {
                        r.endpoint == ep.name
                            && r.cell == pair_label(pair)
                            && r.corner == corner
                            && r.seed == seed
                    });
                    rec.push(match row {
                        Some(r) if r.is_ok() => format!(
                            "{} - {}",
                            fmt4(r.value(pair[0])),
                            fmt4(r.value(pair[1]))
                        ),
                        _ => "failed".to_string(),
                    });
                }
                records.push(rec);
            }
        }
        write_file(
            out.join(format!("pairs/table_{}.csv", ep.name)),
            &csv_bytes(&records)?,
        )?;
    }

    for &pair in &config.pairs.pairs {
        let mut points = Vec::new();
        let mut records = vec![vec![
            "endpoint".to_string(),
            "corner".into(),
            "seed".into(),
            pair[0].key().into(),
            pair[1].key().into(),
        ]];
        for ep in &endpoints {
            for corner in PAIR_CORNERS {
                let best = table
                    .rows
                    .iter()
                    .filter(|r| {
                        r.is_ok()
                            && r.endpoint == ep.name
                            && r.cell == pair_label(pair)
                            && r.corner == corner
                    })
                    .fold(None::<&ResultRow>, |acc, r| match acc {
                        Some(a) if a.fitness <= r.fitness => Some(a),
                        _ => Some(r),
                    });
                if let Some(r) = best {
                    let (x, y) = (r.value(pair[0]).unwrap(), r.value(pair[1]).unwrap());
                    records.push(vec![
                        ep.name.clone(),
                        corner.to_string(),
                        r.seed.to_string(),
                        x.to_string(),
                        y.to_string(),
                    ]);
                    points.push(PlotPoint {
                        endpoint: ep.name.clone(),
                        corner: corner.to_string(),
                        x,
                        y,
                    });
                }
            }
        }
        let stem = format!("pairs/plot_{}-{}", pair[0].key(), pair[1].key());
        write_file(out.join(format!("{stem}.csv")), &csv_bytes(&records)?)?;
        write_file(
            out.join(format!("{stem}.svg")),
            render_pair_svg(pair[0], pair[1], &points).as_bytes(),
        )?;
    }
    Ok(GridOutcome {
        output_dir: out.to_path_buf(),
        table,
    })
}

/// Repeats one single-feature objective under each configured cut-off.
///
/// Writes `ablation/results.csv` and `ablation/table.csv`, which holds the
/// most extreme achieved value per cut-off and endpoint.
pub fn run_cutoff_ablation(
    config: &ExperimentConfig,
    out: &Path,
) -> Result<GridOutcome, HarnessError> {
    config.validate_ablation()?;
    let endpoints = prepare(config, out)?;
    let ab = &config.ablation;
    let term = Term::new(ab.feature, ab.direction);
    let mut cells = Vec::new();
    for (e, ep) in endpoints.iter().enumerate() {
        for &cutoff in &ab.cutoffs {
            for &seed in &config.seeds {
                cells.push(Cell {
                    endpoint: e,
                    label: ab.feature.label().to_string(),
                    corner: ab.direction.short().to_string(),
                    spec: config.objective.spec(vec![term], Some(cutoff)),
                    seed,
                    dir: format!(
                        "ablation/{}/cutoff-{}/seed{seed}",
                        ep.name,
                        serde_inf::display(cutoff)
                    ),
                });
            }
        }
    }
    let table = run_cells(config, out, &endpoints, &cells)?;
    write_file(out.join("ablation/results.csv"), &table.to_csv_bytes()?)?;

    let mut records = vec![vec![
        "cutoff".to_string(),
        "endpoint".into(),
        ab.feature.key().into(),
        "realness_raw".into(),
        "seed".into(),
    ]];
    for &cutoff in &ab.cutoffs {
        for ep in &endpoints {
            let rows = || {
                table
                    .rows
                    .iter()
                    .filter(move |r| r.endpoint == ep.name && r.cutoff.total_cmp(&cutoff).is_eq())
            };
            let target = extreme(rows(), ab.feature, ab.direction);
            let row = rows().find(|r| r.is_ok() && r.value(ab.feature) == target);
            records.push(vec![
                serde_inf::display(cutoff),
                ep.name.clone(),
                fmt4(target),
                row.map_or_else(String::new, |r| r.realness_raw.to_string()),
                row.map_or_else(String::new, |r| r.seed.to_string()),
            ]);
        }
    }
    write_file(out.join("ablation/table.csv"), &csv_bytes(&records)?)?;
    Ok(GridOutcome {
        output_dir: out.to_path_buf(),
        table,
    })
}

#[derive(Debug)]
pub struct EvolveOutcome {
    pub row: ResultRow,
    pub trace: RunTrace,
    /// Directory holding `best.ppm`, `initial.ppm`, `trace.csv` and `report.json`.
    pub run_dir: PathBuf,
}

#[derive(Serialize)]
struct EvolveReport<'a> {
    endpoint: &'a str,
    algorithm: String,
    seed: u64,
    objective: &'a ObjectiveSpec,
    evals: usize,
    best_fitness: f64,
    features: &'a [FeatureValue],
    realness_raw: f64,
    initial_fitness: f64,
    best_z: &'a [f64],
}

/// One optimizer run of `config.evolve` on the named endpoint (default: the first),
/// seeded with `config.optimizer.seed`.
pub fn run_evolve(
    config: &ExperimentConfig,
    out: &Path,
    endpoint: Option<&str>,
) -> Result<EvolveOutcome, HarnessError> {
    config.validate()?;
    let spec_entry = match endpoint {
        None => &config.endpoints[0],
        Some(name) => config
            .endpoints
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| HarnessError::Config(format!("no endpoint named {name:?}")))?,
    };
    let ep = spec_entry.build().map_err(|source| HarnessError::Endpoint {
        name: spec_entry.name.clone(),
        source,
    })?;
    let spec = config.objective.spec(config.evolve.terms.clone(), config.evolve.cutoff);
    let objective =
        LatentObjective::new(&ep, spec.clone()).map_err(|e| HarnessError::Config(e.to_string()))?;
    let trace = search::run(&objective, &config.optimizer)?;
    let seed = config.optimizer.seed;
    let dir = format!("evolve/{}/seed{seed}", spec_entry.name);
    write_file(out.join("config.json"), config.to_json().as_bytes())?;
    let (values, image) = persist_run(out, &ep, &dir, &spec, &trace)?.map_err(|e| {
        HarnessError::Endpoint {
            name: spec_entry.name.clone(),
            source: crate::genesis::GenesisError::Config(e),
        }
    })?;
    let report = EvolveReport {
        endpoint: &spec_entry.name,
        algorithm: trace.algorithm.to_string(),
        seed,
        objective: &spec,
        evals: trace.eval_count,
        best_fitness: trace.best_fitness(),
        features: &values,
        realness_raw: trace.best_report.realness_raw,
        initial_fitness: trace.initial_report.fitness,
        best_z: trace.best_z.as_slice(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(out.join(&dir).join("report.json"), json.as_bytes())?;
    let label = spec
        .terms
        .iter()
        .map(|t| t.feature.label())
        .collect::<Vec<_>>()
        .join("-");
    let corner = spec
        .terms
        .iter()
        .map(|t| t.direction.short())
        .collect::<Vec<_>>()
        .join("-");
    let row = ResultRow {
        endpoint: spec_entry.name.clone(),
        cell: label,
        corner,
        cutoff: spec.cutoff_c,
        seed,
        values,
        realness_raw: trace.best_report.realness_raw,
        fitness: trace.best_fitness(),
        evals: trace.eval_count,
        error: None,
        image: Some(image),
    };
    Ok(EvolveOutcome {
        row,
        trace,
        run_dir: out.join(dir),
    })
}

/// What `run_comparison` optimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareTarget {
    /// `sum z_i^2` in `optimizer.latent_dim` dimensions.
    Sphere,
    /// The `evolve` objective on the first endpoint.
    Experiment,
}

/// CMA-ES against the (1+1) EA at the same evaluation budget over `config.seeds`.
///
/// Writes `compare/comparison.csv` (median and IQR of final fitness),
/// `compare/finals.csv` (per seed) and `compare/timing.csv` (wall time,
/// kept apart so the other two are reproducible byte for byte).
pub fn run_comparison(
    config: &ExperimentConfig,
    out: &Path,
    target: CompareTarget,
) -> Result<ComparisonTable, HarnessError> {
    config.validate()?;
    let cma = OptimizerConfig {
        algorithm: Algorithm::CmaEs,
        ..config.optimizer.clone()
    };
    let configs = vec![
        (Algorithm::CmaEs.to_string(), cma.clone()),
        (Algorithm::OnePlusOneEa.to_string(), cma.as_one_plus_one()),
    ];
    let table = match target {
        CompareTarget::Sphere => compare_runs(&FnObjective(sphere), &configs, &config.seeds)?,
        CompareTarget::Experiment => {
            let spec_entry = &config.endpoints[0];
            let ep = spec_entry.build().map_err(|source| HarnessError::Endpoint {
                name: spec_entry.name.clone(),
                source,
            })?;
            let spec = config.objective.spec(config.evolve.terms.clone(), config.evolve.cutoff);
            let objective = LatentObjective::new(&ep, spec)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            compare_runs(&objective as &dyn Objective, &configs, &config.seeds)?
        }
    };
    write_file(out.join("config.json"), config.to_json().as_bytes())?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    write_file(out.join("compare/comparison.csv"), &buf)?;
    let mut records = vec![vec!["label".to_string(), "seed".into(), "final_fitness".into()]];
    for row in &table.rows {
        for (seed, fin) in table.seeds.iter().zip(&row.finals) {
            records.push(vec![
                row.label.clone(),
                seed.to_string(),
                match fin {
                    Ok(v) => v.to_string(),
                    Err(e) => format!("failed: {e}"),
                },
            ]);
        }
    }
    write_file(out.join("compare/finals.csv"), &csv_bytes(&records)?)?;
    let mut buf = Vec::new();
    table.write_timing_csv(&mut buf)?;
    write_file(out.join("compare/timing.csv"), &buf)?;
    Ok(table)
}

/// Measures `features` on each PPM file.
pub fn eval_features(
    paths: &[PathBuf],
    features: &[FeatureId],
) -> Result<Vec<(String, Vec<FeatureValue>)>, HarnessError> {
    paths
        .iter()
        .map(|p| {
            let img = read_ppm(p)?;
            let values = features
                .iter()
                .map(|&f| measure(f, &img))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((p.display().to_string(), values))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genesis::{EndpointKind, EndpointSpec};

    fn tiny() -> ExperimentConfig {
        let mut ep = EndpointSpec::builtin("lin", EndpointKind::BuiltinLinear, 1);
        ep.latent_dim = 6;
        ep.width = 16;
        ep.height = 16;
        ExperimentConfig {
            endpoints: vec![ep],
            optimizer: OptimizerConfig {
                latent_dim: 6,
                population: 4,
                generations: 3,
                budget_evals: 12,
                ..OptimizerConfig::default()
            },
            single: crate::harness::SingleGrid {
                features: vec![FeatureId::Hue],
            },
            pairs: crate::harness::PairGrid {
                pairs: vec![[FeatureId::Hue, FeatureId::Saturation]],
            },
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn single_grid_layout() {
        let dir = tempfile::tempdir().unwrap();
        let o = run_single_grid(&tiny(), dir.path()).unwrap();
        assert_eq!(o.table.rows.len(), 2);
        assert_eq!(o.exit_code(), 0);
        assert!(dir.path().join("single/lin/hue-min/seed0/best.ppm").exists());
        assert!(dir.path().join("single/lin/hue-max/seed0/trace.csv").exists());
        let t = std::fs::read_to_string(dir.path().join("single/table.csv")).unwrap();
        assert!(t.starts_with("Feature,Min,Max\nHue,"));
    }

    #[test]
    fn pair_grid_has_four_corners() {
        let dir = tempfile::tempdir().unwrap();
        let o = run_pair_grid(&tiny(), dir.path()).unwrap();
        let corners: Vec<&str> = o.table.rows.iter().map(|r| r.corner.as_str()).collect();
        assert_eq!(corners, PAIR_CORNERS);
        let t = std::fs::read_to_string(dir.path().join("pairs/table_lin.csv")).unwrap();
        assert!(t.starts_with("Feature pairs,Min.f1-Min.f2,Min.f1-Max.f2,Max.f1-Min.f2,Max.f1-Max.f2\n"));
        assert!(t.lines().nth(1).unwrap().starts_with("Hue-Saturation,"));
        assert!(t.contains(" - "));
    }

    #[test]
    fn ablation_needs_two_cutoffs() {
        let mut cfg = tiny();
        cfg.ablation.cutoffs = vec![0.1];
        let dir = tempfile::tempdir().unwrap();
        let err = run_cutoff_ablation(&cfg, dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), super::super::EXIT_CONFIG);
    }

    #[test]
    fn evolve_writes_report() {
        let dir = tempfile::tempdir().unwrap();
        let o = run_evolve(&tiny(), dir.path(), None).unwrap();
        assert!(o.run_dir.join("report.json").exists());
        assert_eq!(o.row.values[0].value, o.trace.best_report.feature_values[0].value);
        assert!(matches!(
            run_evolve(&tiny(), dir.path(), Some("nope")),
            Err(HarnessError::Config(_))
        ));
    }
}
