use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Algorithm, LatentVector, Objective, OptimizerConfig, RunTrace, SearchError};

fn draw(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Elitist (1+1) EA: `z' = z + ea_sigma * N(0, I)`, accepted when not worse.
pub fn opo_ea_run(
    objective: &dyn Objective,
    config: &OptimizerConfig,
) -> Result<RunTrace, SearchError> {
    if config.algorithm != Algorithm::OnePlusOneEa {
        return Err(SearchError::InvalidConfig(format!(
            "opo_ea_run called with algorithm {}",
            config.algorithm
        )));
    }
    config.validate()?;
    let started = Instant::now();
    let mut rng = config.rng();
    let n = config.latent_dim;

    let mut current: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
    config.clamp(&mut current);
    let current_z = LatentVector::new(current.clone());
    let report = objective
        .evaluate(&current_z)
        .map_err(|source| SearchError::Objective {
            source,
            partial: None,
        })?;
    let mut current_fitness = report.fitness;
    let mut trace = RunTrace::start(Algorithm::OnePlusOneEa, config.seed, current_z, report);
    trace.eval_count = 1;
    trace.close_generation(0);

    for iteration in 1..config.budget_evals {
        let mut proposal: Vec<f64> = current
            .iter()
            .map(|v| v + config.ea_sigma * draw(&mut rng))
            .collect();
        config.clamp(&mut proposal);
        let z = LatentVector::new(proposal);
        let report = match objective.evaluate(&z) {
            Ok(r) => r,
            Err(source) => {
                trace.wall_time = started.elapsed();
                return Err(SearchError::Objective {
                    source,
                    partial: Some(Box::new(trace)),
                });
            }
        };
        trace.eval_count += 1;
        if report.fitness <= current_fitness {
            current_fitness = report.fitness;
            trace.offer(&z, &report);
            current = z.into_vec();
        }
        trace.close_generation(iteration);
    }
    trace.wall_time = started.elapsed();
    Ok(trace)
}
