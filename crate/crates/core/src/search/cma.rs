use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{
    evaluate_batch, rank, Algorithm, LatentVector, Objective, OptimizerConfig, RunTrace,
    SearchError,
};

/// Eigenvalues of the covariance are floored here when adaptation drives them non-positive.
pub const EIGEN_FLOOR: f64 = 1e-14;

/// Strategy constants derived from dimension and population size.
#[derive(Clone, Debug, PartialEq)]
pub struct CmaParams {
    pub lambda: usize,
    pub mu: usize,
    pub weights: Vec<f64>,
    pub mueff: f64,
    pub c_sigma: f64,
    pub d_sigma: f64,
    pub c_c: f64,
    pub c_1: f64,
    pub c_mu: f64,
    /// Expected norm of an `n`-dimensional standard normal vector.
    pub chi_n: f64,
}

impl CmaParams {
    pub fn new(n: usize, lambda: usize) -> Self {
        let nf = n as f64;
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mueff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let c_sigma = (mueff + 2.0) / (nf + mueff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mueff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mueff / nf) / (nf + 4.0 + 2.0 * mueff / nf);
        let c_1 = 2.0 / ((nf + 1.3).powi(2) + mueff);
        let c_mu = (1.0 - c_1).min(2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nf + 2.0).powi(2) + mueff));
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        Self {
            lambda,
            mu,
            weights,
            mueff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CmaState {
    pub mean: DVector<f64>,
    pub sigma: f64,
    pub cov: DMatrix<f64>,
    pub p_sigma: DVector<f64>,
    pub p_c: DVector<f64>,
    pub generation: usize,
    /// Columns are the eigenvectors of `cov`.
    pub eigenvectors: DMatrix<f64>,
    pub eigenvalues: DVector<f64>,
}

impl CmaState {
    /// `max |C - C^T|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.cov.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.cov[(i, j)] - self.cov[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.min()
    }
}

/// Ask/tell CMA-ES.
pub struct CmaEs {
    params: CmaParams,
    state: CmaState,
    rng: ChaCha8Rng,
    config: OptimizerConfig,
    warnings: Vec<String>,
}

impl CmaEs {
    pub fn new(config: &OptimizerConfig) -> Result<Self, SearchError> {
        config.validate()?;
        let n = config.latent_dim;
        let state = CmaState {
            mean: DVector::zeros(n),
            sigma: config.sigma0,
            cov: DMatrix::identity(n, n),
            p_sigma: DVector::zeros(n),
            p_c: DVector::zeros(n),
            generation: 0,
            eigenvectors: DMatrix::identity(n, n),
            eigenvalues: DVector::from_element(n, 1.0),
        };
        Ok(Self {
            params: CmaParams::new(n, config.population),
            state,
            rng: config.rng(),
            config: config.clone(),
            warnings: Vec::new(),
        })
    }

    pub fn params(&self) -> &CmaParams {
        &self.params
    }

    pub fn state(&self) -> &CmaState {
        &self.state
    }

    pub fn take_warnings(&mut self) -> Vec<String> {
        std::mem::take(&mut self.warnings)
    }

    /// Samples λ candidates from `N(mean, sigma^2 C)`.
    pub fn ask(&mut self) -> Vec<DVector<f64>> {
        let n = self.config.latent_dim;
        let s = &self.state;
        let scales = s.eigenvalues.map(f64::sqrt);
        (0..self.params.lambda)
            .map(|_| {
                let z = DVector::from_fn(n, |i, _| {
                    let v: f64 = StandardNormal.sample(&mut self.rng);
                    v * scales[i]
                });
                let mut x = &s.mean + (&s.eigenvectors * z) * s.sigma;
                self.config.clamp(x.as_mut_slice());
                x
            })
            .collect()
    }

    /// Updates the distribution from evaluated candidates (lower fitness is better).
    pub fn tell(&mut self, candidates: &[DVector<f64>], fitness: &[f64]) {
        assert_eq!(candidates.len(), fitness.len());
        let p = &self.params;
        let n = self.config.latent_dim;
        let s = &mut self.state;
        let order = rank(fitness);

        let steps: Vec<DVector<f64>> = order[..p.mu]
            .iter()
            .map(|&i| (&candidates[i] - &s.mean) / s.sigma)
            .collect();
        let mut y_w = DVector::zeros(n);
        for (w, y) in p.weights.iter().zip(&steps) {
            y_w.axpy(*w, y, 1.0);
        }
        s.mean.axpy(s.sigma, &y_w, 1.0);

        // C^{-1/2} y_w = B D^{-1} B^T y_w
        let inv_sqrt = s.eigenvalues.map(|v| 1.0 / v.sqrt());
        let whitened = &s.eigenvectors * (s.eigenvectors.tr_mul(&y_w).component_mul(&inv_sqrt));
        s.p_sigma *= 1.0 - p.c_sigma;
        s.p_sigma
            .axpy((p.c_sigma * (2.0 - p.c_sigma) * p.mueff).sqrt(), &whitened, 1.0);

        s.generation += 1;
        let ps_norm = s.p_sigma.norm();
        let correction = (1.0 - (1.0 - p.c_sigma).powi(2 * s.generation as i32)).sqrt();
        let h_sigma = ps_norm / correction < (1.4 + 2.0 / (n as f64 + 1.0)) * p.chi_n;
        s.p_c *= 1.0 - p.c_c;
        if h_sigma {
            s.p_c.axpy((p.c_c * (2.0 - p.c_c) * p.mueff).sqrt(), &y_w, 1.0);
        }
        let delta = if h_sigma { 0.0 } else { p.c_c * (2.0 - p.c_c) };

        let mut cov = &s.cov * (1.0 - p.c_1 - p.c_mu + p.c_1 * delta);
        cov.ger(p.c_1, &s.p_c, &s.p_c, 1.0);
        for (w, y) in p.weights.iter().zip(&steps) {
            cov.ger(p.c_mu * w, y, y, 1.0);
        }
        s.cov = symmetrize(cov);

        s.sigma *= ((p.c_sigma / p.d_sigma) * (ps_norm / p.chi_n - 1.0)).exp();
        self.decompose();
    }

    fn decompose(&mut self) {
        let s = &mut self.state;
        let eig = SymmetricEigen::new(s.cov.clone());
        let mut values = eig.eigenvalues;
        let vectors = eig.eigenvectors;
        let low = values.iter().filter(|&&v| !(v >= EIGEN_FLOOR)).count();
        if low > 0 {
            self.warnings.push(format!(
                "generation {}: floored {low} covariance eigenvalue(s) at {EIGEN_FLOOR:e}",
                s.generation
            ));
            values.apply(|v| {
                if !(*v >= EIGEN_FLOOR) {
                    *v = EIGEN_FLOOR
                }
            });
            let rebuilt = &vectors * DMatrix::from_diagonal(&values) * vectors.transpose();
            s.cov = symmetrize(rebuilt);
        }
        s.eigenvectors = vectors;
        s.eigenvalues = values;
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = m;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

pub fn cma_run(objective: &dyn Objective, config: &OptimizerConfig) -> Result<RunTrace, SearchError> {
    cma_run_observed(objective, config, |_| {})
}

/// Runs CMA-ES, calling `observer` with the strategy state after every generation.
pub fn cma_run_observed(
    objective: &dyn Objective,
    config: &OptimizerConfig,
    mut observer: impl FnMut(&CmaState),
) -> Result<RunTrace, SearchError> {
    if config.algorithm != Algorithm::CmaEs {
        return Err(SearchError::InvalidConfig(format!(
            "cma_run called with algorithm {}",
            config.algorithm
        )));
    }
    let started = Instant::now();
    let mut es = CmaEs::new(config)?;
    let generations = config
        .generations
        .min(config.budget_evals / config.population);
    let mut trace: Option<RunTrace> = None;

    for g in 1..=generations {
        let xs = es.ask();
        let zs: Vec<LatentVector> = xs.iter().map(|x| LatentVector::new(x.as_slice().to_vec())).collect();
        let results = evaluate_batch(objective, &zs, config.parallel);
        let mut fitness = Vec::with_capacity(zs.len());
        for (z, result) in zs.iter().zip(results) {
            match result {
                Ok(report) => {
                    let t = trace.get_or_insert_with(|| {
                        RunTrace::start(Algorithm::CmaEs, config.seed, z.clone(), report.clone())
                    });
                    t.eval_count += 1;
                    t.offer(z, &report);
                    fitness.push(report.fitness);
                }
                Err(source) => {
                    let partial = trace.map(|mut t| {
                        t.wall_time = started.elapsed();
                        Box::new(t)
                    });
                    return Err(SearchError::Objective { source, partial });
                }
            }
        }
        es.tell(&xs, &fitness);
        let t = trace.as_mut().expect("population is non-empty");
        t.warnings.extend(es.take_warnings());
        t.close_generation(g);
        observer(es.state());
    }
    let mut trace = trace.expect("at least one generation ran");
    trace.wall_time = started.elapsed();
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{sphere, FnObjective};

    fn config(n: usize, lambda: usize, generations: usize, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            algorithm: Algorithm::CmaEs,
            latent_dim: n,
            population: lambda,
            generations,
            budget_evals: lambda * generations,
            seed,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn parameters_match_reference_formulas() {
        let p = CmaParams::new(10, 10);
        assert_eq!(p.mu, 5);
        assert!((p.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.weights.windows(2).all(|w| w[0] > w[1]));
        // log-rank weights for lambda = 10, mu = 5
        let raw: Vec<f64> = (1..=5).map(|i| 5.5f64.ln() - (i as f64).ln()).collect();
        let sum: f64 = raw.iter().sum();
        assert!((p.weights[0] - raw[0] / sum).abs() < 1e-15);
        assert!(p.mueff > 1.0 && p.mueff < 5.0);
        assert!(p.c_1 + p.c_mu <= 1.0);
        assert!((p.chi_n - 10f64.sqrt() * (1.0 - 1.0 / 40.0 + 1.0 / 2100.0)).abs() < 1e-12);
    }

    #[test]
    fn sphere_converges_small() {
        let t = cma_run(&FnObjective(sphere), &config(10, 10, 300, 1)).unwrap();
        assert!(t.best_fitness() < 1e-8, "{}", t.best_fitness());
        assert_eq!(t.eval_count, 3000);
        assert!(t.best_fitness_series().windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn seed_determinism() {
        let c = config(8, 8, 50, 42);
        let a = cma_run(&FnObjective(sphere), &c).unwrap();
        let b = cma_run(&FnObjective(sphere), &c).unwrap();
        assert!(a.same_outcome(&b));
        let par = OptimizerConfig { parallel: true, ..c.clone() };
        assert!(a.same_outcome(&cma_run(&FnObjective(sphere), &par).unwrap()));
        let other = cma_run(&FnObjective(sphere), &OptimizerConfig { seed: 43, ..c }).unwrap();
        assert!(!a.same_outcome(&other));
    }

    #[test]
    fn constant_objective_stays_finite() {
        let mut worst_asym: f64 = 0.0;
        let mut min_eig = f64::INFINITY;
        let t = cma_run_observed(&FnObjective(|_: &[f64]| 1.0), &config(10, 10, 2000, 3), |s| {
            assert!(s.sigma.is_finite() && s.sigma > 0.0);
            assert!(s.mean.iter().all(|v| v.is_finite()));
            worst_asym = worst_asym.max(s.max_asymmetry());
            min_eig = min_eig.min(s.min_eigenvalue());
        })
        .unwrap();
        assert_eq!(t.history.len(), 2000);
        assert!(worst_asym <= 1e-12);
        assert!(min_eig > 0.0);
    }

    #[test]
    fn budget_caps_generations() {
        let mut c = config(4, 6, 100, 0);
        c.budget_evals = 40;
        let t = cma_run(&FnObjective(sphere), &c).unwrap();
        assert_eq!(t.eval_count, 36);
        assert_eq!(t.history.len(), 6);
    }

    #[test]
    fn rejects_lambda_one_and_wrong_algorithm() {
        assert!(matches!(
            cma_run(&FnObjective(sphere), &config(4, 1, 10, 0)),
            Err(SearchError::InvalidConfig(_))
        ));
        let ea = config(4, 4, 10, 0).as_one_plus_one();
        assert!(cma_run(&FnObjective(sphere), &ea).is_err());
    }

    #[test]
    fn clamp_bounds_candidates() {
        let mut c = config(5, 6, 30, 0);
        c.latent_clamp = Some(0.05);
        c.sigma0 = 2.0;
        let t = cma_run(&FnObjective(|z: &[f64]| -z.iter().sum::<f64>()), &c).unwrap();
        assert!(t.best_z.as_slice().iter().all(|v| v.abs() <= 0.05));
    }
}
