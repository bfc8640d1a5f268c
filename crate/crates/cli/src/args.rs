use std::path::PathBuf;

use aevo_core::genesis::Transport;
use aevo_core::harness::{ExperimentConfig, HarnessError};
use aevo_core::objective::Term;
use aevo_core::{Algorithm, Direction, EndpointKind, EndpointSpec, FeatureId, OptimizerConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "aevo", version, about = "Evolve generator latents toward aesthetic feature targets")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One optimizer run of the `evolve` objective.
    Evolve {
        #[command(flatten)]
        run: RunArgs,
        /// Objective term `feature:min|max`; give twice for a pair.
        #[arg(long = "term", value_parser = parse_term)]
        terms: Vec<Term>,
        /// Realness cut-off (`inf` disables it).
        #[arg(long, value_parser = parse_cutoff)]
        cutoff: Option<f64>,
        /// Endpoint to use (default: the first configured).
        #[arg(long)]
        endpoint: Option<String>,
    },
    /// Minimize and maximize each feature on every endpoint.
    GridSingle {
        #[command(flatten)]
        run: RunArgs,
        /// Features to include (default: all five).
        #[arg(long, value_delimiter = ',', value_parser = parse_feature)]
        features: Option<Vec<FeatureId>>,
    },
    /// The four direction corners of each feature pair.
    GridPairs {
        #[command(flatten)]
        run: RunArgs,
        /// Pairs as `f1-f2`, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
        pairs: Option<Vec<[FeatureId; 2]>>,
    },
    /// One single-feature objective under several realness cut-offs.
    CutoffAblation {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_parser = parse_feature)]
        feature: Option<FeatureId>,
        #[arg(long, value_parser = parse_direction)]
        direction: Option<Direction>,
        /// Cut-offs to compare, comma separated (`inf` allowed).
        #[arg(long, value_delimiter = ',', value_parser = parse_cutoff)]
        cutoffs: Option<Vec<f64>>,
    },
    /// CMA-ES against the (1+1) EA at equal evaluation budget.
    CompareOptimizers {
        #[command(flatten)]
        run: RunArgs,
        /// Optimize the sphere function instead of the experiment objective.
        #[arg(long)]
        sphere: bool,
    },
    /// Print the aesthetic measures of PPM images as CSV.
    EvalFeatures {
        #[arg(required = true)]
        images: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', value_parser = parse_feature)]
        features: Option<Vec<FeatureId>>,
    },
    /// Probe a generator server for wire-protocol conformance.
    ProtocolCheck {
        #[command(flatten)]
        target: TransportArgs,
        /// GEN/DISC round trips to perform.
        #[arg(long, default_value_t = 20)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        timeout_ms: Option<u64>,
    },
    /// Serve a builtin generator over the wire protocol.
    #[command(hide = true)]
    ServeStub {
        /// Listen on this address instead of serving stdin/stdout.
        #[arg(long)]
        tcp: Option<String>,
        #[arg(long, value_enum, default_value_t = BuiltinArg::Coherent)]
        kind: BuiltinArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        latent_dim: usize,
        #[arg(long, default_value_t = 128)]
        size: usize,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct TransportArgs {
    /// `host:port` of a listening server.
    #[arg(long)]
    pub tcp: Option<String>,
    /// Command to spawn, talking over its stdin/stdout.
    #[arg(long, num_args = 1.., allow_hyphen_values = true)]
    pub stdio: Option<Vec<String>>,
}

impl TransportArgs {
    pub fn transport(&self) -> Transport {
        match (&self.tcp, &self.stdio) {
            (Some(address), _) => Transport::Tcp {
                address: address.clone(),
            },
            (None, Some(command)) => Transport::Stdio {
                command: command.clone(),
            },
            (None, None) => unreachable!("clap requires one transport"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuiltinArg {
    Linear,
    Coherent,
}

impl BuiltinArg {
    pub fn kind(self) -> EndpointKind {
        match self {
            BuiltinArg::Linear => EndpointKind::BuiltinLinear,
            BuiltinArg::Coherent => EndpointKind::BuiltinCoherent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Cma,
    Ea,
}

/// Config file plus per-field overrides shared by the experiment commands.
#[derive(Args, Debug)]
pub struct RunArgs {
    /// Experiment config (JSON). Defaults apply when omitted.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Root for relative output directories.
    #[arg(long, env = "AEVO_OUTPUT_ROOT")]
    pub output_root: Option<PathBuf>,
    /// 2000 generations of λ = 40 (80000 evaluations).
    #[arg(long)]
    pub paper_budget: bool,
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,
    /// Optimizer seed (single runs).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seeds for grids and comparisons, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    /// CMA-ES population λ.
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Replace the endpoints with one builtin generator.
    #[arg(long, value_enum, conflicts_with = "tcp")]
    pub builtin: Option<BuiltinArg>,
    /// Replace the endpoints with one external server at `host:port`.
    #[arg(long)]
    pub tcp: Option<String>,
    /// Image side length for `--builtin`.
    #[arg(long, requires = "builtin")]
    pub size: Option<usize>,
    /// Latent dimension for the endpoint and optimizer.
    #[arg(long)]
    pub latent_dim: Option<usize>,
}

impl RunArgs {
    /// Loads the config (or defaults) and applies the overrides in a fixed order:
    /// `--paper-budget` first, then individual fields.
    pub fn resolve(&self) -> Result<(ExperimentConfig, PathBuf), HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if self.paper_budget {
            let paper = OptimizerConfig::default();
            cfg.optimizer.budget_evals = paper.budget_evals;
            cfg.optimizer.generations = paper.generations;
            cfg.optimizer.population = paper.population;
        }
        if let Some(a) = self.algorithm {
            cfg.optimizer.algorithm = match a {
                AlgorithmArg::Cma => Algorithm::CmaEs,
                AlgorithmArg::Ea => Algorithm::OnePlusOneEa,
            };
        }
        if let Some(s) = self.seed {
            cfg.optimizer.seed = s;
        }
        if let Some(s) = &self.seeds {
            cfg.seeds = s.clone();
        }
        if let Some(g) = self.generations {
            cfg.optimizer.generations = g;
        }
        if let Some(p) = self.population {
            cfg.optimizer.population = p;
        }
        match self.budget {
            Some(b) => cfg.optimizer.budget_evals = b,
            // keep the budget consistent with explicitly changed generation counts
            None if self.generations.is_some() || self.population.is_some() => {
                cfg.optimizer.budget_evals = cfg.optimizer.generations * cfg.optimizer.population;
            }
            None => {}
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(kind) = self.builtin {
            let mut ep = EndpointSpec::builtin(&format!("{kind:?}").to_lowercase(), kind.kind(), 0);
            if let Some(s) = self.size {
                ep.width = s;
                ep.height = s;
            }
            cfg.endpoints = vec![ep];
        }
        if let Some(address) = &self.tcp {
            cfg.endpoints = vec![EndpointSpec::external(
                "external",
                Transport::Tcp {
                    address: address.clone(),
                },
            )];
        }
        if let Some(n) = self.latent_dim {
            cfg.optimizer.latent_dim = n;
            for ep in &mut cfg.endpoints {
                ep.latent_dim = n;
            }
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        cfg.validate()?;
        let out = cfg.resolved_output_dir(self.output_root.as_deref());
        Ok((cfg, out))
    }
}

fn parse_feature(s: &str) -> Result<FeatureId, String> {
    s.parse().map_err(|e: aevo_core::aesthetics::UnknownFeature| e.to_string())
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    s.parse().map_err(|e: aevo_core::objective::ObjectiveError| e.to_string())
}

fn parse_term(s: &str) -> Result<Term, String> {
    let (f, d) = s
        .split_once(':')
        .ok_or_else(|| format!("expected feature:min|max, got {s:?}"))?;
    Ok(Term::new(parse_feature(f)?, parse_direction(d)?))
}

fn parse_pair(s: &str) -> Result<[FeatureId; 2], String> {
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| format!("expected f1-f2, got {s:?}"))?;
    Ok([parse_feature(a)?, parse_feature(b)?])
}

fn parse_cutoff(s: &str) -> Result<f64, String> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "disabled" | "none" => Ok(f64::INFINITY),
        other => other
            .parse::<f64>()
            .map_err(|e| format!("invalid cut-off {s:?}: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn value_parsers() {
        assert_eq!(
            parse_term("gcf:max").unwrap(),
            Term::new(FeatureId::Gcf, Direction::Maximize)
        );
        assert!(parse_term("gcf").is_err());
        assert_eq!(parse_pair("hue-sat").unwrap(), [FeatureId::Hue, FeatureId::Saturation]);
        assert_eq!(parse_cutoff("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_cutoff("0.5").unwrap(), 0.5);
        assert!(parse_cutoff("x").is_err());
    }

    #[test]
    fn overrides_apply() {
        let cli = Cli::try_parse_from([
            "aevo", "grid-single", "--paper-budget", "--population", "8", "--seeds", "1,2",
            "--builtin", "coherent", "--size", "32", "--latent-dim", "10", "--out", "rel",
            "--output-root", "/tmp/r",
        ])
        .unwrap();
        let Command::GridSingle { run, .. } = cli.command else {
            panic!()
        };
        let (cfg, out) = run.resolve().unwrap();
        assert_eq!(cfg.optimizer.population, 8);
        assert_eq!(cfg.optimizer.generations, 2000);
        assert_eq!(cfg.optimizer.budget_evals, 16_000);
        assert_eq!(cfg.seeds, vec![1, 2]);
        assert_eq!(cfg.endpoints[0].kind, EndpointKind::BuiltinCoherent);
        assert_eq!(cfg.endpoints[0].width, 32);
        assert_eq!(cfg.optimizer.latent_dim, 10);
        assert_eq!(out, PathBuf::from("/tmp/r/rel"));
    }
}
