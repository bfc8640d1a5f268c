//! `aevo` command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 invalid config or arguments,
//! 3 endpoint or protocol failure, 4 some grid cells failed.

mod args;

use std::io::{self, BufReader, BufWriter, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use aevo_core::genesis::check::protocol_check;
use aevo_core::genesis::stub::{serve, serve_listener};
use aevo_core::genesis::{BuiltinGenerator, BuiltinKind, Connection};
use aevo_core::harness::{self, CompareTarget, GridOutcome, HarnessError, EXIT_ENDPOINT};
use aevo_core::FeatureId;
use clap::Parser;
use log::error;

use args::{BuiltinArg, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn print_file(path: &Path) -> Result<(), HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    print!("{text}");
    Ok(())
}

fn finish_grid(outcome: &GridOutcome, summary: &str) -> Result<i32, HarnessError> {
    print_file(&outcome.output_dir.join(summary))?;
    let failures = outcome.failures();
    if failures > 0 {
        eprintln!(
            "{failures} of {} cells failed; see {}",
            outcome.table.rows.len(),
            outcome.output_dir.display()
        );
    }
    Ok(outcome.exit_code())
}

fn dispatch(command: Command) -> Result<i32, HarnessError> {
    match command {
        Command::Evolve {
            run,
            terms,
            cutoff,
            endpoint,
        } => {
            let (mut cfg, out) = run.resolve()?;
            if !terms.is_empty() {
                cfg.evolve.terms = terms;
            }
            if cutoff.is_some() {
                cfg.evolve.cutoff = cutoff;
            }
            let o = harness::run_evolve(&cfg, &out, endpoint.as_deref())?;
            println!("algorithm     {}", o.trace.algorithm);
            println!("evaluations   {}", o.trace.eval_count);
            println!("fitness       {} (initial {})", o.row.fitness, o.trace.initial_report.fitness);
            for v in &o.row.values {
                println!("{:<13} {}", v.feature.label(), v.value);
            }
            println!("realness_raw  {}", o.row.realness_raw);
            println!("output        {}", o.run_dir.display());
            Ok(0)
        }
        Command::GridSingle { run, features } => {
            let (mut cfg, out) = run.resolve()?;
            if let Some(f) = features {
                cfg.single.features = f;
            }
            finish_grid(&harness::run_single_grid(&cfg, &out)?, "single/table.csv")
        }
        Command::GridPairs { run, pairs } => {
            let (mut cfg, out) = run.resolve()?;
            if let Some(p) = pairs {
                cfg.pairs.pairs = p;
            }
            let o = harness::run_pair_grid(&cfg, &out)?;
            let first = &cfg.endpoints[0].name;
            finish_grid(&o, &format!("pairs/table_{first}.csv"))
        }
        Command::CutoffAblation {
            run,
            feature,
            direction,
            cutoffs,
        } => {
            let (mut cfg, out) = run.resolve()?;
            if let Some(f) = feature {
                cfg.ablation.feature = f;
            }
            if let Some(d) = direction {
                cfg.ablation.direction = d;
            }
            if let Some(c) = cutoffs {
                cfg.ablation.cutoffs = c;
            }
            finish_grid(&harness::run_cutoff_ablation(&cfg, &out)?, "ablation/table.csv")
        }
        Command::CompareOptimizers { run, sphere } => {
            let (cfg, out) = run.resolve()?;
            let target = if sphere {
                CompareTarget::Sphere
            } else {
                CompareTarget::Experiment
            };
            let table = harness::run_comparison(&cfg, &out, target)?;
            print_file(&out.join("compare/comparison.csv"))?;
            let failed: usize = table.rows.iter().map(|r| r.failures()).sum();
            Ok(if failed > 0 { harness::EXIT_PARTIAL } else { 0 })
        }
        Command::EvalFeatures { images, features } => {
            let features = features.unwrap_or_else(|| FeatureId::ALL.to_vec());
            let rows = harness::eval_features(&images, &features)?;
            harness::write_features_csv(io::stdout().lock(), &features, &rows)?;
            Ok(0)
        }
        Command::ProtocolCheck {
            target,
            rounds,
            seed,
            timeout_ms,
        } => {
            let transport = target.transport();
            let timeout = timeout_ms.map(Duration::from_millis);
            let report = protocol_check(|| Connection::open(&transport, timeout), rounds, seed);
            for item in &report.items {
                println!(
                    "{} {}: {}",
                    if item.passed { "PASS" } else { "FAIL" },
                    item.name,
                    item.detail
                );
            }
            println!("{} round trips", report.roundtrips);
            Ok(if report.passed() { 0 } else { EXIT_ENDPOINT })
        }
        Command::ServeStub {
            tcp,
            kind,
            seed,
            latent_dim,
            size,
        } => {
            let kind = match kind {
                BuiltinArg::Linear => BuiltinKind::Linear,
                BuiltinArg::Coherent => BuiltinKind::Coherent,
            };
            let generator = BuiltinGenerator::new(kind, seed, latent_dim, size, size)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            match tcp {
                Some(address) => {
                    let listener = TcpListener::bind(&address).map_err(|source| HarnessError::Io {
                        path: address.clone(),
                        source,
                    })?;
                    let addr = serve_listener(listener, generator).map_err(|source| {
                        HarnessError::Io {
                            path: address.clone(),
                            source,
                        }
                    })?;
                    println!("listening on {addr}");
                    let _ = io::stdout().flush();
                    loop {
                        std::thread::park();
                    }
                }
                None => {
                    let stdin = BufReader::new(io::stdin().lock());
                    let stdout = BufWriter::new(io::stdout().lock());
                    match serve(stdin, stdout, &generator) {
                        Ok(()) => Ok(0),
                        Err(e) => {
                            error!("stub: {e}");
                            Ok(EXIT_ENDPOINT)
                        }
                    }
                }
            }
        }
    }
}
