use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bocs_core::benchmarks::Problem;
use bocs_harness::config::{load_problem, ExperimentConfig, OptimizerSpec};
use bocs_harness::error::{HarnessError, Result};
use bocs_harness::output;
use bocs_harness::runner::{brute_force, run_experiment};
use bocs_harness::validate::{validate_models, ValidationConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bocs",
    version,
    about = "Bayesian optimization of combinatorial structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write records, curves, summary and plot.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to the config's `output` or results/<name>.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        replications: Option<usize>,
        /// Comma-separated subset of optimizer labels to run.
        #[arg(long, value_delimiter = ',')]
        optimizers: Option<Vec<String>>,
    },
    /// Held-out error of the MLE, conjugate and sparse models on the first
    /// benchmark instance of a config.
    Validate {
        config: PathBuf,
        /// Training-set sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        test_points: usize,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive optimum of an instance file or of every instance of a config.
    Oracle { path: PathBuf },
    /// Re-render the plot from a records file.
    Plot {
        records: PathBuf,
        #[arg(long, default_value = "plot.svg")]
        out: PathBuf,
    },
    /// Write the benchmark instances of a config as JSON files.
    BenchGen {
        config: PathBuf,
        #[arg(long, default_value = "instances")]
        out: PathBuf,
    },
}

fn problems_of(path: &Path) -> Result<Vec<Problem>> {
    if path.extension().is_some_and(|e| e == "json") {
        Ok(vec![load_problem(path)?])
    } else {
        ExperimentConfig::load(path)?.problems()
    }
}

fn bits(x: &bocs_core::BinaryPoint) -> String {
    x.bits().iter().map(|b| b.to_string()).collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            replications,
            optimizers,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(r) = replications {
                cfg.replications = r;
            }
            if let Some(labels) = optimizers {
                let mut chosen: Vec<OptimizerSpec> = Vec::new();
                for l in &labels {
                    match cfg.optimizers.iter().find(|o| &o.label() == l) {
                        Some(o) => chosen.push(o.clone()),
                        None => match OptimizerSpec::default_for(l) {
                            Some(o) => chosen.push(o),
                            None => {
                                return Err(HarnessError::Config(format!(
                                    "unknown optimizer '{l}'"
                                )))
                            }
                        },
                    }
                }
                cfg.optimizers = chosen;
            }
            cfg.validate()?;
            let dir = out
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| Path::new("results").join(cfg.name()));
            let records = run_experiment(&cfg)?;
            let written = output::emit_outputs(&dir, &records, &cfg.report_iterations())?;
            for row in bocs_harness::metrics::summarize(&records, &cfg.report_iterations()) {
                println!(
                    "{:<14} λ={:<8} {:<10} t={:<4} {} = {:.4} ± {:.4}",
                    row.benchmark,
                    row.lambda,
                    row.optimizer,
                    row.iteration,
                    row.statistic.name(),
                    row.mean,
                    2.0 * row.se
                );
            }
            for p in written {
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Validate {
            config,
            n,
            test_points,
            seeds,
            order,
            seed,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let problem = cfg
                .problems()?
                .into_iter()
                .next()
                .expect("validated: ≥ 1 instance");
            let vc = ValidationConfig {
                order,
                test_points,
                seeds,
                ..Default::default()
            };
            let rows = validate_models(&problem, &n, &vc, seed.unwrap_or(cfg.seed))?;
            println!("{:>6} {:>22} {:>22} {:>22}", "N", "mle", "blr", "sparse");
            for r in &rows {
                let cell = |m: &bocs_harness::metrics::MeanSe| {
                    format!("{:.4} ± {:.4}", m.mean, 2.0 * m.se)
                };
                println!(
                    "{:>6} {:>22} {:>22} {:>22}",
                    r.n,
                    cell(&r.mle),
                    cell(&r.blr),
                    cell(&r.sparse)
                );
            }
            if let Some(path) = out {
                let mut w = csv::Writer::from_path(&path).map_err(|e| HarnessError::Format {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                let err = |e: csv::Error| HarnessError::Format {
                    path: path.clone(),
                    message: e.to_string(),
                };
                w.write_record([
                    "n",
                    "mle_mean",
                    "mle_se",
                    "blr_mean",
                    "blr_se",
                    "sparse_mean",
                    "sparse_se",
                ])
                .map_err(err)?;
                for r in &rows {
                    w.write_record(
                        [
                            r.n as f64,
                            r.mle.mean,
                            r.mle.se,
                            r.blr.mean,
                            r.blr.se,
                            r.sparse.mean,
                            r.sparse.se,
                        ]
                        .map(|v| v.to_string()),
                    )
                    .map_err(err)?;
                }
                w.flush().map_err(|e| HarnessError::io(&path, e))?;
            }
        }
        Command::Oracle { path } => {
            for (i, p) in problems_of(&path)?.iter().enumerate() {
                let opt = brute_force(p)?;
                println!("{i}\t{}\t{}\t{}", p.name(), opt.value, bits(&opt.point));
            }
        }
        Command::Plot { records, out } => {
            let recs = output::read_records(&records)?;
            if recs.is_empty() {
                return Err(HarnessError::Config(format!(
                    "{}: no records",
                    records.display()
                )));
            }
            output::write_svg(&out, &recs)?;
        }
        Command::BenchGen { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            std::fs::create_dir_all(&out).map_err(|e| HarnessError::io(&out, e))?;
            for (i, p) in cfg.problems()?.iter().enumerate() {
                let path = out.join(format!("{}-{i}.json", p.name()));
                let text = serde_json::to_string_pretty(p).map_err(|e| HarnessError::Format {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
