//! Command-line driver for the beamformer experiments.

use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use irsbeam::beamformers::Method;
use irsbeam::harness::{
    measure_complexity, parse_config_file, run_convergence, run_flops, run_rate_vs_n, run_single,
    ExperimentConfig,
};

/// Element count and trial budget used when the flop model's iteration
/// counts have to be measured rather than configured.
const MEASURE_N: usize = 64;
const MEASURE_TRIALS: usize = 25;

#[derive(Parser)]
#[command(
    name = "irsbeam",
    version,
    about = "Iterative active-IRS beamformer experiments: rate, convergence, and complexity sweeps"
)]
struct Cli {
    /// TOML experiment config; built-in defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config's trial count.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Comma-separated method tags
    /// (passive,max-rsnr,gmrr,max-ssnr-rr,max-ssnr-fp).
    #[arg(long, global = true, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// CSV output path; stdout when neither this nor the config gives one.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one seeded realization with every selected method and print
    /// the achieved rates; --out additionally writes the solver traces.
    Single {
        /// Element count (defaults to the first configured entry).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Per-iteration amplitude/rate traces at N = 4 and N = 128.
    Convergence,
    /// Mean achievable rate versus element count.
    RateVsN,
    /// Modelled flop counts over the element sweep; iteration counts are
    /// measured unless the config pins them.
    Flops,
}

fn emit(csv: String, path: Option<&PathBuf>) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, csv).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => parse_config_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.base_seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(tags) = &cli.methods {
        cfg.methods =
            tags.iter().map(|t| Method::parse(t)).collect::<Result<Vec<_>, _>>()?;
    }
    let out_path = cli.out.as_ref().or(cfg.output_path.as_ref()).cloned();

    match cli.command {
        Command::Single { n } => {
            let report = run_single(&cfg, n)?;
            for o in &report.outputs {
                println!(
                    "{:<12} rate {:>12.6} bits   lambda {:>14.6e}   iterations {}",
                    o.method.tag(),
                    o.rate_bits,
                    o.beam.lambda(),
                    o.iterations
                );
            }
            if let Some(p) = &out_path {
                emit(report.trace_csv, Some(p))?;
            }
            Ok(())
        }
        Command::Convergence => emit(run_convergence(&cfg)?, out_path.as_ref()),
        Command::RateVsN => emit(run_rate_vs_n(&cfg)?, out_path.as_ref()),
        Command::Flops => {
            let cp = match cfg.complexity {
                Some(cp) => cp,
                None => {
                    let m = measure_complexity(&cfg, MEASURE_N, MEASURE_TRIALS)?;
                    eprintln!(
                        "measured iteration counts (n = {}, {} trials): l1 = {}, l2 = {}, l3 = {}, l4 = {}",
                        m.n, m.trials, m.params.l1, m.params.l2, m.params.l3, m.params.l4
                    );
                    m.params
                }
            };
            emit(run_flops(&cfg, &cp)?, out_path.as_ref())
        }
    }
}
