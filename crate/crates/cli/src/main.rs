//! `opisd`: count, enumerate, solve, compare and export CDFs.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use opisd_core::enumeration::DEFAULT_BUDGET;
use opisd_core::harness::{self, CompareOptions, ExperimentConfig};
use opisd_core::{count_radial_configs, global_optimum, parse_network, OperationalLimits, PenaltySpec, PowerFlowOptions, ReferenceKind};

#[derive(Parser)]
#[command(name = "opisd", version, about = "Rank heuristic optimizers by stochastic dominance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Known global optimum.
    #[value(name = "G")]
    G,
    /// Pooled best solutions of all solvers.
    #[value(name = "R")]
    R,
}

#[derive(Subcommand)]
enum Command {
    /// Print the number of radial configurations.
    Count { network: PathBuf },
    /// Enumerate all radial configurations and print the global optimum.
    Enumerate {
        network: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Voltage band applied to every load node.
        #[arg(long, num_args = 2, value_names = ["V_MIN", "V_MAX"])]
        voltage_band: Option<Vec<f64>>,
    },
    /// Run an experiment and write its archive.
    Solve {
        experiment: PathBuf,
        /// Archive directory (default: output_dir of the experiment).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score the solvers of an archive and write report.json and report.csv.
    Compare {
        archive: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long = "y-g")]
        y_g: Option<f64>,
        #[arg(long, default_value_t = harness::DEFAULT_EPS)]
        eps: f64,
        /// Report directory (default: the archive directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write per-solver and reference CDF breakpoints.
    EmitCdf {
        archive: PathBuf,
        comparison: PathBuf,
        /// Output directory (default: next to the comparison report).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Count { network } => {
            let net = parse_network(&read(&network)?)?;
            println!("{}", count_radial_configs(&net));
        }
        Command::Enumerate { network, budget, voltage_band } => {
            let net = parse_network(&read(&network)?)?;
            let mut limits = OperationalLimits::from_network(&net);
            if let Some(band) = voltage_band {
                limits = limits.with_load_voltage_band(&net, band[0], band[1]);
            }
            let opt = global_optimum(&net, &limits, &PenaltySpec::default(), &PowerFlowOptions::default(), budget)?;
            println!("y_g {}", opt.y_g);
            println!("losses {}", opt.losses);
            println!("enumerated {} infeasible {}", opt.enumerated, opt.infeasible);
            for cfg in &opt.optimal_configs {
                println!("open {}", cfg.open_ids(&net).join(" "));
            }
        }
        Command::Solve { experiment, out } => {
            let cfg = ExperimentConfig::load(&experiment)?;
            let base = experiment.parent().map(Path::to_path_buf).unwrap_or_default();
            let dir = out.unwrap_or_else(|| base.join(&cfg.output_dir));
            let archive = harness::run_experiment(&cfg, &base)?;
            harness::write_archive(&archive, &dir)?;
            let failed = archive.rows.iter().filter(|r| !r.is_ok()).count();
            println!("{} runs written to {} ({} failed)", archive.rows.len(), dir.display(), failed);
        }
        Command::Compare { archive, mode, y_g, eps, out } => {
            if eps < 0.0 {
                bail!("--eps must be non-negative");
            }
            let opts = CompareOptions {
                mode: match mode {
                    Mode::G => ReferenceKind::Global,
                    Mode::R => ReferenceKind::Relative,
                },
                y_g,
                eps,
            };
            let out = out.unwrap_or_else(|| archive.clone());
            let report = harness::compare_archive(&archive, &opts, &out)?;
            for s in &report.solvers {
                println!("{} {} opisd={:.4} area={} perc={}%", s.rank, s.label, s.opisd, s.area_pu, s.perc_pct);
            }
        }
        Command::EmitCdf { archive, comparison, out } => {
            let out = out.unwrap_or_else(|| comparison.parent().map(Path::to_path_buf).unwrap_or_default());
            for path in harness::emit_cdf_data(&archive, &comparison, &out)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}
