use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oneshot_harness::experiments::FitRow;
use oneshot_harness::runner::default_jobs;
use oneshot_harness::{
    compare, hull_demo, rate_fit_experiment, sweep_ratio, write_csv, Experiment, ExperimentConfig,
    Result,
};

#[derive(Parser)]
#[command(name = "oneshot", version, about = "One-shot optimization experiments")]
struct Cli {
    /// Experiment config file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides `master_seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file; defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; defaults to the number of logical CPUs.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Record per-cell wall time instead of writing 0.
    #[arg(long, global = true)]
    wall_time: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regret as a function of the selection ratio mu / lambda.
    SweepRatio,
    /// Mean regret per budget and log-log rate fits per estimator.
    RateFit {
        /// Also write the fitted rates as CSV.
        #[arg(long)]
        fit_out: Option<PathBuf>,
    },
    /// Pairwise win-rate matrix between sampler/estimator methods.
    Compare,
    /// Rule comparison on the hull filter's distinguishing examples.
    HullDemo {
        /// Number of random seeds for the statistical part.
        #[arg(long, default_value_t = 20)]
        seeds: usize,
    },
}

fn load_config(cli: &Cli, experiment: Experiment) -> Result<ExperimentConfig> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    let mut cfg = ExperimentConfig::parse(experiment, &text)?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if cli.wall_time {
        cfg.record_wall_time = true;
    }
    Ok(cfg)
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: &Cli) -> Result<()> {
    let jobs = cli.jobs.unwrap_or_else(default_jobs);
    match &cli.command {
        Command::SweepRatio => {
            let cfg = load_config(cli, Experiment::SweepRatio)?;
            let rows = sweep_ratio(&cfg, jobs)?;
            let mut out = open_out(cli.out.as_deref())?;
            write_csv(&mut out, &rows)?;
            out.flush()?;
        }
        Command::RateFit { fit_out } => {
            let cfg = load_config(cli, Experiment::RateFit)?;
            let result = rate_fit_experiment(&cfg, jobs)?;
            let mut out = open_out(cli.out.as_deref())?;
            write_csv(&mut out, &result.records)?;
            out.flush()?;
            for f in &result.fits {
                eprintln!(
                    "{} d={} {}: slope {:.4} (residual {:.3e}, {} budgets)",
                    f.objective, f.d, f.estimator, f.fit.slope, f.fit.residual, f.fit.n_points
                );
            }
            if let Some(path) = fit_out {
                let mut w = BufWriter::new(File::create(path)?);
                writeln!(w, "{}", FitRow::CSV_HEADER)?;
                for f in &result.fits {
                    writeln!(w, "{}", f.csv_line())?;
                }
                w.flush()?;
            }
        }
        Command::Compare => {
            let cfg = load_config(cli, Experiment::Compare)?;
            let matrix = compare(&cfg, jobs)?;
            let mut out = open_out(cli.out.as_deref())?;
            matrix.write_csv(&mut out)?;
            out.flush()?;
        }
        Command::HullDemo { seeds } => {
            let seed = cli.seed.unwrap_or(0);
            let report = hull_demo(seed, *seeds)?;
            let mut out = open_out(cli.out.as_deref())?;
            write!(out, "{report}")?;
            out.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
