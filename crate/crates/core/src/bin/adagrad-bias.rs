use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use adagrad_bias::experiment::{
    check_experiment, describe_checks, figure_data, run_experiment, sweep, ExperimentConfig,
    SweepAxis,
};

#[derive(Parser)]
#[command(version, about = "AdaGrad vs GD implicit-bias experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    config: PathBuf,
    /// Output directory (overrides the config's `outputs`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Iteration budget (overrides the config).
    #[arg(long)]
    max_iters: Option<u64>,
    /// Run even when the step-size or separability assumptions fail.
    #[arg(long)]
    override_assumptions: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the optimizers, write trajectories, direction report and checks.
    Run(Common),
    /// Emit plot-ready CSVs for a planar config.
    FigureData(Common),
    /// Repeat the run over values of one hyperparameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// eta, epsilon or w0
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
    },
    /// Run the checkers only.
    Check(Common),
}

fn load(c: &Common) -> adagrad_bias::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&c.config)?;
    if let Some(out) = &c.out {
        cfg.outputs = out.clone();
    }
    if let Some(n) = c.max_iters {
        cfg.hyperparams.max_iters = n;
    }
    cfg.override_assumptions |= c.override_assumptions;
    Ok(cfg)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> adagrad_bias::Result<bool> {
    match cmd {
        Command::Run(c) => {
            let out = run_experiment(&load(&c)?)?;
            if let Some(r) = &out.report {
                println!("{}", r.to_json()?);
            }
            describe_checks(&out.checks).iter().for_each(|l| println!("{l}"));
            Ok(out.all_checks_hold())
        }
        Command::Check(c) => {
            let out = check_experiment(&load(&c)?)?;
            describe_checks(&out.checks).iter().for_each(|l| println!("{l}"));
            Ok(out.all_checks_hold())
        }
        Command::FigureData(c) => {
            let cfg = load(&c)?;
            let fig = figure_data(&cfg)?;
            println!("tangency {:?}, h_inf {:?} -> {}", fig.tangency, fig.h_inf, cfg.outputs.display());
            Ok(true)
        }
        Command::Sweep { common, axis, values } => {
            let cfg = load(&common)?;
            for e in sweep(&cfg, axis, &values)? {
                println!(
                    "{} = {}: predicted {:?}, angle to svm {:.6}",
                    axis.name(),
                    e.value,
                    e.report.adagrad_dir_predicted,
                    e.report.angles.adagrad_predicted_vs_svm
                );
            }
            Ok(true)
        }
    }
}
