//! Does AdaGrad's limit direction move with η or w(0)? Sweeps both on the
//! planar instance where it differs from GD, and on the corner instance
//! where it cannot move.
//!
//! cargo run --release --example hyperparameter_sweep [iterations]

use adagrad_bias::analysis::{acute_pair_dataset, obtuse_pair_dataset};
use adagrad_bias::experiment::{sweep, DatasetSpec, ExperimentConfig, SweepAxis};
use adagrad_bias::{Dataset, Hyperparams, LossKind, Optimizer};

fn config(data: &Dataset, iters: u64, out: &str) -> ExperimentConfig {
    ExperimentConfig {
        name: None,
        dataset: DatasetSpec::Explicit {
            points: data.features().to_vec(),
            labels: data.labels().to_vec(),
        },
        loss: LossKind::Exponential,
        hyperparams: Hyperparams::new(0.05, 1e-8, vec![0.0, 0.0]).with_max_iters(iters),
        eta_fraction_of_bound: None,
        runs: vec![Optimizer::AdaGrad, Optimizer::GradientDescent],
        outputs: std::env::temp_dir().join(out),
        thinning: 1000,
        checks: vec![],
        override_assumptions: false,
    }
}

pub fn run(iters: u64) -> adagrad_bias::Result<()> {
    for (name, data) in [("acute_pair", acute_pair_dataset()), ("obtuse_pair", obtuse_pair_dataset())] {
        let cfg = config(&data, iters, &format!("adagrad-bias-sweep-{name}"));
        for (axis, values) in [(SweepAxis::Eta, vec![0.01, 0.05, 0.1]), (SweepAxis::W0, vec![0.0, 0.5, 1.0])] {
            println!("{name}, {} sweep:", axis.name());
            for e in sweep(&cfg, axis, &values)? {
                println!(
                    "  {:<5} predicted {:?}  angle to SVM {:.6}",
                    e.value, e.report.adagrad_dir_predicted, e.report.angles.adagrad_predicted_vs_svm
                );
            }
        }
    }
    Ok(())
}

fn main() -> adagrad_bias::Result<()> {
    let iters = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    run(iters)
}
