//! Feasible region, tangent ellipse and arrows for the planar instance where
//! AdaGrad and GD disagree. Writes CSVs into a directory (default: a temp dir).
//!
//! cargo run --release --example figure_geometry [out-dir]

use std::path::PathBuf;

use adagrad_bias::experiment::{figure_data, DatasetSpec, ExperimentConfig};
use adagrad_bias::{Hyperparams, LossKind, Optimizer};

pub fn run(out: PathBuf, iters: u64) -> adagrad_bias::Result<()> {
    let data = adagrad_bias::analysis::acute_pair_dataset();
    let cfg = ExperimentConfig {
        name: Some("acute_pair".into()),
        dataset: DatasetSpec::Explicit {
            points: data.features().to_vec(),
            labels: data.labels().to_vec(),
        },
        loss: LossKind::Exponential,
        hyperparams: Hyperparams::new(0.1, 1e-8, vec![0.0, 0.0]).with_max_iters(iters),
        eta_fraction_of_bound: None,
        runs: vec![Optimizer::AdaGrad],
        outputs: out.clone(),
        thinning: 1000,
        checks: vec![],
        override_assumptions: false,
    };
    let fig = figure_data(&cfg)?;
    println!("h∞ = {:?}", fig.h_inf);
    println!("tangency w̃ = {:?}, ŵ = {:?}", fig.tangency, fig.w_hat);
    for a in &fig.arrows {
        println!("  arrow {:<8} ({:.6}, {:.6})", a.name, a.x, a.y);
    }
    println!("region polygon has {} vertices; CSVs in {}", fig.region.len(), out.display());
    Ok(())
}

fn main() -> adagrad_bias::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("adagrad-bias-acute_pair"));
    run(out, 200_000)
}
