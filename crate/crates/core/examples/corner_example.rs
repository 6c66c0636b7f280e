//! Two points whose tight corner dominates the feasible set: every diagonal
//! weighting picks the corner, so AdaGrad and GD share their limit direction.
//!
//! cargo run --release --example corner_example [iterations]

use std::f64::consts::PI;

use adagrad_bias::analysis::{compare_directions, corner_condition, two_point_corner, obtuse_pair_dataset};
use adagrad_bias::vector::normalize;
use adagrad_bias::{Hyperparams, LossModel, RunOptions};

pub fn run(iters: u64) -> adagrad_bias::Result<()> {
    let (a, b) = two_point_corner(1.0, 1.0, 5.0 * PI / 8.0, -PI / 8.0)?;
    println!("corner (α*, β*) = ({a}, {b}), direction {:?}", normalize(&[a, b]).unwrap());

    let data = obtuse_pair_dataset();
    let cert = corner_condition(&data)?;
    println!("corner condition: {}", cert.holds);
    println!("  sign pattern route: {:?}", cert.sign_pattern);
    println!(
        "  {} probe weightings, max deviation {:e} (seed {:#x})",
        cert.probe_count, cert.probe_max_deviation, cert.probe_seed
    );

    for model in [LossModel::exponential(), LossModel::logistic()] {
        let hp = Hyperparams::new(0.1, 1e-8, vec![0.0, 0.0]).with_max_iters(iters);
        let r = compare_directions(&data, &model, &hp, &RunOptions::default())?;
        println!(
            "{:?}: predicted AdaGrad {:?}, SVM {:?}, gap {:e}",
            model.kind, r.adagrad_dir_predicted, r.svm_dir, r.angles.adagrad_predicted_vs_svm
        );
    }
    Ok(())
}

fn main() -> adagrad_bias::Result<()> {
    let iters = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    run(iters)
}
