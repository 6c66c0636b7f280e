//! Rotating `x₁` across the y-axis by 0.1 rad flips AdaGrad's limit direction
//! by a right angle, while GD's moves by 0.1 rad.
//!
//! cargo run --release --example rotation_sensitivity [iterations]

use std::f64::consts::FRAC_PI_2;

use adagrad_bias::analysis::{angle, compare_directions, mirrored_pair_dataset, mirrored_pair_oracle, MirroredPairBranch};
use adagrad_bias::{Hyperparams, LossModel, RunOptions};

pub fn run(iters: u64) -> adagrad_bias::Result<()> {
    let below = mirrored_pair_oracle(FRAC_PI_2 - 0.05, MirroredPairBranch::Acute)?;
    let above = mirrored_pair_oracle(FRAC_PI_2 + 0.05, MirroredPairBranch::Obtuse)?;
    println!("closed form, θ = π/2 − 0.05: {:?}", below.adagrad_dir);
    println!("closed form, θ = π/2 + 0.05: {:?}", above.adagrad_dir);
    println!("  AdaGrad jump {:.9} rad", angle(&below.adagrad_dir, &above.adagrad_dir)?);
    println!("  GD jump      {:.9} rad", angle(&below.gd_dir, &above.gd_dir)?);

    let mut predicted = Vec::new();
    for theta in [FRAC_PI_2 - 0.05, FRAC_PI_2 + 0.05] {
        let data = mirrored_pair_dataset(theta)?;
        let hp = Hyperparams::new(0.05, 1e-8, vec![0.0, 0.0]).with_max_iters(iters);
        let r = compare_directions(&data, &LossModel::exponential(), &hp, &RunOptions::default())?;
        println!("θ = {theta:.4}: AdaGrad empirical {:?}", r.adagrad_dir_empirical);
        predicted.push(r.adagrad_dir_predicted);
    }
    println!("pipeline jump {:.6} rad", angle(&predicted[0], &predicted[1])?);
    Ok(())
}

fn main() -> adagrad_bias::Result<()> {
    let iters = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    run(iters)
}
