//! Single-direction data `x₁ = (cos θ, sin θ)`, `x₂ = −x₁`: GD converges to
//! the direction of `x₁`, AdaGrad to `(√2/2, √2/2)` for every `θ ∈ (0, π/2)`.
//!
//! cargo run --release --example mirrored_pair [iterations]

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use adagrad_bias::analysis::{angle, compare_directions, mirrored_pair_dataset, mirrored_pair_oracle, MirroredPairBranch};
use adagrad_bias::{Hyperparams, LossModel, RunOptions};

pub fn run(iters: u64) -> adagrad_bias::Result<()> {
    for theta in [FRAC_PI_3, FRAC_PI_4, 0.2, 1.4] {
        let data = mirrored_pair_dataset(theta)?;
        let hp = Hyperparams::new(0.05, 1e-8, vec![0.0, 0.0]).with_max_iters(iters);
        let report = compare_directions(&data, &LossModel::exponential(), &hp, &RunOptions::default())?;
        let oracle = mirrored_pair_oracle(theta, MirroredPairBranch::Acute)?;

        println!("θ = {theta:.4}");
        println!("  AdaGrad empirical  {:?}", report.adagrad_dir_empirical);
        println!("  AdaGrad predicted  {:?}", report.adagrad_dir_predicted);
        println!("  closed form        {:?}", oracle.adagrad_dir);
        println!("  GD empirical       {:?}  (x₁ = {:?})", report.gd_dir_empirical, oracle.gd_dir);
        println!(
            "  h∞ direction {:?} vs closed form {:?}",
            adagrad_bias::vector::normalize(&report.h_inf).unwrap(),
            oracle.h_inf_dir
        );
        println!(
            "  gap AdaGrad/GD: {:.6} rad (closed form {:.6})",
            report.angles.adagrad_predicted_vs_svm,
            angle(&oracle.adagrad_dir, &oracle.gd_dir)?
        );
    }
    Ok(())
}

fn main() -> adagrad_bias::Result<()> {
    let iters = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    run(iters)
}
