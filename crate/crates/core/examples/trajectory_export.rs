//! Run AdaGrad and GD, then write thinned trajectories as CSV.
//!
//! cargo run --release --example trajectory_export [out-dir]

use std::fs::File;
use std::path::PathBuf;

use adagrad_bias::analysis::mirrored_pair_dataset;
use adagrad_bias::optim::{estimate_h_infinity, run as run_optimizer};
use adagrad_bias::{Hyperparams, LossModel, Optimizer, RunOptions};

pub fn run(out: PathBuf, iters: u64) -> adagrad_bias::Result<()> {
    std::fs::create_dir_all(&out)?;
    let data = mirrored_pair_dataset(1.0)?;
    let model = LossModel::exponential();
    let hp = Hyperparams::new(0.05, 1e-8, vec![0.0, 0.0]).with_max_iters(iters);
    let opts = RunOptions::default().with_thinning(500);
    for opt in [Optimizer::AdaGrad, Optimizer::GradientDescent] {
        let traj = run_optimizer(opt, &model, &data, &hp, &opts)?;
        let path = out.join(format!("trajectory_{}.csv", opt.name()));
        traj.write_csv(File::create(&path)?)?;
        let last = traj.last();
        println!(
            "{:<7} t = {}, loss = {:e}, ‖g‖ = {:e}, direction {:?} -> {}",
            opt.name(),
            last.t,
            last.loss,
            last.grad_norm(),
            last.direction,
            path.display()
        );
        if opt == Optimizer::AdaGrad {
            let est = estimate_h_infinity(&traj)?;
            println!("        h∞ ≈ {:?} (tail error {:.2e})", est.h_inf, est.tail_error);
        }
    }
    Ok(())
}

fn main() -> adagrad_bias::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("adagrad-bias-trajectories"));
    run(out, 100_000)
}
