//! Property checks on one AdaGrad run: loss descent, summable squared
//! gradients, preconditioner convergence, margin onset and the projection
//! bounds of the induced form.
//!
//! cargo run --release --example lemma_suite [iterations]

use adagrad_bias::analysis::{
    check_descent, check_divergence_and_margins, check_preconditioner_convergence,
    check_projection_bounds, check_summability, acute_pair_dataset,
};
use adagrad_bias::maxmargin::{solve_hard_margin, MarginProblem};
use adagrad_bias::optim::{estimate_h_infinity, induced_sequence, run as run_optimizer};
use adagrad_bias::{Hyperparams, LossModel, Optimizer, RunOptions};

pub fn run(iters: u64) -> adagrad_bias::Result<()> {
    let data = acute_pair_dataset();
    let model = LossModel::exponential();
    let hp = Hyperparams::new(0.1, 1e-8, vec![0.0, 0.0]).with_max_iters(iters);
    let traj = run_optimizer(Optimizer::AdaGrad, &model, &data, &hp, &RunOptions::default())?;

    let h_inf = estimate_h_infinity(&traj)?.h_inf;
    let seq = induced_sequence(&traj, &h_inf, &model, &data)?;
    let xi = seq[0].xi.clone();
    let u_hat = solve_hard_margin(&MarginProblem::unweighted(xi.clone()))?.w_star;

    for c in [
        check_descent(&traj),
        check_summability(&traj),
        check_divergence_and_margins(&traj, &data),
        check_preconditioner_convergence(&traj),
        check_projection_bounds(&seq, &u_hat, &xi)?,
    ] {
        println!("{:<28} holds={:<5} onset={:?}", c.name, c.holds, c.onset_step);
        for (k, v) in &c.details {
            println!("    {k} = {v:e}");
        }
    }
    Ok(())
}

fn main() -> adagrad_bias::Result<()> {
    let iters = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    run(iters)
}
