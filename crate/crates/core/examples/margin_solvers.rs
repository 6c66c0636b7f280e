//! Hard-margin and weighted-margin solves, checked against active-set
//! enumeration, with their dual certificates.
//!
//! cargo run --release --example margin_solvers

use adagrad_bias::maxmargin::{
    brute_force_margin, feasibility, solve_hard_margin, solve_weighted_margin, MarginProblem,
};
use adagrad_bias::vector::max_abs_diff;

pub fn run() -> adagrad_bias::Result<()> {
    let constraints = vec![vec![1.0, 0.2], vec![0.3, 1.0], vec![2.0, 2.0], vec![-0.5, 3.0]];

    let hard = MarginProblem::unweighted(constraints.clone());
    let sol = solve_hard_margin(&hard)?;
    let oracle = brute_force_margin(&hard)?;
    println!("{}", sol.to_json()?);
    println!("brute force agrees to {:e}", max_abs_diff(&sol.w_star, &oracle.w_star));

    let weighted = MarginProblem::weighted(constraints.clone(), vec![0.2, 3.0]);
    let wsol = solve_weighted_margin(&weighted)?;
    println!(
        "weighted (b = (0.2, 3)): w* = {:?}, active set {:?}, kkt {:e}",
        wsol.w_star, wsol.active_set, wsol.kkt_residual
    );

    let blocked = MarginProblem::unweighted(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]);
    println!("contradictory pair feasible: {}", feasibility(&blocked).feasible);
    println!("solver says: {}", solve_hard_margin(&blocked).unwrap_err());
    Ok(())
}

fn main() -> adagrad_bias::Result<()> {
    run()
}
