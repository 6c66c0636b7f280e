//! Seeded random separable instances with the logistic loss: empirical AdaGrad
//! direction against the weighted-margin prediction and the SVM direction.
//!
//! cargo run --release --example random_instances [iterations] [instances]

use adagrad_bias::analysis::compare_directions;
use adagrad_bias::experiment::GeneratorSpec;
use adagrad_bias::model::check_assumptions;
use adagrad_bias::{Hyperparams, LossModel, RunOptions};

pub fn run(iters: u64, instances: u64) -> adagrad_bias::Result<()> {
    let model = LossModel::logistic();
    println!("seed  N  p   eta        emp-vs-pred  pred-vs-svm  h∞ tail");
    for seed in 0..instances {
        let spec = GeneratorSpec::new(4 + (seed as usize % 7), 2 + (seed as usize % 4), seed);
        let (data, _) = spec.generate()?;
        let mut hp = Hyperparams::new(1.0, 1e-8, vec![0.0; data.dim()]).with_max_iters(iters);
        hp.eta = 0.5 * check_assumptions(&model, &data, &hp)?.eta_bound;
        let r = compare_directions(&data, &model, &hp, &RunOptions::default().with_thinning(1000))?;
        println!(
            "{seed:>4} {:>2} {:>2}  {:.3e}  {:.3e}    {:.3e}    {:.1e}",
            data.len(),
            data.dim(),
            hp.eta,
            r.angles.adagrad_empirical_vs_predicted,
            r.angles.adagrad_predicted_vs_svm,
            r.h_inf_tail_error
        );
    }
    Ok(())
}

fn main() -> adagrad_bias::Result<()> {
    let mut args = std::env::args().skip(1);
    let iters = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let instances = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    run(iters, instances)
}
