//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --release --test acceptance`; exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use adagrad_bias::analysis::{
    angle, compare_directions, corner_condition, mirrored_pair_dataset, mirrored_pair_oracle,
    two_point_corner, obtuse_pair_dataset, predict_adagrad, MirroredPairBranch,
};
use adagrad_bias::experiment::{evaluate_check, ExperimentConfig, GeneratorSpec};
use adagrad_bias::maxmargin::{brute_force_margin, solve_hard_margin, MarginProblem};
use adagrad_bias::model::{check_assumptions, loss_gradient, loss_value};
use adagrad_bias::optim::{estimate_h_infinity, run, Optimizer};
use adagrad_bias::vector::{max_abs_diff, norm, normalize};
use adagrad_bias::{Dataset, Hyperparams, LossModel, RunOptions};

const TOL_DIR: f64 = 2e-2;

struct Verdict {
    pass: bool,
    summary: String,
}

fn verdict(pass: bool, summary: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        summary: summary.into(),
    }
}

fn mirrored_pair_report(theta: f64) -> adagrad_bias::analysis::DirectionReport {
    let data = mirrored_pair_dataset(theta).unwrap();
    let hp = Hyperparams::new(0.05, 1e-8, vec![0.0, 0.0]).with_max_iters(1_000_000);
    compare_directions(&data, &LossModel::exponential(), &hp, &RunOptions::default().with_thinning(1000)).unwrap()
}

fn criterion1() -> Verdict {
    let start = Instant::now();
    let r = mirrored_pair_report(FRAC_PI_3);
    let secs = start.elapsed().as_secs_f64();
    let oracle = mirrored_pair_oracle(FRAC_PI_3, MirroredPairBranch::Acute).unwrap();
    let ada = angle(&r.adagrad_dir_empirical, &oracle.adagrad_dir).unwrap();
    let gd = angle(&r.gd_dir_empirical, &[0.5, 3f64.sqrt() / 2.0]).unwrap();
    let gap = angle(&oracle.adagrad_dir, &oracle.gd_dir).unwrap();
    let pass = ada < TOL_DIR && gd < TOL_DIR && (gap - PI / 12.0).abs() <= 1e-6 && secs <= 60.0;
    verdict(
        pass,
        format!("AdaGrad {ada:.2e} rad, GD {gd:.2e} rad, closed-form gap − π/12 = {:.1e}, {secs:.1}s", gap - PI / 12.0),
    )
}

fn criterion2() -> Verdict {
    let r = mirrored_pair_report(FRAC_PI_4);
    let dirs = [&r.adagrad_dir_empirical, &r.adagrad_dir_predicted, &r.gd_dir_empirical, &r.svm_dir];
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in i + 1..4 {
            worst = worst.max(angle(dirs[i], dirs[j]).unwrap());
        }
    }
    verdict(worst < TOL_DIR, format!("max pairwise angle {worst:.2e} rad"))
}

fn criterion3() -> Verdict {
    let below = mirrored_pair_oracle(FRAC_PI_2 - 0.05, MirroredPairBranch::Acute).unwrap();
    let above = mirrored_pair_oracle(FRAC_PI_2 + 0.05, MirroredPairBranch::Obtuse).unwrap();
    let jump = angle(&below.adagrad_dir, &above.adagrad_dir).unwrap();
    let data_rot = angle(&below.gd_dir, &above.gd_dir).unwrap();
    let pass = (jump - FRAC_PI_2).abs() <= 1e-6 && (data_rot - 0.1).abs() <= 1e-12;
    verdict(pass, format!("predicted jump − π/2 = {:.1e}, data rotation {data_rot:.6} rad", jump - FRAC_PI_2))
}

fn criterion4() -> Verdict {
    let data = obtuse_pair_dataset();
    let hp = Hyperparams::new(0.1, 1e-8, vec![0.0, 0.0]).with_max_iters(1_000_000);
    let r = compare_directions(&data, &LossModel::exponential(), &hp, &RunOptions::default().with_thinning(1000)).unwrap();
    let (a, b) = two_point_corner(1.0, 1.0, 5.0 * PI / 8.0, -PI / 8.0).unwrap();
    let corner = normalize(&[a, b]).unwrap();
    let ada_gd = angle(&r.adagrad_dir_predicted, &r.svm_dir).unwrap();
    let ada_c = angle(&r.adagrad_dir_predicted, &corner).unwrap();
    let gd_c = angle(&r.svm_dir, &corner).unwrap();
    let cert = corner_condition(&data).unwrap();
    let pass = ada_gd < 1e-9 && ada_c < 1e-9 && gd_c < 1e-9 && cert.holds;
    verdict(
        pass,
        format!("AdaGrad/GD {ada_gd:.1e}, to corner {ada_c:.1e} / {gd_c:.1e}, corner_condition={}", cert.holds),
    )
}

/// Instance `k` of the random suite: `p ∈ 2..=5`, `N ∈ 2..=10`.
pub fn random_instance(seed: u64) -> Dataset {
    let p = 2 + (seed % 4) as usize;
    let n = 2 + ((seed * 7) % 9) as usize;
    GeneratorSpec::new(n, p, seed).generate().unwrap().0
}

fn criterion5() -> Verdict {
    let model = LossModel::logistic();
    let mut angles = Vec::new();
    let mut shrinking = 0;
    for seed in 0..20 {
        let data = random_instance(seed);
        let mut hp = Hyperparams::new(1.0, 1e-8, vec![0.0; data.dim()]).with_max_iters(1_000_000);
        hp.eta = 0.5 * check_assumptions(&model, &data, &hp).unwrap().eta_bound;
        let traj = run(Optimizer::AdaGrad, &model, &data, &hp, &RunOptions::default().with_thinning(10_000)).unwrap();
        let h_inf = estimate_h_infinity(&traj).unwrap().h_inf;
        let pred = predict_adagrad(&data, &h_inf).unwrap();
        let last = angle(traj.final_direction().unwrap(), &pred.direction).unwrap();
        let earlier = traj.nearest(1e5).direction.as_ref().map(|d| angle(d, &pred.direction).unwrap());
        if earlier.is_some_and(|e| last < e) {
            shrinking += 1;
        }
        angles.push(last);
    }
    let ok = angles.iter().filter(|&&a| a < TOL_DIR).count();
    let mut sorted = angles.clone();
    sorted.sort_by(f64::total_cmp);
    verdict(
        ok >= 19,
        format!(
            "{ok}/20 within {TOL_DIR} rad (median {:.2e}, max {:.2e}; gap shrank from t = 1e5 to 1e6 in {shrinking}/20)",
            sorted[10], sorted[19]
        ),
    )
}

fn criterion6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_gap, mut worst_kkt) = (0.0f64, 0.0f64);
    let mut solved = 0;
    while solved < 200 {
        let p = rng.random_range(1..=5usize);
        let n = rng.random_range(1..=10usize);
        let c: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let problem = MarginProblem::unweighted(c);
        let Ok(oracle) = brute_force_margin(&problem) else { continue };
        let sol = solve_hard_margin(&problem).unwrap();
        worst_gap = worst_gap.max(max_abs_diff(&sol.w_star, &oracle.w_star) / (1.0 + norm(&oracle.w_star)));
        worst_kkt = worst_kkt.max(sol.kkt_residual);
        solved += 1;
    }
    verdict(
        worst_gap <= 1e-8 && worst_kkt < 1e-10,
        format!("200 instances, max relative gap {worst_gap:.1e}, max KKT residual {worst_kkt:.1e}"),
    )
}

fn criterion7() -> Verdict {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let names = ["mirrored_theta60", "mirrored_theta45", "acute_pair", "obtuse_pair", "random_logistic"];
    let checks = ["descent", "summability", "preconditioner_convergence", "divergence_and_margins", "projection_bounds"];
    let mut failures = Vec::new();
    let mut total = 0;
    for name in names {
        let cfg = ExperimentConfig::load(&dir.join(format!("{name}.json"))).unwrap();
        let (data, hp) = cfg.resolve().unwrap();
        let model = cfg.loss_model();
        for &opt in &cfg.runs {
            let traj = run(opt, &model, &data, &hp, &RunOptions::default().with_thinning(cfg.thinning)).unwrap();
            for check in checks {
                total += 1;
                let c = evaluate_check(check, &traj, &data, &model).unwrap();
                if !c.holds {
                    failures.push(format!("{name}:{}", c.name));
                }
            }
        }
    }
    verdict(failures.is_empty(), format!("{}/{total} checks hold {failures:?}", total - failures.len()))
}

fn criterion8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let model = if k % 2 == 0 { LossModel::exponential() } else { LossModel::logistic() };
        let p = rng.random_range(1..=5usize);
        let n = rng.random_range(1..=10usize);
        let z: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let data = Dataset::from_signed(z).unwrap();
        let w: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = loss_gradient(&model, &data, &w).unwrap();
        let fd: Vec<f64> = (0..p)
            .map(|i| {
                let h = 1e-5 * (1.0 + w[i].abs());
                let (mut up, mut dn) = (w.clone(), w.clone());
                up[i] += h;
                dn[i] -= h;
                (loss_value(&model, &data, &up).unwrap() - loss_value(&model, &data, &dn).unwrap()) / (2.0 * h)
            })
            .collect();
        let rel = max_abs_diff(&g, &fd) / norm(&g).max(1e-300);
        worst = worst.max(rel);
    }
    verdict(worst < 1e-6, format!("100 triples, max relative error {worst:.1e}"))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 single-direction example, θ = π/3", criterion1),
        ("2 coincidence at θ = π/4", criterion2),
        ("3 rotation sensitivity", criterion3),
        ("4 corner instance", criterion4),
        ("5 random instances, empirical vs predicted", criterion5),
        ("6 QP oracle equivalence", criterion6),
        ("7 lemma suite on bundled configs", criterion7),
        ("8 gradient finite differences", criterion8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.summary);
    }
    if failed > 0 {
        println!("{failed} of 8 acceptance criteria failed");
        std::process::exit(1);
    }
}
