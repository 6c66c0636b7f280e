//! Empirical checks of the convergence properties of AdaGrad / GD runs.
//!
//! Inequalities that only hold "for sufficiently large t" are checked by
//! searching for the earliest recorded step after which they hold at every
//! recorded step; no such step means the check fails.

use crate::error::{Error, Result};
use crate::model::Dataset;
use crate::optim::{InducedQuantities, Trajectory};
use crate::vector::{norm, normalize};

use super::{projection_split, CheckOutcome};

/// Names accepted by the experiment runner's `checks` list.
pub const CHECK_NAMES: [&str; 5] = [
    "descent",
    "summability",
    "divergence_and_margins",
    "preconditioner_convergence",
    "projection_bounds",
];

/// Share of `Σ‖g(t)‖²` allowed to arrive in the second half of a run.
const SUMMABILITY_TAIL_SHARE: f64 = 0.1;
/// Relative slack on the projection inequalities. Some hold with equality
/// (one-dimensional data), where rounding alone would flip them.
const ROUNDING_SLACK: f64 = 1e-12;
/// Allowed relative drift of `h` between `T/2` and `T`.
const PRECONDITIONER_TAIL_DRIFT: f64 = 0.05;

/// Earliest index from which every `ok[i..]` is true.
fn onset_index(ok: &[bool]) -> Option<usize> {
    match ok.iter().rposition(|&b| !b) {
        None => Some(0),
        Some(last_bad) if last_bad + 1 < ok.len() => Some(last_bad + 1),
        Some(_) => None,
    }
}

/// Loss strictly decreases between consecutive recorded steps.
pub fn check_descent(traj: &Trajectory) -> CheckOutcome {
    let mut out = CheckOutcome::new("descent");
    let mut ok = vec![true];
    for pair in traj.records.windows(2) {
        let rise = pair[1].loss - pair[0].loss;
        ok.push(rise < 0.0);
        if rise >= 0.0 {
            out.worst_violation = out.worst_violation.max(rise);
        }
    }
    let violations = ok.iter().filter(|b| !**b).count();
    out.holds = violations == 0;
    out.onset_step = out.holds.then_some(traj.records[0].t);
    out.detail("pairs_checked", (traj.records.len() - 1) as f64);
    out.detail("violations", violations as f64);
    if let Some(i) = onset_index(&ok) {
        out.detail("eventual_onset", traj.records[i].t as f64);
    }
    out
}

/// Partial sums of `‖g(t)‖²` level off: the increment over the second half
/// of the run is below 10% of the total.
pub fn check_summability(traj: &Trajectory) -> CheckOutcome {
    let mut out = CheckOutcome::new("summability");
    let total = traj.last().grad_sq_sum();
    let mid = traj.midpoint().grad_sq_sum();
    let increment = total - mid;
    out.detail("total", total);
    out.detail("last_half_increment", increment);
    out.detail("ratio", if total > 0.0 { increment / total } else { 0.0 });
    if traj.final_t() < 2 {
        out.holds = true;
        out.onset_step = Some(0);
        out.detail("vacuous", 1.0);
        return out;
    }
    let excess = increment - SUMMABILITY_TAIL_SHARE * total;
    out.worst_violation = excess.max(0.0);
    out.holds = excess < 0.0;
    out.onset_step = out.holds.then_some(0);
    out
}

/// `‖w‖` grows, the loss and `‖g‖` shrink between `T/2` and `T`, and every
/// margin `⟨w(t), z_n⟩` is positive from some recorded step on.
pub fn check_divergence_and_margins(traj: &Trajectory, data: &Dataset) -> CheckOutcome {
    let mut out = CheckOutcome::new("divergence_and_margins");
    let last = traj.last();
    let mid = traj.midpoint();
    let norm_grows = norm(&last.w) > norm(&mid.w);
    let loss_falls = last.loss < mid.loss;
    let grad_falls = last.grad_norm() < mid.grad_norm();
    let mut ok = Vec::with_capacity(traj.records.len());
    for r in &traj.records {
        let min_margin = data.margins(&r.w).into_iter().fold(f64::INFINITY, f64::min);
        ok.push(min_margin > 0.0);
        out.worst_violation = out.worst_violation.max(0.0 - min_margin);
    }
    let onset = onset_index(&ok).map(|i| traj.records[i].t);
    out.detail("norm_ratio", norm(&last.w) / norm(&mid.w));
    out.detail("loss_ratio", last.loss / mid.loss);
    out.detail("grad_ratio", last.grad_norm() / mid.grad_norm());
    out.detail(
        "final_min_margin",
        data.margins(&last.w).into_iter().fold(f64::INFINITY, f64::min),
    );
    if let Some(t) = onset {
        out.detail("margin_onset", t as f64);
    }
    out.holds = norm_grows && loss_falls && grad_falls && onset.is_some();
    out.onset_step = if out.holds { onset } else { None };
    out
}

/// `h(t)` is componentwise nonincreasing and positive, and its relative drift
/// between `T/2` and `T` is below 5%. The drift criterion only binds for runs
/// of at least two steps.
pub fn check_preconditioner_convergence(traj: &Trajectory) -> CheckOutcome {
    let mut out = CheckOutcome::new("preconditioner_convergence");
    let mut monotone = true;
    for pair in traj.records.windows(2) {
        for (a, b) in pair[0].h.iter().zip(&pair[1].h) {
            if b > a {
                monotone = false;
                out.worst_violation = out.worst_violation.max((b - a) / a);
            }
        }
    }
    let h_end = &traj.last().h;
    let positive = h_end.iter().all(|&h| h > 0.0 && h.is_finite());
    let drift = traj
        .midpoint()
        .h
        .iter()
        .zip(h_end)
        .map(|(m, h)| (m - h) / h)
        .fold(0.0, f64::max);
    let binding = traj.final_t() >= 2;
    out.detail("tail_drift", drift);
    out.detail("tail_binding", if binding { 1.0 } else { 0.0 });
    out.detail("min_h_final", h_end.iter().cloned().fold(f64::INFINITY, f64::min));
    let drift_ok = !binding || drift < PRECONDITIONER_TAIL_DRIFT;
    if binding && !drift_ok {
        out.worst_violation = out.worst_violation.max(drift - PRECONDITIONER_TAIL_DRIFT);
    }
    out.holds = monotone && positive && drift_ok;
    out.onset_step = out.holds.then_some(0);
    out
}

/// The four projection inequalities of the induced form, each from a finite
/// onset:
///
/// * `⟨δ, û⟩ ≥ ‖δ‖ / max‖ξ_n‖`
/// * `½‖δ‖ ≤ ‖d‖ ≤ (3/2)‖δ‖`
/// * `⟨d, û⟩ ≥ ‖d‖ / (4 max‖ξ_n‖)` (and positive)
/// * `⟨v, û⟩ ≥ ‖v‖ / (8 max‖ξ_n‖)`
///
/// `u_hat` is the margin-1 solution over the `ξ_n` (not normalized): the
/// bounds rely on `⟨ξ_n, û⟩ ≥ 1`. Each left side is evaluated as
/// `‖û‖ · ⟨x, û/‖û‖⟩`, i.e. through the projection onto the unit direction.
pub fn check_projection_bounds(
    induced: &[InducedQuantities],
    u_hat: &[f64],
    xi: &[Vec<f64>],
) -> Result<CheckOutcome> {
    if induced.is_empty() {
        return Err(Error::InvalidArgument("no induced quantities to check".into()));
    }
    let unit = normalize(u_hat).ok_or_else(|| Error::InvalidArgument("û is zero".into()))?;
    let u_norm = norm(u_hat);
    let xi_max = xi.iter().map(|x| norm(x)).fold(0.0, f64::max);
    if xi_max == 0.0 {
        return Err(Error::InvalidArgument("all ξ_n are zero".into()));
    }
    let mut out = CheckOutcome::new("projection_bounds");
    let names = ["delta_projection", "d_delta_ratio", "d_projection", "v_projection"];
    let mut ok: [Vec<bool>; 4] = Default::default();
    let mut worst = [0.0f64; 4];
    // relative shortfall of lhs against rhs
    let short = |lhs: f64, rhs: f64| if rhs > 0.0 { (rhs - lhs) / rhs } else { -lhs };

    for q in induced {
        let delta = projection_split(&q.delta, &unit)?;
        let d = projection_split(&q.d, &unit)?;
        let v = projection_split(&q.v, &unit)?;
        let (nd, ndel, nv) = (norm(&q.d), norm(&q.delta), norm(&q.v));

        let lhs = u_norm * delta.p_scalar;
        let s0 = short(lhs, ndel / xi_max);
        ok[0].push(lhs >= ndel / xi_max * (1.0 - ROUNDING_SLACK));

        let s1 = (0.5 * ndel - nd).max(nd - 1.5 * ndel) / ndel.max(f64::MIN_POSITIVE);
        ok[1].push(0.5 * ndel <= nd * (1.0 + ROUNDING_SLACK) && nd <= 1.5 * ndel * (1.0 + ROUNDING_SLACK));

        let lhs = u_norm * d.p_scalar;
        let s2 = short(lhs, nd / (4.0 * xi_max));
        ok[2].push(lhs >= nd / (4.0 * xi_max) * (1.0 - ROUNDING_SLACK) && lhs > 0.0);

        let lhs = u_norm * v.p_scalar;
        let s3 = short(lhs, nv / (8.0 * xi_max));
        ok[3].push(lhs >= nv / (8.0 * xi_max) * (1.0 - ROUNDING_SLACK));

        for (w, s) in worst.iter_mut().zip([s0, s1, s2, s3]) {
            *w = w.max(s);
        }
    }
    let mut onset_all = Some(0u64);
    for k in 0..4 {
        let onset = onset_index(&ok[k]).map(|i| induced[i].t);
        out.detail(&format!("{}_worst", names[k]), worst[k].max(0.0));
        match onset {
            Some(t) => {
                out.detail(&format!("{}_onset", names[k]), t as f64);
                onset_all = onset_all.map(|o| o.max(t));
            }
            None => onset_all = None,
        }
    }
    out.detail("xi_max", xi_max);
    out.detail("u_hat_norm", u_norm);
    out.worst_violation = worst.iter().cloned().fold(0.0, f64::max);
    out.onset_step = onset_all;
    out.holds = onset_all.is_some();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::mirrored_pair_dataset;
    use crate::vector::dot;
    use crate::maxmargin::{solve_hard_margin, MarginProblem};
    use crate::model::{Hyperparams, LossModel};
    use crate::optim::{estimate_h_infinity, induced_sequence, run, Optimizer, RunOptions};
    use std::f64::consts::FRAC_PI_3;

    fn ex31_run(eta: f64, iters: u64, opts: RunOptions) -> (Trajectory, Dataset) {
        let data = mirrored_pair_dataset(FRAC_PI_3).unwrap();
        let hp = Hyperparams::new(eta, 1e-8, vec![0.0, 0.0]).with_max_iters(iters);
        let traj = run(Optimizer::AdaGrad, &LossModel::exponential(), &data, &hp, &opts).unwrap();
        (traj, data)
    }

    #[test]
    fn onset_search() {
        assert_eq!(onset_index(&[true, true]), Some(0));
        assert_eq!(onset_index(&[false, true, true]), Some(1));
        assert_eq!(onset_index(&[true, false, true]), Some(2));
        assert_eq!(onset_index(&[true, false]), None);
    }

    #[test]
    fn compliant_run_passes_everything() {
        let (traj, data) = ex31_run(0.05, 20_000, RunOptions::default());
        for c in [
            check_descent(&traj),
            check_summability(&traj),
            check_divergence_and_margins(&traj, &data),
            check_preconditioner_convergence(&traj),
        ] {
            assert!(c.holds, "{c:?}");
        }
        assert_eq!(check_descent(&traj).onset_step, Some(0));
        // w(0) = 0 has zero margins; positivity starts at the next record
        assert_eq!(check_divergence_and_margins(&traj, &data).onset_step, Some(100));
    }

    #[test]
    fn short_runs_are_vacuous() {
        let (traj, _) = ex31_run(0.05, 1, RunOptions::default());
        assert!(check_summability(&traj).holds);
        let c = check_preconditioner_convergence(&traj);
        assert!(c.holds);
        assert_eq!(c.details["tail_binding"], 0.0);
    }

    #[test]
    fn oversized_step_breaks_descent() {
        // On the single-direction example every AdaGrad step still descends,
        // so use two points that make large steps overshoot.
        let data = Dataset::from_signed(vec![vec![1.0, 0.3], vec![-0.8, 0.5]]).unwrap();
        let model = LossModel::logistic();
        let bound = crate::model::check_assumptions(&model, &data, &Hyperparams::new(1.0, 1e-8, vec![0.0, 0.0]))
            .unwrap()
            .eta_bound;
        let hp = Hyperparams::new(100.0 * bound, 1e-8, vec![0.0, 0.0]).with_max_iters(50);
        let opts = RunOptions::default().with_thinning(1).overriding();
        let traj = run(Optimizer::AdaGrad, &model, &data, &hp, &opts).unwrap();
        let c = check_descent(&traj);
        assert!(!c.holds);
        assert!(c.worst_violation > 0.0);
        assert_eq!(c.onset_step, None);
    }

    #[test]
    fn feasible_start_has_zero_onset() {
        let data = mirrored_pair_dataset(FRAC_PI_3).unwrap();
        let hp = Hyperparams::new(0.05, 1e-8, vec![1.0, 1.0]).with_max_iters(5000);
        let traj = run(Optimizer::AdaGrad, &LossModel::exponential(), &data, &hp, &RunOptions::default()).unwrap();
        let c = check_divergence_and_margins(&traj, &data);
        assert!(c.holds);
        assert_eq!(c.onset_step, Some(0));
    }

    #[test]
    fn untouched_coordinate_keeps_constant_h() {
        let data = Dataset::from_signed(vec![vec![1.0, 0.0], vec![0.5, 0.0]]).unwrap();
        let hp = Hyperparams::new(0.05, 1e-4, vec![0.0, 0.0]).with_max_iters(10_000);
        let traj = run(Optimizer::AdaGrad, &LossModel::logistic(), &data, &hp, &RunOptions::default()).unwrap();
        assert!(traj.records.iter().all(|r| r.h[1] == 1.0 / 1e-4f64.sqrt()));
        assert!(check_preconditioner_convergence(&traj).holds);
    }

    #[test]
    fn identity_preconditioner_has_d_equal_delta() {
        let data = mirrored_pair_dataset(FRAC_PI_3).unwrap();
        let model = LossModel::exponential();
        let hp = Hyperparams::new(0.05, 1e-8, vec![0.0, 0.0]).with_max_iters(2000);
        let traj = run(Optimizer::GradientDescent, &model, &data, &hp, &RunOptions::default()).unwrap();
        let seq = induced_sequence(&traj, &[1.0, 1.0], &model, &data).unwrap();
        assert!(seq.iter().all(|q| q.d == q.delta));
        let xi = seq[0].xi.clone();
        let u_hat = solve_hard_margin(&MarginProblem::unweighted(xi.clone())).unwrap().w_star;
        let c = check_projection_bounds(&seq, &u_hat, &xi).unwrap();
        assert!(c.holds);
        assert_eq!(c.details["d_delta_ratio_onset"], 0.0);
    }

    #[test]
    fn projection_bounds_on_adagrad_run() {
        let model = LossModel::exponential();
        let (traj, data) = ex31_run(0.05, 50_000, RunOptions::default());
        let h_inf = estimate_h_infinity(&traj).unwrap().h_inf;
        let seq = induced_sequence(&traj, &h_inf, &model, &data).unwrap();
        let xi = seq[0].xi.clone();
        let u_hat = solve_hard_margin(&MarginProblem::unweighted(xi.clone())).unwrap().w_star;
        assert!(seq.iter().all(|q| dot(&q.delta, &u_hat) > 0.0));
        let c = check_projection_bounds(&seq, &u_hat, &xi).unwrap();
        assert!(c.holds, "{c:?}");
    }
}
