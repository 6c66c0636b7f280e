//! Exhaustive active-set enumeration for small margin problems.
//!
//! Every subset `K` of constraints is tried in lexicographic order of its
//! sorted index tuple. For each, the equality system `⟨u, c_k⟩ = 1 (k ∈ K)`
//! with `u = Σ_K α_k c_k` is solved; candidates that are primal feasible with
//! `α ≥ 0` are KKT points of a strictly convex problem, and the smallest-norm
//! one is returned (first found wins on ties).

use crate::error::{Error, Result};
use crate::vector::{axpy, dot, solve as linsolve};

use super::{finish, MarginProblem, MarginSolution};

pub const MAX_BRUTE_FORCE_CONSTRAINTS: usize = 20;
pub const MAX_BRUTE_FORCE_DIM: usize = 8;

const FEAS_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-12;

pub fn brute_force_margin(problem: &MarginProblem) -> Result<MarginSolution> {
    problem.validate()?;
    let n = problem.constraints.len();
    let p = problem.dim();
    if n > MAX_BRUTE_FORCE_CONSTRAINTS || p > MAX_BRUTE_FORCE_DIM {
        return Err(Error::TooLarge(format!(
            "N = {n}, p = {p}; enumeration supports N ≤ {MAX_BRUTE_FORCE_CONSTRAINTS}, p ≤ {MAX_BRUTE_FORCE_DIM}"
        )));
    }
    let cs = problem.transformed_constraints();
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let mut subset = Vec::with_capacity(p);
    visit(&cs, p, 0, &mut subset, &mut best);
    let (_, u, alpha) = best.ok_or(Error::Infeasible)?;
    Ok(finish(
        &problem.constraints,
        &cs,
        problem.weights.as_deref(),
        u,
        alpha,
    ))
}

/// Depth-first walk producing subsets in lexicographic order:
/// `[0], [0,1], [0,1,2], …, [0,2], …, [1], …`.
fn visit(
    cs: &[Vec<f64>],
    p: usize,
    start: usize,
    subset: &mut Vec<usize>,
    best: &mut Option<(f64, Vec<f64>, Vec<f64>)>,
) {
    for k in start..cs.len() {
        subset.push(k);
        if let Some((u, alpha)) = candidate(cs, subset, p) {
            let nrm = dot(&u, &u);
            let better = match best {
                None => true,
                Some((b, _, _)) => nrm < *b * (1.0 - 1e-12),
            };
            if better {
                *best = Some((nrm, u, alpha));
            }
        }
        // more than p vectors are always linearly dependent
        if subset.len() < p {
            visit(cs, p, k + 1, subset, best);
        }
        subset.pop();
    }
}

fn candidate(cs: &[Vec<f64>], subset: &[usize], p: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let gram: Vec<Vec<f64>> = subset
        .iter()
        .map(|&i| subset.iter().map(|&j| dot(&cs[i], &cs[j])).collect())
        .collect();
    let mut a_k = linsolve(&gram, &vec![1.0; subset.len()])?;
    // the normal equations square the conditioning; refine against the
    // constraint residual computed from u directly
    for _ in 0..2 {
        let mut u = vec![0.0; p];
        for (&k, &a) in subset.iter().zip(&a_k) {
            axpy(a, &cs[k], &mut u);
        }
        let r: Vec<f64> = subset.iter().map(|&k| 1.0 - dot(&u, &cs[k])).collect();
        let d = linsolve(&gram, &r)?;
        a_k.iter_mut().zip(&d).for_each(|(a, d)| *a += d);
    }
    if a_k.iter().any(|&a| a < -DUAL_TOL) {
        return None;
    }
    let mut alpha = vec![0.0; cs.len()];
    let mut u = vec![0.0; p];
    for (&k, &a) in subset.iter().zip(&a_k) {
        let a = a.max(0.0);
        alpha[k] = a;
        axpy(a, &cs[k], &mut u);
    }
    if cs.iter().all(|c| dot(&u, c) >= 1.0 - FEAS_TOL) {
        Some((u, alpha))
    } else {
        None
    }
}
