//! Minimum-norm solutions of margin constraint systems.
//!
//! The hard-margin problem is `argmin ‖u‖²` subject to `⟨u, c_n⟩ ≥ 1`. The
//! diagonally weighted variant `argmin ‖b ⊙ w‖²` over the same feasible set is
//! reduced to it by substituting `u = b ⊙ w`, which turns the constraints into
//! `⟨u, c_n ⊘ b⟩ ≥ 1`. With `b = h∞^{-1/2}` this is exactly the rescaling
//! `ξ_n = √h∞ ⊙ z_n` of the induced loss.
//!
//! [`solve_hard_margin`] runs coordinate ascent on the dual
//! `max Σα_n − ½‖Σ α_n c_n‖², α ≥ 0`, [`brute_force_margin`] enumerates
//! candidate active sets and serves as an independent oracle, and
//! [`feasibility`] decides whether any margin-1 point exists.

mod brute;
mod dual;
mod hull;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{divide, dot, max_abs_diff, norm};

pub use brute::{brute_force_margin, MAX_BRUTE_FORCE_CONSTRAINTS, MAX_BRUTE_FORCE_DIM};
pub use dual::DualAscentConfig;
pub use hull::min_norm_hull_point;

/// Constraints `⟨w, c_n⟩ ≥ 1` with an optional diagonal objective weight `b`
/// (objective `‖b ⊙ w‖²`; `None` means `‖w‖²`).
#[derive(Debug, Clone, PartialEq)]
pub struct MarginProblem {
    pub constraints: Vec<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
}

impl MarginProblem {
    pub fn unweighted(constraints: Vec<Vec<f64>>) -> Self {
        Self {
            constraints,
            weights: None,
        }
    }

    pub fn weighted(constraints: Vec<Vec<f64>>, weights: Vec<f64>) -> Self {
        Self {
            constraints,
            weights: Some(weights),
        }
    }

    pub fn dim(&self) -> usize {
        self.constraints.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.dim();
        if self.constraints.is_empty() || p == 0 {
            return Err(Error::DimensionMismatch("margin problem has no constraints".into()));
        }
        for (n, c) in self.constraints.iter().enumerate() {
            if c.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {n} has length {}, expected {p}",
                    c.len()
                )));
            }
            if !c.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite(format!("constraint {n}")));
            }
            if c.iter().all(|&v| v == 0.0) {
                return Err(Error::InvalidArgument(format!("constraint {n} is the zero vector")));
            }
        }
        if let Some(b) = &self.weights {
            if b.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "weights have length {}, expected {p}",
                    b.len()
                )));
            }
            if let Some(v) = b.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidArgument(format!("weight {v} is not positive")));
            }
        }
        Ok(())
    }

    /// Constraints in the `u = b ⊙ w` coordinates.
    pub fn transformed_constraints(&self) -> Vec<Vec<f64>> {
        match &self.weights {
            None => self.constraints.clone(),
            Some(b) => self.constraints.iter().map(|c| divide(c, b)).collect(),
        }
    }
}

/// Minimizer with its dual certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginSolution {
    pub w_star: Vec<f64>,
    /// `α_n ≥ 0`, one per original constraint (zero for dropped duplicates).
    pub dual: Vec<f64>,
    /// Indices with `|⟨w*, c_n⟩ − 1| ≤ 1e-6 (1 + ‖c_n‖)`.
    pub active_set: Vec<usize>,
    pub kkt_residual: f64,
    /// Minimizer in the unweighted coordinates `u = b ⊙ w` (equals `w_star`
    /// for an unweighted problem).
    #[serde(skip)]
    pub u_star: Vec<f64>,
}

impl MarginSolution {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `Σ_{n ∈ K} α_n c_n` over the active set.
    pub fn reconstruct(&self, constraints: &[Vec<f64>]) -> Vec<f64> {
        let p = self.u_star.len();
        let mut u = vec![0.0; p];
        for &n in &self.active_set {
            crate::vector::axpy(self.dual[n], &constraints[n], &mut u);
        }
        u
    }
}

/// Active-set membership tolerance for a constraint vector `c`.
pub fn active_tolerance(c: &[f64]) -> f64 {
    1e-6 * (1.0 + norm(c))
}

/// KKT residual of `(u, α)` for `min ‖u‖²/2 s.t. ⟨u, c_n⟩ ≥ 1`: the largest of
/// primal infeasibility, dual negativity, complementary slackness and the
/// stationarity gap `‖u − Σ α_n c_n‖∞`.
///
/// The last three are relative: dual terms are divided by `1 + max α_n` and
/// the stationarity gap by `1 + Σ α_n ‖c_n‖`. On badly scaled problems the
/// multipliers can be large enough that rounding alone puts the absolute
/// products far above any fixed tolerance.
pub fn kkt_residual(constraints: &[Vec<f64>], u: &[f64], alpha: &[f64]) -> f64 {
    let alpha_scale = 1.0 + alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mut mass = 1.0;
    let mut primal = 0.0f64;
    let mut dual = 0.0f64;
    let mut recon = vec![0.0; u.len()];
    for (c, &a) in constraints.iter().zip(alpha) {
        let slack = dot(u, c) - 1.0;
        primal = primal.max(-slack);
        dual = dual.max(-a).max((a * slack).abs());
        mass += a.abs() * norm(c);
        crate::vector::axpy(a, c, &mut recon);
    }
    primal
        .max(dual / alpha_scale)
        .max(max_abs_diff(u, &recon) / mass)
}

/// Indices of constraints within `1e-12` (max-abs) of an earlier one.
/// Returns `(unique constraints, map from original index to unique index)`.
pub(crate) fn dedup(constraints: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut unique: Vec<Vec<f64>> = Vec::new();
    let mut map = Vec::with_capacity(constraints.len());
    for c in constraints {
        match unique.iter().position(|u| max_abs_diff(u, c) <= 1e-12) {
            Some(k) => map.push(k),
            None => {
                map.push(unique.len());
                unique.push(c.clone());
            }
        }
    }
    (unique, map)
}

pub(crate) fn finish(
    constraints: &[Vec<f64>],
    transformed: &[Vec<f64>],
    weights: Option<&[f64]>,
    u: Vec<f64>,
    dual: Vec<f64>,
) -> MarginSolution {
    let kkt = kkt_residual(transformed, &u, &dual);
    let w_star = match weights {
        None => u.clone(),
        Some(b) => divide(&u, b),
    };
    let active_set = constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| (dot(&w_star, c) - 1.0).abs() <= active_tolerance(c))
        .map(|(n, _)| n)
        .collect();
    MarginSolution {
        w_star,
        dual,
        active_set,
        kkt_residual: kkt,
        u_star: u,
    }
}

/// Solves `argmin ‖u‖²` subject to `⟨u, c_n⟩ ≥ 1`. Any weights on the
/// problem are rejected; use [`solve_weighted_margin`] for those.
pub fn solve_hard_margin(problem: &MarginProblem) -> Result<MarginSolution> {
    if problem.weights.is_some() {
        return Err(Error::InvalidArgument(
            "solve_hard_margin expects an unweighted problem".into(),
        ));
    }
    problem.validate()?;
    solve_transformed(problem, &DualAscentConfig::default())
}

/// Solves `argmin ‖b ⊙ w‖²` subject to `⟨w, c_n⟩ ≥ 1` through the
/// substitution `u = b ⊙ w`. Unweighted problems are passed through.
pub fn solve_weighted_margin(problem: &MarginProblem) -> Result<MarginSolution> {
    problem.validate()?;
    solve_transformed(problem, &DualAscentConfig::default())
}

/// Like [`solve_weighted_margin`] with explicit solver settings.
pub fn solve_with(problem: &MarginProblem, config: &DualAscentConfig) -> Result<MarginSolution> {
    problem.validate()?;
    solve_transformed(problem, config)
}

fn solve_transformed(problem: &MarginProblem, config: &DualAscentConfig) -> Result<MarginSolution> {
    let transformed = problem.transformed_constraints();
    let (unique, map) = dedup(&transformed);
    if !hull::separable(&unique) {
        return Err(Error::Infeasible);
    }
    let (u, alpha_unique) = dual::solve(&unique, config)?;
    let mut dual = vec![0.0; transformed.len()];
    let mut seen = vec![false; unique.len()];
    for (n, &k) in map.iter().enumerate() {
        if !seen[k] {
            dual[n] = alpha_unique[k];
            seen[k] = true;
        }
    }
    Ok(finish(
        &problem.constraints,
        &transformed,
        problem.weights.as_deref(),
        u,
        dual,
    ))
}

/// Separability verdict with a strictly feasible witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub witness: Option<Vec<f64>>,
}

/// Decides whether `⟨w, c_n⟩ ≥ 1` is solvable. The witness is the
/// hard-margin solution (margin 1 on the support vectors).
pub fn feasibility(problem: &MarginProblem) -> Feasibility {
    let infeasible = Feasibility {
        feasible: false,
        witness: None,
    };
    if problem.validate().is_err() {
        return infeasible;
    }
    let (unique, _) = dedup(&problem.constraints);
    let Some(q) = hull::min_norm_hull_point(&unique) else {
        return infeasible;
    };
    let qq = dot(&q, &q);
    let scale = unique.iter().map(|c| dot(c, c)).fold(0.0, f64::max);
    if qq <= hull::SEPARATION_TOL * hull::SEPARATION_TOL * scale {
        return infeasible;
    }
    let witness = match solve_hard_margin(&MarginProblem::unweighted(problem.constraints.clone())) {
        Ok(sol) => sol.w_star,
        // q / ‖q‖² is the same point, accurate to the hull solver's precision.
        Err(_) => q.iter().map(|v| v / qq).collect(),
    };
    Feasibility {
        feasible: true,
        witness: Some(witness),
    }
}
