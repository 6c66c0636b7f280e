//! Cyclic coordinate ascent on the hard-margin dual.
//!
//! `max_{α ≥ 0} Σ α_n − ½ ‖Σ α_n c_n‖²`. Each coordinate is maximized exactly:
//! `α_n ← max(0, α_n + (1 − ⟨u, c_n⟩) / ‖c_n‖²)` with `u = Σ α_n c_n`.
//! Coordinate ascent converges linearly but slowly on badly scaled
//! constraints, so after each sweep the positive support of `α` is tried as an
//! active set: the equalities `⟨u, c_k⟩ = 1` on it are solved directly and the
//! result accepted when it is a KKT point. Nearly antiparallel constraints (which
//! strong diagonal weights produce) can stall the ascent far from the optimum
//! with a support that is still wrong; after [`FALLBACK_SWEEPS`] sweeps a
//! dual active-set method (Goldfarb-Idnani with identity Hessian) is tried as
//! well, again accepted only on a KKT certificate.

use crate::error::{Error, Result};
use crate::vector::{axpy, dot};

use super::kkt_residual;

pub const FALLBACK_SWEEPS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct DualAscentConfig {
    /// Stop once the KKT residual falls below this.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Dual iterates beyond this norm mean the dual is unbounded (primal infeasible).
    pub divergence_bound: f64,
    /// Try the active-set equality solve after each sweep.
    pub polish: bool,
}

impl Default for DualAscentConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_sweeps: 1_000_000,
            divergence_bound: 1e12,
            polish: true,
        }
    }
}

pub(super) fn solve(constraints: &[Vec<f64>], config: &DualAscentConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = constraints.len();
    let p = constraints[0].len();
    let sq: Vec<f64> = constraints.iter().map(|c| dot(c, c)).collect();
    let mut alpha = vec![0.0; n];
    let mut u = vec![0.0; p];
    let mut last_support: Option<Vec<usize>> = None;
    let mut residual = f64::INFINITY;

    for sweep in 1..=config.max_sweeps {
        for k in 0..n {
            let c = &constraints[k];
            let step = (1.0 - dot(&u, c)) / sq[k];
            let new = (alpha[k] + step).max(0.0);
            let delta = new - alpha[k];
            if delta != 0.0 {
                axpy(delta, c, &mut u);
                alpha[k] = new;
            }
        }
        // u drifts from Σ α c under incremental updates; rebuild it.
        u = combine(constraints, &alpha, p);
        residual = kkt_residual(constraints, &u, &alpha);
        if residual < config.tolerance {
            return Ok((u, alpha));
        }
        if alpha.iter().map(|a| a * a).sum::<f64>().sqrt() > config.divergence_bound {
            return Err(Error::Infeasible);
        }
        if config.polish {
            let support: Vec<usize> = (0..n).filter(|&k| alpha[k] > 0.0).collect();
            let changed = last_support.as_ref() != Some(&support);
            if changed || sweep % 64 == 0 {
                // Inactive constraints can keep a slowly decaying multiplier
                // for many sweeps, so near-tight subsets are tried as well.
                let slack: Vec<f64> = constraints.iter().map(|c| dot(&u, c) - 1.0).collect();
                let mut tried: Vec<Vec<usize>> = Vec::new();
                for candidate in [
                    support.clone(),
                    near_tight(&support, &slack, 1e-1),
                    near_tight(&support, &slack, 1e-3),
                ] {
                    if tried.contains(&candidate) {
                        continue;
                    }
                    if let Some((pu, pa)) = polish(constraints, &candidate, p) {
                        if kkt_residual(constraints, &pu, &pa) < config.tolerance {
                            return Ok((pu, pa));
                        }
                    }
                    tried.push(candidate);
                }
                last_support = Some(support);
            }
            if sweep == FALLBACK_SWEEPS {
                if let Some((pu, pa)) = active_set_solve(constraints) {
                    if kkt_residual(constraints, &pu, &pa) < config.tolerance {
                        return Ok((pu, pa));
                    }
                }
            }
        }
    }
    Err(Error::Stagnation {
        sweeps: config.max_sweeps,
        residual,
    })
}

fn near_tight(support: &[usize], slack: &[f64], tol: f64) -> Vec<usize> {
    support.iter().copied().filter(|&k| slack[k].abs() < tol).collect()
}

fn combine(constraints: &[Vec<f64>], alpha: &[f64], p: usize) -> Vec<f64> {
    let mut u = vec![0.0; p];
    for (c, &a) in constraints.iter().zip(alpha) {
        if a != 0.0 {
            axpy(a, c, &mut u);
        }
    }
    u
}

/// Minimum-norm `u` with `⟨u, c_k⟩ = 1` on `support`, and its multipliers.
/// Returns `None` if the support is rank deficient or any multiplier comes
/// out negative.
fn polish(constraints: &[Vec<f64>], support: &[usize], p: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    if support.is_empty() || support.len() > p {
        return None;
    }
    let qr = Qr::new(constraints, support)?;
    let (u, a_k) = qr.min_norm();
    if a_k.iter().any(|&a| a < 0.0) {
        return None;
    }
    let mut alpha = vec![0.0; constraints.len()];
    for (&k, &a) in support.iter().zip(&a_k) {
        alpha[k] = a;
    }
    Some((u, alpha))
}

/// Thin QR of the support constraints taken as columns, by modified
/// Gram-Schmidt with one reorthogonalization pass. Working from `Q` and `R`
/// instead of the Gram matrix keeps the conditioning at `κ(C)` rather than
/// `κ(C)²`, which matters once diagonal weights make constraints nearly
/// antiparallel.
struct Qr {
    q: Vec<Vec<f64>>,
    r: Vec<Vec<f64>>,
}

impl Qr {
    fn new(constraints: &[Vec<f64>], support: &[usize]) -> Option<Self> {
        let k = support.len();
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut r = vec![vec![0.0; k]; k];
        for (j, &idx) in support.iter().enumerate() {
            let c = &constraints[idx];
            let mut v = c.clone();
            for _ in 0..2 {
                for (i, qi) in q.iter().enumerate() {
                    let s = dot(qi, &v);
                    r[i][j] += s;
                    axpy(-s, qi, &mut v);
                }
            }
            let nv = norm_sq(&v).sqrt();
            if !(nv.is_finite() && nv > 1e-13 * norm_sq(c).sqrt()) {
                return None;
            }
            r[j][j] = nv;
            v.iter_mut().for_each(|x| *x /= nv);
            q.push(v);
        }
        Some(Self { q, r })
    }

    fn back(&self, y: &[f64]) -> Vec<f64> {
        let k = y.len();
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| self.r[i][j] * x[j]).sum();
            x[i] = (y[i] - s) / self.r[i][i];
        }
        x
    }

    /// `u = C (CᵀC)⁻¹ 1` and `α = (CᵀC)⁻¹ 1`.
    fn min_norm(&self) -> (Vec<f64>, Vec<f64>) {
        let k = self.q.len();
        let mut y = vec![0.0; k];
        for i in 0..k {
            let s: f64 = (0..i).map(|j| self.r[j][i] * y[j]).sum();
            y[i] = (1.0 - s) / self.r[i][i];
        }
        let mut u = vec![0.0; self.q[0].len()];
        for (qi, &yi) in self.q.iter().zip(&y) {
            axpy(yi, qi, &mut u);
        }
        (u, self.back(&y))
    }

    /// Splits `v` into its component orthogonal to the columns and the
    /// coefficients of the remainder in the column basis.
    fn project(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut z = v.to_vec();
        let mut s = vec![0.0; self.q.len()];
        for _ in 0..2 {
            for (i, qi) in self.q.iter().enumerate() {
                let d = dot(qi, &z);
                s[i] += d;
                axpy(-d, qi, &mut z);
            }
        }
        (z, self.back(&s))
    }
}

/// Dual active-set method for `min ½‖u‖²` s.t. `⟨u, c_k⟩ ≥ 1`: start at
/// `u = 0`, repeatedly add the most violated constraint, and drop active
/// constraints whose multiplier would turn negative on the way.
fn active_set_solve(constraints: &[Vec<f64>]) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = constraints.len();
    let p = constraints[0].len();
    let mut u = vec![0.0; p];
    let mut alpha = vec![0.0; n];
    let mut active: Vec<usize> = Vec::new();
    let max_iters = 50 * (n + p);
    let mut iters = 0;
    loop {
        let violated = (0..n)
            .filter(|k| !active.contains(k))
            .map(|k| (k, dot(&u, &constraints[k]) - 1.0))
            .filter(|&(k, s)| s < -1e-14 * (1.0 + norm_sq(&constraints[k]).sqrt() * norm_sq(&u).sqrt()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((q, _)) = violated else {
            return Some((u, alpha));
        };
        // work on constraint q until it is tight
        loop {
            iters += 1;
            if iters > max_iters {
                return None;
            }
            let cq = &constraints[q];
            let (z, r) = if active.is_empty() {
                (cq.clone(), Vec::new())
            } else {
                Qr::new(constraints, &active)?.project(cq)
            };
            let slack = dot(&u, cq) - 1.0;
            let zc = dot(&z, cq);
            let full = if norm_sq(&z) > 1e-24 * norm_sq(cq) && zc > 0.0 {
                Some(-slack / zc)
            } else {
                None
            };
            let partial = active
                .iter()
                .zip(&r)
                .filter(|(_, &ri)| ri > 0.0)
                .map(|(&k, &ri)| (alpha[k] / ri, k))
                .min_by(|a, b| a.0.total_cmp(&b.0));
            let (t, drop) = match (full, partial) {
                (None, None) => return None,
                (Some(f), Some((pt, k))) if pt < f => (pt, Some(k)),
                (Some(f), _) => (f, None),
                (None, Some((pt, k))) => (pt, Some(k)),
            };
            if full.is_some() {
                axpy(t, &z, &mut u);
            }
            for (&k, &ri) in active.iter().zip(&r) {
                alpha[k] = (alpha[k] - t * ri).max(0.0);
            }
            alpha[q] += t;
            match drop {
                Some(k) => {
                    alpha[k] = 0.0;
                    active.retain(|&i| i != k);
                }
                None => {
                    active.push(q);
                    break;
                }
            }
        }
        if active.len() > p {
            return None;
        }
        // every active constraint is tight here, so refresh from the factorization
        let (fresh_u, a_k) = Qr::new(constraints, &active)?.min_norm();
        u = fresh_u;
        alpha.iter_mut().for_each(|a| *a = 0.0);
        for (&k, &a) in active.iter().zip(&a_k) {
            alpha[k] = a.max(0.0);
        }
    }
}

fn norm_sq(v: &[f64]) -> f64 {
    dot(v, v)
}
