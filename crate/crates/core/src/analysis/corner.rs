//! Whether the feasible set sits in an axis-aligned cone at the hard-margin
//! solution, in which case every diagonally weighted margin problem has the
//! same minimizer and AdaGrad and GD share their limit direction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::maxmargin::{solve_hard_margin, solve_weighted_margin, MarginProblem};
use crate::model::Dataset;
use crate::vector::{hadamard, max_abs_diff, norm, solve};

pub const CORNER_PROBE_COUNT: usize = 16;
pub const CORNER_PROBE_SEED: u64 = 0x5eed_c0de;
/// Upper bound on candidate assignments examined by the sign-pattern test.
const MAX_ASSIGNMENTS: usize = 100_000;

/// The sufficient sign-pattern conditions, evaluated on the data reflected
/// into the orthant of the anchor (`z ↦ sign(a) ⊙ z`):
///
/// 1. `sign_pattern`: `p` points can be assigned to the coordinates so that
///    point `k` is positive in coordinate `k` and negative elsewhere;
/// 2. `nonsingular`: those points are linearly independent;
/// 3. `positive_anchor`: the point where all of them are tight is positive;
/// 4. `conic_cover`: every other point is a positive combination of them
///    with coefficients summing to at least 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignPatternCheck {
    pub applicable: bool,
    pub reflection: Vec<f64>,
    /// Point index assigned to each coordinate, if an assignment was found.
    pub assignment: Option<Vec<usize>>,
    pub sign_pattern: bool,
    pub nonsingular: bool,
    pub positive_anchor: bool,
    pub conic_cover: bool,
    /// `max |a_lemma − a_solver|` when the tight point was computed.
    pub anchor_gap: Option<f64>,
}

impl SignPatternCheck {
    pub fn holds(&self) -> bool {
        self.applicable && self.sign_pattern && self.nonsingular && self.positive_anchor && self.conic_cover
    }

    fn passed(&self) -> usize {
        [self.sign_pattern, self.nonsingular, self.positive_anchor, self.conic_cover]
            .iter()
            .filter(|b| **b)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerCertificate {
    pub holds: bool,
    /// Hard-margin solution `a`.
    pub anchor: Vec<f64>,
    pub sign_pattern: SignPatternCheck,
    pub probe_seed: u64,
    pub probe_count: usize,
    pub probes_agree: bool,
    /// Largest `max |w_b − a|` over the probe solves.
    pub probe_max_deviation: f64,
    pub probe_tolerance: f64,
}

/// Decides whether the feasible set `F = {w : ⟨w, z_n⟩ ≥ 1}` lies in the cone
/// `{a + u : a_i u_i ≥ 0}` anchored at the hard-margin solution `a`.
///
/// The sign-pattern conditions are sufficient but miss degenerate layouts
/// (zeros in the data, `N < p`), so the verdict is also true when the weighted
/// solves for [`CORNER_PROBE_COUNT`] seeded weight vectors, log-uniform in
/// `[1e-2, 1e2]`, all return `a` within `1e-8 (1 + ‖a‖)`.
pub fn corner_condition(data: &Dataset) -> Result<CornerCertificate> {
    let z = data.signed_features().to_vec();
    let anchor = solve_hard_margin(&MarginProblem::unweighted(z.clone()))?.w_star;
    let sign_pattern = sign_pattern_check(&z, &anchor);

    let tol = 1e-8 * (1.0 + norm(&anchor));
    let mut rng = ChaCha8Rng::seed_from_u64(CORNER_PROBE_SEED);
    let mut deviation = 0.0f64;
    for _ in 0..CORNER_PROBE_COUNT {
        let b: Vec<f64> = (0..anchor.len())
            .map(|_| 10f64.powf(rng.random_range(-2.0..=2.0)))
            .collect();
        let w = solve_weighted_margin(&MarginProblem::weighted(z.clone(), b))?.w_star;
        deviation = deviation.max(max_abs_diff(&w, &anchor));
    }
    let probes_agree = deviation <= tol;
    Ok(CornerCertificate {
        holds: sign_pattern.holds() || probes_agree,
        anchor,
        sign_pattern,
        probe_seed: CORNER_PROBE_SEED,
        probe_count: CORNER_PROBE_COUNT,
        probes_agree,
        probe_max_deviation: deviation,
        probe_tolerance: tol,
    })
}

fn sign_pattern_check(z: &[Vec<f64>], anchor: &[f64]) -> SignPatternCheck {
    let p = anchor.len();
    let reflection: Vec<f64> = anchor.iter().map(|a| a.signum()).collect();
    let mut best = SignPatternCheck {
        applicable: z.len() >= p && anchor.iter().all(|&a| a != 0.0),
        reflection: reflection.clone(),
        assignment: None,
        sign_pattern: false,
        nonsingular: false,
        positive_anchor: false,
        conic_cover: false,
        anchor_gap: None,
    };
    if !best.applicable {
        return best;
    }
    let x: Vec<Vec<f64>> = z.iter().map(|zn| hadamard(&reflection, zn)).collect();
    let candidates: Vec<Vec<usize>> = (0..p)
        .map(|i| {
            (0..x.len())
                .filter(|&n| (0..p).all(|j| if j == i { x[n][j] > 0.0 } else { x[n][j] < 0.0 }))
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return best;
    }
    let total = candidates.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
    let total = total.unwrap_or(usize::MAX).min(MAX_ASSIGNMENTS);
    let mut counter = vec![0usize; p];
    for _ in 0..total {
        let assignment: Vec<usize> = counter.iter().zip(&candidates).map(|(&k, c)| c[k]).collect();
        let check = evaluate_assignment(&x, &assignment, anchor, &reflection);
        if check.holds() {
            return check;
        }
        if check.passed() > best.passed() {
            best = check;
        }
        for (k, c) in counter.iter_mut().zip(&candidates) {
            *k += 1;
            if *k < c.len() {
                break;
            }
            *k = 0;
        }
    }
    best
}

fn evaluate_assignment(
    x: &[Vec<f64>],
    assignment: &[usize],
    anchor: &[f64],
    reflection: &[f64],
) -> SignPatternCheck {
    let p = assignment.len();
    let mut check = SignPatternCheck {
        applicable: true,
        reflection: reflection.to_vec(),
        assignment: Some(assignment.to_vec()),
        sign_pattern: true,
        nonsingular: false,
        positive_anchor: false,
        conic_cover: false,
        anchor_gap: None,
    };
    let rows: Vec<Vec<f64>> = assignment.iter().map(|&n| x[n].clone()).collect();
    let Some(a) = solve(&rows, &vec![1.0; p]) else {
        return check;
    };
    check.nonsingular = true;
    check.positive_anchor = a.iter().all(|&v| v > 0.0);
    check.anchor_gap = Some(max_abs_diff(&hadamard(reflection, &a), anchor));
    let cols: Vec<Vec<f64>> = (0..p).map(|i| rows.iter().map(|r| r[i]).collect()).collect();
    check.conic_cover = (0..x.len()).filter(|n| !assignment.contains(n)).all(|n| {
        solve(&cols, &x[n]).is_some_and(|coef| {
            coef.iter().all(|&c| c > 0.0) && coef.iter().sum::<f64>() >= 1.0 - 1e-12
        })
    });
    check
}
