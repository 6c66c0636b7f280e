//! Minimum-norm point of a convex hull (Wolfe's algorithm).
//!
//! The constraints `⟨u, c_n⟩ ≥ 1` are solvable iff `0 ∉ conv{c_n}`; when they
//! are, the hard-margin solution is `q / ‖q‖²` for the minimum-norm hull
//! point `q`.

use crate::vector::{axpy, dot, solve as linsolve};

/// Relative hull distance (in units of `max ‖c_n‖`) below which the origin is
/// taken to lie in the hull.
pub(crate) const SEPARATION_TOL: f64 = 1e-10;

pub(super) fn separable(points: &[Vec<f64>]) -> bool {
    let scale = points.iter().map(|c| dot(c, c)).fold(0.0, f64::max);
    match min_norm_hull_point(points) {
        Some(q) => dot(&q, &q) > SEPARATION_TOL * SEPARATION_TOL * scale,
        None => false,
    }
}

/// Point of `conv(points)` closest to the origin, or `None` for an empty set.
pub fn min_norm_hull_point(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let first = (0..points.len()).min_by(|&i, &j| dot(&points[i], &points[i]).total_cmp(&dot(&points[j], &points[j])))?;
    let p = points[0].len();
    let scale = points.iter().map(|c| dot(c, c)).fold(0.0, f64::max);
    let mut set = vec![first];
    let mut lambda = vec![1.0];
    let mut x = points[first].clone();

    for _ in 0..(100 * points.len() + 100) {
        let xx = dot(&x, &x);
        if xx <= SEPARATION_TOL * SEPARATION_TOL * scale * 1e-4 {
            return Some(x);
        }
        let (j, xj) = (0..points.len())
            .map(|j| (j, dot(&x, &points[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xx - xj <= 1e-14 * scale || set.contains(&j) {
            return Some(x);
        }
        set.push(j);
        lambda.push(0.0);

        loop {
            let Some(mu) = affine_min_norm(points, &set) else {
                return Some(x);
            };
            if mu.iter().all(|&m| m > 1e-15) {
                lambda = mu;
                x = combine(points, &set, &lambda, p);
                break;
            }
            let theta = lambda
                .iter()
                .zip(&mu)
                .filter(|(_, &m)| m <= 1e-15)
                .map(|(&l, &m)| l / (l - m))
                .fold(1.0, f64::min);
            for (l, m) in lambda.iter_mut().zip(&mu) {
                *l += theta * (m - *l);
            }
            let mut k = 0;
            while k < set.len() {
                if lambda[k] <= 1e-15 {
                    set.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            x = combine(points, &set, &lambda, p);
            if set.len() <= 1 {
                break;
            }
        }
    }
    Some(x)
}

fn combine(points: &[Vec<f64>], set: &[usize], weights: &[f64], p: usize) -> Vec<f64> {
    let mut x = vec![0.0; p];
    for (&i, &w) in set.iter().zip(weights) {
        axpy(w, &points[i], &mut x);
    }
    x
}

/// Minimum-norm point of the affine hull of `set`, as affine weights.
fn affine_min_norm(points: &[Vec<f64>], set: &[usize]) -> Option<Vec<f64>> {
    let k = set.len();
    let mut m = vec![vec![0.0; k + 1]; k + 1];
    for (a, &i) in set.iter().enumerate() {
        for (b, &j) in set.iter().enumerate() {
            m[a][b] = dot(&points[i], &points[j]);
        }
        m[a][k] = 1.0;
        m[k][a] = 1.0;
    }
    let mut rhs = vec![0.0; k + 1];
    rhs[k] = 1.0;
    let sol = linsolve(&m, &rhs)?;
    Some(sol[..k].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_midpoint() {
        let q = min_norm_hull_point(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((q[0] - 0.5).abs() < 1e-15 && (q[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn vertex_when_other_points_far() {
        let q = min_norm_hull_point(&[vec![1.0, 0.0], vec![3.0, 1.0], vec![2.0, -1.0]]).unwrap();
        assert!((q[0] - 1.0).abs() < 1e-14 && q[1].abs() < 1e-14);
    }

    #[test]
    fn origin_inside() {
        let pts = [vec![1.0, 0.0], vec![-0.5, 0.9], vec![-0.5, -0.9]];
        assert!(!separable(&pts));
        assert!(separable(&pts[..2]));
    }
}
