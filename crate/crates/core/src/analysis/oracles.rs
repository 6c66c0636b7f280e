//! Closed forms and datasets for the planar two-point examples.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Dataset;
use crate::vector::normalize;

/// Which quadrant `x₁ = (cos θ, sin θ)` lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MirroredPairBranch {
    /// `θ ∈ (0, π/2)`
    Acute,
    /// `θ ∈ (π/2, π)`: the mirrored case.
    Obtuse,
}

impl MirroredPairBranch {
    pub fn of(theta: f64) -> Option<Self> {
        if theta > 0.0 && theta < FRAC_PI_2 {
            Some(Self::Acute)
        } else if theta > FRAC_PI_2 && theta < PI {
            Some(Self::Obtuse)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirroredPairDirections {
    pub gd_dir: Vec<f64>,
    pub adagrad_dir: Vec<f64>,
    pub h_inf_dir: Vec<f64>,
}

/// Limit directions for the single-direction example `x₁ = (cos θ, sin θ)`,
/// `x₂ = −x₁`, `y = (1, −1)`.
///
/// GD goes to `x₁`; AdaGrad goes to `(±√2/2, √2/2)` whatever `θ` is, since
/// `h∞ ∝ (1/|cos θ|, 1/sin θ)`. `θ` must lie strictly inside the interval
/// selected by `branch`.
pub fn mirrored_pair_oracle(theta: f64, branch: MirroredPairBranch) -> Result<MirroredPairDirections> {
    if MirroredPairBranch::of(theta) != Some(branch) {
        let range = match branch {
            MirroredPairBranch::Acute => "(0, π/2)",
            MirroredPairBranch::Obtuse => "(π/2, π)",
        };
        return Err(Error::InvalidArgument(format!("θ = {theta} is outside {range}")));
    }
    let (s, c) = theta.sin_cos();
    let sign = c.signum();
    let h = normalize(&[1.0 / c.abs(), 1.0 / s]).expect("nonzero");
    Ok(MirroredPairDirections {
        gd_dir: vec![c, s],
        adagrad_dir: vec![sign * FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        h_inf_dir: h,
    })
}

/// Corner `(α*, β*)` where both constraints `⟨w, x_i⟩ = 1` of the two-point
/// example are tight, `x_i = r_i (cos θ_i, sin θ_i)`.
///
/// Requires `r1, r2 > 0`, `π/2 ≤ θ1 < π` and `θ1 − π < θ2 ≤ 0`.
pub fn two_point_corner(r1: f64, r2: f64, theta1: f64, theta2: f64) -> Result<(f64, f64)> {
    if !(r1 > 0.0 && r2 > 0.0 && r1.is_finite() && r2.is_finite()) {
        return Err(Error::InvalidArgument(format!("radii must be positive, got {r1}, {r2}")));
    }
    if !(FRAC_PI_2..PI).contains(&theta1) {
        return Err(Error::InvalidArgument(format!("θ1 = {theta1} is outside [π/2, π)")));
    }
    if !(theta2 > theta1 - PI && theta2 <= 0.0) {
        return Err(Error::InvalidArgument(format!("θ2 = {theta2} is outside (θ1 − π, 0]")));
    }
    let det = (theta1 - theta2).sin();
    if det == 0.0 {
        return Err(Error::InvalidArgument("sin(θ1 − θ2) = 0".into()));
    }
    let alpha = (theta1.sin() / r2 - theta2.sin() / r1) / det;
    let beta = (theta2.cos() / r1 - theta1.cos() / r2) / det;
    Ok((alpha, beta))
}

pub fn mirrored_pair_dataset(theta: f64) -> Result<Dataset> {
    let (s, c) = theta.sin_cos();
    Dataset::new(vec![vec![c, s], vec![-c, -s]], vec![1.0, -1.0])
}

pub fn two_point_dataset(r1: f64, r2: f64, theta1: f64, theta2: f64) -> Result<Dataset> {
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    Dataset::new(vec![vec![r1 * c1, r1 * s1], vec![r2 * c2, r2 * s2]], vec![1.0, 1.0])
}

/// Two unit points at angles `3π/8` and `9π/20`, both labelled `+1`.
pub fn acute_pair_dataset() -> Dataset {
    two_point_dataset(1.0, 1.0, 3.0 * PI / 8.0, 9.0 * PI / 20.0).expect("valid points")
}

/// Unit points at `5π/8` and `−π/8`, both labelled `+1`.
pub fn obtuse_pair_dataset() -> Dataset {
    two_point_dataset(1.0, 1.0, 5.0 * PI / 8.0, -PI / 8.0).expect("valid points")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::dot;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn mirrored_pair_closed_forms() {
        let d = mirrored_pair_oracle(FRAC_PI_4, MirroredPairBranch::Acute).unwrap();
        assert_abs_diff_eq!(d.gd_dir[0], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(d.gd_dir[1], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(d.adagrad_dir, vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]);

        let d = mirrored_pair_oracle(FRAC_PI_3, MirroredPairBranch::Acute).unwrap();
        assert_abs_diff_eq!(d.gd_dir[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.gd_dir[1], 3f64.sqrt() / 2.0, epsilon = 1e-15);
        // h∞ ∝ (2, 2/√3)
        assert_abs_diff_eq!(d.h_inf_dir[0] / d.h_inf_dir[1], 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn mirrored_pair_branches() {
        assert!(mirrored_pair_oracle(2.0, MirroredPairBranch::Acute).is_err());
        assert!(mirrored_pair_oracle(0.0, MirroredPairBranch::Acute).is_err());
        assert!(mirrored_pair_oracle(FRAC_PI_2, MirroredPairBranch::Obtuse).is_err());
        let d = mirrored_pair_oracle(2.0, MirroredPairBranch::Obtuse).unwrap();
        assert_eq!(d.adagrad_dir, vec![-FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert!(d.h_inf_dir.iter().all(|&h| h > 0.0));
    }

    #[test]
    fn two_point_closed_forms() {
        let (a, b) = two_point_corner(1.0, 1.0, FRAC_PI_2, 0.0).unwrap();
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-15);

        let (a, b) = two_point_corner(1.0, 1.0, 5.0 * PI / 8.0, -PI / 8.0).unwrap();
        assert!(a > 0.0 && b > 0.0);
        // symmetric configuration: α* = β* = 1/(cos(π/8) − sin(π/8))
        let expected = 1.0 / ((PI / 8.0).cos() - (PI / 8.0).sin());
        assert_abs_diff_eq!(a, expected, epsilon = 1e-13);
        assert_abs_diff_eq!(b, expected, epsilon = 1e-13);
        assert_abs_diff_eq!(a, 1.8477590650225735, epsilon = 1e-13);

        let (a2, b2) = two_point_corner(2.0, 2.0, 5.0 * PI / 8.0, -PI / 8.0).unwrap();
        assert_abs_diff_eq!(a2, a / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b2, b / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn two_point_corner_is_tight() {
        for &(r1, r2, t1, t2) in &[(1.0, 1.0, 2.0, -0.4), (0.5, 3.0, 1.6, -1.2), (2.0, 0.7, 3.0, 0.0)] {
            let (a, b) = two_point_corner(r1, r2, t1, t2).unwrap();
            let data = two_point_dataset(r1, r2, t1, t2).unwrap();
            for z in data.signed_features() {
                assert_abs_diff_eq!(dot(z, &[a, b]), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn two_point_range_errors() {
        assert!(two_point_corner(0.0, 1.0, 2.0, -0.1).is_err());
        assert!(two_point_corner(1.0, 1.0, 1.0, -0.1).is_err());
        assert!(two_point_corner(1.0, 1.0, PI, -0.1).is_err());
        assert!(two_point_corner(1.0, 1.0, 2.0, 0.1).is_err());
        assert!(two_point_corner(1.0, 1.0, 2.0, 2.0 - PI).is_err());
    }
}
