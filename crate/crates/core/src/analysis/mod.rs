//! Direction diagnostics, property checkers for AdaGrad runs, closed-form
//! oracles for the planar examples, and the corner-cone test.

mod checks;
mod corner;
mod directions;
mod oracles;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{dot, norm, scale, sub};

pub use checks::{
    check_descent, check_divergence_and_margins, check_preconditioner_convergence,
    check_projection_bounds, check_summability, CHECK_NAMES,
};
pub use corner::{corner_condition, CornerCertificate, SignPatternCheck, CORNER_PROBE_COUNT, CORNER_PROBE_SEED};
pub use directions::{
    compare_directions, compare_trajectories, predict_adagrad, AdaGradPrediction, AngleTable,
    DirectionReport,
};
pub use oracles::{
    mirrored_pair_dataset, mirrored_pair_oracle, two_point_dataset, two_point_corner, acute_pair_dataset,
    obtuse_pair_dataset, MirroredPairBranch, MirroredPairDirections,
};

/// Angle in radians between two nonzero vectors: `arccos⟨u/‖u‖, v/‖v‖⟩`,
/// evaluated as `2 atan2(‖û − v̂‖, ‖û + v̂‖)`, which keeps full precision for
/// nearly parallel inputs where `acos` loses about half the digits.
pub fn angle(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch("angle between vectors of different length".into()));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::InvalidArgument("angle with a zero vector".into()));
    }
    let (a, b) = (scale(u, 1.0 / nu), scale(v, 1.0 / nv));
    let diff = norm(&sub(&a, &b));
    let sum = norm(&crate::vector::add(&a, &b));
    Ok((2.0 * diff.atan2(sum)).clamp(0.0, std::f64::consts::PI))
}

/// Orthogonal split of `v` into its component along a unit reference `û`
/// (`Pv = ⟨v, û⟩ û`) and the remainder `Qv = v − Pv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSplit {
    pub reference: Vec<f64>,
    pub p_component: Vec<f64>,
    pub q_component: Vec<f64>,
    /// Signed coordinate `⟨v, û⟩`; `|p_scalar| = ‖Pv‖`.
    pub p_scalar: f64,
    pub p_norm: f64,
    pub q_norm: f64,
}

pub fn projection_split(v: &[f64], u_hat: &[f64]) -> Result<ProjectionSplit> {
    if v.len() != u_hat.len() {
        return Err(Error::DimensionMismatch("projection reference has wrong length".into()));
    }
    if (norm(u_hat) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "projection reference must be a unit vector (norm {})",
            norm(u_hat)
        )));
    }
    let p_scalar = dot(v, u_hat);
    let p_component = scale(u_hat, p_scalar);
    let q_component = sub(v, &p_component);
    Ok(ProjectionSplit {
        reference: u_hat.to_vec(),
        p_norm: p_scalar.abs(),
        q_norm: norm(&q_component),
        p_component,
        q_component,
        p_scalar,
    })
}

/// Result of one property check over a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub holds: bool,
    /// First recorded step from which the property holds through the end.
    pub onset_step: Option<u64>,
    /// Largest violation amount seen (0 when none).
    pub worst_violation: f64,
    pub details: BTreeMap<String, f64>,
}

impl CheckOutcome {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            holds: false,
            onset_step: None,
            worst_violation: 0.0,
            details: BTreeMap::new(),
        }
    }

    pub fn detail(&mut self, key: &str, value: f64) {
        self.details.insert(key.to_string(), value);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    #[test]
    fn angles() {
        assert_eq!(angle(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!((angle(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let a = angle(&[FRAC_PI_4.cos(), FRAC_PI_4.sin()], &[FRAC_PI_3.cos(), FRAC_PI_3.sin()]).unwrap();
        assert!((a - PI / 12.0).abs() < 1e-12);
        assert!((a - 0.261_799).abs() < 1e-6);
        assert!(angle(&[0.0, 0.0], &[1.0, 0.0]).is_err());
        let v = [0.1, 0.7, 0.3];
        assert!(angle(&v, &scale(&v, 3.0)).unwrap() < 1e-15);
        assert!((angle(&v, &scale(&v, -2.0)).unwrap() - PI).abs() < 1e-15);
        // resolves angles far below sqrt(machine epsilon)
        let tiny: f64 = 1e-12;
        let a = angle(&[1.0, 0.0], &[tiny.cos(), tiny.sin()]).unwrap();
        assert!((a - tiny).abs() < 1e-20);
    }

    #[test]
    fn splits() {
        let s = projection_split(&[3.0, 4.0], &[1.0, 0.0]).unwrap();
        assert_eq!(s.p_component, vec![3.0, 0.0]);
        assert_eq!(s.q_component, vec![0.0, 4.0]);
        assert_eq!((s.p_norm, s.q_norm), (3.0, 4.0));

        let u = [0.6, 0.8];
        let s = projection_split(&u, &u).unwrap();
        assert!(s.q_norm < 1e-15);
        let s = projection_split(&[-0.8, 0.6], &u).unwrap();
        assert!(s.p_norm < 1e-15);

        assert!(projection_split(&[1.0, 1.0], &[1.0, 1.0]).is_err());
    }
}
