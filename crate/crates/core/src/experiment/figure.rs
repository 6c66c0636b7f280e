//! Plot-ready geometry for planar instances: the feasible region, the
//! tangent ellipse of the weighted objective, and the limit directions.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxmargin::{solve_hard_margin, MarginProblem};
use crate::model::Dataset;
use crate::vector::{dot, norm, normalize};

use crate::analysis::predict_adagrad;

/// Number of segments in the ellipse polyline.
pub const ELLIPSE_SEGMENTS: usize = 360;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    /// Closed polygon: the feasible set clipped to a box around the origin.
    pub region: Vec<[f64; 2]>,
    /// `‖b ⊙ w‖² = ‖b ⊙ w̃‖²` with `b = h∞^{-1/2}`, closed.
    pub ellipse: Vec<[f64; 2]>,
    /// Unit arrows for every `z_n`, for `ŵ` ("svm") and `w̃` ("adagrad").
    pub arrows: Vec<Arrow>,
    /// `w̃`, where the ellipse touches the feasible set.
    pub tangency: [f64; 2],
    pub w_hat: [f64; 2],
    pub h_inf: [f64; 2],
}

/// Geometry of a two-dimensional instance for a given `h∞`.
pub fn planar_figure(data: &Dataset, h_inf: &[f64]) -> Result<FigureData> {
    if data.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "figure data needs p = 2, got p = {}",
            data.dim()
        )));
    }
    let z = data.signed_features();
    let pred = predict_adagrad(data, h_inf)?;
    let w_hat = solve_hard_margin(&MarginProblem::unweighted(z.to_vec()))?.w_star;
    let w_tilde = pred.w_tilde;

    let reach = 2.0 * norm(&w_hat).max(norm(&w_tilde)).max(1.0);
    let mut region = vec![[-reach, -reach], [reach, -reach], [reach, reach], [-reach, reach]];
    for c in z {
        region = clip(&region, c);
    }
    if let Some(first) = region.first().copied() {
        region.push(first);
    }

    let b = [1.0 / h_inf[0].sqrt(), 1.0 / h_inf[1].sqrt()];
    let r = (b[0] * w_tilde[0]).hypot(b[1] * w_tilde[1]);
    let ellipse = (0..=ELLIPSE_SEGMENTS)
        .map(|k| {
            let phi = TAU * k as f64 / ELLIPSE_SEGMENTS as f64;
            [r * phi.cos() / b[0], r * phi.sin() / b[1]]
        })
        .collect();

    let mut arrows: Vec<Arrow> = z
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let u = normalize(c).expect("constraints are nonzero");
            Arrow {
                name: format!("x{}", n + 1),
                x: u[0],
                y: u[1],
            }
        })
        .collect();
    for (name, v) in [("svm", &w_hat), ("adagrad", &w_tilde)] {
        let u = normalize(v).expect("margin solutions are nonzero");
        arrows.push(Arrow {
            name: name.into(),
            x: u[0],
            y: u[1],
        });
    }
    Ok(FigureData {
        region,
        ellipse,
        arrows,
        tangency: [w_tilde[0], w_tilde[1]],
        w_hat: [w_hat[0], w_hat[1]],
        h_inf: [h_inf[0], h_inf[1]],
    })
}

/// Sutherland-Hodgman step: keep the part of `poly` with `⟨w, c⟩ ≥ 1`.
fn clip(poly: &[[f64; 2]], c: &[f64]) -> Vec<[f64; 2]> {
    let f = |p: &[f64; 2]| dot(p, c) - 1.0;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (i, cur) in poly.iter().enumerate() {
        let prev = &poly[(i + poly.len() - 1) % poly.len()];
        let (fc, fp) = (f(cur), f(prev));
        if (fc >= 0.0) != (fp >= 0.0) {
            let t = fp / (fp - fc);
            out.push([prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])]);
        }
        if fc >= 0.0 {
            out.push(*cur);
        }
    }
    out
}
