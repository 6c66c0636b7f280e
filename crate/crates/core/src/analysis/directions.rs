//! Empirical versus predicted limit directions of AdaGrad and GD.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxmargin::{solve_hard_margin, solve_weighted_margin, MarginProblem, MarginSolution};
use crate::model::{Dataset, Hyperparams, LossModel};
use crate::optim::{estimate_h_infinity, run, Optimizer, RunOptions, Trajectory};
use crate::vector::{normalize, recip, sqrt};

use super::angle;

/// Pairwise angles (radians) between the four directions of a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleTable {
    pub adagrad_empirical_vs_predicted: f64,
    pub adagrad_empirical_vs_gd_empirical: f64,
    pub adagrad_empirical_vs_svm: f64,
    pub adagrad_predicted_vs_gd_empirical: f64,
    pub adagrad_predicted_vs_svm: f64,
    pub gd_empirical_vs_svm: f64,
}

impl AngleTable {
    fn between(ada_emp: &[f64], ada_pred: &[f64], gd_emp: &[f64], svm: &[f64]) -> Result<Self> {
        Ok(Self {
            adagrad_empirical_vs_predicted: angle(ada_emp, ada_pred)?,
            adagrad_empirical_vs_gd_empirical: angle(ada_emp, gd_emp)?,
            adagrad_empirical_vs_svm: angle(ada_emp, svm)?,
            adagrad_predicted_vs_gd_empirical: angle(ada_pred, gd_emp)?,
            adagrad_predicted_vs_svm: angle(ada_pred, svm)?,
            gd_empirical_vs_svm: angle(gd_emp, svm)?,
        })
    }

    pub fn max(&self) -> f64 {
        [
            self.adagrad_empirical_vs_predicted,
            self.adagrad_empirical_vs_gd_empirical,
            self.adagrad_empirical_vs_svm,
            self.adagrad_predicted_vs_gd_empirical,
            self.adagrad_predicted_vs_svm,
            self.gd_empirical_vs_svm,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub adagrad_dir_empirical: Vec<f64>,
    pub adagrad_dir_predicted: Vec<f64>,
    pub gd_dir_empirical: Vec<f64>,
    pub svm_dir: Vec<f64>,
    pub angles: AngleTable,
    pub h_inf: Vec<f64>,
    pub h_inf_tail_error: f64,
    /// Weighted-margin minimizer `w̃`.
    pub w_tilde: Vec<f64>,
    /// Hard-margin minimizer `ŵ`.
    pub w_hat: Vec<f64>,
}

impl DirectionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// AdaGrad's predicted implicit bias for a given `h∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaGradPrediction {
    /// `argmin ‖h∞^{-1/2} ⊙ w‖²` subject to `⟨w, z_n⟩ ≥ 1`.
    pub w_tilde: Vec<f64>,
    pub direction: Vec<f64>,
    pub solution: MarginSolution,
}

pub fn predict_adagrad(data: &Dataset, h_inf: &[f64]) -> Result<AdaGradPrediction> {
    if h_inf.len() != data.dim() {
        return Err(Error::DimensionMismatch("h∞ does not match dataset dimension".into()));
    }
    if let Some(v) = h_inf.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!("h∞ component {v} is not positive")));
    }
    let weights = recip(&sqrt(h_inf));
    let problem = MarginProblem::weighted(data.signed_features().to_vec(), weights);
    let solution = solve_weighted_margin(&problem)?;
    let direction = unit(&solution.w_star, "w̃")?;
    Ok(AdaGradPrediction {
        w_tilde: solution.w_star.clone(),
        direction,
        solution,
    })
}

fn unit(v: &[f64], what: &str) -> Result<Vec<f64>> {
    normalize(v).ok_or_else(|| Error::InvalidArgument(format!("{what} is the zero vector")))
}

fn final_dir(traj: &Trajectory) -> Result<Vec<f64>> {
    let dir = traj.final_direction().ok_or_else(|| {
        Error::InvalidArgument(format!("{} ended at w = 0", traj.optimizer.name()))
    })?;
    Ok(dir.to_vec())
}

/// Builds a report from finished AdaGrad and GD runs on `data`.
pub fn compare_trajectories(
    adagrad: &Trajectory,
    gd: &Trajectory,
    data: &Dataset,
) -> Result<DirectionReport> {
    if gd.optimizer != Optimizer::GradientDescent {
        return Err(Error::InvalidArgument("second trajectory must be a GD run".into()));
    }
    let est = estimate_h_infinity(adagrad)?;
    let prediction = predict_adagrad(data, &est.h_inf)?;
    let w_hat = solve_hard_margin(&MarginProblem::unweighted(data.signed_features().to_vec()))?.w_star;
    let svm_dir = unit(&w_hat, "ŵ")?;
    let adagrad_dir_empirical = final_dir(adagrad)?;
    let gd_dir_empirical = final_dir(gd)?;
    let angles = AngleTable::between(
        &adagrad_dir_empirical,
        &prediction.direction,
        &gd_dir_empirical,
        &svm_dir,
    )?;
    Ok(DirectionReport {
        adagrad_dir_empirical,
        adagrad_dir_predicted: prediction.direction,
        gd_dir_empirical,
        svm_dir,
        angles,
        h_inf: est.h_inf,
        h_inf_tail_error: est.tail_error,
        w_tilde: prediction.w_tilde,
        w_hat,
    })
}

/// Runs AdaGrad and GD with the same hyperparameters and compares their
/// directions with the two margin problems.
pub fn compare_directions(
    data: &Dataset,
    model: &LossModel,
    hp: &Hyperparams,
    opts: &RunOptions,
) -> Result<DirectionReport> {
    let ada = run(Optimizer::AdaGrad, model, data, hp, opts)?;
    let gd = run(Optimizer::GradientDescent, model, data, hp, opts)?;
    compare_trajectories(&ada, &gd, data)
}
