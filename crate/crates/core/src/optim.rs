//! Gradient descent and diagonal AdaGrad on `L(w) = Σ l(⟨w, z_n⟩)`.
//!
//! AdaGrad:
//!
//! ```text
//! S_i(t) = g_i(0)² + … + g_i(t)²
//! h_i(t) = 1 / sqrt(S_i(t) + ε)
//! w(t+1) = w(t) − η h(t) ⊙ g(t)
//! ```
//!
//! The accumulator includes the current gradient before `h(t)` is formed.
//! Gradient descent uses `h ≡ 1` but still accumulates `S` so both engines
//! produce the same diagnostics.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, check_assumptions, fmt_f64, Dataset, Hyperparams, LossModel};
use crate::vector::{all_finite, dot, hadamard, normalize, norm, recip, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Optimizer {
    #[serde(rename = "adagrad")]
    AdaGrad,
    #[serde(rename = "gd")]
    GradientDescent,
}

impl Optimizer {
    pub fn name(&self) -> &'static str {
        match self {
            Optimizer::AdaGrad => "adagrad",
            Optimizer::GradientDescent => "gd",
        }
    }
}

impl std::str::FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adagrad" => Ok(Optimizer::AdaGrad),
            "gd" => Ok(Optimizer::GradientDescent),
            other => Err(Error::InvalidArgument(format!("unknown optimizer {other:?}"))),
        }
    }
}

/// Iterate `w(t)`, its gradient `g(t)` and the squared-gradient accumulator `S(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub t: u64,
    pub w: Vec<f64>,
    pub s: Vec<f64>,
    pub g: Vec<f64>,
}

impl OptimizerState {
    /// State at `t = 0`: `g(0) = ∇L(w0)` and `S(0) = g(0)²`.
    pub fn initial(model: &LossModel, data: &Dataset, w0: &[f64]) -> Result<Self> {
        let g = model::loss_gradient(model, data, w0)?;
        let s = hadamard(&g, &g);
        Ok(Self {
            t: 0,
            w: w0.to_vec(),
            s,
            g,
        })
    }

    /// AdaGrad preconditioner `h_i = 1 / sqrt(S_i + ε)`.
    pub fn preconditioner(&self, epsilon: f64) -> Vec<f64> {
        self.s.iter().map(|s| 1.0 / (s + epsilon).sqrt()).collect()
    }

    pub fn grad_norm(&self) -> f64 {
        norm(&self.g)
    }
}

/// Reusable buffers so long runs do not allocate per step.
struct Stepper<'a> {
    model: &'a LossModel,
    data: &'a Dataset,
    eta: f64,
    epsilon: f64,
    optimizer: Optimizer,
    w_next: Vec<f64>,
    g_next: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(optimizer: Optimizer, model: &'a LossModel, data: &'a Dataset, hp: &Hyperparams) -> Self {
        let p = data.dim();
        Self {
            model,
            data,
            eta: hp.eta,
            epsilon: hp.epsilon,
            optimizer,
            w_next: vec![0.0; p],
            g_next: vec![0.0; p],
        }
    }

    /// Advances `state` by one step; leaves it untouched on overflow.
    fn advance(&mut self, state: &mut OptimizerState) -> Result<()> {
        for i in 0..state.w.len() {
            let h = match self.optimizer {
                Optimizer::AdaGrad => 1.0 / (state.s[i] + self.epsilon).sqrt(),
                Optimizer::GradientDescent => 1.0,
            };
            self.w_next[i] = state.w[i] - self.eta * h * state.g[i];
        }
        model::gradient_into(self.model, self.data, &self.w_next, &mut self.g_next);
        if !all_finite(&self.w_next) || !all_finite(&self.g_next) {
            return Err(Error::Overflow {
                step: state.t + 1,
                last_state: Box::new(state.clone()),
            });
        }
        std::mem::swap(&mut state.w, &mut self.w_next);
        std::mem::swap(&mut state.g, &mut self.g_next);
        for (s, g) in state.s.iter_mut().zip(&state.g) {
            *s += g * g;
        }
        state.t += 1;
        Ok(())
    }
}

fn step(
    optimizer: Optimizer,
    state: &OptimizerState,
    model: &LossModel,
    data: &Dataset,
    hp: &Hyperparams,
) -> Result<OptimizerState> {
    if state.w.len() != data.dim() || state.g.len() != data.dim() || state.s.len() != data.dim() {
        return Err(Error::DimensionMismatch("state does not match dataset dimension".into()));
    }
    let mut next = state.clone();
    Stepper::new(optimizer, model, data, hp).advance(&mut next)?;
    Ok(next)
}

/// One AdaGrad step `w' = w − η h ⊙ g`, then `g' = ∇L(w')`, `S' = S + g'²`.
pub fn adagrad_step(
    state: &OptimizerState,
    model: &LossModel,
    data: &Dataset,
    hp: &Hyperparams,
) -> Result<OptimizerState> {
    step(Optimizer::AdaGrad, state, model, data, hp)
}

/// One gradient-descent step `w' = w − η g`.
pub fn gd_step(
    state: &OptimizerState,
    model: &LossModel,
    data: &Dataset,
    hp: &Hyperparams,
) -> Result<OptimizerState> {
    step(Optimizer::GradientDescent, state, model, data, hp)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: u64,
    pub w: Vec<f64>,
    pub g: Vec<f64>,
    pub s: Vec<f64>,
    /// Preconditioner applied at this step (all ones for GD).
    pub h: Vec<f64>,
    pub loss: f64,
    /// `w / ‖w‖`, undefined at `w = 0`.
    pub direction: Option<Vec<f64>>,
}

impl Record {
    pub fn grad_norm(&self) -> f64 {
        norm(&self.g)
    }

    /// `Σ_{τ ≤ t} ‖g(τ)‖²`.
    pub fn grad_sq_sum(&self) -> f64 {
        self.s.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIters,
    GradTol,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Record step 0, every `thinning`-th step, and the final step.
    pub thinning: u64,
    /// Run even when the separability / step-size / ε checks fail.
    pub override_assumptions: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            thinning: 100,
            override_assumptions: false,
        }
    }
}

impl RunOptions {
    pub fn with_thinning(mut self, thinning: u64) -> Self {
        self.thinning = thinning;
        self
    }

    pub fn overriding(mut self) -> Self {
        self.override_assumptions = true;
        self
    }
}

/// Thinned record of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub optimizer: Optimizer,
    pub eta: f64,
    pub epsilon: f64,
    pub thinning: u64,
    pub records: Vec<Record>,
    pub terminal_state: OptimizerState,
    pub stop_reason: StopReason,
    pub assumptions_overridden: bool,
}

impl Trajectory {
    pub fn last(&self) -> &Record {
        self.records.last().expect("trajectory always holds the t = 0 record")
    }

    pub fn final_t(&self) -> u64 {
        self.terminal_state.t
    }

    /// Recorded step closest to `t` (earlier one on ties).
    pub fn nearest(&self, t: f64) -> &Record {
        self.records
            .iter()
            .min_by(|a, b| (a.t as f64 - t).abs().total_cmp(&(b.t as f64 - t).abs()))
            .unwrap()
    }

    /// Recorded step nearest the middle of the run.
    pub fn midpoint(&self) -> &Record {
        self.nearest(self.final_t() as f64 / 2.0)
    }

    pub fn final_direction(&self) -> Option<&[f64]> {
        self.last().direction.as_deref()
    }

    /// CSV with columns `t, loss, grad_norm, w_1..w_p, h_1..h_p, dir_1..dir_p`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let p = self.terminal_state.w.len();
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string(), "loss".into(), "grad_norm".into()];
        for prefix in ["w", "h", "dir"] {
            header.extend((1..=p).map(|i| format!("{prefix}_{i}")));
        }
        wtr.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.t.to_string(), fmt_f64(r.loss), fmt_f64(r.grad_norm())];
            row.extend(r.w.iter().map(|v| fmt_f64(*v)));
            row.extend(r.h.iter().map(|v| fmt_f64(*v)));
            match &r.direction {
                Some(d) => row.extend(d.iter().map(|v| fmt_f64(*v))),
                None => row.extend(std::iter::repeat_n("NaN".to_string(), p)),
            }
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn make_record(
    optimizer: Optimizer,
    state: &OptimizerState,
    model: &LossModel,
    data: &Dataset,
    epsilon: f64,
) -> Record {
    let h = match optimizer {
        Optimizer::AdaGrad => state.preconditioner(epsilon),
        Optimizer::GradientDescent => vec![1.0; state.w.len()],
    };
    Record {
        t: state.t,
        w: state.w.clone(),
        g: state.g.clone(),
        s: state.s.clone(),
        h,
        loss: model::loss_value_unchecked(model, data, &state.w),
        direction: normalize(&state.w),
    }
}

/// Iterates until `t = max_iters` or `‖g(t)‖ < grad_tol`.
pub fn run(
    optimizer: Optimizer,
    model: &LossModel,
    data: &Dataset,
    hp: &Hyperparams,
    opts: &RunOptions,
) -> Result<Trajectory> {
    hp.validate()?;
    if opts.thinning == 0 {
        return Err(Error::InvalidArgument("thinning stride must be positive".into()));
    }
    if hp.w0.len() != data.dim() {
        return Err(Error::DimensionMismatch(format!(
            "w0 has length {}, dataset dimension is {}",
            hp.w0.len(),
            data.dim()
        )));
    }
    let mut state = OptimizerState::initial(model, data, &hp.w0)?;
    if optimizer == Optimizer::AdaGrad && hp.epsilon == 0.0 && state.g.contains(&0.0) {
        return Err(Error::InvalidArgument(
            "epsilon = 0 requires every initial gradient coordinate to be nonzero".into(),
        ));
    }
    if !opts.override_assumptions {
        let report = check_assumptions(model, data, hp)?;
        // ε only matters for AdaGrad; the step bound is the one from the AdaGrad analysis.
        let failures: Vec<String> = report
            .failures()
            .into_iter()
            .filter(|f| optimizer == Optimizer::AdaGrad || !f.starts_with("epsilon"))
            .collect();
        if !failures.is_empty() {
            return Err(Error::AssumptionViolated(failures.join("; ")));
        }
    }

    let mut records = vec![make_record(optimizer, &state, model, data, hp.epsilon)];
    let mut stepper = Stepper::new(optimizer, model, data, hp);
    let grad_tol_sq = hp.grad_tol * hp.grad_tol;
    let stop_reason = loop {
        if state.t >= hp.max_iters {
            break StopReason::MaxIters;
        }
        if dot(&state.g, &state.g) < grad_tol_sq {
            break StopReason::GradTol;
        }
        stepper.advance(&mut state)?;
        if state.t % opts.thinning == 0 {
            records.push(make_record(optimizer, &state, model, data, hp.epsilon));
        }
    };
    if records.last().map(|r| r.t) != Some(state.t) {
        records.push(make_record(optimizer, &state, model, data, hp.epsilon));
    }
    Ok(Trajectory {
        optimizer,
        eta: hp.eta,
        epsilon: hp.epsilon,
        thinning: opts.thinning,
        records,
        terminal_state: state,
        stop_reason,
        assumptions_overridden: opts.override_assumptions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HInfinityEstimate {
    /// `1 / sqrt(S_i(T) + ε)` at the terminal step.
    pub h_inf: Vec<f64>,
    /// `max_i (h_i(T/2) − h_i(T)) / h_i(T)` using the recorded step nearest `T/2`.
    pub tail_error: f64,
}

/// Estimates the limit of AdaGrad's preconditioner from a finished run.
pub fn estimate_h_infinity(traj: &Trajectory) -> Result<HInfinityEstimate> {
    if traj.optimizer != Optimizer::AdaGrad {
        return Err(Error::InvalidArgument(
            "h∞ can only be estimated from an AdaGrad trajectory".into(),
        ));
    }
    let h_inf = traj.terminal_state.preconditioner(traj.epsilon);
    let mid = &traj.midpoint().h;
    let tail_error = mid
        .iter()
        .zip(&h_inf)
        .map(|(m, h)| (m - h) / h)
        .fold(0.0, f64::max);
    Ok(HInfinityEstimate { h_inf, tail_error })
}

/// Quantities of the induced form `v(t+1) = v(t) − η β(t) ⊙ ∇L_ind(v(t))`,
/// where `ξ_n = √h∞ ⊙ z_n`, `v = h∞^{-1/2} ⊙ w`, `L_ind(v) = Σ l(⟨v, ξ_n⟩)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InducedQuantities {
    pub t: u64,
    pub h_inf: Vec<f64>,
    pub xi: Vec<Vec<f64>>,
    pub v: Vec<f64>,
    /// `β(t) = h(t) ⊘ h∞`.
    pub beta_t: Vec<f64>,
    /// `δ(t) = −η ∇L_ind(v(t))`.
    pub delta: Vec<f64>,
    /// `d(t) = β(t) ⊙ δ(t)`.
    pub d: Vec<f64>,
    pub induced_loss: f64,
}

/// Induced-form quantities for an AdaGrad state (`h(t)` from `S(t)` and `ε`).
pub fn induced_quantities(
    state: &OptimizerState,
    h_inf: &[f64],
    model: &LossModel,
    data: &Dataset,
    hp: &Hyperparams,
) -> Result<InducedQuantities> {
    let h = state.preconditioner(hp.epsilon);
    induced_from_parts(state.t, &state.w, &h, h_inf, model, data, hp.eta)
}

/// Induced-form quantities at every recorded step, using each record's own
/// preconditioner (so GD trajectories give `β(t) = 1 ⊘ h∞`).
pub fn induced_sequence(
    traj: &Trajectory,
    h_inf: &[f64],
    model: &LossModel,
    data: &Dataset,
) -> Result<Vec<InducedQuantities>> {
    traj.records
        .iter()
        .map(|r| induced_from_parts(r.t, &r.w, &r.h, h_inf, model, data, traj.eta))
        .collect()
}

fn induced_from_parts(
    t: u64,
    w: &[f64],
    h: &[f64],
    h_inf: &[f64],
    model: &LossModel,
    data: &Dataset,
    eta: f64,
) -> Result<InducedQuantities> {
    if h_inf.len() != data.dim() || w.len() != data.dim() {
        return Err(Error::DimensionMismatch("h∞ or w does not match dataset dimension".into()));
    }
    if let Some(v) = h_inf.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!("h∞ component {v} is not positive")));
    }
    let root = sqrt(h_inf);
    let xi: Vec<Vec<f64>> = data.signed_features().iter().map(|z| hadamard(&root, z)).collect();
    let v = hadamard(&recip(&root), w);
    let beta_t: Vec<f64> = h.iter().zip(h_inf).map(|(a, b)| a / b).collect();
    let mut grad = vec![0.0; w.len()];
    let mut induced_loss = 0.0;
    for x in &xi {
        let m = dot(&v, x);
        induced_loss += model.value(m);
        crate::vector::axpy(model.derivative(m), x, &mut grad);
    }
    let delta: Vec<f64> = grad.iter().map(|g| -eta * g).collect();
    let d = hadamard(&beta_t, &delta);
    Ok(InducedQuantities {
        t,
        h_inf: h_inf.to_vec(),
        xi,
        v,
        beta_t,
        delta,
        d,
        induced_loss,
    })
}
