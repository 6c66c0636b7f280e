//! Separable binary classification data, loss functions and the standing
//! assumptions (separability, step-size bound) of the AdaGrad analysis.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxmargin;
use crate::vector::{dot, norm};

/// Training data with labels folded into signed features `z_n = y_n x_n`.
///
/// All downstream constraints are written as `⟨w, z_n⟩ ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
    signed: Vec<Vec<f64>>,
}

impl Dataset {
    /// Validates and builds a dataset from `N` feature rows and `±1` labels.
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::DimensionMismatch("dataset has no rows".into()));
        }
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let p = features[0].len();
        if p == 0 {
            return Err(Error::DimensionMismatch("feature dimension is zero".into()));
        }
        for (n, row) in features.iter().enumerate() {
            if row.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "row {n} has {} features, expected {p}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("feature {v} in row {n}")));
            }
        }
        for (row, &y) in labels.iter().enumerate() {
            if y != 1.0 && y != -1.0 {
                return Err(Error::InvalidLabel { row, value: y });
            }
        }
        let signed = features
            .iter()
            .zip(&labels)
            .map(|(x, &y)| x.iter().map(|v| y * v).collect())
            .collect();
        Ok(Self {
            features,
            labels,
            signed,
        })
    }

    /// Dataset whose points are already label-folded (all labels `+1`).
    pub fn from_signed(points: Vec<Vec<f64>>) -> Result<Self> {
        let labels = vec![1.0; points.len()];
        Self::new(points, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn signed_features(&self) -> &[Vec<f64>] {
        &self.signed
    }

    /// Margins `⟨w, z_n⟩` for every sample.
    pub fn margins(&self, w: &[f64]) -> Vec<f64> {
        self.signed.iter().map(|z| dot(w, z)).collect()
    }

    fn check_dim(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector has length {}, dataset dimension is {}",
                w.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Reads CSV with header `x1,...,xp,y`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let p = headers.len().checked_sub(1).filter(|&p| p > 0).ok_or_else(|| {
            Error::DimensionMismatch("CSV needs at least one feature column and y".into())
        })?;
        for (i, h) in headers.iter().enumerate() {
            let expected = if i < p { format!("x{}", i + 1) } else { "y".to_string() };
            if h != expected {
                return Err(Error::DimensionMismatch(format!(
                    "CSV header column {} is {h:?}, expected {expected:?}",
                    i + 1
                )));
            }
        }
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let mut row = Vec::with_capacity(p);
            for field in rec.iter() {
                let v: f64 = field.parse().map_err(|_| {
                    Error::InvalidArgument(format!("cannot parse {field:?} as a number"))
                })?;
                row.push(v);
            }
            let y = row.pop().ok_or_else(|| Error::DimensionMismatch("empty CSV row".into()))?;
            features.push(row);
            labels.push(y);
        }
        Self::new(features, labels)
    }

    /// Writes CSV with header `x1,...,xp,y`; floats use the shortest
    /// representation that parses back to the same value.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=self.dim()).map(|i| format!("x{i}")).collect();
        header.push("y".into());
        wtr.write_record(&header)?;
        for (x, y) in self.features.iter().zip(&self.labels) {
            let mut row: Vec<String> = x.iter().map(|v| fmt_f64(*v)).collect();
            row.push(fmt_f64(*y));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Shortest round-trip decimal form of a float.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    /// `l(u) = e^{-u}`
    Exponential,
    /// `l(u) = log(1 + e^{-u})`
    Logistic,
}

/// A scalar margin loss with its exponential-tail constants `(a, b, c, d)`:
/// `|l'(u) + c e^{-a u}| ≤ e^{-(a+b) u}` for `u > d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel {
    pub kind: LossKind,
    pub tail_a: f64,
    pub tail_b: f64,
    pub tail_c: f64,
    pub tail_d: f64,
}

impl LossModel {
    pub fn new(kind: LossKind) -> Self {
        match kind {
            LossKind::Exponential => Self::exponential(),
            LossKind::Logistic => Self::logistic(),
        }
    }

    /// The residual `l'(u) + e^{-u}` vanishes identically. Assumption 3 asks
    /// for a positive `d`, but any `d ≥ 0` works here.
    pub fn exponential() -> Self {
        Self {
            kind: LossKind::Exponential,
            tail_a: 1.0,
            tail_b: 1.0,
            tail_c: 1.0,
            tail_d: 0.0,
        }
    }

    /// `l'(u) + e^{-u} = e^{-2u} / (1 + e^{-u}) ≤ e^{-2u}`.
    pub fn logistic() -> Self {
        Self {
            kind: LossKind::Logistic,
            tail_a: 1.0,
            tail_b: 1.0,
            tail_c: 1.0,
            tail_d: 1.0,
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        match self.kind {
            LossKind::Exponential => (-u).exp(),
            LossKind::Logistic => {
                if u > 0.0 {
                    (-u).exp().ln_1p()
                } else {
                    -u + u.exp().ln_1p()
                }
            }
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match self.kind {
            LossKind::Exponential => -(-u).exp(),
            LossKind::Logistic => {
                if u > 0.0 {
                    let e = (-u).exp();
                    -e / (1.0 + e)
                } else {
                    -1.0 / (1.0 + u.exp())
                }
            }
        }
    }

    pub fn second_derivative(&self, u: f64) -> f64 {
        match self.kind {
            LossKind::Exponential => (-u).exp(),
            LossKind::Logistic => {
                let e = (-u.abs()).exp();
                e / ((1.0 + e) * (1.0 + e))
            }
        }
    }

    /// `|l'(u) + c e^{-a u}|`.
    pub fn tail_residual(&self, u: f64) -> f64 {
        match self.kind {
            LossKind::Exponential => (self.derivative(u) + self.tail_c * (-self.tail_a * u).exp()).abs(),
            // Closed form avoids the cancellation in l'(u) + e^{-u} for large u.
            LossKind::Logistic => {
                (-2.0 * u).exp() / (1.0 + (-u).exp())
            }
        }
    }

    /// `e^{-(a+b) u}`, the allowed size of [`tail_residual`](Self::tail_residual).
    pub fn tail_bound(&self, u: f64) -> f64 {
        (-(self.tail_a + self.tail_b) * u).exp()
    }
}

/// `η`, `ε`, `w(0)` and the stopping rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub eta: f64,
    pub epsilon: f64,
    pub w0: Vec<f64>,
    #[serde(default = "Hyperparams::default_max_iters")]
    pub max_iters: u64,
    #[serde(default = "Hyperparams::default_grad_tol")]
    pub grad_tol: f64,
}

impl Hyperparams {
    pub const DEFAULT_MAX_ITERS: u64 = 1_000_000;
    pub const DEFAULT_GRAD_TOL: f64 = 1e-12;

    fn default_max_iters() -> u64 {
        Self::DEFAULT_MAX_ITERS
    }

    fn default_grad_tol() -> f64 {
        Self::DEFAULT_GRAD_TOL
    }

    pub fn new(eta: f64, epsilon: f64, w0: Vec<f64>) -> Self {
        Self {
            eta,
            epsilon,
            w0,
            max_iters: Self::DEFAULT_MAX_ITERS,
            grad_tol: Self::DEFAULT_GRAD_TOL,
        }
    }

    pub fn with_max_iters(mut self, max_iters: u64) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidArgument(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be nonnegative, got {}",
                self.epsilon
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if !(self.grad_tol > 0.0 && self.grad_tol.is_finite()) {
            return Err(Error::InvalidArgument("grad_tol must be positive and finite".into()));
        }
        if !self.w0.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("w0".into()));
        }
        Ok(())
    }
}

/// Outcome of checking separability and the step-size bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub separable: bool,
    /// Strictly separating vector (the hard-margin solution) when separable.
    pub witness: Option<Vec<f64>>,
    pub smoothness_beta: f64,
    /// `2 min_i sqrt(g_i(0)² + ε) / β`.
    pub eta_bound: f64,
    pub eta_ok: bool,
    /// True when β is a local estimate at `w(0)` rather than a global constant.
    pub beta_is_heuristic: bool,
    /// False when `ε = 0` and some `g_i(0) = 0`, which leaves `h_i(0)` undefined.
    pub epsilon_ok: bool,
}

impl AssumptionReport {
    pub fn all_ok(&self) -> bool {
        self.separable && self.eta_ok && self.epsilon_ok
    }

    /// Human-readable list of failed conditions.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.separable {
            out.push("data is not linearly separable".to_string());
        }
        if !self.eta_ok {
            out.push(format!("eta must be below {:e}", self.eta_bound));
        }
        if !self.epsilon_ok {
            out.push("epsilon = 0 with a zero initial gradient coordinate".to_string());
        }
        out
    }
}

/// `L(w) = Σ_n l(⟨w, z_n⟩)`.
pub fn loss_value(model: &LossModel, data: &Dataset, w: &[f64]) -> Result<f64> {
    data.check_dim(w)?;
    Ok(loss_value_unchecked(model, data, w))
}

pub(crate) fn loss_value_unchecked(model: &LossModel, data: &Dataset, w: &[f64]) -> f64 {
    data.signed.iter().map(|z| model.value(dot(w, z))).sum()
}

/// `∇L(w) = Σ_n l'(⟨w, z_n⟩) z_n`.
pub fn loss_gradient(model: &LossModel, data: &Dataset, w: &[f64]) -> Result<Vec<f64>> {
    data.check_dim(w)?;
    let mut g = vec![0.0; w.len()];
    gradient_into(model, data, w, &mut g);
    Ok(g)
}

pub(crate) fn gradient_into(model: &LossModel, data: &Dataset, w: &[f64], g: &mut [f64]) {
    g.iter_mut().for_each(|v| *v = 0.0);
    for z in &data.signed {
        let d = model.derivative(dot(w, z));
        for (gi, zi) in g.iter_mut().zip(z) {
            *gi += d * zi;
        }
    }
}

/// Smoothness constant used in the step-size bound. Global `¼ Σ‖z_n‖²` for the
/// logistic loss; a local curvature estimate at `w0` for the exponential loss.
pub fn smoothness_beta(model: &LossModel, data: &Dataset, w0: &[f64]) -> f64 {
    match model.kind {
        LossKind::Logistic => 0.25 * data.signed.iter().map(|z| dot(z, z)).sum::<f64>(),
        LossKind::Exponential => data
            .signed
            .iter()
            .map(|z| model.second_derivative(dot(w0, z)) * dot(z, z))
            .sum(),
    }
}

pub fn check_assumptions(model: &LossModel, data: &Dataset, hp: &Hyperparams) -> Result<AssumptionReport> {
    data.check_dim(&hp.w0)?;
    let witness = maxmargin::feasibility(&maxmargin::MarginProblem::unweighted(
        data.signed_features().to_vec(),
    ))
    .witness;
    let beta = smoothness_beta(model, data, &hp.w0);
    let g0 = loss_gradient(model, data, &hp.w0)?;
    let min_scale = g0
        .iter()
        .map(|g| (g * g + hp.epsilon).sqrt())
        .fold(f64::INFINITY, f64::min);
    let eta_bound = 2.0 * min_scale / beta;
    Ok(AssumptionReport {
        separable: witness.is_some(),
        witness,
        smoothness_beta: beta,
        eta_bound,
        eta_ok: hp.eta < eta_bound,
        beta_is_heuristic: model.kind == LossKind::Exponential,
        epsilon_ok: hp.epsilon > 0.0 || g0.iter().all(|g| g.abs() > 0.0),
    })
}

/// Largest sample norm `max_n ‖z_n‖`.
pub fn max_feature_norm(data: &Dataset) -> f64 {
    data.signed.iter().map(|z| norm(z)).fold(0.0, f64::max)
}
