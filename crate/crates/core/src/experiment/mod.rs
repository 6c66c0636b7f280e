//! JSON-configured experiments: runs, checks, figure geometry and sweeps.
//!
//! Every command writes plain CSV / JSON into an output directory. Files are
//! a deterministic function of the config, so re-running a config reproduces
//! them byte for byte.

mod config;
mod figure;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    check_descent, check_divergence_and_margins, check_preconditioner_convergence,
    check_projection_bounds, check_summability, compare_trajectories, corner_condition,
    CheckOutcome, CornerCertificate, DirectionReport,
};
use crate::error::{Error, Result};
use crate::maxmargin::{solve_hard_margin, MarginProblem};
use crate::model::{fmt_f64, Dataset, Hyperparams, LossModel};
use crate::optim::{estimate_h_infinity, induced_sequence, run, Optimizer, RunOptions, Trajectory};

pub use config::{DatasetSpec, ExperimentConfig, GeneratorSpec, CONFIG_CHECK_NAMES};
pub use figure::{planar_figure, Arrow, FigureData, ELLIPSE_SEGMENTS};

/// What a finished command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub report: Option<DirectionReport>,
    pub checks: Vec<CheckOutcome>,
    pub corner: Option<CornerCertificate>,
    pub files: Vec<PathBuf>,
}

impl ExperimentOutcome {
    /// True iff every requested check holds; the CLI exits nonzero otherwise.
    pub fn all_checks_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

struct Prepared {
    data: Dataset,
    hp: Hyperparams,
    model: LossModel,
    opts: RunOptions,
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    cfg.validate()?;
    let (data, hp) = cfg.resolve()?;
    let mut opts = RunOptions::default().with_thinning(cfg.thinning);
    if cfg.override_assumptions {
        opts = opts.overriding();
    }
    Ok(Prepared {
        data,
        hp,
        model: cfg.loss_model(),
        opts,
    })
}

fn run_all(cfg: &ExperimentConfig, prep: &Prepared) -> Result<Vec<Trajectory>> {
    cfg.runs
        .iter()
        .map(|&o| run(o, &prep.model, &prep.data, &prep.hp, &prep.opts))
        .collect()
}

fn report_for(trajs: &[Trajectory], data: &Dataset) -> Result<Option<DirectionReport>> {
    let find = |o: Optimizer| trajs.iter().find(|t| t.optimizer == o);
    match (find(Optimizer::AdaGrad), find(Optimizer::GradientDescent)) {
        (Some(a), Some(g)) => compare_trajectories(a, g, data).map(Some),
        _ => Ok(None),
    }
}

/// Evaluates one trajectory check; `projection_bounds` uses the estimated
/// `h∞` for AdaGrad and the identity for GD.
pub fn evaluate_check(name: &str, traj: &Trajectory, data: &Dataset, model: &LossModel) -> Result<CheckOutcome> {
    let mut outcome = match name {
        "descent" => check_descent(traj),
        "summability" => check_summability(traj),
        "divergence_and_margins" => check_divergence_and_margins(traj, data),
        "preconditioner_convergence" => check_preconditioner_convergence(traj),
        "projection_bounds" => {
            let h_inf = match traj.optimizer {
                Optimizer::AdaGrad => estimate_h_infinity(traj)?.h_inf,
                Optimizer::GradientDescent => vec![1.0; data.dim()],
            };
            let seq = induced_sequence(traj, &h_inf, model, data)?;
            let xi = seq[0].xi.clone();
            let u_hat = solve_hard_margin(&MarginProblem::unweighted(xi.clone()))?.w_star;
            check_projection_bounds(&seq, &u_hat, &xi)?
        }
        other => return Err(Error::Config(format!("{other:?} is not a trajectory check"))),
    };
    outcome.name = format!("{}.{}", traj.optimizer.name(), outcome.name);
    Ok(outcome)
}

fn corner_outcome(cert: &CornerCertificate) -> CheckOutcome {
    let mut c = CheckOutcome::new("corner_condition");
    c.holds = cert.holds;
    c.onset_step = cert.holds.then_some(0);
    c.worst_violation = if cert.holds { 0.0 } else { cert.probe_max_deviation };
    c.detail("sign_pattern_holds", if cert.sign_pattern.holds() { 1.0 } else { 0.0 });
    c.detail("probe_max_deviation", cert.probe_max_deviation);
    c.detail("probe_seed", cert.probe_seed as f64);
    c
}

fn run_checks(
    cfg: &ExperimentConfig,
    trajs: &[Trajectory],
    prep: &Prepared,
    corner: Option<&CornerCertificate>,
) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for traj in trajs {
        for name in cfg.checks.iter().filter(|n| *n != "corner_condition") {
            out.push(evaluate_check(name, traj, &prep.data, &prep.model)?);
        }
    }
    if cfg.checks.iter().any(|n| n == "corner_condition") {
        let cert = match corner {
            Some(c) => c.clone(),
            None => corner_condition(&prep.data)?,
        };
        out.push(corner_outcome(&cert));
    }
    Ok(out)
}

fn create_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_json<T: Serialize>(path: PathBuf, value: &T, files: &mut Vec<PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text)?;
    files.push(path);
    Ok(())
}

fn write_csv_rows(path: PathBuf, rows: &[Vec<String>], files: &mut Vec<PathBuf>) -> Result<()> {
    let mut wtr = csv::Writer::from_path(&path)?;
    for r in rows {
        wtr.write_record(r)?;
    }
    wtr.flush()?;
    files.push(path);
    Ok(())
}

/// Runs every optimizer in the config, then writes `dataset.csv`,
/// `trajectory_<run>.csv`, `direction_report.json` (when both AdaGrad and GD
/// ran), `corner.json` and `checks.json` into `cfg.outputs`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let prep = prepare(cfg)?;
    let trajs = run_all(cfg, &prep)?;
    let report = report_for(&trajs, &prep.data)?;
    let corner = corner_condition(&prep.data)?;
    let checks = run_checks(cfg, &trajs, &prep, Some(&corner))?;

    let dir = &cfg.outputs;
    create_out_dir(dir)?;
    let mut files = Vec::new();
    let path = dir.join("dataset.csv");
    prep.data.write_csv(BufWriter::new(File::create(&path)?))?;
    files.push(path);
    for t in &trajs {
        let path = dir.join(format!("trajectory_{}.csv", t.optimizer.name()));
        t.write_csv(BufWriter::new(File::create(&path)?))?;
        files.push(path);
    }
    if let Some(r) = &report {
        write_json(dir.join("direction_report.json"), r, &mut files)?;
    }
    write_json(dir.join("corner.json"), &corner, &mut files)?;
    write_json(dir.join("checks.json"), &checks, &mut files)?;
    Ok(ExperimentOutcome {
        report,
        checks,
        corner: Some(corner),
        files,
    })
}

/// Runs the optimizers and the requested checks only; writes `checks.json`.
pub fn check_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let prep = prepare(cfg)?;
    let trajs = run_all(cfg, &prep)?;
    let checks = run_checks(cfg, &trajs, &prep, None)?;
    create_out_dir(&cfg.outputs)?;
    let mut files = Vec::new();
    write_json(cfg.outputs.join("checks.json"), &checks, &mut files)?;
    Ok(ExperimentOutcome {
        report: None,
        checks,
        corner: None,
        files,
    })
}

/// Runs AdaGrad for `h∞`, then writes `region.csv`, `ellipse.csv`,
/// `arrows.csv` and `tangency.csv` for a planar config.
pub fn figure_data(cfg: &ExperimentConfig) -> Result<FigureData> {
    let prep = prepare(cfg)?;
    if prep.data.dim() != 2 {
        return Err(Error::Config(format!("figure data needs p = 2, got p = {}", prep.data.dim())));
    }
    let traj = run(Optimizer::AdaGrad, &prep.model, &prep.data, &prep.hp, &prep.opts)?;
    let h_inf = estimate_h_infinity(&traj)?.h_inf;
    let fig = planar_figure(&prep.data, &h_inf)?;

    create_out_dir(&cfg.outputs)?;
    let mut files = Vec::new();
    let xy = |pts: &[[f64; 2]]| -> Vec<Vec<String>> {
        std::iter::once(vec!["x".to_string(), "y".to_string()])
            .chain(pts.iter().map(|p| vec![fmt_f64(p[0]), fmt_f64(p[1])]))
            .collect()
    };
    write_csv_rows(cfg.outputs.join("region.csv"), &xy(&fig.region), &mut files)?;
    write_csv_rows(cfg.outputs.join("ellipse.csv"), &xy(&fig.ellipse), &mut files)?;
    let arrows: Vec<Vec<String>> = std::iter::once(vec!["name".into(), "x".into(), "y".into()])
        .chain(fig.arrows.iter().map(|a| vec![a.name.clone(), fmt_f64(a.x), fmt_f64(a.y)]))
        .collect();
    write_csv_rows(cfg.outputs.join("arrows.csv"), &arrows, &mut files)?;
    write_csv_rows(cfg.outputs.join("tangency.csv"), &xy(&[fig.tangency]), &mut files)?;
    Ok(fig)
}

/// Hyperparameter swept by [`sweep`]. A `w0` value `v` means `w(0) = v·1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Eta,
    Epsilon,
    W0,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Eta => "eta",
            Self::Epsilon => "epsilon",
            Self::W0 => "w0",
        }
    }

    fn apply(&self, hp: &mut Hyperparams, value: f64) {
        match self {
            Self::Eta => hp.eta = value,
            Self::Epsilon => hp.epsilon = value,
            Self::W0 => hp.w0.iter_mut().for_each(|w| *w = value),
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(Self::Eta),
            "epsilon" => Ok(Self::Epsilon),
            "w0" => Ok(Self::W0),
            other => Err(Error::Config(format!("unknown sweep axis {other:?} (eta, epsilon, w0)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub value: f64,
    pub report: DirectionReport,
}

/// One direction report per value (entries run in parallel), written to
/// `sweep_<axis>_<k>.json`, plus `sweep_<axis>_summary.csv` with the value,
/// predicted AdaGrad direction, its angle to the SVM direction and `h∞`.
pub fn sweep(cfg: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepEntry>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let prep = prepare(cfg)?;
    let entries: Vec<SweepEntry> = values
        .par_iter()
        .map(|&value| {
            let mut hp = prep.hp.clone();
            axis.apply(&mut hp, value);
            hp.validate()?;
            let ada = run(Optimizer::AdaGrad, &prep.model, &prep.data, &hp, &prep.opts)?;
            let gd = run(Optimizer::GradientDescent, &prep.model, &prep.data, &hp, &prep.opts)?;
            let report = compare_trajectories(&ada, &gd, &prep.data)?;
            Ok(SweepEntry { value, report })
        })
        .collect::<Result<_>>()?;

    create_out_dir(&cfg.outputs)?;
    let mut files = Vec::new();
    let p = prep.data.dim();
    let mut header = vec![axis.name().to_string()];
    header.extend((1..=p).map(|i| format!("pred_dir_{i}")));
    header.push("angle_to_svm".into());
    header.push("angle_empirical_to_predicted".into());
    header.extend((1..=p).map(|i| format!("h_inf_{i}")));
    let mut rows = vec![header];
    for (k, e) in entries.iter().enumerate() {
        write_json(cfg.outputs.join(format!("sweep_{}_{k}.json", axis.name())), &e.report, &mut files)?;
        let mut row = vec![fmt_f64(e.value)];
        row.extend(e.report.adagrad_dir_predicted.iter().map(|v| fmt_f64(*v)));
        row.push(fmt_f64(e.report.angles.adagrad_predicted_vs_svm));
        row.push(fmt_f64(e.report.angles.adagrad_empirical_vs_predicted));
        row.extend(e.report.h_inf.iter().map(|v| fmt_f64(*v)));
        rows.push(row);
    }
    write_csv_rows(cfg.outputs.join(format!("sweep_{}_summary.csv", axis.name())), &rows, &mut files)?;
    Ok(entries)
}

/// Summary line per check, as printed by the CLI.
pub fn describe_checks(checks: &[CheckOutcome]) -> Vec<String> {
    checks
        .iter()
        .map(|c| {
            let onset = c.onset_step.map_or("none".to_string(), |t| t.to_string());
            format!(
                "{} {} (onset {onset}, worst violation {:e})",
                if c.holds { "PASS" } else { "FAIL" },
                c.name,
                c.worst_violation
            )
        })
        .collect()
}
