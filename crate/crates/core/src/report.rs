//! Evaluation summaries and the line-oriented `key=value` report format.

use std::fmt::Write as _;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::model::{
    loss_bayes, loss_margin, loss_ml, margin_from_probs, predict_proba, prob_gap_curve,
    zero_one_from_probs, FeasibilityResiduals, ModelParams,
};
use crate::solvers::TrainReport;

/// Margin-loss `η` used for reporting when none is given.
pub const DEFAULT_REPORT_ETA: f64 = 0.2;

#[derive(Clone, Debug, PartialEq)]
pub struct GapRequest {
    pub class_a: usize,
    pub class_b: usize,
    pub thresholds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub n: usize,
    pub accuracy: f64,
    pub mean_margin: f64,
    pub mean_zero_one: f64,
    pub mean_bayes: f64,
    pub mean_ml: f64,
    pub mean_margin_loss: f64,
    pub eta: f64,
    pub feasibility: FeasibilityResiduals,
    pub gap_curve: Option<Vec<(f64, f64)>>,
}

pub fn evaluate(
    params: &ModelParams,
    data: &LabeledDataset,
    eta: f64,
    gap: Option<&GapRequest>,
) -> Result<EvalReport> {
    if !(eta > 0.0) {
        return Err(Error::invalid(format!("eta must be positive, got {eta}")));
    }
    if data.is_empty() {
        return Err(Error::invalid("empty dataset"));
    }
    if params.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            actual: data.dim(),
        });
    }
    if data.num_classes() > params.num_classes() {
        return Err(Error::invalid(format!(
            "data has {} classes, model has {}",
            data.num_classes(),
            params.num_classes()
        )));
    }

    let (mut zo, mut margin, mut bayes, mut ml, mut marg) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ex in data.examples() {
        let probs = predict_proba(params, &ex.x)?;
        let p = probs[ex.class];
        zo += zero_one_from_probs(&probs, ex.class);
        margin += margin_from_probs(&probs, ex.class);
        bayes += loss_bayes(p);
        ml += loss_ml(p);
        marg += loss_margin(p, eta);
    }
    let n = data.len() as f64;
    let mean_zero_one = zo / n;

    let gap_curve = gap
        .map(|g| prob_gap_curve(params, data, g.class_a, g.class_b, &g.thresholds))
        .transpose()?;

    Ok(EvalReport {
        n: data.len(),
        accuracy: 1.0 - mean_zero_one,
        mean_margin: margin / n,
        mean_zero_one,
        mean_bayes: bayes / n,
        mean_ml: ml / n,
        mean_margin_loss: marg / n,
        eta,
        feasibility: params.feasibility()?,
        gap_curve,
    })
}

pub fn format_eval_report(r: &EvalReport) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
    kv("n", r.n.to_string());
    kv("accuracy", r.accuracy.to_string());
    kv("mean_margin", r.mean_margin.to_string());
    kv("loss_zero_one", r.mean_zero_one.to_string());
    kv("loss_bayes", r.mean_bayes.to_string());
    kv("loss_ml", r.mean_ml.to_string());
    kv("loss_margin", r.mean_margin_loss.to_string());
    kv("eta", r.eta.to_string());
    kv(
        "feasibility_sum_residual",
        r.feasibility.sum_residual.to_string(),
    );
    kv(
        "feasibility_min_eigenvalue",
        r.feasibility.min_eigenvalue.to_string(),
    );
    if let Some(curve) = &r.gap_curve {
        for (t, f) in curve {
            writeln!(out, "gap,{t},{f}").unwrap();
        }
    }
    out
}

pub fn format_train_report(r: &TrainReport) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
    kv("solver", r.solver.to_string());
    kv("iterations", r.iterations.to_string());
    kv("best_objective", r.best_objective.to_string());
    kv("best_iterate", r.best_iterate_index.to_string());
    if let Some(eta) = r.eta {
        kv("eta", eta.to_string());
    }
    if let Some(f) = r.margin_error_fraction {
        kv("margin_error_fraction", f.to_string());
    }
    kv(
        "feasibility_sum_residual",
        r.feasibility.sum_residual.to_string(),
    );
    kv(
        "feasibility_min_eigenvalue",
        r.feasibility.min_eigenvalue.to_string(),
    );
    for (i, v) in r.objective_trace.iter().enumerate() {
        writeln!(out, "objective.{i}={v}").unwrap();
    }
    out
}
