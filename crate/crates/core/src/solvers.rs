//! Trainers over the feasible set and their diagnostics.
//!
//! All three iterative trainers share the same loop: start from `A_y = I/k`,
//! take an ascent step of size `step0 / √t`, project back onto the feasible
//! set, and remember the best iterate seen. They stop after `max_iters`
//! steps or once the best objective has improved by less than `tol` over the
//! trailing [`STAGNATION_WINDOW`] iterations.
//!
//! * max-margin maximizes `η − β Σ_i [η − m_i]_+` jointly in `(η, A)`;
//! * Bayes maximizes `Σ_i p(y_i|x_i)`, in closed form for two classes;
//! * maximum likelihood maximizes `Σ_i ln p(y_i|x_i)`.

use std::fmt;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::feasible::{project_feasible, ProjectionConfig};
use crate::model::{best_competitor, loss_margin, FeasibilityResiduals, ModelParams};
use crate::symmat::SymmetricMatrix;

pub const STAGNATION_WINDOW: usize = 100;

/// Probability floor inside the log-likelihood gradient only.
pub const MLE_GRADIENT_FLOOR: f64 = 1e-12;

/// Slack above which an example counts as a margin error.
pub const MARGIN_ERROR_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    MaxMargin,
    Bayes,
    Mle,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::MaxMargin => "maxmargin",
            SolverKind::Bayes => "bayes",
            SolverKind::Mle => "mle",
        })
    }
}

/// Slack penalty for the max-margin trainer, either directly or as `ν` with
/// `β = 1/(ν n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tradeoff {
    Beta(f64),
    Nu(f64),
}

impl Tradeoff {
    pub fn beta(&self, n: usize) -> Result<f64> {
        match *self {
            Tradeoff::Beta(b) if b > 0.0 && b.is_finite() => Ok(b),
            Tradeoff::Beta(b) => Err(Error::invalid(format!("beta must be positive, got {b}"))),
            Tradeoff::Nu(v) if v > 0.0 && v <= 1.0 => Ok(1.0 / (v * n as f64)),
            Tradeoff::Nu(v) => Err(Error::invalid(format!("nu must lie in (0, 1], got {v}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Required by the max-margin trainer, ignored by the others.
    pub tradeoff: Option<Tradeoff>,
    pub step0: f64,
    pub max_iters: usize,
    /// Recorded for reproducibility; initialization is always `I/k`.
    pub seed: u64,
    pub tol: f64,
    pub projection: ProjectionConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tradeoff: None,
            step0: 1.0,
            max_iters: 2000,
            seed: 0,
            tol: 1e-7,
            projection: ProjectionConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn with_beta(beta: f64) -> Self {
        SolverConfig {
            tradeoff: Some(Tradeoff::Beta(beta)),
            ..Default::default()
        }
    }

    pub fn with_nu(nu: f64) -> Self {
        SolverConfig {
            tradeoff: Some(Tradeoff::Nu(nu)),
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step0 > 0.0 && self.step0.is_finite()) {
            return Err(Error::invalid("step0 must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        self.projection.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub solver: SolverKind,
    /// Objective of each iterate, starting with the initialization.
    pub objective_trace: Vec<f64>,
    pub best_objective: f64,
    pub best_iterate_index: usize,
    /// Ascent steps taken.
    pub iterations: usize,
    /// Margin variable of the returned model (max-margin only).
    pub eta: Option<f64>,
    /// `max(0, η − m_i)` at the returned model (max-margin only).
    pub slacks: Vec<f64>,
    pub margin_error_fraction: Option<f64>,
    pub feasibility: FeasibilityResiduals,
}

/// Receives the class operators after every projection step.
pub type Observer<'a> = &'a mut dyn FnMut(usize, &[SymmetricMatrix]);

fn check_trainable(data: &LabeledDataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::DegenerateData("no examples".into()));
    }
    let present = data.class_counts().iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(Error::DegenerateData(
            "labels must span at least 2 classes".into(),
        ));
    }
    Ok(())
}

fn class_probs(mats: &[SymmetricMatrix], x: &[f64]) -> Vec<f64> {
    mats.iter().map(|a| a.quad_form_unchecked(x)).collect()
}

/// Best iterate so far plus the stagnation test.
struct Tracker {
    trace: Vec<f64>,
    best_history: Vec<f64>,
    best: f64,
    best_index: usize,
    best_mats: Vec<SymmetricMatrix>,
    best_eta: f64,
}

impl Tracker {
    fn new(mats: &[SymmetricMatrix]) -> Self {
        Tracker {
            trace: Vec::new(),
            best_history: Vec::new(),
            best: f64::NEG_INFINITY,
            best_index: 0,
            best_mats: mats.to_vec(),
            best_eta: 0.0,
        }
    }

    fn record(&mut self, objective: f64, mats: &[SymmetricMatrix], eta: f64) {
        debug_assert!(!objective.is_nan());
        if objective > self.best || self.trace.is_empty() {
            self.best = objective;
            self.best_index = self.trace.len();
            self.best_mats = mats.to_vec();
            self.best_eta = eta;
        }
        self.trace.push(objective);
        self.best_history.push(self.best);
    }

    fn stagnated(&self, tol: f64) -> bool {
        let t = self.best_history.len();
        if t <= STAGNATION_WINDOW {
            return false;
        }
        let then = self.best_history[t - 1 - STAGNATION_WINDOW];
        then.is_finite() && self.best - then < tol
    }
}

fn ascend_and_project(
    mats: &[SymmetricMatrix],
    grads: &[SymmetricMatrix],
    step: f64,
    projection: &ProjectionConfig,
) -> Result<Vec<SymmetricMatrix>> {
    let moved: Vec<SymmetricMatrix> = mats
        .iter()
        .zip(grads)
        .map(|(a, g)| {
            let mut next = a.clone();
            next.axpy(step, g);
            next
        })
        .collect();
    let projected = project_feasible(&moved, projection)?;
    #[cfg(debug_assertions)]
    {
        let r = FeasibilityResiduals::of(&projected)?;
        debug_assert!(
            r.within(crate::model::FEASIBILITY_TOL),
            "projection left the feasible set: {r:?}"
        );
    }
    Ok(projected)
}

/// Iterate schedule shared by the trainers: evaluate, record, stop or step.
fn run_ascent(
    data: &LabeledDataset,
    cfg: &SolverConfig,
    observer: Observer<'_>,
    mut state: impl AscentState,
) -> Result<(Tracker, usize)> {
    let mut mats = ModelParams::uniform(data.dim(), data.num_classes()).into_matrices();
    let mut tracker = Tracker::new(&mats);
    let mut iterations = 0;
    loop {
        let objective = state.objective(&mats, data);
        tracker.record(objective, &mats, state.eta());
        if iterations == cfg.max_iters || tracker.stagnated(cfg.tol) {
            break;
        }
        iterations += 1;
        let step = cfg.step0 / (iterations as f64).sqrt();
        let grads = state.ascent_direction(&mats, data, step);
        mats = ascend_and_project(&mats, &grads, step, &cfg.projection)?;
        observer(iterations, &mats);
    }
    Ok((tracker, iterations))
}

trait AscentState {
    fn objective(&self, mats: &[SymmetricMatrix], data: &LabeledDataset) -> f64;
    /// Ascent direction for the class operators; may also move private
    /// state such as `η` by `step`.
    fn ascent_direction(
        &mut self,
        mats: &[SymmetricMatrix],
        data: &LabeledDataset,
        step: f64,
    ) -> Vec<SymmetricMatrix>;
    fn eta(&self) -> f64 {
        0.0
    }
}

struct MaxMarginState {
    beta: f64,
    eta: f64,
}

impl AscentState for MaxMarginState {
    fn objective(&self, mats: &[SymmetricMatrix], data: &LabeledDataset) -> f64 {
        let hinge: f64 = data
            .examples()
            .iter()
            .map(|ex| {
                let probs = class_probs(mats, &ex.x);
                let m = probs[ex.class] - best_competitor(&probs, ex.class).1;
                (self.eta - m).max(0.0)
            })
            .sum();
        self.eta - self.beta * hinge
    }

    fn ascent_direction(
        &mut self,
        mats: &[SymmetricMatrix],
        data: &LabeledDataset,
        step: f64,
    ) -> Vec<SymmetricMatrix> {
        let mut grads = vec![SymmetricMatrix::zeros(data.dim()); mats.len()];
        let mut active = 0usize;
        for ex in data.examples() {
            let probs = class_probs(mats, &ex.x);
            let (rival, p_rival) = best_competitor(&probs, ex.class);
            if self.eta - probs[ex.class] + p_rival > 0.0 {
                active += 1;
                grads[ex.class].add_outer(self.beta, &ex.x);
                grads[rival].add_outer(-self.beta, &ex.x);
            }
        }
        self.eta += step * (1.0 - self.beta * active as f64);
        grads
    }

    fn eta(&self) -> f64 {
        self.eta
    }
}

/// Mean-scaled gradient of `Σ_i p(y_i|x_i)`.
struct BayesState;

impl AscentState for BayesState {
    fn objective(&self, mats: &[SymmetricMatrix], data: &LabeledDataset) -> f64 {
        bayes_objective_raw(mats, data)
    }

    fn ascent_direction(
        &mut self,
        mats: &[SymmetricMatrix],
        data: &LabeledDataset,
        _step: f64,
    ) -> Vec<SymmetricMatrix> {
        let scale = 1.0 / data.len() as f64;
        let mut grads = vec![SymmetricMatrix::zeros(data.dim()); mats.len()];
        for ex in data.examples() {
            grads[ex.class].add_outer(scale, &ex.x);
        }
        grads
    }
}

/// Mean-scaled gradient of `Σ_i ln p(y_i|x_i)`.
struct MleState;

impl AscentState for MleState {
    fn objective(&self, mats: &[SymmetricMatrix], data: &LabeledDataset) -> f64 {
        log_likelihood_raw(mats, data)
    }

    fn ascent_direction(
        &mut self,
        mats: &[SymmetricMatrix],
        data: &LabeledDataset,
        _step: f64,
    ) -> Vec<SymmetricMatrix> {
        let mut grads = log_likelihood_gradient_raw(mats, data);
        let scale = 1.0 / data.len() as f64;
        for g in &mut grads {
            *g = g.scaled(scale);
        }
        grads
    }
}

/// Max-margin training by projected subgradient ascent on
/// `η − β Σ_i [η − p(y_i|x_i) + max_{z≠y_i} p(z|x_i)]_+`.
///
/// `η` starts at zero and follows its own subgradient `1 − β·#active`. Once
/// the loop ends, `η` is re-solved exactly for the best operators, which can
/// only raise the objective; that value is appended to the trace.
pub fn train_maxmargin(
    data: &LabeledDataset,
    cfg: &SolverConfig,
) -> Result<(ModelParams, TrainReport)> {
    train_maxmargin_observed(data, cfg, &mut |_, _| {})
}

pub fn train_maxmargin_observed(
    data: &LabeledDataset,
    cfg: &SolverConfig,
    observer: Observer<'_>,
) -> Result<(ModelParams, TrainReport)> {
    cfg.validate()?;
    check_trainable(data)?;
    let tradeoff = cfg
        .tradeoff
        .ok_or_else(|| Error::invalid("max-margin training needs beta or nu"))?;
    let beta = tradeoff.beta(data.len())?;
    if beta * (data.len() as f64) < 1.0 - 1e-12 {
        return Err(Error::invalid(format!(
            "beta = {beta} is below 1/n = {}; the margin objective is unbounded",
            1.0 / data.len() as f64
        )));
    }

    let (mut tracker, iterations) =
        run_ascent(data, cfg, observer, MaxMarginState { beta, eta: 0.0 })?;

    let params = ModelParams::from_projected(tracker.best_mats.clone());
    let margins = margins(&params, data);
    let (eta, refined) = optimal_eta(&margins, beta);
    let eta = if refined > tracker.best {
        tracker.record(refined, &tracker.best_mats.clone(), eta);
        eta
    } else {
        tracker.best_eta
    };
    let slacks: Vec<f64> = margins.iter().map(|m| (eta - m).max(0.0)).collect();
    let fraction = margin_error_fraction(&slacks);

    let report = TrainReport {
        solver: SolverKind::MaxMargin,
        best_objective: tracker.best,
        best_iterate_index: tracker.best_index,
        objective_trace: tracker.trace,
        iterations,
        eta: Some(eta),
        slacks,
        margin_error_fraction: Some(fraction),
        feasibility: params.feasibility()?,
    };
    Ok((params, report))
}

/// Maximizer of `η − β Σ_i [η − m_i]_+` for fixed margins, with its value.
///
/// The function is concave and piecewise linear with breakpoints at the
/// margins, so the smallest maximizing breakpoint is returned. Requires
/// `β n ≥ 1`.
pub fn optimal_eta(margins: &[f64], beta: f64) -> (f64, f64) {
    let mut sorted = margins.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    let mut below = 0.0;
    for (j, &m) in sorted.iter().enumerate() {
        let value = m - beta * (j as f64 * m - below);
        if value > best.1 {
            best = (m, value);
        }
        below += m;
    }
    best
}

/// Max-margin objective for a fixed model and margin variable.
pub fn maxmargin_objective(
    params: &ModelParams,
    data: &LabeledDataset,
    eta: f64,
    beta: f64,
) -> f64 {
    MaxMarginState { beta, eta }.objective(params.matrices(), data)
}

/// Optimal-Bayes training: closed form for two classes, projected gradient
/// ascent otherwise.
pub fn train_bayes(
    data: &LabeledDataset,
    cfg: &SolverConfig,
) -> Result<(ModelParams, TrainReport)> {
    train_bayes_observed(data, cfg, &mut |_, _| {})
}

pub fn train_bayes_observed(
    data: &LabeledDataset,
    cfg: &SolverConfig,
    observer: Observer<'_>,
) -> Result<(ModelParams, TrainReport)> {
    if data.num_classes() != 2 {
        return train_bayes_iterative_observed(data, cfg, observer);
    }
    cfg.validate()?;
    let params = bayes_binary_analytic(data)?;
    observer(0, params.matrices());
    let objective = bayes_objective(&params, data);
    let report = TrainReport {
        solver: SolverKind::Bayes,
        objective_trace: vec![objective],
        best_objective: objective,
        best_iterate_index: 0,
        iterations: 0,
        eta: None,
        slacks: Vec::new(),
        margin_error_fraction: None,
        feasibility: params.feasibility()?,
    };
    Ok((params, report))
}

/// Projected gradient ascent on the Bayes objective for any number of
/// classes, including two.
pub fn train_bayes_iterative(
    data: &LabeledDataset,
    cfg: &SolverConfig,
) -> Result<(ModelParams, TrainReport)> {
    train_bayes_iterative_observed(data, cfg, &mut |_, _| {})
}

pub fn train_bayes_iterative_observed(
    data: &LabeledDataset,
    cfg: &SolverConfig,
    observer: Observer<'_>,
) -> Result<(ModelParams, TrainReport)> {
    cfg.validate()?;
    check_trainable(data)?;
    let (tracker, iterations) = run_ascent(data, cfg, observer, BayesState)?;
    finish_plain(SolverKind::Bayes, tracker, iterations)
}

/// Maximum-likelihood training by projected gradient ascent.
pub fn train_mle(data: &LabeledDataset, cfg: &SolverConfig) -> Result<(ModelParams, TrainReport)> {
    train_mle_observed(data, cfg, &mut |_, _| {})
}

pub fn train_mle_observed(
    data: &LabeledDataset,
    cfg: &SolverConfig,
    observer: Observer<'_>,
) -> Result<(ModelParams, TrainReport)> {
    cfg.validate()?;
    check_trainable(data)?;
    let (tracker, iterations) = run_ascent(data, cfg, observer, MleState)?;
    finish_plain(SolverKind::Mle, tracker, iterations)
}

fn finish_plain(
    solver: SolverKind,
    tracker: Tracker,
    iterations: usize,
) -> Result<(ModelParams, TrainReport)> {
    let params = ModelParams::from_projected(tracker.best_mats);
    let report = TrainReport {
        solver,
        objective_trace: tracker.trace,
        best_objective: tracker.best,
        best_iterate_index: tracker.best_index,
        iterations,
        eta: None,
        slacks: Vec::new(),
        margin_error_fraction: None,
        feasibility: params.feasibility()?,
    };
    Ok((params, report))
}

/// Dispatches on [`SolverKind`].
pub fn train(
    kind: SolverKind,
    data: &LabeledDataset,
    cfg: &SolverConfig,
) -> Result<(ModelParams, TrainReport)> {
    match kind {
        SolverKind::MaxMargin => train_maxmargin(data, cfg),
        SolverKind::Bayes => train_bayes(data, cfg),
        SolverKind::Mle => train_mle(data, cfg),
    }
}

/// Closed-form two-class Bayes solution.
///
/// Eigendecomposes `M = Σ_{y=0} x xᵀ − Σ_{y=1} x xᵀ` and gives each
/// eigenvector to `A_1` with weight 1, 0 or ½ by the sign of its
/// eigenvalue (½ when it vanishes); `A_2 = I − A_1`.
pub fn bayes_binary_analytic(data: &LabeledDataset) -> Result<ModelParams> {
    if data.num_classes() != 2 {
        return Err(Error::invalid(format!(
            "closed-form Bayes needs exactly 2 classes, got {}",
            data.num_classes()
        )));
    }
    check_trainable(data)?;
    let mut m = SymmetricMatrix::zeros(data.dim());
    for ex in data.examples() {
        m.add_outer(if ex.class == 0 { 1.0 } else { -1.0 }, &ex.x);
    }
    let zero_tol = 1e-10 * m.frobenius_norm().max(1.0);
    let a1 = m.eig()?.map_spectrum(|l| {
        if l > zero_tol {
            1.0
        } else if l < -zero_tol {
            0.0
        } else {
            0.5
        }
    });
    let a2 = &SymmetricMatrix::identity(data.dim()) - &a1;
    Ok(ModelParams::from_projected(vec![a1, a2]))
}

/// `Σ_i p(y_i|x_i)`.
pub fn bayes_objective(params: &ModelParams, data: &LabeledDataset) -> f64 {
    bayes_objective_raw(params.matrices(), data)
}

fn bayes_objective_raw(mats: &[SymmetricMatrix], data: &LabeledDataset) -> f64 {
    data.examples()
        .iter()
        .map(|ex| mats[ex.class].quad_form_unchecked(&ex.x))
        .sum()
}

/// `Σ_i ln p(y_i|x_i)`; `−∞` as soon as any `p ≤ 0`.
pub fn log_likelihood(params: &ModelParams, data: &LabeledDataset) -> f64 {
    log_likelihood_raw(params.matrices(), data)
}

fn log_likelihood_raw(mats: &[SymmetricMatrix], data: &LabeledDataset) -> f64 {
    data.examples()
        .iter()
        .map(|ex| {
            let p = mats[ex.class].quad_form_unchecked(&ex.x);
            if p > 0.0 {
                p.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .sum()
}

/// Gradient of [`log_likelihood`] with respect to each `A_y`:
/// `Σ_{i: y_i = y} x_i x_iᵀ / p(y_i|x_i)`, with `p` floored at
/// [`MLE_GRADIENT_FLOOR`].
pub fn log_likelihood_gradient(
    params: &ModelParams,
    data: &LabeledDataset,
) -> Vec<SymmetricMatrix> {
    log_likelihood_gradient_raw(params.matrices(), data)
}

fn log_likelihood_gradient_raw(
    mats: &[SymmetricMatrix],
    data: &LabeledDataset,
) -> Vec<SymmetricMatrix> {
    let mut grads = vec![SymmetricMatrix::zeros(data.dim()); mats.len()];
    for ex in data.examples() {
        let p = mats[ex.class]
            .quad_form_unchecked(&ex.x)
            .max(MLE_GRADIENT_FLOOR);
        grads[ex.class].add_outer(1.0 / p, &ex.x);
    }
    grads
}

/// Per-example terms `η (1 − β l_marg(p(y_i|x_i), η))`.
pub fn objective_decomposition(
    params: &ModelParams,
    data: &LabeledDataset,
    eta: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    if !(eta > 0.0) {
        return Err(Error::invalid(format!("eta must be positive, got {eta}")));
    }
    check_same_shape(params, data)?;
    Ok(data
        .examples()
        .iter()
        .map(|ex| {
            let p = params.matrix(ex.class).quad_form_unchecked(&ex.x);
            eta * (1.0 - beta * loss_margin(p, eta))
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarginErrorStats {
    /// Fraction of examples whose slack exceeds [`MARGIN_ERROR_TOL`].
    pub fraction: f64,
    pub slacks: Vec<f64>,
}

/// Slacks `max(0, η − m_i)` and the fraction of margin errors.
pub fn margin_error_stats(
    params: &ModelParams,
    data: &LabeledDataset,
    eta: f64,
) -> Result<MarginErrorStats> {
    if !eta.is_finite() {
        return Err(Error::invalid("eta must be finite"));
    }
    check_same_shape(params, data)?;
    let slacks: Vec<f64> = margins(params, data)
        .into_iter()
        .map(|m| (eta - m).max(0.0))
        .collect();
    Ok(MarginErrorStats {
        fraction: margin_error_fraction(&slacks),
        slacks,
    })
}

fn margin_error_fraction(slacks: &[f64]) -> f64 {
    if slacks.is_empty() {
        return 0.0;
    }
    slacks.iter().filter(|&&s| s > MARGIN_ERROR_TOL).count() as f64 / slacks.len() as f64
}

fn margins(params: &ModelParams, data: &LabeledDataset) -> Vec<f64> {
    data.examples()
        .iter()
        .map(|ex| {
            let probs = params.probs_unchecked(&ex.x);
            probs[ex.class] - best_competitor(&probs, ex.class).1
        })
        .collect()
}

fn check_same_shape(params: &ModelParams, data: &LabeledDataset) -> Result<()> {
    if params.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            actual: data.dim(),
        });
    }
    if params.num_classes() < data.num_classes() {
        return Err(Error::invalid(format!(
            "model has {} classes, data has {}",
            params.num_classes(),
            data.num_classes()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gen_subspace_data, Example};
    use crate::feasible::{random_feasible_model, Spectrum};
    use crate::model::{predict_proba, FEASIBILITY_TOL};

    fn e(d: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    fn dataset(points: &[(Vec<f64>, usize)], k: usize) -> LabeledDataset {
        LabeledDataset::new(
            points
                .iter()
                .map(|(x, class)| Example {
                    x: x.clone(),
                    class: *class,
                })
                .collect(),
            k,
        )
        .unwrap()
    }

    fn axis_projectors(d: usize) -> Vec<SymmetricMatrix> {
        (0..d).map(|i| SymmetricMatrix::outer(&e(d, i))).collect()
    }

    #[test]
    fn tradeoff_conversion() {
        assert_eq!(Tradeoff::Beta(0.1).beta(10).unwrap(), 0.1);
        assert!((Tradeoff::Nu(0.5).beta(40).unwrap() - 0.05).abs() < 1e-15);
        assert!(Tradeoff::Nu(0.0).beta(40).is_err());
        assert!(Tradeoff::Nu(1.5).beta(40).is_err());
        assert!(Tradeoff::Beta(-1.0).beta(40).is_err());
    }

    #[test]
    fn optimal_eta_examples() {
        // beta = 1/2 over four margins: slope 1 - #below/2 turns at the 2nd
        let (eta, value) = optimal_eta(&[0.4, 0.1, 0.9, 0.2], 0.5);
        assert_eq!(eta, 0.2);
        assert!((value - (0.2 - 0.5 * 0.1)).abs() < 1e-15);
        let (eta, _) = optimal_eta(&[1.0; 10], 0.1);
        assert_eq!(eta, 1.0);
    }

    #[test]
    fn maxmargin_axis_pair() {
        let data = dataset(&[(e(2, 0), 0), (e(2, 1), 1)], 2);
        let (params, report) = train_maxmargin(&data, &SolverConfig::with_beta(1.0)).unwrap();
        let expected = axis_projectors(2);
        for (a, b) in params.matrices().iter().zip(&expected) {
            assert!(a.max_abs_diff(b) < 1e-6);
        }
        for ex in data.examples() {
            assert!((crate::model::margin(&params, &ex.x, ex.class).unwrap() - 1.0).abs() < 1e-6);
        }
        assert!((report.eta.unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(report.margin_error_fraction, Some(0.0));
    }

    #[test]
    fn maxmargin_axis_pair_matches_grid_search() {
        // Over diagonal feasible pairs A_1 = diag(s, t), the objective with
        // the optimal eta peaks at (1, 0) with value 1.
        let data = dataset(&[(e(2, 0), 0), (e(2, 1), 1)], 2);
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..=100 {
            for j in 0..=100 {
                let (s, t) = (i as f64 / 100.0, j as f64 / 100.0);
                let params = ModelParams::new(vec![
                    SymmetricMatrix::from_diagonal(&[s, t]),
                    SymmetricMatrix::from_diagonal(&[1.0 - s, 1.0 - t]),
                ])
                .unwrap();
                let (_, v) = optimal_eta(&margins(&params, &data), 1.0);
                if v > best.0 {
                    best = (v, s, t);
                }
            }
        }
        assert_eq!((best.1, best.2), (1.0, 0.0));
        let (_, report) = train_maxmargin(&data, &SolverConfig::with_beta(1.0)).unwrap();
        assert!((report.best_objective - best.0).abs() < 1e-6);
    }

    #[test]
    fn maxmargin_conflicting_labels() {
        let data = dataset(&[(e(2, 0), 0), (e(2, 0), 1)], 2);
        let (params, report) = train_maxmargin(&data, &SolverConfig::with_beta(1.0)).unwrap();
        // A_1 = diag(t, .) gives margins 2t - 1 and 1 - 2t; the best value over
        // t is 0 at t = 1/2, independent of the second diagonal entry.
        let mut best = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            let (_, v) = optimal_eta(&[2.0 * t - 1.0, 1.0 - 2.0 * t], 1.0);
            best = best.max(v);
        }
        assert!(best.abs() < 1e-12);
        assert!(report.best_objective.abs() < 1e-6);
        let p = predict_proba(&params, &e(2, 0)).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-6 && (p[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn maxmargin_requires_tradeoff_and_bounded_beta() {
        let data = dataset(&[(e(2, 0), 0), (e(2, 1), 1)], 2);
        assert!(train_maxmargin(&data, &SolverConfig::default()).is_err());
        assert!(train_maxmargin(&data, &SolverConfig::with_beta(0.1)).is_err());
    }

    #[test]
    fn single_class_is_degenerate() {
        let data = dataset(&[(e(2, 0), 0), (e(2, 1), 0)], 2);
        let cfg = SolverConfig::with_beta(1.0);
        assert!(matches!(
            train_maxmargin(&data, &cfg),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            train_mle(&data, &cfg),
            Err(Error::DegenerateData(_))
        ));
        assert!(bayes_binary_analytic(&data).is_err());
    }

    #[test]
    fn bayes_analytic_examples() {
        let data = dataset(&[(e(2, 0), 0), (e(2, 0), 0), (e(2, 1), 1)], 2);
        let params = bayes_binary_analytic(&data).unwrap();
        for (a, b) in params.matrices().iter().zip(&axis_projectors(2)) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
        assert!((bayes_objective(&params, &data) - 3.0).abs() < 1e-12);

        let conflict = dataset(&[(e(2, 0), 0), (e(2, 0), 1)], 2);
        let params = bayes_binary_analytic(&conflict).unwrap();
        let half = SymmetricMatrix::scaled_identity(2, 0.5);
        assert!(params.matrix(0).max_abs_diff(&half) < 1e-12);
        assert!(params.matrix(1).max_abs_diff(&half) < 1e-12);

        let three = dataset(&[(e(3, 0), 0), (e(3, 1), 1), (e(3, 2), 2)], 3);
        assert!(bayes_binary_analytic(&three).is_err());
    }

    #[test]
    fn bayes_three_axis_classes() {
        let data = dataset(&[(e(3, 0), 0), (e(3, 1), 1), (e(3, 2), 2)], 3);
        let (params, report) = train_bayes(&data, &SolverConfig::default()).unwrap();
        assert!((report.best_objective - 3.0).abs() < 1e-3);
        for (a, b) in params.matrices().iter().zip(&axis_projectors(3)) {
            assert!(a.max_abs_diff(b) < 1e-3);
        }
        assert!(report.best_objective <= data.len() as f64 + 1e-6);
    }

    #[test]
    fn bayes_paths_agree() {
        for seed in 0..5 {
            let (data, _) = gen_subspace_data(4, 2, 15, 0.0, 0.6, seed).unwrap();
            let analytic = bayes_objective(&bayes_binary_analytic(&data).unwrap(), &data);
            let (_, report) = train_bayes_iterative(&data, &SolverConfig::default()).unwrap();
            assert!(
                (analytic - report.best_objective).abs() < 1e-4,
                "seed {seed}: {analytic} vs {}",
                report.best_objective
            );
        }
    }

    #[test]
    fn bayes_binary_delegates_to_closed_form() {
        let (data, _) = gen_subspace_data(3, 2, 10, 0.0, 0.4, 5).unwrap();
        let (params, report) = train_bayes(&data, &SolverConfig::default()).unwrap();
        assert_eq!(params, bayes_binary_analytic(&data).unwrap());
        assert_eq!(report.objective_trace.len(), 1);
    }

    #[test]
    fn mle_axis_pair() {
        let data = dataset(&[(e(2, 0), 0), (e(2, 1), 1)], 2);
        let (params, report) = train_mle(&data, &SolverConfig::default()).unwrap();
        assert!(report.best_objective.abs() < 1e-9);
        for (a, b) in params.matrices().iter().zip(&axis_projectors(2)) {
            assert!(a.max_abs_diff(b) < 1e-6);
        }
    }

    #[test]
    fn mle_zero_iterations_is_uniform() {
        let data = dataset(&[(e(3, 0), 0), (e(3, 1), 1), (e(3, 2), 2), (e(3, 0), 1)], 3);
        let cfg = SolverConfig {
            max_iters: 0,
            ..Default::default()
        };
        let (params, report) = train_mle(&data, &cfg).unwrap();
        assert_eq!(params, ModelParams::uniform(3, 3));
        assert!((report.best_objective - 4.0 * (1.0f64 / 3.0).ln()).abs() < 1e-12);
        assert_eq!(report.iterations, 0);
    }

    #[test]
    fn mle_improves_on_start_and_tracks_closed_form_bayes() {
        for seed in 0..5 {
            let (data, _) = gen_subspace_data(3, 2, 10, 0.0, 0.5, 100 + seed).unwrap();
            let (params, report) = train_mle(&data, &SolverConfig::default()).unwrap();
            let start = log_likelihood(&ModelParams::uniform(3, 2), &data);
            let bayes = log_likelihood(&bayes_binary_analytic(&data).unwrap(), &data);
            let ll = log_likelihood(&params, &data);
            assert!(ll >= start);
            assert!(ll >= bayes - 0.5, "seed {seed}: {ll} vs bayes {bayes}");
            assert_eq!(ll, report.best_objective);
        }
    }

    #[test]
    fn best_objective_is_monotone_and_is_the_trace_max() {
        let (data, _) = gen_subspace_data(4, 3, 8, 0.0, 0.4, 2).unwrap();
        let cfg = SolverConfig {
            max_iters: 300,
            ..SolverConfig::with_nu(0.3)
        };
        for kind in [SolverKind::MaxMargin, SolverKind::Bayes, SolverKind::Mle] {
            let (_, report) = train(kind, &data, &cfg).unwrap();
            let max = report
                .objective_trace
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(report.best_objective, max, "{kind}");
            assert_eq!(report.objective_trace[report.best_iterate_index], max);
            assert!(report.objective_trace.iter().all(|v| !v.is_nan()));
            assert!(report.feasibility.within(FEASIBILITY_TOL));
        }
    }

    #[test]
    fn decomposition_examples() {
        // a single example whose true-class probability is p, via A_1 = diag(p, 1 - p)
        for (p, expected) in [(1.0, 0.2), (0.5, 0.0), (0.4, -0.2)] {
            let params = ModelParams::new(vec![
                SymmetricMatrix::from_diagonal(&[p, 1.0 - p]),
                SymmetricMatrix::from_diagonal(&[1.0 - p, p]),
            ])
            .unwrap();
            let data = dataset(&[(e(2, 0), 0)], 2);
            let terms = objective_decomposition(&params, &data, 0.2, 1.0).unwrap();
            assert!((terms[0] - expected).abs() < 1e-12, "p={p}: {}", terms[0]);
        }
        let data = dataset(&[(e(2, 0), 0)], 2);
        assert!(objective_decomposition(&ModelParams::uniform(2, 2), &data, 0.0, 1.0).is_err());
    }

    #[test]
    fn margin_error_examples() {
        let params = ModelParams::new(axis_projectors(2)).unwrap();
        let data = dataset(&[(e(2, 0), 0), (e(2, 1), 1)], 2);
        let stats = margin_error_stats(&params, &data, 0.5).unwrap();
        assert_eq!(stats.fraction, 0.0);
        assert_eq!(stats.slacks, vec![0.0, 0.0]);

        let stats = margin_error_stats(&params, &data, 1.1).unwrap();
        assert_eq!(stats.fraction, 1.0);
        assert!(stats.slacks.iter().all(|s| (s - 0.1).abs() < 1e-12));

        let mixed = dataset(&[(e(2, 0), 0), (e(2, 1), 1), (e(2, 0), 1), (e(2, 1), 0)], 2);
        let stats = margin_error_stats(&params, &mixed, 0.0).unwrap();
        assert_eq!(stats.fraction, 0.5);
        assert!(margin_error_stats(&params, &mixed, f64::NAN).is_err());
    }

    #[test]
    fn analytic_bayes_beats_random_models() {
        let (data, _) = gen_subspace_data(3, 2, 10, 0.0, 0.8, 77).unwrap();
        let best = bayes_objective(&bayes_binary_analytic(&data).unwrap(), &data);
        for seed in 0..2000 {
            let m = random_feasible_model(3, 2, Spectrum::Mixed, seed).unwrap();
            assert!(bayes_objective(&m, &data) <= best + 1e-9);
        }
    }
}
