//! The class model `p(y|x) = xᵀ A_y x`, prediction, margins and the
//! zero-one loss together with its three convex upper bounds.
//!
//! Class indices are 0-based throughout the library API; the 1-based
//! convention only appears in files and on the command line.

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::symmat::{norm, SymmetricMatrix};

/// Entrywise tolerance on `Σ A_y − I` and on negative eigenvalues.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Inputs must have unit norm within this tolerance.
pub const UNIT_NORM_TOL: f64 = 1e-8;

/// Worst-case violation of the two feasibility constraints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasibilityResiduals {
    /// `max_ij |(Σ_y A_y − I)_ij|`
    pub sum_residual: f64,
    /// Smallest eigenvalue over all `A_y`.
    pub min_eigenvalue: f64,
}

impl FeasibilityResiduals {
    pub fn of(matrices: &[SymmetricMatrix]) -> Result<Self> {
        let dim = matrices[0].dim();
        let mut sum = SymmetricMatrix::zeros(dim);
        let mut min_eigenvalue = f64::INFINITY;
        for a in matrices {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: a.dim(),
                });
            }
            sum += a;
            min_eigenvalue = min_eigenvalue.min(a.min_eigenvalue()?);
        }
        Ok(FeasibilityResiduals {
            sum_residual: sum.max_abs_diff(&SymmetricMatrix::identity(dim)),
            min_eigenvalue,
        })
    }

    pub fn within(&self, tol: f64) -> bool {
        self.sum_residual <= tol && self.min_eigenvalue >= -tol
    }
}

/// A feasible set of class operators `A_1..A_k`: each PSD, summing to `I`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    matrices: Vec<SymmetricMatrix>,
}

impl ModelParams {
    /// Validates shape and feasibility at [`FEASIBILITY_TOL`].
    pub fn new(matrices: Vec<SymmetricMatrix>) -> Result<Self> {
        if matrices.len() < 2 {
            return Err(Error::invalid(format!(
                "a model needs at least 2 classes, got {}",
                matrices.len()
            )));
        }
        let residuals = FeasibilityResiduals::of(&matrices)?;
        if !residuals.within(FEASIBILITY_TOL) {
            return Err(Error::Infeasible(format!(
                "sum residual {:e}, min eigenvalue {:e}",
                residuals.sum_residual, residuals.min_eigenvalue
            )));
        }
        Ok(ModelParams { matrices })
    }

    /// `A_y = I / k` for every class.
    pub fn uniform(dim: usize, num_classes: usize) -> Self {
        assert!(num_classes >= 2, "a model needs at least 2 classes");
        let a = SymmetricMatrix::scaled_identity(dim, 1.0 / num_classes as f64);
        ModelParams {
            matrices: vec![a; num_classes],
        }
    }

    /// Skips validation; callers guarantee the matrices came out of a
    /// feasible-set projection.
    pub(crate) fn from_projected(matrices: Vec<SymmetricMatrix>) -> Self {
        debug_assert!(matrices.len() >= 2);
        ModelParams { matrices }
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn num_classes(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[SymmetricMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, class: usize) -> &SymmetricMatrix {
        &self.matrices[class]
    }

    pub fn into_matrices(self) -> Vec<SymmetricMatrix> {
        self.matrices
    }

    pub fn feasibility(&self) -> Result<FeasibilityResiduals> {
        FeasibilityResiduals::of(&self.matrices)
    }

    pub(crate) fn probs_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.matrices
            .iter()
            .map(|a| a.quad_form_unchecked(x))
            .collect()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let n = norm(x);
        if (n - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitNorm { norm: n });
        }
        Ok(())
    }

    fn check_class(&self, class: usize) -> Result<()> {
        if class >= self.num_classes() {
            return Err(Error::invalid(format!(
                "class index {class} out of range for {} classes",
                self.num_classes()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictionResult {
    pub probs: Vec<f64>,
    /// Argmax class, lowest index on ties.
    pub label: usize,
    /// `p(label|x)` minus the best competing probability.
    pub margin: f64,
}

/// `(xᵀ A_1 x, ..., xᵀ A_k x)` for a unit-norm `x`.
pub fn predict_proba(params: &ModelParams, x: &[f64]) -> Result<Vec<f64>> {
    params.check_input(x)?;
    Ok(params.probs_unchecked(x))
}

/// The normalized form `xᵀ A_y x / xᵀ (Σ_z A_z) x`, for operator sets that
/// need not sum to the identity.
pub fn predict_proba_general(matrices: &[SymmetricMatrix], x: &[f64]) -> Result<Vec<f64>> {
    let dim = matrices
        .first()
        .ok_or_else(|| Error::invalid("no class operators"))?
        .dim();
    let mut numerators = Vec::with_capacity(matrices.len());
    for a in matrices {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: a.dim(),
            });
        }
        numerators.push(a.quad_form(x)?);
    }
    let denominator: f64 = numerators.iter().sum();
    if denominator.abs() <= 1e-12 {
        return Err(Error::VanishingDenominator(denominator));
    }
    Ok(numerators.into_iter().map(|v| v / denominator).collect())
}

pub fn predict(params: &ModelParams, x: &[f64]) -> Result<PredictionResult> {
    let probs = predict_proba(params, x)?;
    let label = argmax(&probs);
    let margin = margin_from_probs(&probs, label);
    Ok(PredictionResult {
        probs,
        label,
        margin,
    })
}

/// `p(y|x) − max_{z≠y} p(z|x)`.
pub fn margin(params: &ModelParams, x: &[f64], class: usize) -> Result<f64> {
    params.check_class(class)?;
    Ok(margin_from_probs(&predict_proba(params, x)?, class))
}

/// 1 unless `class` is the unique argmax; ties count as errors.
pub fn zero_one_loss(params: &ModelParams, x: &[f64], class: usize) -> Result<f64> {
    params.check_class(class)?;
    Ok(zero_one_from_probs(&predict_proba(params, x)?, class))
}

pub fn argmax(probs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate().skip(1) {
        if p > probs[best] {
            best = i;
        }
    }
    best
}

/// Best competing probability and the lowest competitor index attaining it.
pub fn best_competitor(probs: &[f64], class: usize) -> (usize, f64) {
    let mut best = None;
    for (z, &p) in probs.iter().enumerate() {
        if z == class {
            continue;
        }
        match best {
            Some((_, bp)) if p <= bp => {}
            _ => best = Some((z, p)),
        }
    }
    best.expect("at least two classes")
}

pub fn margin_from_probs(probs: &[f64], class: usize) -> f64 {
    probs[class] - best_competitor(probs, class).1
}

pub fn zero_one_from_probs(probs: &[f64], class: usize) -> f64 {
    if probs[class] > best_competitor(probs, class).1 {
        0.0
    } else {
        1.0
    }
}

/// Linear bound `2(1 − p)`.
pub fn loss_bayes(p_true: f64) -> f64 {
    2.0 * (1.0 - p_true)
}

/// Log bound `−log₂ p`; `+∞` for `p ≤ 0`.
pub fn loss_ml(p_true: f64) -> f64 {
    if p_true <= 0.0 {
        f64::INFINITY
    } else {
        0.0 - p_true.log2()
    }
}

/// Margin bound `max{0, 1 + 1/η − 2p/η}`.
pub fn loss_margin(p_true: f64, eta: f64) -> f64 {
    assert!(eta > 0.0, "margin loss needs eta > 0, got {eta}");
    (1.0 + 1.0 / eta - 2.0 * p_true / eta).max(0.0)
}

/// Fraction of examples with `|p(a|x) − p(b|x)| < t`, for each threshold `t`.
pub fn prob_gap_curve(
    params: &ModelParams,
    data: &LabeledDataset,
    class_a: usize,
    class_b: usize,
    thresholds: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if class_a == class_b {
        return Err(Error::invalid("gap classes must differ"));
    }
    params.check_class(class_a)?;
    params.check_class(class_b)?;
    if data.is_empty() {
        return Err(Error::invalid("empty dataset"));
    }
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("gap thresholds must be sorted ascending"));
    }
    let mut gaps = Vec::with_capacity(data.len());
    for ex in data.examples() {
        let probs = predict_proba(params, &ex.x)?;
        gaps.push((probs[class_a] - probs[class_b]).abs());
    }
    let n = gaps.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&t| (t, gaps.iter().filter(|&&g| g < t).count() as f64 / n))
        .collect())
}
