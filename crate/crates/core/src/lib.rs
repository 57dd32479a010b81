//! # sdpm
//!
//! Probabilistic classification with semidefinite class models. Each class
//! `y` owns a positive semidefinite operator `A_y`, the operators sum to the
//! identity, and for a unit-norm input `x`
//!
//! ```text
//! p(y|x) = xᵀ A_y x
//! ```
//!
//! When every `A_y` is an orthogonal projector, classes are orthogonal
//! linear subspaces; the feasible set relaxes this to eigenvalues in
//! `[0, 1]`. The quantum-detection reading is direct: the `A_y` form a
//! measurement (a POVM) and `xxᵀ` a pure state.
//!
//! Three trainers fit the operators:
//!
//! * [`solvers::train_maxmargin`]: maximizes the minimum probability margin
//!   with slacks, by projected subgradient ascent;
//! * [`solvers::train_bayes`]: maximizes the summed probability of the true
//!   class, in closed form for two classes;
//! * [`solvers::train_mle`]: maximizes the log-likelihood.
//!
//! Each step is followed by a Euclidean projection onto the feasible set
//! ([`feasible::project_feasible`]).
//!
//! The library uses 0-based class indices. Dataset files, model files and
//! the `sdpm` binary use 1-based labels.
//!
//! Second-order kernel SVMs learn the same family of predictors without the
//! PSD and sum-to-identity constraints; no SVM baseline is included here.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod data;
pub mod error;
pub mod feasible;
pub mod io;
pub mod model;
pub mod report;
pub mod solvers;
pub mod symmat;

pub use data::{Example, LabeledDataset};
pub use error::{Error, Result};
pub use feasible::ProjectionConfig;
pub use model::{FeasibilityResiduals, ModelParams, PredictionResult};
pub use solvers::{SolverConfig, SolverKind, Tradeoff, TrainReport};
pub use symmat::{EigenDecomposition, SymmetricMatrix};
