// Optimal-Bayes training for two classes.
//
// The closed form diagonalizes the class-scatter difference and hands each
// eigendirection to whichever class dominates it. The iterative trainer
// should never do better. When the labels conflict exactly, the direction is
// split evenly.
//
// cargo run --example bayes_closed_form

use sdpm::data::{gen_subspace_data, Example};
use sdpm::model::predict_proba;
use sdpm::solvers::{bayes_binary_analytic, bayes_objective, train_bayes_iterative, SolverConfig};
use sdpm::LabeledDataset;

pub struct BayesOutcome {
    pub analytic_objective: f64,
    pub iterative_objective: f64,
    pub iterations: usize,
    /// `p(·|e_1)` for the conflicting-label dataset.
    pub tie_probs: Vec<f64>,
}

pub fn run_example() -> sdpm::Result<BayesOutcome> {
    let (data, _) = gen_subspace_data(3, 2, 15, 0.3, 0.2, 11)?;
    let analytic = bayes_binary_analytic(&data)?;
    let (iterative, report) = train_bayes_iterative(&data, &SolverConfig::default())?;

    let conflict = LabeledDataset::new(
        vec![
            Example {
                x: vec![1.0, 0.0],
                class: 0,
            },
            Example {
                x: vec![1.0, 0.0],
                class: 1,
            },
        ],
        2,
    )?;
    let tie = bayes_binary_analytic(&conflict)?;

    Ok(BayesOutcome {
        analytic_objective: bayes_objective(&analytic, &data),
        iterative_objective: bayes_objective(&iterative, &data),
        iterations: report.iterations,
        tie_probs: predict_proba(&tie, &[1.0, 0.0])?,
    })
}

#[allow(dead_code)]
fn main() -> sdpm::Result<()> {
    let out = run_example()?;
    println!(
        "sum of p(y_i|x_i), closed form:  {:.9}",
        out.analytic_objective
    );
    println!(
        "sum of p(y_i|x_i), iterative:    {:.9} after {} steps",
        out.iterative_objective, out.iterations
    );
    println!(
        "conflicting labels at e_1: p = ({:.3}, {:.3})",
        out.tie_probs[0], out.tie_probs[1]
    );
    Ok(())
}
