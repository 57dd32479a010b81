// Two classes living on the lines spanned by (1, 1) and (-1, 1).
//
// Max-margin training with beta = 0.1 on five points per class recovers the
// two line projectors: spectra {1, 0} and {0, 1}, each class's top
// eigenvector along its own line, and certain predictions on every point.
//
// cargo run --example xor_subspaces

use sdpm::data::gen_xor_subspaces;
use sdpm::model::predict_proba;
use sdpm::solvers::{train_maxmargin, SolverConfig};
use sdpm::{ModelParams, TrainReport};

pub struct XorOutcome {
    pub params: ModelParams,
    pub report: TrainReport,
    pub spectra: Vec<Vec<f64>>,
    /// Angle in degrees between each class's top eigenvector and its line.
    pub angles: Vec<f64>,
    pub min_true_prob: f64,
}

pub fn run_example() -> sdpm::Result<XorOutcome> {
    let data = gen_xor_subspaces(5, 0.0, 7)?;
    let (params, report) = train_maxmargin(&data, &SolverConfig::with_beta(0.1))?;

    let r = std::f64::consts::FRAC_1_SQRT_2;
    let lines = [[r, r], [-r, r]];
    let mut spectra = Vec::new();
    let mut angles = Vec::new();
    for (a, line) in params.matrices().iter().zip(&lines) {
        let eig = a.eig()?;
        spectra.push(eig.eigenvalues().to_vec());
        let top = eig.eigenvector(0);
        let cos = (top[0] * line[0] + top[1] * line[1]).abs().min(1.0);
        angles.push(cos.acos().to_degrees());
    }
    let mut min_true_prob = f64::INFINITY;
    for ex in data.examples() {
        min_true_prob = min_true_prob.min(predict_proba(&params, &ex.x)?[ex.class]);
    }
    Ok(XorOutcome {
        params,
        report,
        spectra,
        angles,
        min_true_prob,
    })
}

#[allow(dead_code)]
fn main() -> sdpm::Result<()> {
    let out = run_example()?;
    println!(
        "iterations {}  best objective {:.6}  eta {:.6}",
        out.report.iterations,
        out.report.best_objective,
        out.report.eta.unwrap_or(f64::NAN)
    );
    for (y, (spectrum, angle)) in out.spectra.iter().zip(&out.angles).enumerate() {
        println!(
            "A_{}: eigenvalues [{:.6}, {:.6}], top eigenvector {:.4} deg off its line",
            y + 1,
            spectrum[0],
            spectrum[1],
            angle
        );
    }
    println!(
        "smallest p(y_i|x_i) over the sample: {:.6}",
        out.min_true_prob
    );
    Ok(())
}
