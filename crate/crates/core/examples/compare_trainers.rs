// All three trainers on a three-class subspace problem, scored on a held-out
// split with the full set of losses and a probability-gap curve.
//
// cargo run --example compare_trainers

use sdpm::data::{gen_subspace_data, train_validation_split};
use sdpm::report::{evaluate, EvalReport, GapRequest, DEFAULT_REPORT_ETA};
use sdpm::solvers::{train, SolverConfig, SolverKind};

pub fn run_example() -> sdpm::Result<Vec<(SolverKind, EvalReport)>> {
    let (data, _) = gen_subspace_data(6, 3, 30, 0.2, 0.15, 21)?;
    let (train_set, valid) = train_validation_split(&data, 0.7, 1)?;
    let gap = GapRequest {
        class_a: 0,
        class_b: 1,
        thresholds: vec![0.1, 0.25, 0.5],
    };
    [SolverKind::MaxMargin, SolverKind::Bayes, SolverKind::Mle]
        .into_iter()
        .map(|kind| {
            let cfg = SolverConfig {
                max_iters: 500,
                ..SolverConfig::with_nu(0.2)
            };
            let (params, _) = train(kind, &train_set, &cfg)?;
            Ok((
                kind,
                evaluate(&params, &valid, DEFAULT_REPORT_ETA, Some(&gap))?,
            ))
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> sdpm::Result<()> {
    println!(
        "{:>10} {:>9} {:>8} {:>8} {:>8} {:>8}",
        "solver", "accuracy", "margin", "bayes", "ml", "hinge"
    );
    for (kind, r) in run_example()? {
        println!(
            "{:>10} {:>9.3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
            kind.to_string(),
            r.accuracy,
            r.mean_margin,
            r.mean_bayes,
            r.mean_ml,
            r.mean_margin_loss
        );
        if let Some(curve) = &r.gap_curve {
            let parts: Vec<String> = curve.iter().map(|(t, f)| format!("{t}:{f:.2}")).collect();
            println!("{:>10} |p1 - p2| < t  {}", "", parts.join("  "));
        }
    }
    Ok(())
}
