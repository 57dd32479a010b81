// The three convex surrogates against the zero-one loss of a binary
// prediction, tabulated over `p(y|x)`.
//
// cargo run --example loss_bounds

use sdpm::model::{loss_bayes, loss_margin, loss_ml};

pub const ETAS: [f64; 4] = [0.1, 0.2, 0.5, 1.0];

pub struct LossRow {
    pub p: f64,
    pub zero_one: f64,
    pub bayes: f64,
    pub ml: f64,
    pub margin: Vec<f64>,
}

/// Binary case: the true class wins only when `p > 1/2`.
pub fn run_example() -> sdpm::Result<Vec<LossRow>> {
    Ok((0..=20)
        .map(|i| {
            let p = i as f64 / 20.0;
            LossRow {
                p,
                zero_one: if p > 0.5 { 0.0 } else { 1.0 },
                bayes: loss_bayes(p),
                ml: loss_ml(p),
                margin: ETAS.iter().map(|&eta| loss_margin(p, eta)).collect(),
            }
        })
        .collect())
}

#[allow(dead_code)]
fn main() -> sdpm::Result<()> {
    print!("{:>5} {:>5} {:>7} {:>7}", "p", "0-1", "bayes", "ml");
    for eta in ETAS {
        print!(" {:>8}", format!("eta={eta}"));
    }
    println!();
    for row in run_example()? {
        print!(
            "{:>5.2} {:>5} {:>7.3} {:>7.3}",
            row.p, row.zero_one, row.bayes, row.ml
        );
        for m in &row.margin {
            print!(" {m:>8.3}");
        }
        println!();
    }
    Ok(())
}
