// Choosing the slack penalty through `ν`: with `β = 1/(ν n)` at most a
// fraction `ν` of the training points end up with positive slack.
//
// cargo run --example nu_property

use sdpm::data::gen_subspace_data;
use sdpm::solvers::{train_maxmargin, SolverConfig};

pub const NUS: [f64; 4] = [0.1, 0.25, 0.5, 0.9];

pub struct NuRow {
    pub nu: f64,
    pub eta: f64,
    pub margin_error_fraction: f64,
}

pub fn run_example() -> sdpm::Result<Vec<NuRow>> {
    let (data, _) = gen_subspace_data(4, 2, 20, 0.4, 0.3, 5)?;
    NUS.iter()
        .map(|&nu| {
            let (_, report) = train_maxmargin(&data, &SolverConfig::with_nu(nu))?;
            Ok(NuRow {
                nu,
                eta: report.eta.unwrap_or(f64::NAN),
                margin_error_fraction: report.margin_error_fraction.unwrap_or(f64::NAN),
            })
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> sdpm::Result<()> {
    println!("{:>5} {:>9} {:>14}", "nu", "eta", "margin errors");
    for row in run_example()? {
        println!(
            "{:>5} {:>9.4} {:>14.3}",
            row.nu, row.eta, row.margin_error_fraction
        );
    }
    Ok(())
}
