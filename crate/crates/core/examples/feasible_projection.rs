// Projecting arbitrary symmetric matrices onto the matrix simplex
// `{A_y ⪰ 0, Σ A_y = I}`.
//
// Two classes have a closed form; the general path is Dykstra's algorithm.
// Both agree on pairs, and projecting twice changes nothing.
//
// cargo run --example feasible_projection

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdpm::feasible::{project_feasible, project_feasible_binary, project_feasible_dykstra};
use sdpm::{FeasibilityResiduals, ProjectionConfig, SymmetricMatrix};

pub struct ProjectionOutcome {
    /// Largest entrywise gap between the closed form and Dykstra on pairs.
    pub binary_vs_dykstra: f64,
    /// Largest change when re-projecting an already projected triple.
    pub idempotence_gap: f64,
    pub triple_residuals: FeasibilityResiduals,
}

fn random_sym(d: usize, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(d, |_, _| rng.random_range(-2.0..2.0))
}

pub fn run_example() -> sdpm::Result<ProjectionOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = ProjectionConfig::default();

    let mut binary_vs_dykstra: f64 = 0.0;
    for _ in 0..10 {
        let a1 = random_sym(3, &mut rng);
        let a2 = random_sym(3, &mut rng);
        let (p1, p2) = project_feasible_binary(&a1, &a2)?;
        let dk = project_feasible_dykstra(&[a1, a2], &cfg)?;
        binary_vs_dykstra = binary_vs_dykstra
            .max(p1.max_abs_diff(&dk[0]))
            .max(p2.max_abs_diff(&dk[1]));
    }

    let triple: Vec<SymmetricMatrix> = (0..3).map(|_| random_sym(3, &mut rng)).collect();
    let once = project_feasible(&triple, &cfg)?;
    let twice = project_feasible(&once, &cfg)?;
    let idempotence_gap = once
        .iter()
        .zip(&twice)
        .map(|(a, b)| a.max_abs_diff(b))
        .fold(0.0, f64::max);

    Ok(ProjectionOutcome {
        binary_vs_dykstra,
        idempotence_gap,
        triple_residuals: FeasibilityResiduals::of(&once)?,
    })
}

#[allow(dead_code)]
fn main() -> sdpm::Result<()> {
    let out = run_example()?;
    println!(
        "closed form vs Dykstra, max gap:  {:.3e}",
        out.binary_vs_dykstra
    );
    println!(
        "re-projection change (k = 3):     {:.3e}",
        out.idempotence_gap
    );
    println!(
        "k = 3 result: max |sum - I| = {:.3e}, min eigenvalue = {:.3e}",
        out.triple_residuals.sum_residual, out.triple_residuals.min_eigenvalue
    );
    Ok(())
}
