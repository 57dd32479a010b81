//! Euclidean projection onto the feasible set
//! `S = {A_1..A_k : A_y ⪰ 0, Σ_y A_y = I}`.
//!
//! Two classes have a closed form: clamp the spectrum of `(A_1 − A_2 + I)/2`
//! to `[0, 1]`. For three or more classes we run Dykstra's algorithm between
//! the affine set `Σ A_y = I` and the product of PSD cones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{FeasibilityResiduals, ModelParams, FEASIBILITY_TOL};
use crate::symmat::{dot, SymmetricMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionConfig {
    pub max_dykstra_iters: usize,
    /// Stop once no entry of any `A_y` moves more than this between sweeps.
    pub convergence_tol: f64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig {
            max_dykstra_iters: 500,
            convergence_tol: 1e-9,
        }
    }
}

impl ProjectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_dykstra_iters < 1 {
            return Err(Error::invalid("max_dykstra_iters must be at least 1"));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::invalid("convergence_tol must be positive"));
        }
        Ok(())
    }
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues set to zero.
pub fn project_psd(m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    Ok(m.eig()?.map_spectrum(|l| l.max(0.0)))
}

/// Projection onto the affine set `Σ_y A_y = I`: `A_y − (Σ_z A_z − I)/k`.
pub fn project_sum_to_identity(mats: &[SymmetricMatrix]) -> Result<Vec<SymmetricMatrix>> {
    let dim = check_dims(mats)?;
    let mut excess = SymmetricMatrix::zeros(dim);
    for a in mats {
        excess += a;
    }
    excess -= &SymmetricMatrix::identity(dim);
    let share = 1.0 / mats.len() as f64;
    Ok(mats
        .iter()
        .map(|a| {
            let mut out = a.clone();
            out.axpy(-share, &excess);
            out
        })
        .collect())
}

/// Closed-form projection of a pair `(A_1, A_2)` onto the feasible set.
pub fn project_feasible_binary(
    a1: &SymmetricMatrix,
    a2: &SymmetricMatrix,
) -> Result<(SymmetricMatrix, SymmetricMatrix)> {
    if a1.dim() != a2.dim() {
        return Err(Error::DimensionMismatch {
            expected: a1.dim(),
            actual: a2.dim(),
        });
    }
    let identity = SymmetricMatrix::identity(a1.dim());
    let mut c = a1 - a2;
    c += &identity;
    let c = c.scaled(0.5);
    let p1 = c.eig()?.map_spectrum(|l| l.clamp(0.0, 1.0));
    let p2 = &identity - &p1;
    Ok((p1, p2))
}

/// Euclidean projection onto the feasible set: closed form for two classes,
/// Dykstra otherwise.
pub fn project_feasible(
    mats: &[SymmetricMatrix],
    cfg: &ProjectionConfig,
) -> Result<Vec<SymmetricMatrix>> {
    check_dims(mats)?;
    match mats {
        [a1, a2] => {
            let (p1, p2) = project_feasible_binary(a1, a2)?;
            Ok(vec![p1, p2])
        }
        _ => project_feasible_dykstra(mats, cfg),
    }
}

/// Dykstra's alternating projection with one correction term per set,
/// projecting onto the affine set first and the PSD cones second in every
/// sweep. Valid for any `k ≥ 2`.
///
/// If the sweep budget runs out, the last iterate is still returned when it
/// satisfies both feasibility constraints at [`FEASIBILITY_TOL`].
pub fn project_feasible_dykstra(
    mats: &[SymmetricMatrix],
    cfg: &ProjectionConfig,
) -> Result<Vec<SymmetricMatrix>> {
    cfg.validate()?;
    let dim = check_dims(mats)?;
    let k = mats.len();

    let mut x: Vec<SymmetricMatrix> = mats.to_vec();
    let mut p = vec![SymmetricMatrix::zeros(dim); k];
    let mut q = vec![SymmetricMatrix::zeros(dim); k];
    let mut sweeps = 0;

    while sweeps < cfg.max_dykstra_iters {
        sweeps += 1;
        let shifted: Vec<_> = x.iter().zip(&p).map(|(a, c)| a + c).collect();
        let y = project_sum_to_identity(&shifted)?;
        for ((pc, s), yy) in p.iter_mut().zip(&shifted).zip(&y) {
            *pc = s - yy;
        }

        let mut change: f64 = 0.0;
        for ((xi, qi), yi) in x.iter_mut().zip(q.iter_mut()).zip(&y) {
            let w = yi + qi;
            let next = project_psd(&w)?;
            *qi = &w - &next;
            change = change.max(next.max_abs_diff(xi));
            *xi = next;
        }
        if change < cfg.convergence_tol {
            break;
        }
    }

    let residuals = FeasibilityResiduals::of(&x)?;
    if !residuals.within(FEASIBILITY_TOL) {
        return Err(Error::ProjectionDiverged {
            iterations: sweeps,
            sum_residual: residuals.sum_residual,
            min_eigenvalue: residuals.min_eigenvalue,
        });
    }
    Ok(x)
}

fn check_dims(mats: &[SymmetricMatrix]) -> Result<usize> {
    if mats.len() < 2 {
        return Err(Error::invalid(format!(
            "projection needs at least 2 class operators, got {}",
            mats.len()
        )));
    }
    let dim = mats[0].dim();
    for a in mats {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: a.dim(),
            });
        }
    }
    Ok(dim)
}

/// How [`random_feasible_model`] distributes each basis direction over classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spectrum {
    /// Each direction belongs wholly to one class (round-robin), so every
    /// `A_y` is an orthogonal projector.
    Projector,
    /// Each direction is split over all classes with random simplex weights,
    /// giving eigenvalues anywhere in `[0, 1]`.
    Mixed,
}

/// Samples a feasible model sharing a random orthonormal eigenbasis.
pub fn random_feasible_model(
    dim: usize,
    num_classes: usize,
    spectrum: Spectrum,
    seed: u64,
) -> Result<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_feasible_model_with(dim, num_classes, spectrum, &mut rng)
}

pub fn random_feasible_model_with<R: Rng + ?Sized>(
    dim: usize,
    num_classes: usize,
    spectrum: Spectrum,
    rng: &mut R,
) -> Result<ModelParams> {
    if dim < 1 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if num_classes < 2 {
        return Err(Error::invalid("need at least 2 classes"));
    }
    let basis = random_orthonormal_basis(dim, rng);
    let weights: Vec<Vec<f64>> = (0..dim)
        .map(|j| match spectrum {
            Spectrum::Projector => {
                let mut w = vec![0.0; num_classes];
                w[j % num_classes] = 1.0;
                w
            }
            Spectrum::Mixed => random_simplex_point(num_classes, rng),
        })
        .collect();
    Ok(model_from_basis(&basis, &weights))
}

/// `A_y = Σ_j weights[j][y] v_j v_jᵀ`; each weight row must sum to one.
pub(crate) fn model_from_basis(basis: &[Vec<f64>], weights: &[Vec<f64>]) -> ModelParams {
    let dim = basis.len();
    let k = weights[0].len();
    let mut mats = vec![SymmetricMatrix::zeros(dim); k];
    for (v, w) in basis.iter().zip(weights) {
        for (a, &wy) in mats.iter_mut().zip(w) {
            if wy != 0.0 {
                a.add_outer(wy, v);
            }
        }
    }
    ModelParams::from_projected(mats)
}

/// Uniform point on the probability simplex (flat Dirichlet).
pub(crate) fn random_simplex_point<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Columns of a random orthogonal matrix, by Gram-Schmidt on Gaussian vectors.
pub(crate) fn random_orthonormal_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        // two passes keep the basis orthogonal to machine precision
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|vi| *vi /= n);
            basis.push(v);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym2(a: f64, b: f64, c: f64) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&[vec![a, b], vec![b, c]]).unwrap()
    }

    fn dist2(a: &[SymmetricMatrix], b: &[SymmetricMatrix]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let d = x - y;
                d.inner(&d)
            })
            .sum()
    }

    #[test]
    fn psd_clamps_diagonal() {
        let p = project_psd(&SymmetricMatrix::from_diagonal(&[2.0, -0.5])).unwrap();
        assert!(p.max_abs_diff(&SymmetricMatrix::from_diagonal(&[2.0, 0.0])) < 1e-15);
    }

    #[test]
    fn psd_fixed_point() {
        let m = sym2(2.0, 0.5, 1.0);
        assert!(project_psd(&m).unwrap().max_abs_diff(&m) <= 1e-9);
    }

    #[test]
    fn psd_of_swap_matches_grid_search() {
        let m = sym2(0.0, 1.0, 0.0);
        let p = project_psd(&m).unwrap();
        assert!(p.max_abs_diff(&sym2(0.5, 0.5, 0.5)) <= 1e-12);

        // brute-force nearest PSD over a grid of [[a, b], [b, c]] with ac >= b²
        let steps = 100;
        let mut best = (f64::INFINITY, (0.0, 0.0, 0.0));
        for ia in 0..=steps {
            for ib in 0..=steps {
                for ic in 0..=steps {
                    let (a, b, c) = (
                        ia as f64 / steps as f64,
                        ib as f64 / steps as f64,
                        ic as f64 / steps as f64,
                    );
                    if a * c < b * b {
                        continue;
                    }
                    let dist = a * a + 2.0 * (b - 1.0) * (b - 1.0) + c * c;
                    if dist < best.0 {
                        best = (dist, (a, b, c));
                    }
                }
            }
        }
        let (a, b, c) = best.1;
        assert!((a - 0.5).abs() <= 0.01 && (b - 0.5).abs() <= 0.01 && (c - 0.5).abs() <= 0.01);
        let d = &p - &sym2(0.0, 1.0, 0.0);
        assert!(d.inner(&d) <= best.0 + 1e-12);
    }

    #[test]
    fn sum_projection_examples() {
        let fixed = vec![sym2(0.3, 0.1, 0.6), sym2(0.7, -0.1, 0.4)];
        let out = project_sum_to_identity(&fixed).unwrap();
        assert!(dist2(&out, &fixed) < 1e-30);

        let zeros = vec![SymmetricMatrix::zeros(2); 2];
        let out = project_sum_to_identity(&zeros).unwrap();
        for a in &out {
            assert!(a.max_abs_diff(&SymmetricMatrix::scaled_identity(2, 0.5)) < 1e-15);
        }

        let input = vec![
            SymmetricMatrix::from_diagonal(&[2.0, 0.0]),
            SymmetricMatrix::zeros(2),
        ];
        let out = project_sum_to_identity(&input).unwrap();
        assert!(out[0].max_abs_diff(&SymmetricMatrix::from_diagonal(&[1.5, 0.5])) < 1e-15);
        assert!(out[1].max_abs_diff(&SymmetricMatrix::from_diagonal(&[-0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn sum_projection_is_least_squares_optimal() {
        // For diagonal 2x2 inputs, each coordinate is an independent least
        // squares problem: minimize (u - a)² + (v - b)² subject to u + v = 1.
        // Scan u on a fine grid and compare.
        let (a, b) = (2.0, 0.0);
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=40_000 {
            let u = -2.0 + i as f64 * 1e-4;
            let cost = (u - a).powi(2) + (1.0 - u - b).powi(2);
            if cost < best.0 {
                best = (cost, u);
            }
        }
        assert!((best.1 - 1.5).abs() < 1e-4);
    }

    #[test]
    fn sum_projection_rejects_mismatch() {
        let mats = vec![SymmetricMatrix::zeros(2), SymmetricMatrix::zeros(3)];
        assert!(matches!(
            project_sum_to_identity(&mats),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(project_feasible_binary(&mats[0], &mats[1]).is_err());
    }

    /// Per-coordinate projection onto {u + v = 1, u, v >= 0}, valid when
    /// both inputs are diagonal.
    fn pair_simplex(a: f64, b: f64) -> (f64, f64) {
        let u = ((a - b + 1.0) / 2.0).clamp(0.0, 1.0);
        (u, 1.0 - u)
    }

    #[test]
    fn binary_examples() {
        let a1 = SymmetricMatrix::from_diagonal(&[1.0, 0.0]);
        let a2 = SymmetricMatrix::from_diagonal(&[0.0, 1.0]);
        let (p1, p2) = project_feasible_binary(&a1, &a2).unwrap();
        assert!(p1.max_abs_diff(&a1) < 1e-15 && p2.max_abs_diff(&a2) < 1e-15);

        let (p1, p2) = project_feasible_binary(
            &SymmetricMatrix::from_diagonal(&[3.0, 0.0]),
            &SymmetricMatrix::zeros(2),
        )
        .unwrap();
        let (u0, v0) = pair_simplex(3.0, 0.0);
        let (u1, v1) = pair_simplex(0.0, 0.0);
        assert!(p1.max_abs_diff(&SymmetricMatrix::from_diagonal(&[u0, u1])) < 1e-15);
        assert!(p2.max_abs_diff(&SymmetricMatrix::from_diagonal(&[v0, v1])) < 1e-15);
        assert!(p1.max_abs_diff(&SymmetricMatrix::from_diagonal(&[1.0, 0.5])) < 1e-15);
        assert!(p2.max_abs_diff(&SymmetricMatrix::from_diagonal(&[0.0, 0.5])) < 1e-15);

        let (p1, p2) =
            project_feasible_binary(&SymmetricMatrix::zeros(2), &SymmetricMatrix::zeros(2))
                .unwrap();
        let half = SymmetricMatrix::scaled_identity(2, 0.5);
        assert!(p1.max_abs_diff(&half) < 1e-15 && p2.max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn dykstra_diagonal_three_class_example() {
        let input = vec![
            SymmetricMatrix::from_diagonal(&[1.0, 1.0]),
            SymmetricMatrix::from_diagonal(&[1.0, 0.0]),
            SymmetricMatrix::from_diagonal(&[-1.0, 0.0]),
        ];
        let out = project_feasible(&input, &ProjectionConfig::default()).unwrap();
        // coordinate 0: (1, 1, -1) -> (0.5, 0.5, 0); coordinate 1: (1, 0, 0) stays
        let expected = [
            SymmetricMatrix::from_diagonal(&[0.5, 1.0]),
            SymmetricMatrix::from_diagonal(&[0.5, 0.0]),
            SymmetricMatrix::from_diagonal(&[0.0, 0.0]),
        ];
        for (o, e) in out.iter().zip(&expected) {
            assert!(o.max_abs_diff(e) <= 1e-5, "{o:?} vs {e:?}");
        }
    }

    #[test]
    fn feasible_inputs_are_fixed_points() {
        for k in 2..5 {
            let m = random_feasible_model(3, k, Spectrum::Mixed, k as u64).unwrap();
            let out = project_feasible(m.matrices(), &ProjectionConfig::default()).unwrap();
            assert!(dist2(&out, m.matrices()).sqrt() <= 1e-6);
        }
    }

    #[test]
    fn random_models_are_feasible_and_deterministic() {
        let m = random_feasible_model(2, 2, Spectrum::Projector, 1).unwrap();
        for a in m.matrices() {
            let eig = a.eig().unwrap();
            assert!((eig.eigenvalues()[0] - 1.0).abs() < 1e-12);
            assert!(eig.eigenvalues()[1].abs() < 1e-12);
        }
        for seed in 0..10 {
            let m = random_feasible_model(4, 2, Spectrum::Mixed, seed).unwrap();
            assert!(ModelParams::new(m.matrices().to_vec()).is_ok());
        }
        assert_eq!(
            random_feasible_model(5, 3, Spectrum::Mixed, 42).unwrap(),
            random_feasible_model(5, 3, Spectrum::Mixed, 42).unwrap()
        );
        // fewer directions than classes leaves some operators at zero
        let m = random_feasible_model(1, 3, Spectrum::Projector, 0).unwrap();
        assert_eq!(m.matrix(2).max_abs(), 0.0);
        assert!(random_feasible_model(3, 1, Spectrum::Mixed, 0).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = ProjectionConfig {
            max_dykstra_iters: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ProjectionConfig {
            convergence_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    fn mats_strategy(k: usize, d: usize) -> impl Strategy<Value = Vec<SymmetricMatrix>> {
        prop::collection::vec(prop::collection::vec(-2.0..2.0f64, d * d), k).prop_map(move |raw| {
            raw.into_iter()
                .map(|v| SymmetricMatrix::from_fn(d, |i, j| v[i * d + j]))
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eigenvalue_box_and_idempotence(mats in (2usize..5, 1usize..5).prop_flat_map(|(k, d)| mats_strategy(k, d))) {
            let cfg = ProjectionConfig::default();
            let once = project_feasible(&mats, &cfg).unwrap();
            for a in &once {
                let eig = a.eig().unwrap();
                prop_assert!(eig.eigenvalues().iter().all(|&l| (-1e-6..=1.0 + 1e-6).contains(&l)));
            }
            let twice = project_feasible(&once, &cfg).unwrap();
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!(a.max_abs_diff(b) <= 1e-6);
            }
        }

        #[test]
        fn nonexpansive(pair in (2usize..4, 1usize..4).prop_flat_map(|(k, d)| (mats_strategy(k, d), mats_strategy(k, d)))) {
            let cfg = ProjectionConfig::default();
            let (x, y) = pair;
            let px = project_feasible(&x, &cfg).unwrap();
            let py = project_feasible(&y, &cfg).unwrap();
            prop_assert!(dist2(&px, &py).sqrt() <= dist2(&x, &y).sqrt() + 1e-9);
        }

        #[test]
        fn binary_agrees_with_dykstra(mats in (1usize..5).prop_flat_map(|d| mats_strategy(2, d))) {
            let closed = project_feasible(&mats, &ProjectionConfig::default()).unwrap();
            let iterative = project_feasible_dykstra(&mats, &ProjectionConfig::default()).unwrap();
            for (a, b) in closed.iter().zip(&iterative) {
                prop_assert!(a.max_abs_diff(b) <= 1e-6);
            }
        }
    }
}
