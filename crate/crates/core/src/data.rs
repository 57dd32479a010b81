//! Labeled datasets: ingestion with mandatory unit-norm scaling, the text
//! file format, synthetic generators and seeded splits.
//!
//! File format: one example per line, comma separated. The first field is the
//! 1-based integer label, the rest are real features. Lines starting with `#`
//! and blank lines are skipped.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::feasible::{model_from_basis, random_orthonormal_basis};
use crate::model::{ModelParams, UNIT_NORM_TOL};
use crate::symmat::norm;

#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    /// Unit-norm feature vector.
    pub x: Vec<f64>,
    /// 0-based class index.
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    dim: usize,
    num_classes: usize,
    examples: Vec<Example>,
    raw_norms: Vec<f64>,
}

impl LabeledDataset {
    /// Wraps already-normalized examples.
    pub fn new(examples: Vec<Example>, num_classes: usize) -> Result<Self> {
        let raw_norms = vec![1.0; examples.len()];
        Self::assemble(examples, raw_norms, num_classes)
    }

    /// Scales every row to unit norm, keeping the original norms.
    pub fn from_raw(rows: Vec<(Vec<f64>, usize)>, num_classes: Option<usize>) -> Result<Self> {
        let mut examples = Vec::with_capacity(rows.len());
        let mut raw_norms = Vec::with_capacity(rows.len());
        for (i, (x, class)) in rows.into_iter().enumerate() {
            let n = norm(&x);
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::invalid(format!("example {i} has norm {n}")));
            }
            examples.push(Example {
                x: x.into_iter().map(|v| v / n).collect(),
                class,
            });
            raw_norms.push(n);
        }
        let k = num_classes.unwrap_or_else(|| observed_classes(&examples));
        Self::assemble(examples, raw_norms, k)
    }

    fn assemble(examples: Vec<Example>, raw_norms: Vec<f64>, num_classes: usize) -> Result<Self> {
        let dim = examples
            .first()
            .ok_or_else(|| Error::invalid("no examples"))?
            .x
            .len();
        if dim == 0 {
            return Err(Error::invalid("examples have no features"));
        }
        let observed = observed_classes(&examples);
        if observed > num_classes {
            return Err(Error::invalid(format!(
                "label {observed} exceeds the declared {num_classes} classes"
            )));
        }
        for (i, ex) in examples.iter().enumerate() {
            if ex.x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: ex.x.len(),
                });
            }
            let n = norm(&ex.x);
            if (n - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::invalid(format!(
                    "example {i} is not unit-norm ({n})"
                )));
            }
        }
        Ok(LabeledDataset {
            dim,
            num_classes,
            examples,
            raw_norms,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn raw_norms(&self) -> &[f64] {
        &self.raw_norms
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for ex in &self.examples {
            counts[ex.class] += 1;
        }
        counts
    }

    fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            dim: self.dim,
            num_classes: self.num_classes,
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            raw_norms: indices.iter().map(|&i| self.raw_norms[i]).collect(),
        }
    }
}

fn observed_classes(examples: &[Example]) -> usize {
    examples.iter().map(|e| e.class + 1).max().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Number of classes when it exceeds the largest label in the file.
    pub num_classes: Option<usize>,
}

pub fn load_dataset(path: impl AsRef<Path>, options: &LoadOptions) -> Result<LabeledDataset> {
    let text = std::fs::read_to_string(path)?;
    parse_dataset(&text, options)
}

pub fn parse_dataset(text: &str, options: &LoadOptions) -> Result<LabeledDataset> {
    let mut examples = Vec::new();
    let mut raw_norms = Vec::new();
    let mut dim = None;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split(',').map(str::trim);
        let label_field = fields.next().unwrap_or_default();
        let label: i64 = label_field.parse().map_err(|_| Error::Parse {
            line: line_no,
            column: Some(1),
            message: format!("label {label_field:?} is not an integer"),
        })?;
        if label < 1 {
            return Err(Error::Parse {
                line: line_no,
                column: Some(1),
                message: format!("label {label} is below 1"),
            });
        }

        let mut x = Vec::new();
        for (j, field) in fields.enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                column: Some(j + 2),
                message: format!("{field:?} is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    column: Some(j + 2),
                    message: format!("{field:?} is not finite"),
                });
            }
            x.push(value);
        }
        if x.is_empty() {
            return Err(Error::parse(line_no, "no features"));
        }
        match dim {
            None => dim = Some(x.len()),
            Some(d) if d != x.len() => {
                return Err(Error::parse(
                    line_no,
                    format!("expected {d} features, found {}", x.len()),
                ))
            }
            _ => {}
        }

        let n = norm(&x);
        if n == 0.0 {
            return Err(Error::parse(line_no, "zero-norm feature vector"));
        }
        examples.push(Example {
            x: x.into_iter().map(|v| v / n).collect(),
            class: (label - 1) as usize,
        });
        raw_norms.push(n);
    }

    if examples.is_empty() {
        return Err(Error::invalid("no examples"));
    }
    let k = options
        .num_classes
        .unwrap_or_else(|| observed_classes(&examples));
    LabeledDataset::assemble(examples, raw_norms, k)
}

/// Renders a dataset in the loader's format (1-based labels, shortest
/// round-trip decimals).
pub fn format_dataset(data: &LabeledDataset) -> String {
    let mut out = String::new();
    for ex in data.examples() {
        write!(out, "{}", ex.class + 1).unwrap();
        for v in &ex.x {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn save_dataset(data: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_dataset(data))?;
    Ok(())
}

/// Two classes on the lines spanned by `(1, 1)` and `(−1, 1)`.
///
/// Positions along each line are uniform on `[−1, −0.2] ∪ [0.2, 1]`, then
/// isotropic Gaussian noise with per-coordinate deviation `noise` is added
/// before normalizing. Class 0 is the `(1, 1)` line.
pub fn gen_xor_subspaces(points_per_class: usize, noise: f64, seed: u64) -> Result<LabeledDataset> {
    if points_per_class < 1 {
        return Err(Error::invalid("points_per_class must be at least 1"));
    }
    if !(noise >= 0.0) {
        return Err(Error::invalid("noise must be nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let directions = [[r, r], [-r, r]];
    let mut rows = Vec::with_capacity(2 * points_per_class);
    for (class, dir) in directions.iter().enumerate() {
        for _ in 0..points_per_class {
            let magnitude = rng.random_range(0.2..=1.0);
            let t = if rng.random::<bool>() {
                magnitude
            } else {
                -magnitude
            };
            let point = noisy_point(dir.iter().map(|v| t * v).collect(), noise, &mut rng);
            rows.push((point, class));
        }
    }
    LabeledDataset::from_raw(rows, Some(2))
}

/// Data drawn from orthogonal class subspaces, together with the model that
/// generated it.
///
/// The ground truth shares one random orthonormal basis; direction `j`
/// belongs to class `j mod k`. With `eigenvalue_spread = 0` each `A_y` is the
/// projector onto its class subspace; a positive spread moves a random
/// fraction (up to `spread`) of each direction's weight evenly onto the other
/// classes. Points are Gaussian combinations of their class's directions
/// plus isotropic noise of per-coordinate deviation `noise`.
pub fn gen_subspace_data(
    dim: usize,
    num_classes: usize,
    points_per_class: usize,
    eigenvalue_spread: f64,
    noise: f64,
    seed: u64,
) -> Result<(LabeledDataset, ModelParams)> {
    if num_classes < 2 {
        return Err(Error::invalid("need at least 2 classes"));
    }
    if dim < num_classes {
        return Err(Error::invalid(format!(
            "dimension {dim} is smaller than the number of classes {num_classes}"
        )));
    }
    if points_per_class < 1 {
        return Err(Error::invalid("points_per_class must be at least 1"));
    }
    if !(0.0..1.0).contains(&eigenvalue_spread) {
        return Err(Error::invalid("eigenvalue_spread must lie in [0, 1)"));
    }
    if !(noise >= 0.0) {
        return Err(Error::invalid("noise must be nonnegative"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = random_orthonormal_basis(dim, &mut rng);
    let weights: Vec<Vec<f64>> = (0..dim)
        .map(|j| {
            let owner = j % num_classes;
            let moved = if eigenvalue_spread > 0.0 {
                eigenvalue_spread * rng.random::<f64>()
            } else {
                0.0
            };
            let share = moved / (num_classes - 1) as f64;
            (0..num_classes)
                .map(|y| if y == owner { 1.0 - moved } else { share })
                .collect()
        })
        .collect();
    let truth = model_from_basis(&basis, &weights);

    let mut rows = Vec::with_capacity(num_classes * points_per_class);
    for class in 0..num_classes {
        let owned: Vec<&Vec<f64>> = basis.iter().skip(class).step_by(num_classes).collect();
        for _ in 0..points_per_class {
            let clean = loop {
                let mut x = vec![0.0; dim];
                for v in &owned {
                    let c: f64 = rng.sample(StandardNormal);
                    x.iter_mut()
                        .zip(v.iter())
                        .for_each(|(xi, vi)| *xi += c * vi);
                }
                let n = norm(&x);
                if n > 1e-6 {
                    break x.into_iter().map(|v| v / n).collect::<Vec<_>>();
                }
            };
            rows.push((noisy_point(clean, noise, &mut rng), class));
        }
    }
    Ok((LabeledDataset::from_raw(rows, Some(num_classes))?, truth))
}

fn noisy_point(clean: Vec<f64>, noise: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if noise == 0.0 {
        return clean;
    }
    loop {
        let x: Vec<f64> = clean
            .iter()
            .map(|v| v + noise * rng.sample::<f64, _>(StandardNormal))
            .collect();
        if norm(&x) > 1e-6 {
            return x;
        }
    }
}

/// Seeded shuffle, then the first `floor(n · fraction)` examples train.
pub fn train_validation_split(
    data: &LabeledDataset,
    fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid("split fraction must lie in (0, 1)"));
    }
    let n = data.len();
    let n_train = (n as f64 * fraction).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::invalid(format!(
            "split of {n} examples at fraction {fraction} leaves an empty part"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok((
        data.subset(&order[..n_train]),
        data.subset(&order[n_train..]),
    ))
}
