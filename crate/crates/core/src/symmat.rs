//! Dense real symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! Every class operator and every outer product `x xᵀ` in this crate is a
//! [`SymmetricMatrix`]. Storage is a full row-major `d × d` buffer; every
//! mutating path writes both triangles, so `get(i, j) == get(j, i)` holds
//! exactly.

use std::ops::{Add, AddAssign, Mul, Sub, SubAssign};

use crate::error::{Error, Result};

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        SymmetricMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, scale: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = scale;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = v;
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle (`i <= j`).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Symmetrizing constructor: stores `(R + Rᵀ) / 2` for the square row set `R`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::invalid("matrix must have at least one row"));
        }
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
        }
        Ok(Self::from_fn(dim, |i, j| 0.5 * (rows[i][j] + rows[j][i])))
    }

    /// `x xᵀ`.
    pub fn outer(x: &[f64]) -> Self {
        Self::from_fn(x.len(), |i, j| x[i] * x[j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &SymmetricMatrix) {
        assert_eq!(self.dim, other.dim, "dimension mismatch in axpy");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// `self += alpha * x xᵀ` without materializing the outer product.
    pub fn add_outer(&mut self, alpha: f64, x: &[f64]) {
        assert_eq!(self.dim, x.len(), "dimension mismatch in add_outer");
        let d = self.dim;
        for i in 0..d {
            let ax = alpha * x[i];
            for j in i..d {
                let v = self.data[i * d + j] + ax * x[j];
                self.data[i * d + j] = v;
                self.data[j * d + i] = v;
            }
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        SymmetricMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(self.quad_form_unchecked(x))
    }

    #[inline]
    pub(crate) fn quad_form_unchecked(&self, x: &[f64]) -> f64 {
        self.rows()
            .zip(x)
            .map(|(row, xi)| xi * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }

    /// Frobenius inner product `tr(self · other)`.
    pub fn inner(&self, other: &SymmetricMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in inner");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &SymmetricMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        sym_eig(self)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(self)
    }
}

impl Add for &SymmetricMatrix {
    type Output = SymmetricMatrix;

    fn add(self, rhs: &SymmetricMatrix) -> SymmetricMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &SymmetricMatrix {
    type Output = SymmetricMatrix;

    fn sub(self, rhs: &SymmetricMatrix) -> SymmetricMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&SymmetricMatrix> for SymmetricMatrix {
    fn add_assign(&mut self, rhs: &SymmetricMatrix) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&SymmetricMatrix> for SymmetricMatrix {
    fn sub_assign(&mut self, rhs: &SymmetricMatrix) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul<f64> for &SymmetricMatrix {
    type Output = SymmetricMatrix;

    fn mul(self, rhs: f64) -> SymmetricMatrix {
        self.scaled(rhs)
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues sorted descending.
///
/// Column `i` of the eigenvector matrix pairs with `eigenvalues()[i]`. Each
/// eigenvector has its largest-magnitude component made nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    dim: usize,
    values: Vec<f64>,
    // column-major: vectors[c * dim .. (c + 1) * dim] is eigenvector c
    vectors: Vec<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn eigenvectors(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.dim)
    }

    /// `V f(Λ) Vᵀ`, applying `f` to each eigenvalue.
    pub fn map_spectrum(&self, mut f: impl FnMut(f64) -> f64) -> SymmetricMatrix {
        let mut out = SymmetricMatrix::zeros(self.dim);
        for (lambda, v) in self.values.iter().zip(self.eigenvectors()) {
            let w = f(*lambda);
            if w != 0.0 {
                out.add_outer(w, v);
            }
        }
        out
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.map_spectrum(|l| l)
    }
}

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps until the off-diagonal Frobenius norm falls to `1e-12` (relative to
/// the input norm when that exceeds one), capped at 100 sweeps.
pub fn sym_eig(m: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let n = m.dim;
    for i in 0..n {
        for j in 0..n {
            if !m.get(i, j).is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }

    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let tol = JACOBI_TOL * m.frobenius_norm().max(1.0);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                } else {
                    // |theta| overflowed: apq is negligible against the diagonal gap
                    0.5 / theta
                };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                // v is row-major here; rotate its columns p and q
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their original column order
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for &col in &order {
        values.push(a[col * n + col]);
        let start = vectors.len();
        vectors.extend((0..n).map(|k| v[k * n + col]));
        let vec = &mut vectors[start..];
        let mut lead = 0;
        for k in 1..n {
            if vec[k].abs() > vec[lead].abs() {
                lead = k;
            }
        }
        if vec[lead] < 0.0 {
            vec.iter_mut().for_each(|x| *x = -*x);
        }
    }

    Ok(EigenDecomposition {
        dim: n,
        values,
        vectors,
    })
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}

pub fn outer(x: &[f64]) -> SymmetricMatrix {
    SymmetricMatrix::outer(x)
}

pub fn quad_form(m: &SymmetricMatrix, x: &[f64]) -> Result<f64> {
    m.quad_form(x)
}

pub fn min_eigenvalue(m: &SymmetricMatrix) -> Result<f64> {
    let eig = sym_eig(m)?;
    Ok(*eig.eigenvalues().last().expect("dim >= 1"))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}
