//! Dense complex linear algebra: Kronecker products, partial traces,
//! row-major vectorization and the Hermitian spectral routines the
//! channel and discrimination code is built on.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for Hermiticity, positivity and equality checks.
pub const DEFAULT_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dense complex matrix. Column vectors are `n x 1` matrices.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    /// Builds a matrix from entries listed in row-major order.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols} matrix")));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            data: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    /// Real-valued convenience constructor; `rows` must be rectangular.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self {
            data: DMatrix::from_fn(n, m, |i, j| cr(rows[i][j])),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            data: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { cr(0.0) })
    }

    pub fn column(entries: &[Complex64]) -> Self {
        Self {
            data: DMatrix::from_column_slice(entries.len(), 1, entries),
        }
    }

    /// Computational basis ket `|index⟩` in dimension `dim`.
    pub fn basis_ket(dim: usize, index: usize) -> Self {
        Self::from_fn(dim, 1, |i, _| if i == index { cr(1.0) } else { cr(0.0) })
    }

    /// `|v⟩⟨v|` for a column vector `v`.
    pub fn projector(ket: &ComplexMatrix) -> Self {
        ket * &ket.adjoint()
    }

    pub fn from_dmatrix(data: DMatrix<Complex64>) -> Self {
        Self { data }
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.data.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[(i, j)] = value;
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let (r, c) = self.shape();
        (0..r)
            .flat_map(|i| (0..c).map(move |j| (i, j)))
            .map(|(i, j)| self.data[(i, j)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            data: self.data.conjugate(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            data: self.data.transpose(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            data: &self.data * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(cr(factor))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise comparison with absolute tolerance `tol`.
    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.shape() == other.shape()
            && self
                .data
                .iter()
                .zip(other.data.iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Largest entry of `|m - m†|`; `f64::INFINITY` for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.data - self.data.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            data: (&self.data + self.data.adjoint()) * cr(0.5),
        }
    }

    pub fn try_mul(&self, rhs: &ComplexMatrix) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::ShapeMismatch {
                op: "mul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(self * rhs)
    }

    pub fn try_add(&self, rhs: &ComplexMatrix) -> Result<Self> {
        self.check_same_shape("add", rhs)?;
        Ok(self + rhs)
    }

    pub fn try_sub(&self, rhs: &ComplexMatrix) -> Result<Self> {
        self.check_same_shape("sub", rhs)?;
        Ok(self - rhs)
    }

    fn check_same_shape(&self, op: &'static str, rhs: &ComplexMatrix) -> Result<()> {
        if self.shape() != rhs.shape() {
            return Err(Error::ShapeMismatch {
                op,
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(())
    }

    /// `u m u†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        &(u * self) * &u.adjoint()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.data[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.data[idx]
    }
}

// Operator impls panic on shape mismatch like nalgebra; fallible variants
// are the `try_*` methods.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { data: -&self.data }
    }
}

/// Pauli matrices and a few fixed operators.
pub mod gates {
    use super::{c, cr, ComplexMatrix};

    pub fn identity2() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            _ => cr(0.0),
        })
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    /// `[σ0, σx, σy, σz]`.
    pub fn paulis() -> [ComplexMatrix; 4] {
        [identity2(), pauli_x(), pauli_y(), pauli_z()]
    }

    /// `|0⟩⟨1|`.
    pub fn raising() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])
    }

    /// `|1⟩⟨0|`.
    pub fn lowering() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]])
    }

    /// CNOT with the first qubit as control.
    pub fn cnot() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ])
    }
}

/// Ordered tensor factorization of a Hilbert space, e.g. `[B:2, A:2, E:2]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemLayout {
    factors: Vec<(String, usize)>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(l, d)| (l.into(), d)).collect();
        if factors.is_empty() {
            return Err(Error::InvalidLayout("no factors".into()));
        }
        for (i, (label, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::InvalidLayout(format!(
                    "factor `{label}` has dimension 0"
                )));
            }
            if factors[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::InvalidLayout(format!("duplicate label `{label}`")));
            }
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|(l, _)| l.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|(_, d)| *d).collect()
    }

    /// Total dimension, the product of the factor dimensions.
    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|(l, _)| l == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Option<usize> {
        self.position(label).map(|i| self.factors[i].1)
    }

    /// Layout restricted to `keep`, in the original factor order.
    pub fn restrict(&self, keep: &[&str]) -> Result<Self> {
        for label in keep {
            if !self.contains(label) {
                return Err(Error::UnknownLabel((*label).to_string()));
            }
        }
        let factors: Vec<_> = self
            .factors
            .iter()
            .filter(|(l, _)| keep.contains(&l.as_str()))
            .cloned()
            .collect();
        Self::new(factors)
    }
}

impl fmt::Display for SubsystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(l, d)| format!("{l}:{d}"))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix {
        data: a.data.kronecker(&b.data),
    }
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Splits a flat index into per-factor digits (most significant first).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

/// Traces out every factor not listed in `keep`.
///
/// The result is ordered by the original layout order, regardless of the
/// order of `keep`.
pub fn partial_trace(
    m: &ComplexMatrix,
    layout: &SubsystemLayout,
    keep: &[&str],
) -> Result<ComplexMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidLayout(
            "partial trace must keep at least one factor".into(),
        ));
    }
    let n = layout.dim();
    if m.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            op: "partial_trace",
            left: m.shape(),
            right: (n, n),
        });
    }
    let kept = layout.restrict(keep)?;
    let dims = layout.dims();
    let mask: Vec<bool> = layout.labels().map(|l| keep.contains(&l)).collect();
    let kept_dims = kept.dims();
    let out_dim = kept.dim();

    let compose = |d: &[usize], keep_side: bool| -> usize {
        d.iter()
            .zip(&mask)
            .zip(&dims)
            .filter(|((_, &k), _)| k == keep_side)
            .fold(0, |acc, ((&x, _), &dim)| acc * dim + x)
    };

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    for i in 0..n {
        digits(i, &dims, &mut di);
        let ri = compose(&di, true);
        let ti = compose(&di, false);
        for j in 0..n {
            digits(j, &dims, &mut dj);
            if compose(&dj, false) != ti {
                continue;
            }
            let rj = compose(&dj, true);
            out.data[(ri, rj)] += m.data[(i, j)];
        }
    }
    debug_assert_eq!(kept_dims.iter().product::<usize>(), out_dim);
    Ok(out)
}

/// Row-wise vectorization: `res([[1,2],[3,4]]) = (1,2,3,4)ᵀ`.
pub fn res(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::column(&m.row_major())
}

/// Inverse of [`res`].
pub fn unres(v: &ComplexMatrix, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.cols() != 1 || v.rows() != rows * cols {
        return Err(Error::ShapeMismatch {
            op: "unres",
            left: v.shape(),
            right: (rows * cols, 1),
        });
    }
    ComplexMatrix::from_row_major(rows, cols, v.data.iter().copied().collect())
}

/// Spectrum of a Hermitian matrix: ascending eigenvalues with the matching
/// orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn eigenvector(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix {
            data: self.eigenvectors.data.columns(k, 1).into_owned(),
        }
    }

    /// `V diag(f(λ)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mapped: Vec<Complex64> = self.eigenvalues.iter().map(|&l| cr(f(l))).collect();
        let v = &self.eigenvectors;
        &(v * &ComplexMatrix::diagonal(&mapped)) * &v.adjoint()
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    hermitian_eig_tol(m, DEFAULT_TOL)
}

pub fn hermitian_eig_tol(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::InvalidShape(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = SymmetricEigen::try_new(m.hermitian_part().data, f64::EPSILON, 0)
        .ok_or(Error::EigenConvergence)?;
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Spectral noise floor for an `n x n` matrix with largest eigenvalue
/// magnitude `scale`.
fn noise_floor(n: usize, scale: f64) -> f64 {
    (n as f64) * f64::EPSILON * scale.max(1.0)
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_square() && m.is_hermitian(DEFAULT_TOL * 1e-2) {
        if let Ok(eig) = hermitian_eig_tol(m, f64::INFINITY) {
            return eig.eigenvalues.iter().map(|l| l.abs()).sum();
        }
    }
    m.data.singular_values().iter().sum()
}

/// Hermitian positive semidefinite square root.
///
/// Eigenvalues in `[-tol, 0)` are clipped to zero; anything more negative
/// is rejected. Eigenvalues inside the floating-point noise floor are
/// treated as exact zeros so rank-deficient inputs keep their rank.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt_tol(m, DEFAULT_TOL)
}

pub fn psd_sqrt_tol(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig_tol(m, tol)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let floor = noise_floor(m.rows(), scale);
    Ok(eig.map_spectrum(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}
