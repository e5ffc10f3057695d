//! Dense complex matrices and the handful of operations the witness
//! machinery is built from: Kronecker products, partial transposition,
//! Hermitian eigendecomposition and PSD tests.
//!
//! Matrices are immutable values. Every operation returns a new matrix.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default absolute tolerance on matrix entries.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix stored through `nalgebra`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|j| {
                    let z = self.get(i, j);
                    if z.im.abs() < 1e-14 {
                        format!("{:>9.4}", z.re)
                    } else {
                        format!("{:>9.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: &[Complex64]) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, data)))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let cols = rows[0].len();
        Self::from_fn(r, cols, |i, j| c(rows[i][j], 0.0))
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(rows, cols, |i, j| c(f(i, j), 0.0))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| ZERO)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { ZERO })
    }

    /// Matrix unit |i⟩⟨j| in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        Self::from_fn(n, n, |a, b| if a == i && b == j { ONE } else { ZERO })
    }

    /// Rank-one operator |v⟩⟨v|.
    pub fn projector(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn from_nalgebra(m: DMatrix<Complex64>) -> Self {
        assert!(m.nrows() >= 1 && m.ncols() >= 1);
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    /// Returns a copy with entry (i, j) replaced.
    pub fn with_entry(&self, i: usize, j: usize, value: Complex64) -> Self {
        let mut m = self.0.clone();
        m[(i, j)] = value;
        Self(m)
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn scale_c(&self, s: Complex64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖A − B‖_max. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ‖M − M†‖_max.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Largest imaginary part over all entries.
    pub fn max_imag(&self) -> f64 {
        self.0.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self(&self.0 * &other.0))
    }

    /// Applies `self` to a vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols());
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// ⟨v|M|v⟩ (real part; exact for Hermitian M).
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows()).map(|i| self.get(i, j)).collect()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.0.shape(), rhs.0.shape(), "shape mismatch in add");
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.0.shape(), rhs.0.shape(), "shape mismatch in sub");
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols(), rhs.rows(), "shape mismatch in mul");
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows(),
            cols: self.cols(),
            data: self.to_row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        let data: Vec<Complex64> = repr.data.iter().map(|p| c(p[0], p[1])).collect();
        ComplexMatrix::from_row_major(repr.rows, repr.cols, &data).map_err(D::Error::custom)
    }
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * rb, a.cols() * cb, |r, s| {
        a.get(r / rb, s / cb) * b.get(r % rb, s % cb)
    })
}

/// Tr(A† B).
pub fn trace_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "trace pairing needs equal square shapes, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.0.iter().zip(b.0.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Tr(A B) without conjugation, the pairing used throughout for Hermitian operators.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    assert_eq!(a.cols(), b.rows());
    assert_eq!(a.rows(), b.cols());
    let mut acc = ZERO;
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            acc += a.get(i, k) * b.get(k, i);
        }
    }
    acc
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let scale = m.max_abs().max(1.0);
    let residual = m.hermiticity_residual();
    if residual > DEFAULT_TOL * scale {
        return Err(Error::NotHermitian { residual });
    }
    // Symmetrise before handing over; the solver only reads one triangle.
    let sym = (&m.0 + m.0.adjoint()) * c(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(m)?.eigenvalues)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.min())
}

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(m)? >= -tol)
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
pub fn project_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let n = m.rows();
    let v = &eig.eigenvectors;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        eig.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0.0)
            .map(|(k, &l)| v.get(i, k) * v.get(j, k).conj() * l)
            .sum()
    }))
}

/// A d²×d² operator on C^d ⊗ C^d.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BipartiteOperator {
    dim: usize,
    matrix: ComplexMatrix,
    #[serde(skip)]
    hermitian: bool,
}

impl<'de> Deserialize<'de> for BipartiteOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            dim: usize,
            matrix: ComplexMatrix,
        }
        let r = Repr::deserialize(d)?;
        BipartiteOperator::new(r.matrix, r.dim).map_err(D::Error::custom)
    }
}

impl BipartiteOperator {
    pub fn new(matrix: ComplexMatrix, dim: usize) -> Result<Self> {
        if dim == 0 || matrix.rows() != dim * dim || matrix.cols() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "a {}x{} matrix is not an operator on C^{dim} ⊗ C^{dim}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let hermitian = matrix.hermiticity_residual() <= 1e-12 * matrix.max_abs().max(1.0);
        Ok(Self {
            dim,
            matrix,
            hermitian,
        })
    }

    /// Infers d from a square matrix of side d².
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let side = matrix.rows();
        let dim = (side as f64).sqrt().round() as usize;
        Self::new(matrix, dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Set when ‖M − M†‖_max ≤ 1e−12 (relative to the largest entry).
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale(s),
            hermitian: self.hermitian,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Tr(self · other), real part.
    pub fn expectation(&self, rho: &Self) -> f64 {
        trace_product(&self.matrix, &rho.matrix).re
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(&self.matrix)
    }

    pub fn partial_transpose(&self) -> Self {
        partial_transpose(self)
    }
}

impl Add for &BipartiteOperator {
    type Output = BipartiteOperator;
    fn add(self, rhs: &BipartiteOperator) -> BipartiteOperator {
        BipartiteOperator::new(&self.matrix + &rhs.matrix, self.dim).expect("same dimension")
    }
}

impl Sub for &BipartiteOperator {
    type Output = BipartiteOperator;
    fn sub(self, rhs: &BipartiteOperator) -> BipartiteOperator {
        BipartiteOperator::new(&self.matrix - &rhs.matrix, self.dim).expect("same dimension")
    }
}

/// Transposes the second tensor factor: each d×d block is transposed in place.
pub fn partial_transpose(w: &BipartiteOperator) -> BipartiteOperator {
    let d = w.dim;
    let m = &w.matrix;
    let out = ComplexMatrix::from_fn(d * d, d * d, |r, s| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (s / d, s % d);
        m.get(i * d + l, j * d + k)
    });
    BipartiteOperator {
        dim: d,
        matrix: out,
        hermitian: w.hermitian,
    }
}

/// Partial transpose of a raw matrix that must be d²×d².
pub fn partial_transpose_matrix(m: &ComplexMatrix, dim: usize) -> Result<ComplexMatrix> {
    Ok(partial_transpose(&BipartiteOperator::new(m.clone(), dim)?).into_matrix())
}

/// Maximally entangled projector P₊ = (1/d) Σ |i⟩⟨j| ⊗ |i⟩⟨j|.
pub fn max_entangled(d: usize) -> ComplexMatrix {
    let n = d * d;
    ComplexMatrix::from_fn(n, n, |r, s| {
        if r % (d + 1) == 0 && s % (d + 1) == 0 {
            c(1.0 / d as f64, 0.0)
        } else {
            ZERO
        }
    })
}

/// Tensor product of two state vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_of_basis_projectors() {
        let p0 = ComplexMatrix::unit(2, 0, 0);
        let p1 = ComplexMatrix::unit(2, 1, 1);
        let k = kron(&p0, &p1);
        assert_eq!(k, ComplexMatrix::unit(4, 1, 1));
    }

    #[test]
    fn sigma_x_squared_tensor_spectrum() {
        let x = sigma_x();
        let ev = eigenvalues(&kron(&x, &x)).unwrap();
        let expected = [-1.0, -1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_transpose_of_bell_projector_is_half_swap() {
        let p = BipartiteOperator::new(max_entangled(2), 2).unwrap();
        let pt = partial_transpose(&p);
        let swap = ComplexMatrix::from_real_fn(4, 4, |r, s| {
            let (i, k) = (r / 2, r % 2);
            let (j, l) = (s / 2, s % 2);
            if i == l && k == j {
                0.5
            } else {
                0.0
            }
        });
        assert!(pt.matrix().max_abs_diff(&swap) < 1e-15);
        let ev = pt.min_eigenvalue().unwrap();
        assert!((ev + 0.5).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_rejects_wrong_dim() {
        let m = ComplexMatrix::identity(5);
        assert!(BipartiteOperator::new(m, 2).is_err());
    }

    #[test]
    fn eig_of_diagonal_sorted() {
        let ev = eigenvalues(&ComplexMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(ev.len(), 3);
        for (a, b) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_of_sigma_x() {
        let ev = eigenvalues(&sigma_x()).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_residuals_on_complex_hermitian() {
        let m = ComplexMatrix::from_fn(4, 4, |i, j| {
            let base = c((i + 2 * j) as f64 * 0.3, (i as f64 - j as f64) * 0.7);
            if i == j {
                c(base.re, 0.0)
            } else {
                base
            }
        });
        let m = (&m + &m.adjoint()).scale(0.5);
        let eig = hermitian_eig(&m).unwrap();
        let v = &eig.eigenvectors;
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            let col = v.column(k);
            let mv = m.apply(&col);
            let res = mv
                .iter()
                .zip(&col)
                .map(|(a, b)| (a - b * l).norm())
                .fold(0.0, f64::max);
            assert!(res < 1e-10 * m.max_abs());
        }
        let gram = &v.adjoint() * v;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&ComplexMatrix::identity(3), 1e-10).unwrap());
        assert!(!is_psd(&ComplexMatrix::diag(&[1.0, -1e-3]), 1e-10).unwrap());
    }

    #[test]
    fn trace_inner_cases() {
        let i3 = ComplexMatrix::identity(3);
        assert!((trace_inner(&i3, &i3).unwrap() - c(3.0, 0.0)).norm() < 1e-15);
        let p = max_entangled(3);
        assert!((trace_inner(&p, &p).unwrap() - ONE).norm() < 1e-14);
        assert!(trace_inner(&i3, &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn json_layout_is_row_major_pairs() {
        let m = ComplexMatrix::from_row_major(1, 2, &[c(1.0, 2.0), c(3.0, -4.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"data":[[1.0,2.0],[3.0,-4.0]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
    }

    #[test]
    fn psd_projection_clips_negative_part() {
        let m = ComplexMatrix::diag(&[2.0, -1.0]);
        let p = project_psd(&m).unwrap();
        assert!(p.max_abs_diff(&ComplexMatrix::diag(&[2.0, 0.0])) < 1e-14);
    }
}
