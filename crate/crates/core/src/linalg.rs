//! Dense complex kernel: operator matrices, vectors, Kronecker products,
//! Hilbert-Schmidt pairing, Hermitian eigensolvers and the functions of
//! symmetric matrices needed by the metric module.
//!
//! Storage convention: every place where a matrix is flattened (the
//! vectorizer, exported reports, [`OperatorMatrix::from_row_major`]) uses
//! row-major order, entry `(i, j)` at position `i * N + j`. The backing
//! `nalgebra` matrix is column-major internally; that layout never leaks
//! through this API.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerances for structural checks.
///
/// `sym` scales `|M|_F` for Hermiticity checks, `pd` scales `|M|_2` for
/// positive-definiteness checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub sym: f64,
    pub pd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sym: 1e-10,
            pd: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(DVector<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("empty vector".into()));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Unit vector `e_k` of the distinguished basis.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<C64> {
        self.0
    }

    pub fn entries(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &ComplexVector) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.0.dotc(&other.0))
    }

    /// Tensor product `self ⊗ other` with index `i * other.dim() + j`.
    pub fn kron(&self, other: &ComplexVector) -> ComplexVector {
        Self(self.0.kronecker(&other.0))
    }

    pub fn scale(&self, s: C64) -> ComplexVector {
        Self(&self.0 * s)
    }
}

impl From<DVector<C64>> for ComplexVector {
    fn from(v: DVector<C64>) -> Self {
        Self(v)
    }
}

/// Dense complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix(DMatrix<C64>);

impl OperatorMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_row_major(dim: usize, entries: &[f64]) -> Result<Self> {
        let z: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_major(dim, &z)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    /// Matrix unit `E_ij = e_i e_j^dag`.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(i, j)] = C64::new(1.0, 0.0);
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
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

    /// Entrywise conjugate; equals `C M C` for the basis conjugation.
    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.0.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    /// `|M - M^dag|_F`.
    pub fn hermitian_defect(&self) -> f64 {
        (&self.0 - self.0.adjoint()).norm()
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_dim(self.dim(), v.dim())?;
        Ok(ComplexVector(&self.0 * &v.0))
    }

    pub fn column(&self, k: usize) -> ComplexVector {
        ComplexVector(self.0.column(k).into_owned())
    }

    pub fn matmul(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        check_dim(self.dim(), rhs.dim())?;
        Ok(Self(&self.0 * &rhs.0))
    }

    /// Inverse via LU; `None` when singular.
    pub fn try_inverse(&self) -> Option<OperatorMatrix> {
        self.0.clone().try_inverse().map(Self)
    }

    /// Leading `dim x dim` block.
    pub fn leading_block(&self, dim: usize) -> OperatorMatrix {
        Self(self.0.view((0, 0), (dim, dim)).into_owned())
    }
}

impl From<DMatrix<C64>> for OperatorMatrix {
    fn from(m: DMatrix<C64>) -> Self {
        Self(m)
    }
}

macro_rules! impl_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a OperatorMatrix> for &'a OperatorMatrix {
            type Output = OperatorMatrix;
            fn $method(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
                assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
                OperatorMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $tr for OperatorMatrix {
            type Output = OperatorMatrix;
            fn $method(self, rhs: OperatorMatrix) -> OperatorMatrix {
                (&self).$method(&rhs)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        OperatorMatrix(-&self.0)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// The conjugation fixed by the distinguished (Fock) basis: entrywise
/// complex conjugation. Antilinear, involutive and isometric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Conjugation;

impl Conjugation {
    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        ComplexVector(v.0.map(|z| z.conj()))
    }

    /// `C M C`.
    pub fn conjugate_operator(&self, m: &OperatorMatrix) -> OperatorMatrix {
        m.conj()
    }
}

/// Kronecker product, row index `i * dim(b) + k`.
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix(a.0.kronecker(&b.0))
}

/// Hilbert-Schmidt pairing `Tr(A^dag B)`.
pub fn hs_inner(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<C64> {
    check_dim(a.dim(), b.dim())?;
    Ok(a.0.dotc(&b.0))
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: OperatorMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> ComplexVector {
        self.vectors.column(k)
    }

    /// `V f(Λ) V^dag`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> OperatorMatrix {
        let v = self.vectors.as_matrix();
        let d = DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&x| C64::new(f(x), 0.0)),
        );
        let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * d[j]);
        OperatorMatrix(scaled * v.adjoint())
    }
}

fn ensure_hermitian(m: &OperatorMatrix, tol: &Tolerances) -> Result<()> {
    let residual = m.hermitian_defect();
    let tolerance = tol.sym * m.frobenius_norm();
    if residual > tolerance {
        return Err(Error::NotHermitian {
            residual,
            tolerance,
        });
    }
    Ok(())
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
///
/// The input is symmetrized before the solve, after the Hermiticity check.
pub fn eig_hermitian(m: &OperatorMatrix, tol: &Tolerances) -> Result<HermitianEigen> {
    ensure_hermitian(m, tol)?;
    let sym = (&m.0 + m.0.adjoint()) * C64::new(0.5, 0.0);
    let n = sym.nrows();
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen {
        values,
        vectors: OperatorMatrix(vectors),
    })
}

/// Eigenvalues of a general square matrix from the complex Schur form,
/// in no particular order.
pub fn eig_general(m: &OperatorMatrix) -> Result<Vec<C64>> {
    let schur =
        nalgebra::Schur::try_new(m.0.clone(), f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let vals = schur.eigenvalues().ok_or(Error::NoConvergence)?;
    Ok(vals.iter().copied().collect())
}

/// Principal exponential of a Hermitian matrix.
pub fn mat_exp_sym(s: &OperatorMatrix, tol: &Tolerances) -> Result<OperatorMatrix> {
    Ok(eig_hermitian(s, tol)?.map_values(f64::exp))
}

/// Principal square root of a Hermitian positive-definite matrix.
pub fn sqrt_spd(m: &OperatorMatrix, tol: &Tolerances) -> Result<OperatorMatrix> {
    let eig = eig_hermitian(m, tol)?;
    ensure_positive(&eig, tol)?;
    Ok(eig.map_values(f64::sqrt))
}

pub(crate) fn ensure_positive(eig: &HermitianEigen, tol: &Tolerances) -> Result<()> {
    let min = eig.values.first().copied().unwrap_or(0.0);
    let spectral_norm = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let tolerance = tol.pd * spectral_norm;
    if min.is_nan() || min <= tolerance {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
            tolerance,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::SeededRng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Exponential by scaling and squaring of a truncated Taylor series.
    fn exp_series(s: &OperatorMatrix) -> OperatorMatrix {
        let norm = s.frobenius_norm();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let a = s.scale_real(0.5f64.powi(squarings));
        let n = s.dim();
        let mut term = OperatorMatrix::identity(n);
        let mut sum = OperatorMatrix::identity(n);
        for k in 1..30 {
            term = (&term * &a).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn kron_identity_and_diag() {
        assert_eq!(
            kron(&OperatorMatrix::identity(2), &OperatorMatrix::identity(2)),
            OperatorMatrix::identity(4)
        );
        let d = OperatorMatrix::from_diagonal(&[c(0.0), c(1.0)]);
        let expect = OperatorMatrix::from_diagonal(&[c(0.0), c(0.0), c(1.0), c(1.0)]);
        assert_eq!(kron(&d, &OperatorMatrix::identity(2)), expect);
    }

    #[test]
    fn kron_acts_on_product_vectors() {
        let mut rng = SeededRng::new(7);
        let a = rng.matrix(3);
        let b = rng.matrix(3);
        let u = rng.vector(3);
        let v = rng.vector(3);
        let lhs = kron(&a, &b).apply(&u.kron(&v)).unwrap();
        // direct multiply, then explicit index layout
        let au = a.apply(&u).unwrap();
        let bv = b.apply(&v).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d = lhs.entries()[i * 3 + j] - au.entries()[i] * bv.entries()[j];
                assert!(d.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = SeededRng::new(8);
        for _ in 0..5 {
            let (a, b, cm, d) = (rng.matrix(3), rng.matrix(2), rng.matrix(3), rng.matrix(2));
            let lhs = &kron(&a, &b) * &kron(&cm, &d);
            let rhs = kron(&(&a * &cm), &(&b * &d));
            assert!((&lhs - &rhs).frobenius_norm() <= 1e-12 * rhs.frobenius_norm());
            let e = rng.matrix(2);
            let l = kron(&kron(&a, &b), &e);
            let r = kron(&a, &kron(&b, &e));
            assert!((&l - &r).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn hs_inner_cases() {
        let n = 5;
        let id = OperatorMatrix::identity(n);
        assert_eq!(hs_inner(&id, &id).unwrap(), c(5.0));
        let e00 = OperatorMatrix::unit(2, 0, 0);
        let e11 = OperatorMatrix::unit(2, 1, 1);
        assert_eq!(hs_inner(&e00, &e11).unwrap(), c(0.0));

        let mut rng = SeededRng::new(3);
        let a = rng.matrix(4);
        let b = rng.matrix(4);
        let mut sum = c(0.0);
        for i in 0..4 {
            for j in 0..4 {
                sum += a.get(i, j).conj() * b.get(i, j);
            }
        }
        assert!((hs_inner(&a, &b).unwrap() - sum).norm() < 1e-14);
        let tr = (&a.adjoint() * &b).trace();
        assert!((hs_inner(&a, &b).unwrap() - tr).norm() < 1e-13);
        assert!(matches!(
            hs_inner(&a, &OperatorMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn hs_inner_positive() {
        let mut rng = SeededRng::new(11);
        for _ in 0..20 {
            let a = rng.matrix(4);
            let v = hs_inner(&a, &a).unwrap();
            assert!(v.im.abs() < 1e-14 && v.re > 0.0);
        }
        assert_eq!(
            hs_inner(&OperatorMatrix::zeros(3), &OperatorMatrix::zeros(3)).unwrap(),
            c(0.0)
        );
    }

    #[test]
    fn exp_diagonal_cases() {
        let tol = Tolerances::default();
        let z = mat_exp_sym(&OperatorMatrix::zeros(3), &tol).unwrap();
        assert!((&z - &OperatorMatrix::identity(3)).frobenius_norm() < 1e-15);
        let s = OperatorMatrix::from_diagonal(&[c(2f64.ln()), c(3f64.ln())]);
        let e = mat_exp_sym(&s, &tol).unwrap();
        let expect = OperatorMatrix::from_diagonal(&[c(2.0), c(3.0)]);
        assert!((&e - &expect).frobenius_norm() < 1e-14);
    }

    #[test]
    fn exp_matches_series_oracle() {
        let tol = Tolerances::default();
        let mut rng = SeededRng::new(21);
        let s = rng.hermitian(5);
        let e = mat_exp_sym(&s, &tol).unwrap();
        let o = exp_series(&s);
        assert!((&e - &o).frobenius_norm() <= 1e-12 * o.frobenius_norm());
    }

    #[test]
    fn exp_inverse_pair() {
        let tol = Tolerances::default();
        let mut rng = SeededRng::new(22);
        for _ in 0..5 {
            let mut s = rng.real_symmetric(6);
            let nrm = s.frobenius_norm();
            s = s.scale_real(5.0 / nrm);
            let prod = &mat_exp_sym(&s, &tol).unwrap() * &mat_exp_sym(&(-&s), &tol).unwrap();
            assert!((&prod - &OperatorMatrix::identity(6)).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn exp_rejects_non_hermitian() {
        let m = OperatorMatrix::from_real_row_major(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            mat_exp_sym(&m, &Tolerances::default()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn sqrt_cases() {
        let tol = Tolerances::default();
        let r = sqrt_spd(&OperatorMatrix::identity(4), &tol).unwrap();
        assert!((&r - &OperatorMatrix::identity(4)).frobenius_norm() < 1e-15);
        let r = sqrt_spd(&OperatorMatrix::from_diagonal(&[c(4.0), c(9.0)]), &tol).unwrap();
        assert!((&r - &OperatorMatrix::from_diagonal(&[c(2.0), c(3.0)])).frobenius_norm() < 1e-14);

        let mut rng = SeededRng::new(5);
        let m = rng.spd(6);
        let r = sqrt_spd(&m, &tol).unwrap();
        assert!((&(&r * &r) - &m).frobenius_norm() <= 1e-12 * m.frobenius_norm());
        assert!(r.hermitian_defect() < 1e-13);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let tol = Tolerances::default();
        let m = OperatorMatrix::from_diagonal(&[c(1.0), c(-1.0)]);
        assert!(matches!(
            sqrt_spd(&m, &tol),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let m = OperatorMatrix::from_diagonal(&[c(1.0), c(1e-14)]);
        assert!(matches!(
            sqrt_spd(&m, &tol),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn eig_hermitian_cases() {
        let tol = Tolerances::default();
        let d = OperatorMatrix::from_diagonal(&[c(3.0), c(1.0), c(2.0)]);
        assert_eq!(eig_hermitian(&d, &tol).unwrap().values, vec![1.0, 2.0, 3.0]);
        let e = eig_hermitian(&OperatorMatrix::identity(5), &tol).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));

        let mut rng = SeededRng::new(9);
        let m = rng.hermitian(8);
        let e = eig_hermitian(&m, &tol).unwrap();
        let recon = e.map_values(|x| x);
        assert!((&recon - &m).frobenius_norm() <= 1e-12 * m.frobenius_norm());
        let v = &e.vectors;
        assert!((&(&v.adjoint() * v) - &OperatorMatrix::identity(8)).frobenius_norm() < 1e-12);
        for k in 0..8 {
            let lhs = m.apply(&e.vector(k)).unwrap();
            let rhs = e.vector(k).scale(c(e.values[k]));
            let res = (lhs.as_vector() - rhs.as_vector()).norm();
            assert!(res <= 1e-12 * m.frobenius_norm());
        }
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn conjugation_properties() {
        let cj = Conjugation;
        let r = ComplexVector::from_real(&[1.0, 2.0]).unwrap();
        assert_eq!(cj.apply(&r), r);
        let v = ComplexVector::new(vec![C64::new(0.0, 1.0), c(0.0)]).unwrap();
        assert_eq!(cj.apply(&v).entries(), &[C64::new(0.0, -1.0), c(0.0)]);

        let mut rng = SeededRng::new(13);
        let u = rng.vector(6);
        let w = rng.vector(6);
        assert_eq!(cj.apply(&cj.apply(&u)), u);
        assert_eq!(cj.apply(&u).norm(), u.norm());
        let (a, b) = (C64::new(0.3, -1.2), C64::new(-0.7, 0.4));
        let lin = ComplexVector::from(u.as_vector() * a + w.as_vector() * b);
        let lhs = cj.apply(&lin);
        let rhs = cj.apply(&u).as_vector() * a.conj() + cj.apply(&w).as_vector() * b.conj();
        assert!((lhs.as_vector() - rhs).norm() < 1e-15);
    }

    #[test]
    fn row_major_layout() {
        let m = OperatorMatrix::from_real_row_major(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.get(0, 1), c(2.0));
        assert_eq!(m.get(1, 0), c(3.0));
        assert_eq!(m.to_row_major(), vec![c(1.0), c(2.0), c(3.0), c(4.0)]);
        assert!(matches!(
            OperatorMatrix::from_real_row_major(2, &[1.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite)
        ));
    }
}
