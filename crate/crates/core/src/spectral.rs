//! Bi-orthogonal eigen-families of quasi-Hermitian Hamiltonians and of
//! their Liouvillians, with the spectral expansions built on them.
//!
//! A quasi-Hermitian `H` is diagonalized through its Hermitian partner
//! `h = ρ H ρ⁻¹`: with `h v_n = E_n v_n` orthonormal, the right and left
//! families are `ψ_n = ρ⁻¹ v_n` and `φ̃_n = ρ v_n = η ψ_n`, and
//! `φ̃_m^dag ψ_n = δ_mn` holds with no further normalization.
//!
//! Liouville eigen-matrices are dyads of these vectors, never the output
//! of an `N² x N²` eigensolve:
//!
//! * `R^ℒ_mn = ψ_m ψ_n^dag`, with `ℒ_H(R^ℒ_mn) = (E_m - E_n) R^ℒ_mn`;
//! * `R^ζ_mn = φ̃_m φ̃_n^dag = ζ(R^ℒ_mn)`, with
//!   `ℒ_H^dag(R^ζ_mn) = (E_m - E_n) R^ζ_mn`, which under the dual-action
//!   rule makes `|R^ζ_mn>` an eigenvector of the extension of `ℒ_H`;
//! * `<R^ζ_m'n', R^ℒ_mn> = (φ̃_m'^dag ψ_m)(ψ_n^dag φ̃_n') = δ_mm' δ_nn'`.
//!
//! Inserting `ζ⁻¹` between a functional and `|m,n>>_ζ` is the same as
//! pairing against `R^ℒ_mn`, since `ζ⁻¹(R^ζ_mn) = R^ℒ_mn`. The discrete
//! sums below replace the integrals over spectral measures, and Kronecker
//! deltas replace the delta distribution.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_dim, eig_general, eig_hermitian, hs_inner, ComplexVector, Conjugation, OperatorMatrix,
    Tolerances, C64,
};
use crate::liouvillian::{adjoint_liouvillian, apply_liouvillian, build_kron_l};
use crate::metric::{quasi_hermiticity_residual, MetricOperator, CONDITION_LIMIT};
use crate::rigging::dyad;

/// Largest accepted `|H^dag η - η H| / |η H|` before diagonalization.
pub const QUASI_HERMITIAN_LIMIT: f64 = 1e-8;
/// Largest accepted anti-Hermitian part of `ρ H ρ⁻¹`, relative.
pub const ANTI_HERMITIAN_LIMIT: f64 = 1e-8;
/// Bi-orthonormality tolerance on Gram entries.
pub const BIORTHOGONALITY_TOL: f64 = 1e-10;
/// Relative tolerance on Liouville eigen-equations.
pub const EIGEN_EQUATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct BiorthogonalSystem {
    hamiltonian: OperatorMatrix,
    metric: MetricOperator,
    eigenvalues: Vec<f64>,
    right: Vec<ComplexVector>,
    left: Vec<ComplexVector>,
    anti_hermitian_residual: f64,
}

impl BiorthogonalSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.hamiltonian
    }

    pub fn metric(&self) -> &MetricOperator {
        &self.metric
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `ψ_n`.
    pub fn right(&self) -> &[ComplexVector] {
        &self.right
    }

    /// `φ̃_n`.
    pub fn left(&self) -> &[ComplexVector] {
        &self.left
    }

    /// Relative size of the anti-Hermitian part discarded before the solve.
    pub fn anti_hermitian_residual(&self) -> f64 {
        self.anti_hermitian_residual
    }

    /// `G_mn = φ̃_m^dag ψ_n`.
    pub fn gram(&self) -> OperatorMatrix {
        let n = self.dim();
        OperatorMatrix::from_fn(n, |i, j| {
            self.left[i].inner(&self.right[j]).expect("equal dims")
        })
    }

    /// Largest `|H ψ_n - E_n ψ_n|` and `|H^dag φ̃_n - E_n φ̃_n|`.
    pub fn max_vector_residual(&self) -> f64 {
        let h = &self.hamiltonian;
        let hd = h.adjoint();
        let mut worst = 0.0f64;
        for (k, &e) in self.eigenvalues.iter().enumerate() {
            let r = h.apply(&self.right[k]).expect("dims").into_vector()
                - self.right[k].as_vector() * C64::new(e, 0.0);
            let l = hd.apply(&self.left[k]).expect("dims").into_vector()
                - self.left[k].as_vector() * C64::new(e, 0.0);
            worst = worst.max(r.norm()).max(l.norm());
        }
        worst
    }

    pub fn max_vector_norm(&self) -> f64 {
        self.right
            .iter()
            .chain(&self.left)
            .map(ComplexVector::norm)
            .fold(0.0, f64::max)
    }
}

/// Diagonalizes an `η`-quasi-Hermitian `H` through `h = ρ H ρ⁻¹`.
pub fn solve_quasi_hermitian(
    h: &OperatorMatrix,
    metric: &MetricOperator,
    tol: &Tolerances,
) -> Result<BiorthogonalSystem> {
    check_dim(metric.dim(), h.dim())?;
    let residual = quasi_hermiticity_residual(h, metric)?;
    if residual.is_nan() || residual > QUASI_HERMITIAN_LIMIT {
        return Err(Error::NotQuasiHermitian {
            residual,
            tolerance: QUASI_HERMITIAN_LIMIT,
        });
    }
    let condition = metric.condition_number();
    if condition > CONDITION_LIMIT {
        return Err(Error::IllConditionedMetric {
            condition,
            limit: CONDITION_LIMIT,
        });
    }
    let partner = &(metric.rho() * h) * metric.rho_inv();
    let skew = (&partner - &partner.adjoint())
        .scale_real(0.5)
        .frobenius_norm();
    let scale = partner.frobenius_norm();
    let anti = if scale > 0.0 { skew / scale } else { skew };
    if anti > ANTI_HERMITIAN_LIMIT {
        return Err(Error::NotQuasiHermitian {
            residual: anti,
            tolerance: ANTI_HERMITIAN_LIMIT,
        });
    }
    let symmetric = (&partner + &partner.adjoint()).scale_real(0.5);
    let eig = eig_hermitian(&symmetric, tol)?;
    let n = h.dim();
    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for k in 0..n {
        let v = eig.vector(k);
        right.push(metric.rho_inv().apply(&v)?);
        left.push(metric.rho().apply(&v)?);
    }
    Ok(BiorthogonalSystem {
        hamiltonian: h.clone(),
        metric: metric.clone(),
        eigenvalues: eig.values,
        right,
        left,
        anti_hermitian_residual: anti,
    })
}

#[derive(Debug, Clone)]
pub struct LiouvillePair {
    pub m: usize,
    pub n: usize,
    pub eigenvalue: f64,
    /// `R^ℒ_mn = ψ_m ψ_n^dag`.
    pub right: OperatorMatrix,
    /// `R^ζ_mn = φ̃_m φ̃_n^dag`.
    pub dual: OperatorMatrix,
}

#[derive(Debug, Clone)]
pub struct LiouvilleSpectrum {
    dim: usize,
    hamiltonian: OperatorMatrix,
    condition_number: f64,
    pairs: Vec<LiouvillePair>,
}

impl LiouvilleSpectrum {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.hamiltonian
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// Pairs in the order `(0,0), (0,1), ..., (N-1,N-1)`.
    pub fn pairs(&self) -> &[LiouvillePair] {
        &self.pairs
    }

    pub fn pair(&self, m: usize, n: usize) -> Option<&LiouvillePair> {
        self.pairs.iter().find(|p| p.m == m && p.n == n)
    }

    /// `(m, n, E_m - E_n)` sorted by eigenvalue, ties by `(m, n)`.
    pub fn eigenvalue_table(&self) -> Vec<(usize, usize, f64)> {
        let mut t: Vec<_> = self
            .pairs
            .iter()
            .map(|p| (p.m, p.n, p.eigenvalue))
            .collect();
        t.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
        t
    }

    /// A copy with the listed pairs removed; used as a negative control
    /// for completeness.
    pub fn without_pairs(&self, drop: &[(usize, usize)]) -> LiouvilleSpectrum {
        LiouvilleSpectrum {
            pairs: self
                .pairs
                .iter()
                .filter(|p| !drop.contains(&(p.m, p.n)))
                .cloned()
                .collect(),
            ..self.clone_header()
        }
    }

    fn clone_header(&self) -> LiouvilleSpectrum {
        LiouvilleSpectrum {
            dim: self.dim,
            hamiltonian: self.hamiltonian.clone(),
            condition_number: self.condition_number,
            pairs: Vec::new(),
        }
    }

    fn stack(&self, pick: impl Fn(&LiouvillePair) -> &OperatorMatrix) -> DMatrix<C64> {
        let n2 = self.dim * self.dim;
        let mut out = DMatrix::zeros(n2, self.pairs.len());
        for (k, p) in self.pairs.iter().enumerate() {
            for (r, z) in pick(p).to_row_major().into_iter().enumerate() {
                out[(r, k)] = z;
            }
        }
        out
    }

    /// Columns are `vec(R^ℒ_mn)` in pair order.
    pub fn right_stack(&self) -> DMatrix<C64> {
        self.stack(|p| &p.right)
    }

    /// Columns are `vec(R^ζ_mn)` in pair order.
    pub fn dual_stack(&self) -> DMatrix<C64> {
        self.stack(|p| &p.dual)
    }
}

/// Builds all `N²` Liouville pairs from a bi-orthogonal system and checks
/// the eigen-equations and bi-orthonormality.
pub fn build_liouville_spectrum(sys: &BiorthogonalSystem) -> Result<LiouvilleSpectrum> {
    let n = sys.dim();
    let h = sys.hamiltonian();

    let gram = sys.gram();
    let mut bad_rows = Vec::new();
    for i in 0..n {
        let ok = (0..n).all(|j| {
            let target = if i == j { 1.0 } else { 0.0 };
            (gram.get(i, j) - C64::new(target, 0.0)).norm() <= BIORTHOGONALITY_TOL
                && (gram.get(j, i) - C64::new(target, 0.0)).norm() <= BIORTHOGONALITY_TOL
        });
        if !ok {
            bad_rows.push(i);
        }
    }

    let h_norm = h.frobenius_norm();
    let mut failures = Vec::new();
    let mut pairs = Vec::with_capacity(n * n);
    for m in 0..n {
        for k in 0..n {
            let eigenvalue = sys.eigenvalues[m] - sys.eigenvalues[k];
            let right = dyad(&sys.right[m], &sys.right[k])?;
            let dual = dyad(&sys.left[m], &sys.left[k])?;
            let lam = C64::new(eigenvalue, 0.0);
            let r1 = (&apply_liouvillian(h, &right)? - &right.scale(lam)).frobenius_norm();
            let r2 = (&adjoint_liouvillian(h, &dual)? - &dual.scale(lam)).frobenius_norm();
            let ok1 = r1 <= EIGEN_EQUATION_TOL * h_norm * right.frobenius_norm();
            let ok2 = r2 <= EIGEN_EQUATION_TOL * h_norm * dual.frobenius_norm();
            if !(ok1 && ok2) || bad_rows.contains(&m) || bad_rows.contains(&k) {
                failures.push((m, k));
            }
            pairs.push(LiouvillePair {
                m,
                n: k,
                eigenvalue,
                right,
                dual,
            });
        }
    }
    if !failures.is_empty() {
        return Err(Error::BiorthogonalityFailure { pairs: failures });
    }
    Ok(LiouvilleSpectrum {
        dim: n,
        hamiltonian: h.clone(),
        condition_number: sys.metric().condition_number(),
        pairs,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Coefficient {
    pub m: usize,
    pub n: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub coefficients: Vec<Coefficient>,
    /// `|A - Σ c_mn R^ℒ_mn|_F / |A|_F`.
    pub reconstruction_residual: f64,
    /// `|ℒ_H(A) - Σ (E_m - E_n) c_mn R^ℒ_mn|_F / |ℒ_H(A)|_F`.
    pub action_residual: f64,
    pub completeness_residual: f64,
    /// `cond(η)` is within the trusted range.
    pub condition_flag: bool,
}

impl ExpansionReport {
    pub fn coefficient(&self, m: usize, n: usize) -> Option<C64> {
        self.coefficients
            .iter()
            .find(|c| c.m == m && c.n == n)
            .map(|c| C64::new(c.re, c.im))
    }
}

/// Expands `A` as `Σ c_mn R^ℒ_mn` with `c_mn = <R^ζ_mn, A>` and checks the
/// same coefficients expand `ℒ_H(A)`.
pub fn expand_operator(spec: &LiouvilleSpectrum, a: &OperatorMatrix) -> Result<ExpansionReport> {
    check_dim(spec.dim(), a.dim())?;
    let n = spec.dim();
    let mut recon = OperatorMatrix::zeros(n);
    let mut action = OperatorMatrix::zeros(n);
    let mut coefficients = Vec::with_capacity(spec.pairs.len());
    for p in &spec.pairs {
        let c = hs_inner(&p.dual, a)?;
        recon = &recon + &p.right.scale(c);
        action = &action + &p.right.scale(c * p.eigenvalue);
        coefficients.push(Coefficient {
            m: p.m,
            n: p.n,
            re: c.re,
            im: c.im,
        });
    }
    let target = apply_liouvillian(spec.hamiltonian(), a)?;
    Ok(ExpansionReport {
        coefficients,
        reconstruction_residual: relative((a - &recon).frobenius_norm(), a.frobenius_norm()),
        action_residual: relative(
            (&target - &action).frobenius_norm(),
            target.frobenius_norm(),
        ),
        completeness_residual: completeness_residual(spec),
        condition_flag: spec.condition_number() <= CONDITION_LIMIT,
    })
}

/// `|Σ vec(R^ℒ_mn) vec(R^ζ_mn)^dag - I|_F / N`.
pub fn completeness_residual(spec: &LiouvilleSpectrum) -> f64 {
    let n2 = spec.dim() * spec.dim();
    let sum = spec.right_stack() * spec.dual_stack().adjoint();
    (sum - DMatrix::<C64>::identity(n2, n2)).norm() / (n2 as f64).sqrt()
}

/// Liouville Gram matrix `G[(m'n'), (mn)] = <R^ζ_m'n', R^ℒ_mn>`.
pub fn liouville_gram(spec: &LiouvilleSpectrum) -> DMatrix<C64> {
    spec.dual_stack().adjoint() * spec.right_stack()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramDeviation {
    pub max_off_diagonal: f64,
    pub max_diagonal_error: f64,
}

pub fn biorthogonality_deviation(spec: &LiouvilleSpectrum) -> GramDeviation {
    let g = liouville_gram(spec);
    let mut dev = GramDeviation {
        max_off_diagonal: 0.0,
        max_diagonal_error: 0.0,
    };
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            if i == j {
                dev.max_diagonal_error = dev
                    .max_diagonal_error
                    .max((g[(i, j)] - C64::new(1.0, 0.0)).norm());
            } else {
                dev.max_off_diagonal = dev.max_off_diagonal.max(g[(i, j)].norm());
            }
        }
    }
    dev
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerProductCheck {
    pub lhs: C64,
    pub rhs: C64,
    pub diff: f64,
}

/// `<A, B>` against `Σ <A, R^ℒ_mn> <R^ζ_mn, B>`, i.e. `A` paired with the
/// expansion of `B`.
pub fn inner_product_reconstruction(
    spec: &LiouvilleSpectrum,
    a: &OperatorMatrix,
    b: &OperatorMatrix,
) -> Result<InnerProductCheck> {
    check_dim(spec.dim(), a.dim())?;
    check_dim(spec.dim(), b.dim())?;
    let lhs = hs_inner(a, b)?;
    let mut rhs = C64::new(0.0, 0.0);
    for p in &spec.pairs {
        rhs += hs_inner(a, &p.right)? * hs_inner(&p.dual, b)?;
    }
    Ok(InnerProductCheck {
        lhs,
        rhs,
        diff: (lhs - rhs).norm(),
    })
}

fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Eigenvalues of a general (possibly non-normal) matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralSpectrum {
    /// Real parts, ascending.
    pub values: Vec<f64>,
    pub max_imaginary: f64,
}

pub fn general_spectrum(h: &OperatorMatrix) -> Result<GeneralSpectrum> {
    let ev = eig_general(h)?;
    let max_imaginary = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let mut values: Vec<f64> = ev.iter().map(|z| z.re).collect();
    values.sort_by(f64::total_cmp);
    Ok(GeneralSpectrum {
        values,
        max_imaginary,
    })
}

/// `(m, n, E_m - E_n)` for every ordered pair, in pair order.
pub fn pair_differences(values: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(values.len() * values.len());
    for (m, a) in values.iter().enumerate() {
        for (n, b) in values.iter().enumerate() {
            out.push((m, n, a - b));
        }
    }
    out
}

/// Eigenvalues of the dense `N² x N²` Kronecker Liouvillian, as a
/// cross-check of the dyad construction.
pub fn dense_superoperator_spectrum(h: &OperatorMatrix) -> Result<Vec<C64>> {
    let l = build_kron_l(h, &Conjugation)?.kron_matrix()?;
    eig_general(&l)
}

/// Largest deviation between two multisets of reals after sorting.
pub fn multiset_distance(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Some(
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub eigenvalue: f64,
    pub count: usize,
}

/// Groups sorted values whose consecutive gaps are at most `tol`.
pub fn multiplicity_histogram(values: &[f64], tol: f64) -> Vec<Multiplicity> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<Multiplicity> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for x in v {
        match out.last_mut() {
            Some(bin) if x - last <= tol => bin.count += 1,
            _ => out.push(Multiplicity {
                eigenvalue: x,
                count: 1,
            }),
        }
        last = x;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingCandidate {
    /// `ħΩ`, the frequency of the Hermitian partner.
    BigOmega,
    /// `ħω`, the bare oscillator frequency.
    Omega,
    Neither,
}

/// Which level spacing the computed spectrum actually follows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingComparison {
    pub measured: f64,
    pub omega_candidate: f64,
    pub big_omega_candidate: f64,
    pub omega_deviation: f64,
    pub big_omega_deviation: f64,
    pub best: SpacingCandidate,
}

/// Mean spacing of the lowest `window + 1` levels compared against `ħω`
/// and `ħΩ`; the closer candidate is reported if its relative deviation
/// is within `tol`.
pub fn compare_spacing(
    values: &[f64],
    window: usize,
    hbar_omega: f64,
    hbar_big_omega: f64,
    tol: f64,
) -> SpacingComparison {
    let w = window.clamp(1, values.len().saturating_sub(1).max(1));
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let measured = if sorted.len() > w {
        (sorted[w] - sorted[0]) / w as f64
    } else {
        f64::NAN
    };
    let omega_deviation = (measured - hbar_omega).abs() / hbar_omega.abs();
    let big_omega_deviation = (measured - hbar_big_omega).abs() / hbar_big_omega.abs();
    let best = if big_omega_deviation <= omega_deviation && big_omega_deviation <= tol {
        SpacingCandidate::BigOmega
    } else if omega_deviation < big_omega_deviation && omega_deviation <= tol {
        SpacingCandidate::Omega
    } else {
        SpacingCandidate::Neither
    };
    SpacingComparison {
        measured,
        omega_candidate: hbar_omega,
        big_omega_candidate: hbar_big_omega,
        omega_deviation,
        big_omega_deviation,
        best,
    }
}
