//! Metric operators: `η` on the Hilbert space, `η ⊗ η` on the tensor
//! product, and `ζ(A) = η A η` on Liouville space.
//!
//! `η` must be real in the distinguished basis, which for the basis
//! conjugation is exactly the commutation `Cη = ηC`. Continuity of `η` and
//! invariance of the dense test-function space carry no content at finite
//! dimension and are not checked.

use crate::error::{Error, Result};
use crate::linalg::{
    check_dim, eig_hermitian, ensure_positive, hs_inner, kron, ComplexVector, Conjugation,
    OperatorMatrix, Tolerances, C64,
};
use crate::liouvillian::{
    adjoint_liouvillian, apply_liouvillian, build_kron_l, ActionRule, SuperOperator,
};

/// Spectral expansions are trusted only below this condition number.
pub const CONDITION_LIMIT: f64 = 1e6;

/// Validated real symmetric positive-definite metric with cached square
/// root and inverses.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricOperator {
    eta: OperatorMatrix,
    rho: OperatorMatrix,
    eta_inv: OperatorMatrix,
    rho_inv: OperatorMatrix,
    eigenvalues: Vec<f64>,
}

impl MetricOperator {
    pub fn eta(&self) -> &OperatorMatrix {
        &self.eta
    }

    /// Principal square root `ρ`, `ρ² = η`.
    pub fn rho(&self) -> &OperatorMatrix {
        &self.rho
    }

    pub fn eta_inv(&self) -> &OperatorMatrix {
        &self.eta_inv
    }

    pub fn rho_inv(&self) -> &OperatorMatrix {
        &self.rho_inv
    }

    pub fn dim(&self) -> usize {
        self.eta.dim()
    }

    /// Ascending eigenvalues of `η`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// 2-norm condition number of `η`.
    pub fn condition_number(&self) -> f64 {
        let lo = self.eigenvalues[0];
        let hi = self.eigenvalues[self.eigenvalues.len() - 1];
        hi / lo
    }

    pub fn is_well_conditioned(&self) -> bool {
        self.condition_number() <= CONDITION_LIMIT
    }

    pub fn identity(dim: usize) -> Self {
        let id = OperatorMatrix::identity(dim);
        Self {
            eta: id.clone(),
            rho: id.clone(),
            eta_inv: id.clone(),
            rho_inv: id,
            eigenvalues: vec![1.0; dim],
        }
    }
}

/// Checks symmetry, realness and positive definiteness, in that order,
/// then caches `ρ`, `η⁻¹` and `ρ⁻¹` from one eigendecomposition.
pub fn validate_metric(m: &OperatorMatrix, tol: &Tolerances) -> Result<MetricOperator> {
    let scale = m.frobenius_norm();
    let residual = m.hermitian_defect();
    let tolerance = tol.sym * scale;
    if residual > tolerance {
        return Err(Error::NotSymmetric {
            residual,
            tolerance,
        });
    }
    let max_imag = m.max_imag();
    if max_imag > tol.sym * scale {
        return Err(Error::NotRealEntries { max_imag });
    }
    let real = OperatorMatrix::from_fn(m.dim(), |i, j| {
        C64::new(0.5 * (m.get(i, j).re + m.get(j, i).re), 0.0)
    });
    let eig = eig_hermitian(&real, tol)?;
    ensure_positive(&eig, tol)?;
    let rho = eig.map_values(f64::sqrt);
    let eta_inv = eig.map_values(|x| 1.0 / x);
    let rho_inv = eig.map_values(|x| 1.0 / x.sqrt());
    // The caches are functions of real symmetric matrices; drop round-off
    // imaginary parts so every cached factor commutes with C exactly.
    let realify =
        |a: OperatorMatrix| OperatorMatrix::from_fn(a.dim(), |i, j| C64::new(a.get(i, j).re, 0.0));
    Ok(MetricOperator {
        eta: real,
        rho: realify(rho),
        eta_inv: realify(eta_inv),
        rho_inv: realify(rho_inv),
        eigenvalues: eig.values,
    })
}

/// `<φ, ψ>_η = φ^dag η ψ`.
pub fn eta_inner(m: &MetricOperator, phi: &ComplexVector, psi: &ComplexVector) -> Result<C64> {
    check_dim(m.dim(), phi.dim())?;
    phi.inner(&m.eta.apply(psi)?)
}

/// `ζ(A) = η A η`; `η` is real symmetric, so the conjugated factor of
/// `η ⊗ η` is `η` itself.
pub fn build_zeta(m: &MetricOperator) -> SuperOperator {
    SuperOperator::Action(ActionRule::Sandwich {
        left: m.eta.clone(),
        right: m.eta.clone(),
    })
}

pub fn build_zeta_inverse(m: &MetricOperator) -> SuperOperator {
    SuperOperator::Action(ActionRule::Sandwich {
        left: m.eta_inv.clone(),
        right: m.eta_inv.clone(),
    })
}

/// `η ⊗ η` on the tensor-product space.
pub fn tensor_metric(m: &MetricOperator) -> OperatorMatrix {
    kron(&m.eta, &m.eta)
}

/// `<A, B>_ζ = <A, η B η>_HS`.
pub fn zeta_inner(m: &MetricOperator, a: &OperatorMatrix, b: &OperatorMatrix) -> Result<C64> {
    check_dim(m.dim(), a.dim())?;
    hs_inner(a, &build_zeta(m).apply(b)?)
}

/// `|H^dag η - η H|_F / |η H|_F`.
pub fn quasi_hermiticity_residual(h: &OperatorMatrix, m: &MetricOperator) -> Result<f64> {
    check_dim(m.dim(), h.dim())?;
    let eh = &m.eta * h;
    let d = &(&h.adjoint() * &m.eta) - &eh;
    Ok(relative(d.frobenius_norm(), eh.frobenius_norm()))
}

/// `|L^dag (η⊗η) - (η⊗η) L|_F / |(η⊗η) L|_F` with `L` in Kronecker form.
pub fn tensor_quasi_hermiticity_residual(h: &OperatorMatrix, m: &MetricOperator) -> Result<f64> {
    check_dim(m.dim(), h.dim())?;
    let l = build_kron_l(h, &Conjugation)?.kron_matrix()?;
    let g = tensor_metric(m);
    let gl = &g * &l;
    let d = &(&l.adjoint() * &g) - &gl;
    Ok(relative(d.frobenius_norm(), gl.frobenius_norm()))
}

/// `|ℒ^dag ζ - ζ ℒ| / |ζ ℒ|`, Frobenius norms of the superoperators
/// accumulated over the matrix-unit basis.
pub fn liouville_quasi_hermiticity_residual(h: &OperatorMatrix, m: &MetricOperator) -> Result<f64> {
    check_dim(m.dim(), h.dim())?;
    let n = h.dim();
    let zeta = build_zeta(m);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let e = OperatorMatrix::unit(n, i, j);
            let lhs = adjoint_liouvillian(h, &zeta.apply(&e)?)?;
            let rhs = zeta.apply(&apply_liouvillian(h, &e)?)?;
            num += (&lhs - &rhs).frobenius_norm().powi(2);
            den += rhs.frobenius_norm().powi(2);
        }
    }
    Ok(relative(num.sqrt(), den.sqrt()))
}

fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_eta_analytic, build_similarity_exact, SwansonPath, SwansonSpec};
    use crate::random::SeededRng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_metric() {
        let m = validate_metric(&OperatorMatrix::identity(4), &tol()).unwrap();
        assert!((m.rho() - &OperatorMatrix::identity(4)).max_abs() < 1e-15);
        assert!((m.condition_number() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_metric() {
        let m = validate_metric(&OperatorMatrix::from_diagonal(&[c(1.0), c(4.0)]), &tol()).unwrap();
        let expect = OperatorMatrix::from_diagonal(&[c(1.0), c(2.0)]);
        assert!((m.rho() - &expect).max_abs() < 1e-15);
        assert!((m.condition_number() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn swanson_analytic_metric_is_spd() {
        let spec = SwansonSpec::new(2.0, 0.5, 0.25, 32, SwansonPath::AnalyticTruncated);
        let m = build_eta_analytic(&spec, &tol()).unwrap();
        // eigenvalue-sign oracle
        assert!(m.eigenvalues().iter().all(|&v| v > 0.0));
        assert!(m.eta().is_real());
    }

    #[test]
    fn rejects_each_hypothesis() {
        let asym = OperatorMatrix::from_real_row_major(2, &[1.0, 0.5, 0.0, 1.0]).unwrap();
        assert!(matches!(
            validate_metric(&asym, &tol()),
            Err(Error::NotSymmetric { .. })
        ));
        let complex = OperatorMatrix::from_row_major(
            2,
            &[c(2.0), C64::new(0.0, 0.5), C64::new(0.0, -0.5), c(2.0)],
        )
        .unwrap();
        assert!(matches!(
            validate_metric(&complex, &tol()),
            Err(Error::NotRealEntries { .. })
        ));
        let indef = OperatorMatrix::from_diagonal(&[c(1.0), c(-2.0)]);
        assert!(matches!(
            validate_metric(&indef, &tol()),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn caches_are_consistent() {
        let mut rng = SeededRng::new(41);
        let m = validate_metric(&rng.spd(6), &tol()).unwrap();
        let id = OperatorMatrix::identity(6);
        let eta = m.eta();
        assert!((&(m.rho() * m.rho()) - eta).frobenius_norm() <= 1e-12 * eta.frobenius_norm());
        assert!(m.rho().hermitian_defect() == 0.0 || m.rho().hermitian_defect() < 1e-14);
        assert!((&(eta * m.eta_inv()) - &id).frobenius_norm() < 1e-12);
        assert!((&(m.rho() * m.rho_inv()) - &id).frobenius_norm() < 1e-12);
        let all = [eta, m.rho(), m.eta_inv(), m.rho_inv()];
        for a in all {
            for b in all {
                let comm = &(a * b) - &(b * a);
                assert!(
                    comm.frobenius_norm()
                        <= 1e-12 * (a.frobenius_norm() * b.frobenius_norm()).max(1.0)
                );
            }
        }
    }

    #[test]
    fn eta_inner_cases() {
        let mut rng = SeededRng::new(42);
        let id = MetricOperator::identity(3);
        let (u, v) = (rng.vector(3), rng.vector(3));
        assert_eq!(eta_inner(&id, &u, &v).unwrap(), u.inner(&v).unwrap());
        let m = validate_metric(&OperatorMatrix::from_diagonal(&[c(1.0), c(4.0)]), &tol()).unwrap();
        let e1 = ComplexVector::basis(2, 1);
        assert_eq!(eta_inner(&m, &e1, &e1).unwrap(), c(4.0));
        let m = validate_metric(&rng.spd(5), &tol()).unwrap();
        for _ in 0..100 {
            let v = rng.vector(5);
            let q = eta_inner(&m, &v, &v).unwrap();
            assert!(q.re > 0.0 && q.im.abs() < 1e-12 * q.re);
        }
    }

    #[test]
    fn zeta_cases() {
        let mut rng = SeededRng::new(43);
        let a = rng.matrix(3);
        assert!(
            (&build_zeta(&MetricOperator::identity(3)).apply(&a).unwrap() - &a).max_abs() < 1e-15
        );

        let m = validate_metric(&OperatorMatrix::from_diagonal(&[c(1.0), c(2.0)]), &tol()).unwrap();
        let e01 = OperatorMatrix::unit(2, 0, 1);
        assert!((&build_zeta(&m).apply(&e01).unwrap() - &e01.scale_real(2.0)).max_abs() < 1e-15);

        let m = validate_metric(&rng.spd(4), &tol()).unwrap();
        let a = rng.matrix(4);
        let kron_path = SuperOperator::Kron(tensor_metric(&m)).apply(&a).unwrap();
        let direct = &(m.eta() * &a) * m.eta();
        assert!((&kron_path - &direct).frobenius_norm() <= 1e-13 * direct.frobenius_norm());
        let round = build_zeta_inverse(&m)
            .apply(&build_zeta(&m).apply(&a).unwrap())
            .unwrap();
        assert!((&round - &a).frobenius_norm() < 1e-10);
    }

    #[test]
    fn zeta_inner_cases() {
        let mut rng = SeededRng::new(44);
        let (a, b) = (rng.matrix(3), rng.matrix(3));
        assert_eq!(
            zeta_inner(&MetricOperator::identity(3), &a, &b).unwrap(),
            hs_inner(&a, &b).unwrap()
        );
        let m = validate_metric(&OperatorMatrix::from_diagonal(&[c(2.0), c(1.0)]), &tol()).unwrap();
        let e00 = OperatorMatrix::unit(2, 0, 0);
        assert!((zeta_inner(&m, &e00, &e00).unwrap() - c(4.0)).norm() < 1e-14);
        let m = validate_metric(&rng.spd(4), &tol()).unwrap();
        for _ in 0..100 {
            let a = rng.matrix(4);
            let q = zeta_inner(&m, &a, &a).unwrap();
            assert!(q.re > 0.0 && q.im.abs() < 1e-12 * q.re);
        }
    }

    #[test]
    fn hermitian_residual_is_zero() {
        let mut rng = SeededRng::new(45);
        let h = rng.hermitian(5);
        let id = MetricOperator::identity(5);
        assert!(quasi_hermiticity_residual(&h, &id).unwrap() < 1e-15);
        assert!(liouville_quasi_hermiticity_residual(&h, &id).unwrap() < 1e-14);
    }

    #[test]
    fn similarity_exact_intertwines_at_every_level() {
        let spec = SwansonSpec::new(2.0, 0.5, 0.25, 16, SwansonPath::SimilarityExact);
        let (h, m, _) = build_similarity_exact(&spec, &tol()).unwrap();
        let eps = quasi_hermiticity_residual(&h, &m).unwrap();
        assert!(eps <= 1e-12, "{eps}");
        let sup = liouville_quasi_hermiticity_residual(&h, &m).unwrap();
        assert!(sup <= 1e-11, "{sup}");
        // transport bound from the Hilbert level to the Liouville level
        assert!(sup <= 4.0 * m.condition_number() * eps.max(f64::EPSILON));
        let spec = SwansonSpec::new(2.0, 0.5, 0.25, 8, SwansonPath::SimilarityExact);
        let (h, m, _) = build_similarity_exact(&spec, &tol()).unwrap();
        assert!(tensor_quasi_hermiticity_residual(&h, &m).unwrap() <= 1e-12);
    }

    #[test]
    fn analytic_truncation_drift_is_nonzero() {
        let spec = SwansonSpec::new(2.0, 0.5, 0.25, 32, SwansonPath::AnalyticTruncated);
        let h = crate::models::build_swanson_h(&spec).unwrap();
        let m = build_eta_analytic(&spec, &tol()).unwrap();
        let r = quasi_hermiticity_residual(&h, &m).unwrap();
        assert!(r > 1e-6 && r.is_finite());
    }
}
