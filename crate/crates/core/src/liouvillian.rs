//! Liouvillian superoperators in Kronecker form `H ⊗ I - I ⊗ CHC` and in
//! matrix-action form `A ↦ H A - A H^dag`.
//!
//! The two are related by the row-major vectorizer: for any `L`, `R`,
//! `vec(L A R) = (L ⊗ R^T) vec(A)`, so `A H^dag` lifts to
//! `I ⊗ (H^dag)^T = I ⊗ conj(H)`, and `conj(H) = C H C` for the basis
//! conjugation. The closure taken in infinite dimension is the identity
//! here. So is the gap between `A^dag ⊗ I + I ⊗ B^dag` and
//! `(A ⊗ I + I ⊗ B)^dag`: at finite dimension they are equal, which
//! [`symmetric_adjoint_kron`] makes checkable but cannot make interesting.

use crate::error::{Error, Result};
use crate::linalg::{check_dim, kron, Conjugation, OperatorMatrix, C64};
use crate::rigging::Vectorizer;

/// Largest Hilbert dimension for which Kronecker forms are materialized.
pub const KRON_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum ActionRule {
    Identity {
        dim: usize,
    },
    /// `A ↦ H A - A H^dag`
    Liouvillian(OperatorMatrix),
    /// `A ↦ H^dag A - A H`
    AdjointLiouvillian(OperatorMatrix),
    /// `A ↦ L A R`
    Sandwich {
        left: OperatorMatrix,
        right: OperatorMatrix,
    },
}

/// Linear map on Liouville space.
#[derive(Debug, Clone, PartialEq)]
pub enum SuperOperator {
    /// `N^2 x N^2` matrix acting on row-major vectorized operators.
    Kron(OperatorMatrix),
    Action(ActionRule),
}

impl SuperOperator {
    pub fn identity(dim: usize) -> Self {
        Self::Action(ActionRule::Identity { dim })
    }

    /// Hilbert-space dimension `N`.
    pub fn dim(&self) -> usize {
        match self {
            Self::Kron(m) => (m.dim() as f64).sqrt().round() as usize,
            Self::Action(rule) => match rule {
                ActionRule::Identity { dim } => *dim,
                ActionRule::Liouvillian(h) | ActionRule::AdjointLiouvillian(h) => h.dim(),
                ActionRule::Sandwich { left, .. } => left.dim(),
            },
        }
    }

    pub fn apply(&self, a: &OperatorMatrix) -> Result<OperatorMatrix> {
        check_dim(self.dim(), a.dim())?;
        Ok(match self {
            Self::Kron(m) => {
                let v = Vectorizer::new(a.dim());
                v.matricize(&m.apply(&v.vectorize(a)?)?)?
            }
            Self::Action(rule) => match rule {
                ActionRule::Identity { .. } => a.clone(),
                ActionRule::Liouvillian(h) => apply_liouvillian(h, a)?,
                ActionRule::AdjointLiouvillian(h) => adjoint_liouvillian(h, a)?,
                ActionRule::Sandwich { left, right } => &(left * a) * right,
            },
        })
    }

    /// Adjoint with respect to the Hilbert-Schmidt pairing.
    pub fn adjoint(&self) -> SuperOperator {
        match self {
            Self::Kron(m) => Self::Kron(m.adjoint()),
            Self::Action(rule) => Self::Action(match rule {
                ActionRule::Identity { dim } => ActionRule::Identity { dim: *dim },
                ActionRule::Liouvillian(h) => ActionRule::AdjointLiouvillian(h.clone()),
                ActionRule::AdjointLiouvillian(h) => ActionRule::Liouvillian(h.clone()),
                // <B, L A R> = Tr(B^dag L A R) = <L^dag B R^dag, A>
                ActionRule::Sandwich { left, right } => ActionRule::Sandwich {
                    left: left.adjoint(),
                    right: right.adjoint(),
                },
            }),
        }
    }

    /// The `N^2 x N^2` matrix of this map in the row-major vectorized basis.
    pub fn kron_matrix(&self) -> Result<OperatorMatrix> {
        let n = self.dim();
        if n > KRON_LIMIT {
            return Err(Error::KronTooLarge {
                dim: n,
                limit: KRON_LIMIT,
            });
        }
        let id = OperatorMatrix::identity(n);
        Ok(match self {
            Self::Kron(m) => m.clone(),
            Self::Action(rule) => match rule {
                ActionRule::Identity { .. } => OperatorMatrix::identity(n * n),
                ActionRule::Liouvillian(h) => &kron(h, &id) - &kron(&id, &h.conj()),
                ActionRule::AdjointLiouvillian(h) => {
                    &kron(&h.adjoint(), &id) - &kron(&id, &h.transpose())
                }
                ActionRule::Sandwich { left, right } => kron(left, &right.transpose()),
            },
        })
    }

    /// `self ∘ other`, evaluated in Kronecker form.
    pub fn compose(&self, other: &SuperOperator) -> Result<SuperOperator> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self::Kron(&self.kron_matrix()? * &other.kron_matrix()?))
    }
}

/// `L = H ⊗ I - I ⊗ CHC` in Kronecker form.
pub fn build_kron_l(h: &OperatorMatrix, c: &Conjugation) -> Result<SuperOperator> {
    let n = h.dim();
    if n > KRON_LIMIT {
        return Err(Error::KronTooLarge {
            dim: n,
            limit: KRON_LIMIT,
        });
    }
    let id = OperatorMatrix::identity(n);
    Ok(SuperOperator::Kron(
        &kron(h, &id) - &kron(&id, &c.conjugate_operator(h)),
    ))
}

/// Action-form Liouvillian `ℒ_H`.
pub fn liouvillian_action(h: &OperatorMatrix) -> SuperOperator {
    SuperOperator::Action(ActionRule::Liouvillian(h.clone()))
}

/// `ℒ_H(A) = H A - A H^dag`.
pub fn apply_liouvillian(h: &OperatorMatrix, a: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_dim(h.dim(), a.dim())?;
    Ok(&(h * a) - &(a * &h.adjoint()))
}

/// `ℒ_H^dag(A) = H^dag A - A H`.
pub fn adjoint_liouvillian(h: &OperatorMatrix, a: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_dim(h.dim(), a.dim())?;
    Ok(&(&h.adjoint() * a) - &(a * h))
}

/// `H^dag ⊗ I - I ⊗ C H^dag C` in Kronecker form.
pub fn symmetric_adjoint_kron(h: &OperatorMatrix, c: &Conjugation) -> Result<SuperOperator> {
    build_kron_l(&h.adjoint(), c)
}

/// Largest deviation, over all matrix units `E_ij`, between the action
/// form and the vectorized Kronecker form, divided by `|H|_F`.
pub fn unitary_equivalence_residual(h: &OperatorMatrix, c: &Conjugation) -> Result<f64> {
    let n = h.dim();
    let l = build_kron_l(h, c)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let e = OperatorMatrix::unit(n, i, j);
            let d = &apply_liouvillian(h, &e)? - &l.apply(&e)?;
            worst = worst.max(d.frobenius_norm());
        }
    }
    let scale = h.frobenius_norm();
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// `Tr(ℒ_H(A))`, zero for Hermitian `H`.
pub fn trace_of_action(h: &OperatorMatrix, a: &OperatorMatrix) -> Result<C64> {
    Ok(apply_liouvillian(h, a)?.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_general, hs_inner, Tolerances};
    use crate::models::{
        build_ho, build_similarity_exact, OscillatorSpec, SwansonPath, SwansonSpec,
    };
    use crate::random::SeededRng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn sorted_re(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn kron_l_cases() {
        let l = build_kron_l(&OperatorMatrix::identity(2), &Conjugation).unwrap();
        assert_eq!(l.kron_matrix().unwrap().max_abs(), 0.0);
        let h = OperatorMatrix::from_diagonal(&[c(0.0), c(1.0)]);
        let l = build_kron_l(&h, &Conjugation).unwrap();
        let expect = OperatorMatrix::from_diagonal(&[c(0.0), c(-1.0), c(1.0), c(0.0)]);
        assert_eq!(l.kron_matrix().unwrap(), expect);
    }

    #[test]
    fn kron_l_spectrum_is_difference_set() {
        let mut rng = SeededRng::new(31);
        let h = rng.real_matrix(3);
        let ev = eig_general(&h).unwrap();
        let mut diffs = Vec::new();
        for a in &ev {
            for b in &ev {
                diffs.push(a - b.conj());
            }
        }
        let l = build_kron_l(&h, &Conjugation)
            .unwrap()
            .kron_matrix()
            .unwrap();
        let got = sorted_re(eig_general(&l).unwrap());
        let want = sorted_re(diffs);
        // complex pairs: compare as multisets by greedy matching
        let mut used = vec![false; want.len()];
        for g in &got {
            let k = (0..want.len())
                .filter(|&k| !used[k])
                .min_by(|&a, &b| (want[a] - g).norm().total_cmp(&(want[b] - g).norm()))
                .unwrap();
            assert!((want[k] - g).norm() < 1e-9, "{g} vs {}", want[k]);
            used[k] = true;
        }
    }

    #[test]
    fn action_cases() {
        let mut rng = SeededRng::new(32);
        let a = rng.matrix(3);
        assert_eq!(
            apply_liouvillian(&OperatorMatrix::identity(3), &a)
                .unwrap()
                .max_abs(),
            0.0
        );

        let h = build_ho(&OscillatorSpec::new(1.0, 4)).unwrap();
        for m in 0..4 {
            for n in 0..4 {
                let e = OperatorMatrix::unit(4, m, n);
                let got = apply_liouvillian(&h, &e).unwrap();
                assert!((&got - &e.scale_real(m as f64 - n as f64)).max_abs() < 1e-15);
            }
        }

        let h = rng.matrix(5);
        let a = rng.matrix(5);
        let via_kron = build_kron_l(&h, &Conjugation).unwrap().apply(&a).unwrap();
        let direct = apply_liouvillian(&h, &a).unwrap();
        assert!((&via_kron - &direct).frobenius_norm() <= 1e-12 * direct.frobenius_norm());
        assert!(apply_liouvillian(&h, &rng.matrix(4)).is_err());
    }

    #[test]
    fn adjoint_cases() {
        let mut rng = SeededRng::new(33);
        let h = rng.hermitian(4);
        let a = rng.matrix(4);
        assert!(
            (&adjoint_liouvillian(&h, &a).unwrap() - &apply_liouvillian(&h, &a).unwrap()).max_abs()
                < 1e-14
        );

        let h = OperatorMatrix::from_diagonal(&[c(0.0), c(1.0)]);
        let e01 = OperatorMatrix::unit(2, 0, 1);
        assert_eq!(adjoint_liouvillian(&h, &e01).unwrap(), e01.scale_real(-1.0));
        // pairing oracle over all basis dyads
        for i in 0..2 {
            for j in 0..2 {
                let b = OperatorMatrix::unit(2, i, j);
                let lhs = hs_inner(&adjoint_liouvillian(&h, &e01).unwrap(), &b).unwrap();
                let rhs = hs_inner(&e01, &apply_liouvillian(&h, &b).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn adjoint_pairing_random() {
        let mut rng = SeededRng::new(34);
        let h = rng.matrix(4);
        for _ in 0..50 {
            let (a, b) = (rng.matrix(4), rng.matrix(4));
            let lhs = hs_inner(&adjoint_liouvillian(&h, &a).unwrap(), &b).unwrap();
            let rhs = hs_inner(&a, &apply_liouvillian(&h, &b).unwrap()).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn symmetric_adjoint_equals_matrix_adjoint() {
        let mut rng = SeededRng::new(35);
        let h = rng.hermitian(3);
        assert_eq!(
            symmetric_adjoint_kron(&h, &Conjugation)
                .unwrap()
                .kron_matrix()
                .unwrap(),
            build_kron_l(&h, &Conjugation)
                .unwrap()
                .kron_matrix()
                .unwrap()
        );
        let spec = SwansonSpec::new(2.0, 0.5, 0.25, 8, SwansonPath::SimilarityExact);
        let (sw, _, _) = build_similarity_exact(&spec, &Tolerances::default()).unwrap();
        let rnd = rng.matrix(3);
        for h in [sw, rnd] {
            let lhs = symmetric_adjoint_kron(&h, &Conjugation)
                .unwrap()
                .kron_matrix()
                .unwrap();
            let rhs = build_kron_l(&h, &Conjugation)
                .unwrap()
                .kron_matrix()
                .unwrap()
                .adjoint();
            assert!((&lhs - &rhs).max_abs() <= 1e-14);
        }
    }

    #[test]
    fn equivalence_residual() {
        assert_eq!(
            unitary_equivalence_residual(&OperatorMatrix::identity(3), &Conjugation).unwrap(),
            0.0
        );
        let h = build_ho(&OscillatorSpec::new(1.0, 8)).unwrap();
        assert!(unitary_equivalence_residual(&h, &Conjugation).unwrap() <= 1e-12);
        let spec = SwansonSpec::new(2.0, 0.5, 0.25, 16, SwansonPath::SimilarityExact);
        let (sw, _, _) = build_similarity_exact(&spec, &Tolerances::default()).unwrap();
        assert!(unitary_equivalence_residual(&sw, &Conjugation).unwrap() <= 1e-12);
    }

    #[test]
    fn kron_limit_enforced() {
        let h = OperatorMatrix::identity(KRON_LIMIT + 1);
        assert!(matches!(
            build_kron_l(&h, &Conjugation),
            Err(Error::KronTooLarge { .. })
        ));
        assert!(liouvillian_action(&h).apply(&h).is_ok());
    }

    #[test]
    fn trace_annihilation() {
        let mut rng = SeededRng::new(36);
        let h = rng.hermitian(5);
        for _ in 0..10 {
            assert!(trace_of_action(&h, &rng.matrix(5)).unwrap().norm() < 1e-13);
        }
        let h = rng.matrix(4);
        let a = rng.matrix(4);
        let expect = (&(&h - &h.adjoint()) * &a).trace();
        assert!((trace_of_action(&h, &a).unwrap() - expect).norm() < 1e-13);
    }

    #[test]
    fn kron_and_action_rules_agree() {
        let mut rng = SeededRng::new(37);
        let h = rng.matrix(3);
        let (l, r) = (rng.matrix(3), rng.matrix(3));
        let rules = [
            ActionRule::Identity { dim: 3 },
            ActionRule::Liouvillian(h.clone()),
            ActionRule::AdjointLiouvillian(h),
            ActionRule::Sandwich { left: l, right: r },
        ];
        for rule in rules {
            let s = SuperOperator::Action(rule);
            let k = SuperOperator::Kron(s.kron_matrix().unwrap());
            let a = rng.matrix(3);
            assert!((&s.apply(&a).unwrap() - &k.apply(&a).unwrap()).frobenius_norm() < 1e-13);
            let sa = s.adjoint();
            assert!(
                (&sa.kron_matrix().unwrap() - &k.kron_matrix().unwrap().adjoint()).max_abs()
                    < 1e-14
            );
        }
    }
}
