//! Identification of the tensor-product space with Liouville space, and
//! the bra/ket functionals living on the latter.
//!
//! With the basis conjugation `C` fixing every `e_j`, the unitary
//! `I_C(e_i ⊗ C e_j) = |e_i><e_j| = E_ij` sends the Kronecker index
//! `i * N + j` to matrix entry `(i, j)`. The vectorizer is therefore a
//! row-major reshape. Any other layout would need an explicit permutation.
//!
//! A tensor-space operator `L` acts on Liouville space as `I_C L I_C^-1`.
//!
//! Superoperators act on functionals by the dual extension
//! `(Ŝ f)(B) = f(S B)`. For a ket `|F>` this gives
//! `(Ŝ|F>)(B) = <S B, F> = <B, S^dag F>`, and for a bra
//! `(Ŝ<F|)(B) = <F, S B> = <S^dag F, B>`. Both polarities therefore carry
//! the representative `S^dag F`. In particular a dual eigen-matrix of
//! `ℒ_H^dag` is an eigenvector of the extension `ℒ̂_H`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dim, hs_inner, ComplexVector, OperatorMatrix, C64};
use crate::liouvillian::SuperOperator;

/// Row-major reshape between `C^(N^2)` and `N x N` matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vectorizer {
    dim: usize,
}

impl Vectorizer {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)` of the result is component `i * N + j` of `u`.
    pub fn matricize(&self, u: &ComplexVector) -> Result<OperatorMatrix> {
        let n = self.dim;
        if u.dim() != n * n {
            let root = (u.dim() as f64).sqrt().round() as usize;
            if root * root != u.dim() {
                return Err(Error::NonSquareLength(u.dim()));
            }
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: u.dim(),
            });
        }
        OperatorMatrix::from_row_major(n, u.entries())
    }

    pub fn vectorize(&self, a: &OperatorMatrix) -> Result<ComplexVector> {
        check_dim(self.dim, a.dim())?;
        ComplexVector::new(a.to_row_major())
    }
}

/// `P_{ψ,φ} = φ ψ^dag`, the map `χ ↦ <ψ, χ> φ`.
pub fn dyad(phi: &ComplexVector, psi: &ComplexVector) -> Result<OperatorMatrix> {
    check_dim(phi.dim(), psi.dim())?;
    let (p, q) = (phi.entries(), psi.entries());
    Ok(OperatorMatrix::from_fn(p.len(), |i, j| p[i] * q[j].conj()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Bra,
    Ket,
}

/// Functional on Liouville space stored through its Hilbert-Schmidt
/// representative. A ket evaluates as `B ↦ <B, F>` (antilinear), a bra as
/// `B ↦ <F, B>` (linear).
#[derive(Debug, Clone, PartialEq)]
pub struct SuperFunctional {
    pub representative: OperatorMatrix,
    pub polarity: Polarity,
}

impl SuperFunctional {
    pub fn evaluate(&self, b: &OperatorMatrix) -> Result<C64> {
        match self.polarity {
            Polarity::Ket => hs_inner(b, &self.representative),
            Polarity::Bra => hs_inner(&self.representative, b),
        }
    }

    pub fn dim(&self) -> usize {
        self.representative.dim()
    }
}

pub fn super_ket(a: &OperatorMatrix) -> SuperFunctional {
    SuperFunctional {
        representative: a.clone(),
        polarity: Polarity::Ket,
    }
}

pub fn super_bra(a: &OperatorMatrix) -> SuperFunctional {
    SuperFunctional {
        representative: a.clone(),
        polarity: Polarity::Bra,
    }
}

/// `|φ, ψ>>`, the super ket of the dyad `φ ψ^dag`.
pub fn double_ket(phi: &ComplexVector, psi: &ComplexVector) -> Result<SuperFunctional> {
    Ok(super_ket(&dyad(phi, psi)?))
}

/// Dual extension of `s` applied to `f`: the representative becomes
/// `S^dag F`, polarity unchanged.
pub fn dual_apply(s: &SuperOperator, f: &SuperFunctional) -> Result<SuperFunctional> {
    check_dim(s.dim(), f.dim())?;
    Ok(SuperFunctional {
        representative: s.adjoint().apply(&f.representative)?,
        polarity: f.polarity,
    })
}
