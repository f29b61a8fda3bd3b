//! Rigged Liouville-space machinery for quasi-Hermitian Hamiltonians.
//!
//! Operators on an `N`-dimensional Hilbert space are vectorized row-major
//! into `C^{N²}`; Liouvillians act either through a Kronecker matrix or
//! matrix-free; metric operators `η` induce the superoperator metric
//! `ζ(A) = η A η`; bi-orthogonal eigen-families of `H` lift to dyadic
//! eigen-families of `ℒ_H` used for spectral expansions.

pub mod error;
pub mod linalg;
pub mod liouvillian;
pub mod metric;
pub mod models;
pub mod random;
pub mod rigging;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{
    eig_general, eig_hermitian, hs_inner, kron, ComplexVector, Conjugation, HermitianEigen,
    OperatorMatrix, Tolerances, C64,
};
pub use liouvillian::{
    adjoint_liouvillian, apply_liouvillian, build_kron_l, liouvillian_action,
    symmetric_adjoint_kron, unitary_equivalence_residual, ActionRule, SuperOperator, KRON_LIMIT,
};
pub use metric::{
    build_zeta, build_zeta_inverse, eta_inner, liouville_quasi_hermiticity_residual,
    quasi_hermiticity_residual, tensor_quasi_hermiticity_residual, validate_metric, zeta_inner,
    MetricOperator, CONDITION_LIMIT,
};
pub use models::{
    build_eta_analytic, build_hermitian_partner, build_ho, build_ladder, build_similarity_exact,
    build_swanson_h, oscillator_instance, swanson_instance, swanson_scalars, ModelInstance,
    ModelSpec, OscillatorSpec, SwansonPath, SwansonScalars, SwansonSpec,
};
pub use random::SeededRng;
pub use rigging::{
    double_ket, dual_apply, dyad, super_bra, super_ket, Polarity, SuperFunctional, Vectorizer,
};
pub use spectral::{
    build_liouville_spectrum, completeness_residual, expand_operator, inner_product_reconstruction,
    solve_quasi_hermitian, BiorthogonalSystem, ExpansionReport, LiouvillePair, LiouvilleSpectrum,
};
pub use verify::{run_checks, CheckResult, VerifyConfig, CHECK_NAMES};
