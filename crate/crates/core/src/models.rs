//! Model Hamiltonians on a truncated Fock space: the Hermitian harmonic
//! oscillator and the Swanson oscillator
//! `H = ħ[ω(a†a + 1/2) + α a² + β a†²]`.
//!
//! The Fock basis is that of the ordinary oscillator with length
//! `ℓ = sqrt(ħ / mω)`; one mass parameter serves both models. Position and
//! momentum enter only through
//! `x = (ℓ/√2)(a + a†)` and `p = (iħ/√2ℓ)(a† - a)`, and their squares are
//! the leading `N x N` blocks of the exact squares (computed at `N + 1`),
//! so `p²/2m + mω²x²/2` reproduces `ħω(a†a + 1/2)` at every truncation.
//!
//! The Swanson model has two constructions. The analytic-truncated path
//! truncates `H` and `η(x) = exp(c x²/ℓ²)` independently, so
//! `H† = η H η⁻¹` holds only approximately and the defect measures
//! truncation. The similarity-exact path truncates the Hermitian partner
//! `h = p²/2M + MΩ²x²/2` and defines `H = ρ⁻¹ h ρ` with `ρ = η^(1/2)`, so
//! every intertwining identity holds to round-off at finite `N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{mat_exp_sym, sqrt_spd, OperatorMatrix, Tolerances, C64};
use crate::metric::{validate_metric, MetricOperator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSpec {
    pub omega: f64,
    pub mass: f64,
    pub hbar: f64,
    pub dim: usize,
}

impl OscillatorSpec {
    /// Unit mass and `ħ = 1`.
    pub fn new(omega: f64, dim: usize) -> Self {
        Self {
            omega,
            mass: 1.0,
            hbar: 1.0,
            dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("mass", self.mass),
            ("hbar", self.hbar),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "truncation N must be >= 2, got {}",
                self.dim
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwansonPath {
    #[serde(rename = "analytic")]
    AnalyticTruncated,
    #[serde(rename = "exact")]
    SimilarityExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwansonSpec {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub z: f64,
    pub mass: f64,
    pub hbar: f64,
    /// Reference length; `sqrt(ħ / mω)` when unset.
    pub ell: Option<f64>,
    pub dim: usize,
    pub path: SwansonPath,
}

impl SwansonSpec {
    /// `z = 0`, unit mass, `ħ = 1`, derived `ℓ`.
    pub fn new(omega: f64, alpha: f64, beta: f64, dim: usize, path: SwansonPath) -> Self {
        Self {
            omega,
            alpha,
            beta,
            z: 0.0,
            mass: 1.0,
            hbar: 1.0,
            ell: None,
            dim,
            path,
        }
    }

    pub fn length(&self) -> f64 {
        self.ell
            .unwrap_or_else(|| (self.hbar / (self.mass * self.omega)).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("z", self.z),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        for (name, v) in [
            ("mass", self.mass),
            ("hbar", self.hbar),
            ("ell", self.length()),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.dim < 4 {
            return Err(Error::InvalidParameter(format!(
                "Swanson truncation N must be >= 4, got {}",
                self.dim
            )));
        }
        if !(-1.0..=1.0).contains(&self.z) {
            return Err(Error::InvalidParameter(format!(
                "z must lie in [-1, 1], got {}",
                self.z
            )));
        }
        let discriminant = self.omega * self.omega - 4.0 * self.alpha * self.beta;
        if discriminant <= 0.0 {
            return Err(Error::NonRealRegime { discriminant });
        }
        if self.omega - self.alpha - self.beta == 0.0 {
            return Err(Error::EtaPole);
        }
        Ok(())
    }
}

/// Annihilation operator `a` (entries `√n` at `(n-1, n)`) and `a†`.
pub fn build_ladder(dim: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "ladder truncation must be >= 2, got {dim}"
        )));
    }
    let a = OperatorMatrix::from_fn(dim, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let adag = a.adjoint();
    Ok((a, adag))
}

/// `ħω(n + 1/2)` on the diagonal.
pub fn build_ho(spec: &OscillatorSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    let diag: Vec<C64> = (0..spec.dim)
        .map(|n| C64::new(spec.hbar * spec.omega * (n as f64 + 0.5), 0.0))
        .collect();
    Ok(OperatorMatrix::from_diagonal(&diag))
}

/// `(x/ℓ)²`: the leading `N x N` block of `((a + a†)/√2)²`, i.e. `n + 1/2`
/// on the diagonal and `√((n+1)(n+2))/2` two steps off it.
pub fn position_squared_reduced(dim: usize) -> Result<OperatorMatrix> {
    quadrature_square(dim, 1.0)
}

/// `(ℓ p / ħ)²`: as [`position_squared_reduced`] with the off-diagonal
/// sign flipped.
pub fn momentum_squared_reduced(dim: usize) -> Result<OperatorMatrix> {
    quadrature_square(dim, -1.0)
}

fn quadrature_square(dim: usize, sign: f64) -> Result<OperatorMatrix> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "truncation must be >= 2, got {dim}"
        )));
    }
    Ok(OperatorMatrix::from_fn(dim, |i, j| {
        let v = if i == j {
            i as f64 + 0.5
        } else if i.abs_diff(j) == 2 {
            let k = i.min(j) as f64;
            sign * 0.5 * ((k + 1.0) * (k + 2.0)).sqrt()
        } else {
            0.0
        };
        C64::new(v, 0.0)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwansonScalars {
    /// `Ω = sqrt(ω² - 4αβ)`.
    pub big_omega: f64,
    /// `M⁻¹(z)`.
    pub inverse_mass: f64,
    /// `c = -(α - β) / (ω - α - β)`, so that `η = exp(c x²/ℓ²)`.
    pub metric_exponent: f64,
}

pub fn swanson_scalars(spec: &SwansonSpec) -> Result<SwansonScalars> {
    spec.validate()?;
    let SwansonSpec {
        omega,
        alpha,
        beta,
        z,
        hbar,
        ..
    } = *spec;
    let ell = spec.length();
    let big_omega = (omega * omega - 4.0 * alpha * beta).sqrt();
    let metric_exponent = -(alpha - beta) / (omega - alpha - beta);

    if 1.0 + z == 0.0 {
        return Err(Error::InvalidMass("z = -1 makes M(z) singular".into()));
    }
    // s * sqrt(1 - d²/s²) = sign(s) * sqrt(s² - d²), principal root; finite
    // at s = 0 when d = 0 (Hermitian limit with z = 0).
    let s = alpha + beta - z * omega;
    let d2 = (1.0 - z * z) * (alpha - beta).powi(2);
    let radicand = s * s - d2;
    if radicand < 0.0 {
        return Err(Error::InvalidMass(format!(
            "nested radical is imaginary (s^2 - d^2 = {radicand})"
        )));
    }
    let branch = if s == 0.0 {
        0.0
    } else {
        s.signum() * radicand.sqrt()
    };
    let inverse_mass = (-z * (alpha + beta) + omega - branch) * ell * ell / ((1.0 + z) * hbar);
    if !(inverse_mass.is_finite() && inverse_mass > 0.0) {
        return Err(Error::InvalidMass(format!("M^-1(z) = {inverse_mass}")));
    }
    Ok(SwansonScalars {
        big_omega,
        inverse_mass,
        metric_exponent,
    })
}

/// Truncated Swanson Hamiltonian; real, symmetric iff `α = β`.
pub fn build_swanson_h(spec: &SwansonSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    let n = spec.dim;
    let (a, adag) = build_ladder(n)?;
    let diag: Vec<C64> = (0..n)
        .map(|k| C64::new(spec.omega * (k as f64 + 0.5), 0.0))
        .collect();
    let h = &(&OperatorMatrix::from_diagonal(&diag) + &(&a * &a).scale_real(spec.alpha))
        + &(&adag * &adag).scale_real(spec.beta);
    Ok(h.scale_real(spec.hbar))
}

/// `η = exp(c x²/ℓ²)` on the truncated space; exactly `I` when `c = 0`.
pub fn build_eta_analytic(spec: &SwansonSpec, tol: &Tolerances) -> Result<MetricOperator> {
    let scalars = swanson_scalars(spec)?;
    if scalars.metric_exponent == 0.0 {
        return Ok(MetricOperator::identity(spec.dim));
    }
    let x2 = position_squared_reduced(spec.dim)?;
    let eta = mat_exp_sym(&x2.scale_real(scalars.metric_exponent), tol)?;
    validate_metric(&eta, tol)
}

/// Truncated Hermitian partner `h = p²/2M + MΩ²x²/2` in the reference
/// Fock basis.
pub fn build_hermitian_partner(spec: &SwansonSpec) -> Result<OperatorMatrix> {
    let scalars = swanson_scalars(spec)?;
    let ell = spec.length();
    let mass = 1.0 / scalars.inverse_mass;
    let p2 = momentum_squared_reduced(spec.dim)?.scale_real((spec.hbar / ell).powi(2));
    let x2 = position_squared_reduced(spec.dim)?.scale_real(ell * ell);
    Ok(&p2.scale_real(0.5 * scalars.inverse_mass)
        + &x2.scale_real(0.5 * mass * scalars.big_omega.powi(2)))
}

/// `(H, η, h)` with `H = ρ⁻¹ h ρ`, `ρ² = η`.
pub fn build_similarity_exact(
    spec: &SwansonSpec,
    tol: &Tolerances,
) -> Result<(OperatorMatrix, MetricOperator, OperatorMatrix)> {
    let h_ref = build_hermitian_partner(spec)?;
    let metric = build_eta_analytic(spec, tol)?;
    // ρ from the validated metric is the principal root; recompute through
    // sqrt_spd only to surface positive-definiteness failures uniformly.
    let rho = sqrt_spd(metric.eta(), tol)?;
    debug_assert!((&rho - metric.rho()).frobenius_norm() <= 1e-10 * rho.frobenius_norm());
    let h = &(metric.rho_inv() * &h_ref) * metric.rho();
    Ok((h, metric, h_ref))
}

/// A model system ready for the spectral pipeline.
#[derive(Debug, Clone)]
pub struct ModelInstance {
    pub hamiltonian: OperatorMatrix,
    pub metric: MetricOperator,
    /// Hermitian partner, when the construction provides one.
    pub hermitian_partner: Option<OperatorMatrix>,
}

pub fn oscillator_instance(spec: &OscillatorSpec) -> Result<ModelInstance> {
    let h = build_ho(spec)?;
    Ok(ModelInstance {
        metric: MetricOperator::identity(spec.dim),
        hermitian_partner: Some(h.clone()),
        hamiltonian: h,
    })
}

pub fn swanson_instance(spec: &SwansonSpec, tol: &Tolerances) -> Result<ModelInstance> {
    match spec.path {
        SwansonPath::SimilarityExact => {
            let (h, metric, partner) = build_similarity_exact(spec, tol)?;
            Ok(ModelInstance {
                hamiltonian: h,
                metric,
                hermitian_partner: Some(partner),
            })
        }
        SwansonPath::AnalyticTruncated => Ok(ModelInstance {
            hamiltonian: build_swanson_h(spec)?,
            metric: build_eta_analytic(spec, tol)?,
            hermitian_partner: None,
        }),
    }
}

/// Either supported model, as selected by a run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelSpec {
    #[serde(rename = "ho")]
    Oscillator(OscillatorSpec),
    Swanson(SwansonSpec),
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        match self {
            Self::Oscillator(s) => s.dim,
            Self::Swanson(s) => s.dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Oscillator(s) => s.validate(),
            Self::Swanson(s) => s.validate(),
        }
    }

    pub fn instance(&self, tol: &Tolerances) -> Result<ModelInstance> {
        match self {
            Self::Oscillator(s) => oscillator_instance(s),
            Self::Swanson(s) => swanson_instance(s, tol),
        }
    }
}
