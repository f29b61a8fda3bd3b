//! Seeded generation of test operators.
//!
//! The stream is SplitMix64 with the state initialised to the seed:
//!
//! ```text
//! state = state + 0x9E3779B97F4A7C15            (wrapping)
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9      (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB      (wrapping)
//! out = z ^ (z >> 31)
//! ```
//!
//! A uniform real in `[-1, 1)` is `2 * (out >> 11) * 2^-53 - 1`. Complex
//! entries draw the real part first, then the imaginary part. Matrices are
//! filled in row-major order, vectors in index order.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::linalg::{ComplexVector, OperatorMatrix, C64};

#[derive(Debug, Clone)]
pub struct SeededRng(SplitMix64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[-1, 1)`.
    pub fn uniform(&mut self) -> f64 {
        let unit = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * unit - 1.0
    }

    pub fn complex(&mut self) -> C64 {
        let re = self.uniform();
        let im = self.uniform();
        C64::new(re, im)
    }

    pub fn vector(&mut self, dim: usize) -> ComplexVector {
        ComplexVector::from(nalgebra::DVector::from_iterator(
            dim,
            (0..dim).map(|_| self.complex()),
        ))
    }

    pub fn matrix(&mut self, dim: usize) -> OperatorMatrix {
        let entries: Vec<C64> = (0..dim * dim).map(|_| self.complex()).collect();
        OperatorMatrix::from_row_major(dim, &entries).expect("finite entries")
    }

    pub fn real_matrix(&mut self, dim: usize) -> OperatorMatrix {
        let entries: Vec<f64> = (0..dim * dim).map(|_| self.uniform()).collect();
        OperatorMatrix::from_real_row_major(dim, &entries).expect("finite entries")
    }

    /// `(X + X^dag) / 2` for a random complex `X`.
    pub fn hermitian(&mut self, dim: usize) -> OperatorMatrix {
        let x = self.matrix(dim);
        (&x + &x.adjoint()).scale_real(0.5)
    }

    pub fn real_symmetric(&mut self, dim: usize) -> OperatorMatrix {
        let x = self.real_matrix(dim);
        (&x + &x.transpose()).scale_real(0.5)
    }

    /// `X X^T + I` for a random real `X`: real symmetric positive definite.
    pub fn spd(&mut self, dim: usize) -> OperatorMatrix {
        let x = self.real_matrix(dim);
        &(&x * &x.transpose()) + &OperatorMatrix::identity(dim)
    }
}
