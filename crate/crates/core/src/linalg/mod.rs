//! Dense complex linear algebra on qudit chains.
//!
//! Index convention: a computational basis state `|x_1 x_2 ... x_N>` has
//! index `sum_s x_s d^(N-s)`, i.e. site 1 is the most significant digit.
//! Subsystem `A` is sites `1..=N_A`, subsystem `B` the remaining `N_B`, so a
//! full-system index factors as `a * d^N_B + b` and the amplitude array
//! reshapes row-major into a `d^N_A x d^N_B` matrix.

mod haar;
mod operator;
mod partial;
pub(crate) mod spectral;
mod state;

pub use haar::{ginibre, polar_unitary, sample_haar_state, sample_haar_unitary};
pub use operator::Operator;
pub use partial::{amplitude_matrix, partial_project, partial_trace_b, schmidt_spectrum};
pub use spectral::{hermitian_eigen, trace_norm, unitary_eigenbasis, HermitianEigen};
pub use state::StateVector;

use crate::{Error, Result};

/// Normalization and Hermiticity tolerance.
pub const TOLERANCE: f64 = 1e-10;

/// Sizes of a bipartite qudit chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SystemGeometry {
    pub n_total: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub local_dim: usize,
}

impl SystemGeometry {
    /// Qubit chain with `n_a` unmeasured and `n_b` measured sites.
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        Self::with_local_dim(n_a, n_b, 2)
    }

    pub fn with_local_dim(n_a: usize, n_b: usize, local_dim: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::Argument(format!(
                "both subsystems need at least one site (n_a = {n_a}, n_b = {n_b})"
            )));
        }
        if local_dim < 2 {
            return Err(Error::Argument(format!("local dimension {local_dim} < 2")));
        }
        let n_total = n_a + n_b;
        let bits = (local_dim as f64).log2() * n_total as f64;
        if bits > 40.0 {
            return Err(Error::Budget(format!(
                "Hilbert space {local_dim}^{n_total} is not addressable"
            )));
        }
        Ok(Self { n_total, n_a, n_b, local_dim })
    }

    /// Full Hilbert space dimension `d^N`.
    pub fn dim(&self) -> usize {
        self.local_dim.pow(self.n_total as u32)
    }

    pub fn dim_a(&self) -> usize {
        self.local_dim.pow(self.n_a as u32)
    }

    pub fn dim_b(&self) -> usize {
        self.local_dim.pow(self.n_b as u32)
    }

    pub(crate) fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.len() != self.dim() {
            return Err(Error::Contract(format!(
                "state of length {} does not live on {}^{} sites",
                state.len(),
                self.local_dim,
                self.n_total
            )));
        }
        Ok(())
    }
}

/// Digits of `index` in base `d`, most significant first.
pub fn digits(mut index: usize, n: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// Inverse of [`digits`].
pub fn from_digits(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}
