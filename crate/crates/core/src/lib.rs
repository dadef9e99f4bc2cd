//! Exact-statevector tools for projected ensembles of symmetric quantum states.
//!
//! A generator state on `N = N_A + N_B` qudits is measured on its `B` part in
//! some orthonormal basis; the normalized post-measurement states on `A`,
//! weighted by their Born probabilities, form the *projected ensemble*. This
//! crate builds such ensembles from
//!
//! * random states restricted to a symmetry sector (translation momentum,
//!   spin-flip parity, reflections, magnetization, and compositions of them),
//! * states evolved under a tilted-field Ising chain,
//!
//! and measures how close their `t`-th moments are to those of the Haar
//! ensemble on `A`.
//!
//! The modules mirror the layers of that computation:
//!
//! * [`linalg`]: dense vectors and operators, trace norm, partial operations
//!   across the `A|B` cut, Haar sampling.
//! * [`symmetry`]: symmetry operators, sector projectors, sampling of
//!   symmetric states and translation-invariant unitaries.
//! * [`moments`]: replica permutations, Haar moments and the analytic moments
//!   of symmetric ensembles.
//! * [`ensemble`]: measurement bases, projected ensembles, the trace-distance
//!   metric and the violation functional of the sufficient condition.
//! * [`dynamics`]: Ising Hamiltonians, time evolution and time-series scans.
//!
//! ```
//! use symdesign::ensemble::{delta_t, BasisSpec};
//! use symdesign::linalg::{StateVector, SystemGeometry};
//!
//! let geom = SystemGeometry::new(3, 4).unwrap();
//! let basis = BasisSpec::Computational.build(geom.n_b, geom.local_dim).unwrap();
//! // A product state is as far from a 1-design as a pure state can be.
//! let zero = StateVector::basis_state(geom.dim(), 0);
//! let d1 = delta_t(&zero, &basis, 1, &geom).unwrap();
//! assert!((d1 - 1.75).abs() < 1e-12);
//! ```

pub mod dynamics;
pub mod ensemble;
mod error;
pub mod linalg;
pub mod moments;
pub mod rng;
pub mod symmetry;

pub use error::{Error, Result};

/// Crate version, recorded in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

// The guide's code listings are compiled and run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/projected-ensembles.md")]
    pub mod projected_ensembles {}
    #[doc = include_str!("../../../book/src/symmetry-sectors.md")]
    pub mod symmetry_sectors {}
    #[doc = include_str!("../../../book/src/moments.md")]
    pub mod moments {}
    #[doc = include_str!("../../../book/src/sufficient-condition.md")]
    pub mod sufficient_condition {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    pub mod dynamics {}
}
