//! Measurement bases, projected ensembles and design metrics.

mod basis;
mod projected;
mod violation;

pub use basis::{BasisSpec, MeasurementBasis, DENSE_BASIS_SITES};
pub use projected::{
    delta_prime_t, delta_t, delta_ts, ensemble_moment, projected_ensemble, ProjectedEnsemble,
    PROBABILITY_CUTOFF,
};
pub use violation::{condition_check, partial_expectation, violation, ViolationReport};
