//! Tilted-field Ising chains, their time evolution and deep-thermalization
//! time series.

mod evolve;
mod ising;
mod scan;

pub use evolve::{dense_propagator, evolve, Method, Propagator};
pub use ising::{build_ising, Boundary, Disorder, IsingHamiltonian, IsingSpec, DENSE_SITES, MATRIX_FREE_SITES};
pub use scan::{
    deep_thermalization_scan, fit_power_law, long_time_average, rmt_baseline, schmidt_delta1,
    MeanStderr, PowerLawFit, RmtSector, ScanPoint, TimeGrid,
};
