//! Translation, reflection, Z2 and U(1) symmetries of qudit chains.
//!
//! Every projector is a weighted sum of site permutations (possibly combined
//! with a global spin flip) and acts on state vectors without building a
//! matrix.

mod element;
mod projector;
mod ptrace;
mod sampling;

pub use element::{Chain, SiteMap};
pub use projector::{ReflectionAxis, SectorKind, SectorProjector, Sign, DENSE_PROJECTOR_LIMIT};
pub use ptrace::{classify_dense, partial_trace_translation_power, TraceClass, TracedTranslation};
pub use sampling::{
    project_state, sample_symmetric_state, sample_symmetric_state_with_retries,
    sample_t_invariant_unitary, SymmetricStateSample, DEFAULT_RETRIES, POLAR_LIMIT,
};

use crate::linalg::StateVector;
use crate::{Error, Result};

/// `T^j |psi>` by index rotation; `j` is taken mod `N`.
///
/// ```
/// use symdesign::linalg::StateVector;
/// use symdesign::symmetry::{translate, Chain};
/// let s = translate(&StateVector::basis_state(8, 0b100), 1, Chain::qubits(3)).unwrap();
/// assert_eq!(s, StateVector::basis_state(8, 0b010));
/// ```
pub fn translate(state: &StateVector, j: i64, chain: Chain) -> Result<StateVector> {
    let dim = chain.dim();
    if state.len() != dim {
        return Err(Error::Contract(format!(
            "state of length {} on a chain of dimension {dim}",
            state.len()
        )));
    }
    let n = chain.sites as i64;
    let j = j.rem_euclid(n) as u32;
    let d = chain.local_dim;
    let low = d.pow(j);
    let high = d.pow(chain.sites as u32 - j);
    let mut out = StateVector::zeros(dim);
    for x in 0..dim {
        out[x / low + (x % low) * high] = state[x];
    }
    Ok(out)
}
