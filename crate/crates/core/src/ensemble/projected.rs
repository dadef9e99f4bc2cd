use super::basis::MeasurementBasis;
use crate::linalg::{StateVector, SystemGeometry};
use crate::moments::{haar_moment, mixture_moment, trace_distance, MomentBudget, MomentOperator};
use crate::{Error, Result};

/// Outcomes with probability below this are dropped and counted in
/// [`ProjectedEnsemble::dropped_mass`].
pub const PROBABILITY_CUTOFF: f64 = 1e-12;

/// Post-measurement states on `A` with their Born probabilities.
#[derive(Clone, Debug)]
pub struct ProjectedEnsemble {
    pub probabilities: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Index of the basis vector behind each retained outcome.
    pub outcomes: Vec<usize>,
    pub dropped_mass: f64,
    pub dim_a: usize,
}

impl ProjectedEnsemble {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `sum_b p_b (|phi(b)><phi(b)|)^{⊗t}`.
    pub fn moment(&self, t: usize, budget: &MomentBudget) -> Result<MomentOperator> {
        if self.is_empty() {
            return Err(Error::Numerical("projected ensemble has no outcomes".into()));
        }
        mixture_moment(&self.probabilities, &self.states, t, budget)
    }

    /// `||moment_t - reference||_1`.
    pub fn distance_to(&self, reference: &MomentOperator, budget: &MomentBudget) -> Result<f64> {
        trace_distance(&self.moment(reference.order(), budget)?, reference)
    }
}

/// Measures `B` of `state` in `basis`.
///
/// ```
/// use symdesign::ensemble::{projected_ensemble, BasisSpec};
/// use symdesign::linalg::{StateVector, SystemGeometry};
/// let geom = SystemGeometry::new(2, 2).unwrap();
/// let h = 1.0 / 2f64.sqrt();
/// let mut ghz = StateVector::zeros(16);
/// ghz[0] = h.into();
/// ghz[15] = h.into();
/// let basis = BasisSpec::Computational.build(2, 2).unwrap();
/// let e = projected_ensemble(&ghz, &basis, &geom).unwrap();
/// assert_eq!(e.len(), 2);
/// assert!((e.probabilities[0] - 0.5).abs() < 1e-12);
/// ```
pub fn projected_ensemble(
    state: &StateVector,
    basis: &MeasurementBasis,
    geom: &SystemGeometry,
) -> Result<ProjectedEnsemble> {
    let c = basis.coefficients(state, geom)?;
    let mut e = ProjectedEnsemble {
        probabilities: Vec::new(),
        states: Vec::new(),
        outcomes: Vec::new(),
        dropped_mass: 0.0,
        dim_a: geom.dim_a(),
    };
    for b in 0..c.ncols() {
        let mut phi = c.column(b);
        let p = phi.norm_sqr();
        if p < PROBABILITY_CUTOFF {
            e.dropped_mass += p;
            continue;
        }
        phi.scale((1.0 / p.sqrt()).into());
        e.probabilities.push(p);
        e.states.push(phi);
        e.outcomes.push(b);
    }
    Ok(e)
}

/// `t`-th moment of the projected ensemble.
pub fn ensemble_moment(e: &ProjectedEnsemble, t: usize, budget: &MomentBudget) -> Result<MomentOperator> {
    e.moment(t, budget)
}

/// `Delta^(t) = ||sum_b p_b (|phi(b)><phi(b)|)^{⊗t} - Pi_t / D_{A,t}||_1`.
pub fn delta_t(
    state: &StateVector,
    basis: &MeasurementBasis,
    t: usize,
    geom: &SystemGeometry,
) -> Result<f64> {
    Ok(delta_ts(state, basis, &[t], geom, &MomentBudget::default())?[0])
}

/// `Delta^(t)` for several orders from one projected ensemble.
pub fn delta_ts(
    state: &StateVector,
    basis: &MeasurementBasis,
    ts: &[usize],
    geom: &SystemGeometry,
    budget: &MomentBudget,
) -> Result<Vec<f64>> {
    let e = projected_ensemble(state, basis, geom)?;
    ts.iter()
        .map(|&t| e.distance_to(&haar_moment(geom.dim_a(), t, budget)?, budget))
        .collect()
}

/// `||moment_t - reference||_1` for an arbitrary reference moment.
pub fn delta_prime_t(
    state: &StateVector,
    basis: &MeasurementBasis,
    reference: &MomentOperator,
    geom: &SystemGeometry,
    budget: &MomentBudget,
) -> Result<f64> {
    if reference.replica_dim() != geom.dim_a() {
        return Err(Error::Contract(format!(
            "reference moment on dimension {} for A of dimension {}",
            reference.replica_dim(),
            geom.dim_a()
        )));
    }
    projected_ensemble(state, basis, geom)?.distance_to(reference, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::BasisSpec;
    use crate::linalg::{partial_trace_b, sample_haar_state};
    use crate::rng::stream_rng;

    #[test]
    fn product_state_single_outcome() {
        let geom = SystemGeometry::new(3, 2).unwrap();
        let basis = BasisSpec::Computational.build(2, 2).unwrap();
        let e = projected_ensemble(&StateVector::basis_state(32, 0), &basis, &geom).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.outcomes, vec![0]);
        assert!((delta_t(&StateVector::basis_state(32, 0), &basis, 1, &geom).unwrap() - 1.75).abs() < 1e-12);
    }

    #[test]
    fn first_moment_is_reduced_state() {
        let geom = SystemGeometry::new(2, 3).unwrap();
        let psi = sample_haar_state(32, &mut stream_rng(9, 0));
        let rho = partial_trace_b(&psi, &geom).unwrap();
        let budget = MomentBudget::default();
        for spec in [BasisSpec::Computational, BasisSpec::SigmaX, BasisSpec::GlobalHaar { seed: 4 }] {
            let basis = spec.build(3, 2).unwrap();
            let e = projected_ensemble(&psi, &basis, &geom).unwrap();
            let total: f64 = e.probabilities.iter().sum::<f64>() + e.dropped_mass;
            assert!((total - 1.0).abs() < 1e-10);
            let m = e.moment(1, &budget).unwrap();
            assert!(m.operator().max_abs_diff(&rho) < 1e-10);
            let m2 = e.moment(2, &budget).unwrap();
            assert!(m2.permutation_defect() < 1e-12);
        }
    }

    #[test]
    fn delta_prime_against_own_moment_vanishes() {
        let geom = SystemGeometry::new(2, 3).unwrap();
        let psi = sample_haar_state(32, &mut stream_rng(10, 0));
        let basis = BasisSpec::SigmaX.build(3, 2).unwrap();
        let budget = MomentBudget::default();
        let own = projected_ensemble(&psi, &basis, &geom).unwrap().moment(2, &budget).unwrap();
        assert!(delta_prime_t(&psi, &basis, &own, &geom, &budget).unwrap() < 1e-10);
        let haar = haar_moment(4, 2, &budget).unwrap();
        let a = delta_prime_t(&psi, &basis, &haar, &geom, &budget).unwrap();
        let b = delta_ts(&psi, &basis, &[2], &geom, &budget).unwrap()[0];
        assert!((a - b).abs() < 1e-14);
    }
}
