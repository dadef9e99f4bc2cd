use super::{Operator, StateVector, SystemGeometry};
use crate::{Error, Result, C64};

/// Amplitudes reshaped into the `d^N_A x d^N_B` matrix `Psi[a, b]`.
pub fn amplitude_matrix(state: &StateVector, geom: &SystemGeometry) -> Result<Operator> {
    geom.check_state(state)?;
    let db = geom.dim_b();
    Ok(Operator::from_fn(geom.dim_a(), db, |a, b| state[a * db + b]))
}

/// Reduced density matrix `Tr_B |psi><psi| = Psi Psi^dagger`.
pub fn partial_trace_b(state: &StateVector, geom: &SystemGeometry) -> Result<Operator> {
    let psi = amplitude_matrix(state, geom)?;
    psi.matmul(&psi.adjoint())
}

/// `(I_A ⊗ <b|) |psi>` for a vector `b` on `B`, returned unnormalized together
/// with its squared norm `p(b)`.
pub fn partial_project(
    state: &StateVector,
    b: &StateVector,
    geom: &SystemGeometry,
) -> Result<(StateVector, f64)> {
    geom.check_state(state)?;
    let db = geom.dim_b();
    if b.len() != db {
        return Err(Error::Contract(format!(
            "measurement vector of length {} on a subsystem of dimension {db}",
            b.len()
        )));
    }
    let out: Vec<C64> = (0..geom.dim_a())
        .map(|a| (0..db).map(|j| b[j].conj() * state[a * db + j]).sum())
        .collect();
    let out = StateVector::new(out);
    let p = out.norm_sqr();
    Ok((out, p))
}

/// Squared Schmidt coefficients across the `A|B` cut, nonincreasing, of
/// length `min(d^N_A, d^N_B)`.
pub fn schmidt_spectrum(state: &StateVector, geom: &SystemGeometry) -> Result<Vec<f64>> {
    let psi = amplitude_matrix(state, geom)?;
    let s = psi
        .as_mat()
        .singular_values()
        .map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    let mut out: Vec<f64> = s.iter().map(|x| x * x).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sample_haar_state;
    use crate::rng::stream_rng;

    #[test]
    fn product_state_has_pure_reduction() {
        let geom = SystemGeometry::new(2, 3).unwrap();
        let s = StateVector::basis_state(32, 0b10110);
        let rho = partial_trace_b(&s, &geom).unwrap();
        assert!((rho[(0b10, 0b10)].re - 1.0).abs() < 1e-15);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        let spec = schmidt_spectrum(&s, &geom).unwrap();
        assert_eq!(spec.len(), 4);
        assert!((spec[0] - 1.0).abs() < 1e-12 && spec[1].abs() < 1e-12);
    }

    #[test]
    fn bell_pair_is_maximally_mixed() {
        let geom = SystemGeometry::new(1, 1).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let s = StateVector::from_real(&[h, 0.0, 0.0, h]);
        let spec = schmidt_spectrum(&s, &geom).unwrap();
        assert!((spec[0] - 0.5).abs() < 1e-12 && (spec[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn projection_probabilities_sum_to_one() {
        let geom = SystemGeometry::new(2, 2).unwrap();
        let s = sample_haar_state(16, &mut stream_rng(5, 0));
        let total: f64 = (0..4)
            .map(|b| partial_project(&s, &StateVector::basis_state(4, b), &geom).unwrap().1)
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        let rho = partial_trace_b(&s, &geom).unwrap();
        assert!(rho.hermiticity_defect() < 1e-14);
    }
}
