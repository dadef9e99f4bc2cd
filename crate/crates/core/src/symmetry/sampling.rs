use rand::Rng;

use super::element::{Chain, SiteMap};
use super::projector::SectorProjector;
use crate::linalg::{ginibre, polar_unitary, sample_haar_state, Operator, StateVector, TOLERANCE};
use crate::{Error, Result};

/// Attempts before an empty projection is reported as an argument error.
pub const DEFAULT_RETRIES: usize = 16;

/// Largest dimension for [`sample_t_invariant_unitary`].
pub const POLAR_LIMIT: usize = 1024;

/// Normalized state inside a symmetry sector.
#[derive(Clone, Debug)]
pub struct SymmetricStateSample {
    pub state: StateVector,
    pub sector: SectorProjector,
    /// Norm `sqrt(<psi|P^dagger P|psi>)` of the projected generator.
    pub norm: f64,
}

/// `P|psi> / ||P|psi>||`.
pub fn project_state(state: &StateVector, p: &SectorProjector) -> Result<SymmetricStateSample> {
    let mut projected = p.apply(state)?;
    let norm = projected.norm();
    if norm < TOLERANCE {
        return Err(Error::EmptyProjection { norm });
    }
    projected.scale((1.0 / norm).into());
    Ok(SymmetricStateSample { state: projected, sector: p.clone(), norm })
}

/// Uniformly random state of the sector: a projected Haar state.
pub fn sample_symmetric_state<R: Rng + ?Sized>(
    p: &SectorProjector,
    rng: &mut R,
) -> Result<SymmetricStateSample> {
    sample_symmetric_state_with_retries(p, rng, DEFAULT_RETRIES)
}

pub fn sample_symmetric_state_with_retries<R: Rng + ?Sized>(
    p: &SectorProjector,
    rng: &mut R,
    retries: usize,
) -> Result<SymmetricStateSample> {
    let dim = p.chain().dim();
    let mut last = 0.0;
    for _ in 0..retries.max(1) {
        match project_state(&sample_haar_state(dim, rng), p) {
            Err(Error::EmptyProjection { norm }) => last = norm,
            other => return other,
        }
    }
    Err(Error::Argument(format!(
        "{:?}: projection stayed empty after {retries} attempts (last norm {last:.3e})",
        p.kind()
    )))
}

/// Haar-random unitary commuting with translation: the polar factor of the
/// translation-averaged Ginibre matrix `sum_j T^{-j} Z T^j`.
pub fn sample_t_invariant_unitary<R: Rng + ?Sized>(chain: Chain, rng: &mut R) -> Result<Operator> {
    let dim = chain.dim();
    if dim > POLAR_LIMIT {
        return Err(Error::Budget(format!(
            "translation-invariant unitary of dimension {dim} exceeds {POLAR_LIMIT}"
        )));
    }
    let n = chain.sites;
    let d = chain.local_dim;
    let shifts: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            let t = SiteMap::translation(n, j as i64);
            (0..dim).map(|x| t.map_index(x, d)).collect()
        })
        .collect();
    for _ in 0..DEFAULT_RETRIES {
        let z = ginibre(dim, rng);
        // <x|T^-j Z T^j|y> = <T^j x|Z|T^j y>
        let sym = Operator::from_fn(dim, dim, |x, y| {
            shifts.iter().map(|s| z[(s[x], s[y])]).sum()
        });
        let (u, smallest) = polar_unitary(&sym)?;
        if smallest >= 1e-12 {
            return Ok(u);
        }
    }
    Err(Error::Numerical("symmetrized Ginibre matrix stayed rank deficient".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::symmetry::{translate, SectorKind};
    use crate::C64;

    #[test]
    fn projections_of_basis_states() {
        let c = Chain::qubits(3);
        let t0 = SectorProjector::new(SectorKind::Translation { k: 0 }, c).unwrap();
        let s = project_state(&StateVector::basis_state(8, 0), &t0).unwrap();
        assert!((s.state[0] - C64::new(1.0, 0.0)).norm() < 1e-14);

        let z = SectorProjector::new(SectorKind::Z2 { parity: 0 }, c).unwrap();
        let s = project_state(&StateVector::basis_state(8, 0b100), &z).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((s.state[0b100].re - h).abs() < 1e-14 && (s.state[0b011].re - h).abs() < 1e-14);

        let mut v = StateVector::basis_state(8, 0b100);
        v[0b010] = C64::new(-1.0, 0.0);
        assert!(matches!(project_state(&v, &t0), Err(Error::EmptyProjection { .. })));
    }

    #[test]
    fn sampled_states_are_eigenvectors() {
        let c = Chain::qubits(6);
        let mut rng = stream_rng(7, 0);
        for k in 0..6 {
            let p = SectorProjector::new(SectorKind::Translation { k }, c).unwrap();
            let s = sample_symmetric_state(&p, &mut rng).unwrap();
            let shifted = translate(&s.state, 1, c).unwrap();
            let mut expected = s.state.clone();
            expected.scale(C64::from_polar(1.0, -std::f64::consts::TAU * k as f64 / 6.0));
            assert!(shifted.max_abs_diff(&expected) < 1e-9);
            assert!(p.eigen_residual(&s.state).unwrap() < 1e-9);
        }
    }

    #[test]
    fn t_invariant_unitary_commutes() {
        let c = Chain::qubits(4);
        let u = sample_t_invariant_unitary(c, &mut stream_rng(8, 0)).unwrap();
        assert!(u.unitarity_defect() < 1e-10);
        let t = SiteMap::translation(4, 1).dense(2);
        let comm = u.matmul(&t).unwrap().sub(&t.matmul(&u).unwrap()).unwrap();
        assert!(comm.max_abs() < 1e-9);
    }
}
