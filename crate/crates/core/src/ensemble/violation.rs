use super::basis::MeasurementBasis;
use crate::linalg::{trace_norm, Operator, SystemGeometry};
use crate::symmetry::{Chain, SectorProjector};
use crate::{Error, Result, C64};

/// Per-vector deviations `||<b|P|b> - I||_1` and their sum.
#[derive(Clone, Debug)]
pub struct ViolationReport {
    pub profile: Vec<f64>,
    /// `sum_b` of the profile.
    pub total: f64,
    /// `total / d^N_B`.
    pub normalized: f64,
}

fn check_geometry(p: &SectorProjector, basis: &MeasurementBasis, geom: &SystemGeometry) -> Result<()> {
    if p.chain() != Chain::from(*geom) {
        return Err(Error::Contract(format!(
            "projector on {:?} for geometry {geom:?}",
            p.chain()
        )));
    }
    if basis.n_b() != geom.n_b {
        return Err(Error::Contract(format!(
            "basis on {} sites for N_B = {}",
            basis.n_b(),
            geom.n_b
        )));
    }
    Ok(())
}

/// `<b|P|b> / w` as an operator on `A`, where `w` is the identity weight of
/// the group sum so that the sufficient condition reads `<b|P|b> / w = I`.
pub fn partial_expectation(
    p: &SectorProjector,
    basis: &MeasurementBasis,
    index: usize,
    geom: &SystemGeometry,
) -> Result<Operator> {
    check_geometry(p, basis, geom)?;
    let (da, db) = (geom.dim_a(), geom.dim_b());
    let d = geom.local_dim;
    let entries = basis.entries(index);
    // Dense lookup of b for the bra side.
    let mut bra = vec![C64::default(); db];
    for &(x, c) in &entries {
        bra[x] = c.conj();
    }
    let mut m = Operator::zeros(da, da);
    for (g, coef) in p.terms() {
        for a_in in 0..da {
            for &(beta, amp) in &entries {
                let x = a_in * db + beta;
                if !p.in_charge_sector(x) {
                    continue;
                }
                let y = g.map_index(x, d);
                let b_out = bra[y % db];
                if b_out != C64::default() {
                    m[(y / db, a_in)] += b_out * coef * amp;
                }
            }
        }
    }
    let w = p.identity_weight();
    if w.abs() < 1e-300 {
        return Err(Error::Argument("projector group sum has no identity component".into()));
    }
    Ok(m.scaled((1.0 / w).into()))
}

/// Violation of the sufficient condition `<b|P|b> = I` summed over the basis.
///
/// ```
/// use symdesign::ensemble::{violation, BasisSpec};
/// use symdesign::linalg::SystemGeometry;
/// use symdesign::symmetry::{SectorKind, SectorProjector};
/// let geom = SystemGeometry::new(3, 3).unwrap();
/// let z2 = SectorProjector::new(SectorKind::Z2 { parity: 0 }, geom.into()).unwrap();
/// let x = BasisSpec::SigmaX.build(3, 2).unwrap();
/// assert!((violation(&z2, &x, &geom).unwrap().normalized - 8.0).abs() < 1e-9);
/// ```
pub fn violation(
    p: &SectorProjector,
    basis: &MeasurementBasis,
    geom: &SystemGeometry,
) -> Result<ViolationReport> {
    let id = Operator::identity(geom.dim_a());
    let profile = (0..basis.len())
        .map(|i| {
            let m = partial_expectation(p, basis, i, geom)?;
            trace_norm(&m.sub(&id)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = profile.iter().sum();
    Ok(ViolationReport { normalized: total / basis.len() as f64, total, profile })
}

/// Whether `max_b ||<b|P|b> - I||_1 <= tol`, with the maximum.
pub fn condition_check(
    p: &SectorProjector,
    basis: &MeasurementBasis,
    geom: &SystemGeometry,
    tol: f64,
) -> Result<(bool, f64)> {
    let report = violation(p, basis, geom)?;
    let worst = report.profile.iter().copied().fold(0.0, f64::max);
    Ok((worst <= tol, worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::BasisSpec;
    use crate::symmetry::{ReflectionAxis, SectorKind, Sign};

    fn setup(kind: SectorKind, n_a: usize, n_b: usize) -> (SectorProjector, SystemGeometry) {
        let geom = SystemGeometry::new(n_a, n_b).unwrap();
        (SectorProjector::new(kind, geom.into()).unwrap(), geom)
    }

    #[test]
    fn z2_computational_is_exact() {
        let (p, geom) = setup(SectorKind::Z2 { parity: 1 }, 3, 4);
        let basis = BasisSpec::Computational.build(4, 2).unwrap();
        let (ok, worst) = condition_check(&p, &basis, &geom, 1e-10).unwrap();
        assert!(ok && worst < 1e-12);
    }

    #[test]
    fn translation_all_zero_outcome_is_maximal() {
        let (p, geom) = setup(SectorKind::Translation { k: 0 }, 2, 3);
        let basis = BasisSpec::Computational.build(3, 2).unwrap();
        let m = partial_expectation(&p, &basis, 0, &geom).unwrap();
        // <00|<000|T_0|000>|00> = N
        assert!((m[(0, 0)].re - 5.0).abs() < 1e-12);
        let (ok, _) = condition_check(&p, &basis, &geom, 1e-10).unwrap();
        assert!(!ok);
    }

    #[test]
    fn dense_oracle_agrees() {
        let (p, geom) = setup(
            SectorKind::Reflection { axis: ReflectionAxis::Mirror, sign: Sign::Plus },
            2,
            2,
        );
        let basis = BasisSpec::LocalProduct { seed: 3, shared: false }.build(2, 2).unwrap();
        let dense = p.dense().unwrap();
        for i in 0..4 {
            let b = basis.vector(i);
            let lift = Operator::identity(4).kron(&Operator::from_columns(&[b]).unwrap());
            let expect = lift.adjoint().matmul(&dense).unwrap().matmul(&lift).unwrap();
            let got = partial_expectation(&p, &basis, i, &geom).unwrap();
            assert!(got.max_abs_diff(&expect) < 1e-12);
        }
    }
}
