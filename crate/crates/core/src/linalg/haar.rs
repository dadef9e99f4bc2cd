use rand::Rng;
use rand_distr::StandardNormal;

use super::{Operator, StateVector};
use crate::{Error, Result, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state: a normalized complex Gaussian vector.
pub fn sample_haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    loop {
        let mut v = StateVector::new((0..dim).map(|_| gaussian(rng)).collect());
        if v.normalize().is_ok() {
            return v;
        }
    }
}

/// Complex Ginibre matrix with i.i.d. standard normal real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    let entries: Vec<C64> = (0..dim * dim).map(|_| gaussian(rng)).collect();
    Operator::from_fn(dim, dim, |i, j| entries[j * dim + i])
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the phases of `diag(R)` moved into `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    let z = ginibre(dim, rng);
    let qr = z.as_mat().qr();
    let q = qr.compute_Q();
    let r = qr.R();
    Operator::from_fn(dim, dim, |i, j| {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

/// Unitary factor `Z (Z^dagger Z)^{-1/2}` of the polar decomposition, with
/// the smallest singular value of `Z`.
pub fn polar_unitary(z: &Operator) -> Result<(Operator, f64)> {
    if !z.is_square() {
        return Err(Error::Contract("polar decomposition needs a square matrix".into()));
    }
    let svd = z
        .as_mat()
        .svd()
        .map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    let smallest = svd
        .S()
        .column_vector()
        .iter()
        .map(|s| s.re)
        .fold(f64::INFINITY, f64::min);
    Ok((Operator::from_mat(svd.U() * svd.V().adjoint()), smallest))
}
