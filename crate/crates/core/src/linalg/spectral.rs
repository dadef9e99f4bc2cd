use std::cmp::Ordering;
use std::f64::consts::TAU;

use faer::{Mat, Side};

use super::{Operator, StateVector, TOLERANCE};
use crate::{Error, Result, C64};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: Operator,
}

fn check_hermitian(m: &Operator) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Contract(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let defect = m.hermiticity_defect();
    let tol = TOLERANCE * m.max_abs().max(1.0);
    if defect > tol {
        return Err(Error::Contract(format!("matrix is not Hermitian (defect {defect:.3e})")));
    }
    Ok(())
}

pub fn hermitian_eigen(m: &Operator) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let evd = m
        .as_mat()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigensolver failed: {e:?}")))?;
    let values = evd.S().column_vector().iter().map(|x| x.re).collect();
    Ok(HermitianEigen { values, vectors: Operator::from_mat(evd.U().to_owned()) })
}

fn hermitian_eigenvalues(m: &Operator) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    m.as_mat()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigensolver failed: {e:?}")))
}

/// Schatten-1 norm of a Hermitian matrix: the sum of `|lambda_i|`.
///
/// ```
/// use symdesign::linalg::{trace_norm, Operator};
/// assert!((trace_norm(&Operator::identity(2)).unwrap() - 2.0).abs() < 1e-12);
/// ```
pub fn trace_norm(m: &Operator) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.iter().map(|x| x.abs()).sum())
}

/// Orthonormal eigenbasis of a unitary matrix as `(phase, vector)` pairs,
/// phases in `[0, 2pi)`.
///
/// The commuting Hermitian pair `Re(e^{-i c} U)`, `Im(e^{-i c} U)` is
/// diagonalized jointly: first the real part, then the imaginary part inside
/// every numerically degenerate cluster of the first. Output is sorted by
/// phase, then by the smallest basis index in each vector's support.
pub fn unitary_eigenbasis(u: &Operator) -> Result<Vec<(f64, StateVector)>> {
    if !u.is_square() {
        return Err(Error::Contract("unitary must be square".into()));
    }
    let defect = u.unitarity_defect();
    if defect > 1e-9 {
        return Err(Error::Contract(format!("matrix is not unitary (defect {defect:.3e})")));
    }
    let n = u.dim();
    let rot = C64::from_polar(1.0, -0.713_717_147_2);
    let re = Operator::from_fn(n, n, |i, j| (rot * u[(i, j)] + (rot * u[(j, i)]).conj()) * 0.5);
    let im = Operator::from_fn(n, n, |i, j| {
        (rot * u[(i, j)] - (rot * u[(j, i)]).conj()) * C64::new(0.0, -0.5)
    });

    let first = hermitian_eigen(&re)?;
    let mut vectors: Vec<StateVector> = Vec::with_capacity(n);
    let cluster_tol = 1e-8;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && first.values[end] - first.values[end - 1] < cluster_tol {
            end += 1;
        }
        if end - start == 1 {
            vectors.push(first.vectors.column(start));
        } else {
            // Restrict the imaginary part to the cluster and rotate within it.
            let basis = Operator::from_fn(n, end - start, |i, j| first.vectors[(i, start + j)]);
            let restricted = basis.adjoint().matmul(&im)?.matmul(&basis)?.hermitian_part();
            let inner = hermitian_eigen(&restricted)?;
            let rotated = basis.matmul(&inner.vectors)?;
            for j in 0..rotated.ncols() {
                vectors.push(rotated.column(j));
            }
        }
        start = end;
    }

    let mut out = Vec::with_capacity(n);
    for mut v in vectors {
        let uv = u.apply(&v)?;
        let phase = v.inner(&uv).arg().rem_euclid(TAU);
        let phase = if TAU - phase < 1e-9 { 0.0 } else { phase };
        canonical_phase(&mut v);
        out.push((phase, v));
    }
    out.sort_by(|a, b| compare_eigvecs(a, b));
    Ok(out)
}

/// Multiplies `v` by a global phase so its first significant amplitude is
/// real and positive.
pub(crate) fn canonical_phase(v: &mut StateVector) {
    if let Some(a) = v.amplitudes().iter().find(|a| a.norm() > 1e-9).copied() {
        v.scale(a.conj() / a.norm());
    }
}

pub(crate) fn leading_index(v: &StateVector) -> usize {
    v.amplitudes().iter().position(|a| a.norm() > 1e-9).unwrap_or(usize::MAX)
}

pub(crate) fn compare_eigvecs(a: &(f64, StateVector), b: &(f64, StateVector)) -> Ordering {
    if (a.0 - b.0).abs() > 1e-9 {
        return a.0.total_cmp(&b.0);
    }
    leading_index(&a.1).cmp(&leading_index(&b.1))
}

/// `V diag(f(lambda)) V^dagger` for a Hermitian decomposition.
pub(crate) fn spectral_function(eig: &HermitianEigen, f: impl Fn(f64) -> C64) -> Operator {
    let v = eig.vectors.as_mat();
    let n = v.nrows();
    let scaled = Mat::from_fn(n, eig.values.len(), |i, j| v[(i, j)] * f(eig.values[j]));
    Operator::from_mat(&scaled * v.adjoint())
}
