use faer::{Mat, Side};

use super::ising::{IsingHamiltonian, DENSE_SITES};
use crate::linalg::{hermitian_eigen, HermitianEigen, Operator, StateVector};
use crate::{Error, Result, C64};

/// How `e^{-i tau H}` is applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Full eigendecomposition of the dense Hamiltonian.
    DenseEig,
    /// Lanczos propagation with subspace dimension `dim`; each step is
    /// shortened until the local error estimate is below `tol`.
    Krylov { dim: usize, tol: f64 },
}

impl Method {
    pub fn krylov() -> Self {
        Method::Krylov { dim: 30, tol: 1e-9 }
    }

    /// Dense for chains of at most 10 sites, Krylov otherwise.
    pub fn auto(n: usize) -> Self {
        if n <= 10 {
            Method::DenseEig
        } else {
            Method::krylov()
        }
    }
}

enum Kind {
    Dense { eig: HermitianEigen },
    Krylov { dim: usize, tol: f64 },
}

/// Applies `e^{-i tau H}` for a fixed Hamiltonian.
pub struct Propagator<'a> {
    h: &'a IsingHamiltonian,
    kind: Kind,
}

const MIN_STEP: f64 = 1e-8;

impl<'a> Propagator<'a> {
    pub fn new(h: &'a IsingHamiltonian, method: Method) -> Result<Self> {
        let kind = match method {
            Method::DenseEig => {
                if h.sites() > DENSE_SITES {
                    return Err(Error::Budget(format!(
                        "dense evolution on {} sites exceeds {DENSE_SITES}",
                        h.sites()
                    )));
                }
                Kind::Dense { eig: hermitian_eigen(&h.dense()?)? }
            }
            Method::Krylov { dim, tol } => {
                if dim < 2 || !(tol > 0.0) {
                    return Err(Error::Argument(format!(
                        "Krylov needs dim >= 2 and tol > 0 (got {dim}, {tol})"
                    )));
                }
                Kind::Krylov { dim, tol }
            }
        };
        Ok(Self { h, kind })
    }

    fn check(&self, state: &StateVector) -> Result<()> {
        if state.len() != self.h.dim() {
            return Err(Error::Contract(format!(
                "state of length {} for a {}-site chain",
                state.len(),
                self.h.sites()
            )));
        }
        Ok(())
    }

    /// `e^{-i tau H} |state>`.
    pub fn evolve(&self, state: &StateVector, tau: f64) -> Result<StateVector> {
        Ok(self.evolve_series(state, &[tau])?.pop().expect("one time"))
    }

    /// States at every time of an increasing, nonnegative grid.
    pub fn evolve_series(&self, state: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
        self.check(state)?;
        check_times(times)?;
        match &self.kind {
            Kind::Dense { eig } => {
                let v = eig.vectors.as_mat();
                let coeffs = eig.vectors.adjoint().apply(state)?;
                Ok(times
                    .iter()
                    .map(|&tau| {
                        let phased = Mat::from_fn(coeffs.len(), 1, |i, _| {
                            coeffs[i] * C64::from_polar(1.0, -tau * eig.values[i])
                        });
                        let out = v * &phased;
                        StateVector::new((0..out.nrows()).map(|i| out[(i, 0)]).collect())
                    })
                    .collect())
            }
            Kind::Krylov { dim, tol } => {
                let mut out = Vec::with_capacity(times.len());
                let mut current = state.clone();
                let mut now = 0.0;
                for &target in times {
                    while target - now > 0.0 {
                        let (next, dt) = krylov_step(self.h, &current, target - now, *dim, *tol)?;
                        current = next;
                        now = if target - now - dt <= 1e-14 * target.max(1.0) { target } else { now + dt };
                    }
                    out.push(current.clone());
                }
                Ok(out)
            }
        }
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Argument("evolution times must be finite and >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("evolution times must be strictly increasing".into()));
    }
    Ok(())
}

/// One Lanczos step of length at most `max_dt`; returns the new state and
/// the time actually advanced.
fn krylov_step(
    h: &IsingHamiltonian,
    state: &StateVector,
    max_dt: f64,
    m: usize,
    tol: f64,
) -> Result<(StateVector, f64)> {
    let dim = h.dim();
    let beta0 = state.norm();
    if beta0 == 0.0 {
        return Ok((state.clone(), max_dt));
    }
    let m = m.min(dim);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m);
    basis.push(state.amplitudes().iter().map(|a| a / beta0).collect());
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    let mut w = vec![C64::default(); dim];
    let mut residual = 0.0;
    let mut exact = false;
    for j in 0..m {
        h.apply_into(&basis[j], &mut w);
        let a: f64 = basis[j].iter().zip(&w).map(|(v, x)| (v.conj() * x).re).sum();
        alpha.push(a);
        // Full reorthogonalization, twice for stability.
        for _ in 0..2 {
            for v in &basis {
                let overlap: C64 = v.iter().zip(&w).map(|(p, q)| p.conj() * q).sum();
                for (x, p) in w.iter_mut().zip(v) {
                    *x -= overlap * p;
                }
            }
        }
        let b = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if b < 1e-12 * (1.0 + a.abs()) {
            exact = true;
            break;
        }
        if j + 1 == m {
            residual = b;
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }

    let k = alpha.len();
    let t = Mat::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let evd = t
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("tridiagonal eigensolver failed: {e:?}")))?;
    let q = evd.U();
    let lambda: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let coeffs = |dt: f64| -> Vec<C64> {
        (0..k)
            .map(|row| {
                (0..k)
                    .map(|l| C64::from_polar(q[(row, l)] * q[(0, l)], -dt * lambda[l]))
                    .sum()
            })
            .collect()
    };

    let mut dt = max_dt;
    let y = loop {
        let y = coeffs(dt);
        let err = if exact { 0.0 } else { residual * y[k - 1].norm() };
        if err <= tol {
            break y;
        }
        if dt < MIN_STEP {
            return Err(Error::Numerical(format!(
                "Krylov step did not converge: dt = {dt:.3e}, error estimate {err:.3e} > {tol:.1e} \
                 with subspace dimension {m}"
            )));
        }
        dt *= 0.5;
    };

    let mut out = vec![C64::default(); dim];
    for (v, c) in basis.iter().zip(&y) {
        let c = c * beta0;
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    Ok((StateVector::new(out), dt))
}

/// `e^{-i tau H} |state>` in one call.
pub fn evolve(state: &StateVector, h: &IsingHamiltonian, tau: f64, method: Method) -> Result<StateVector> {
    Propagator::new(h, method)?.evolve(state, tau)
}

/// Dense `e^{-i tau H}` for small chains.
pub fn dense_propagator(h: &IsingHamiltonian, tau: f64) -> Result<Operator> {
    let eig = hermitian_eigen(&h.dense()?)?;
    Ok(crate::linalg::spectral::spectral_function(&eig, |x| C64::from_polar(1.0, -tau * x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_ising, Boundary, IsingSpec};

    #[test]
    fn zero_time_is_identity() {
        let h = build_ising(&IsingSpec::chaotic(6)).unwrap();
        let s = StateVector::basis_state(64, 5);
        for method in [Method::DenseEig, Method::krylov()] {
            assert!(evolve(&s, &h, 0.0, method).unwrap().max_abs_diff(&s) < 1e-15);
        }
    }

    #[test]
    fn dense_and_krylov_agree() {
        let h = build_ising(&IsingSpec::chaotic(8).with_boundary(Boundary::Open)).unwrap();
        let s = StateVector::basis_state(256, 0);
        let times = [0.5, 1.0, 3.0, 10.0];
        let dense = Propagator::new(&h, Method::DenseEig).unwrap().evolve_series(&s, &times).unwrap();
        let kry = Propagator::new(&h, Method::krylov()).unwrap().evolve_series(&s, &times).unwrap();
        for (a, b) in dense.iter().zip(&kry) {
            assert!(a.max_abs_diff(b) < 1e-8);
            assert!((b.norm() - 1.0).abs() < 1e-9);
        }
        let u = dense_propagator(&h, 3.0).unwrap();
        assert!(u.apply(&s).unwrap().max_abs_diff(&dense[2]) < 1e-10);
    }

    #[test]
    fn invalid_grids() {
        let h = build_ising(&IsingSpec::chaotic(4)).unwrap();
        let p = Propagator::new(&h, Method::krylov()).unwrap();
        let s = StateVector::basis_state(16, 0);
        assert!(p.evolve_series(&s, &[1.0, 0.5]).is_err());
        assert!(p.evolve_series(&s, &[-1.0]).is_err());
    }
}
