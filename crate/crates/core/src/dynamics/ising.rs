use rand_distr::{Distribution, Normal};

use crate::linalg::{Operator, StateVector};
use crate::rng::stream_rng;
use crate::{Error, Result, C64};

/// Largest chain with a dense Hamiltonian.
pub const DENSE_SITES: usize = 12;
/// Largest chain for matrix-free evolution.
pub const MATRIX_FREE_SITES: usize = 20;

/// Coupling between the last and the first site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    Periodic,
    Open,
    /// Closed chain whose bond `(N, 1)` has strength `j_1n` instead of `J`.
    WeakLink(f64),
}

/// Gaussian disorder `N(0, variance)`, drawn from `seed`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Disorder {
    None,
    /// On every bond strength `J + eta_i`.
    Bond { variance: f64, seed: u64 },
    /// On every transverse field `h_y + xi_i`.
    Field { variance: f64, seed: u64 },
}

/// `H = sum_i J_i X_i X_{i+1} + h_x sum_i X_i + sum_i (h_y + xi_i) Y_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsingSpec {
    pub n: usize,
    pub hx: f64,
    pub hy: f64,
    pub j: f64,
    pub boundary: Boundary,
    pub disorder: Disorder,
}

impl IsingSpec {
    /// Clean periodic chain at `h_x = (sqrt5 + 1) / 4`, `h_y = (sqrt5 + 5) / 8`, `J = 1`.
    pub fn chaotic(n: usize) -> Self {
        let s5 = 5f64.sqrt();
        Self {
            n,
            hx: (s5 + 1.0) / 4.0,
            hy: (s5 + 5.0) / 8.0,
            j: 1.0,
            boundary: Boundary::Periodic,
            disorder: Disorder::None,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_disorder(mut self, disorder: Disorder) -> Self {
        self.disorder = disorder;
        self
    }
}

/// Ising Hamiltonian acting on qubit state vectors.
#[derive(Clone, Debug)]
pub struct IsingHamiltonian {
    n: usize,
    /// `(i, j, J_ij)` with 0-based sites.
    bonds: Vec<(usize, usize, f64)>,
    hx: Vec<f64>,
    hy: Vec<f64>,
}

fn gaussians(n: usize, variance: f64, seed: u64) -> Result<Vec<f64>> {
    let normal = Normal::new(0.0, variance.sqrt())
        .map_err(|e| Error::Argument(format!("disorder variance {variance}: {e}")))?;
    let mut rng = stream_rng(seed, 0);
    Ok((0..n).map(|_| normal.sample(&mut rng)).collect())
}

/// Builds the Hamiltonian of `spec`.
pub fn build_ising(spec: &IsingSpec) -> Result<IsingHamiltonian> {
    let n = spec.n;
    if n < 2 {
        return Err(Error::Argument(format!("Ising chain needs at least 2 sites, got {n}")));
    }
    if n > MATRIX_FREE_SITES {
        return Err(Error::Budget(format!("{n} sites exceed the limit of {MATRIX_FREE_SITES}")));
    }
    for (name, v) in [("hx", spec.hx), ("hy", spec.hy), ("J", spec.j)] {
        if !v.is_finite() {
            return Err(Error::Argument(format!("{name} = {v} is not finite")));
        }
    }
    let closed = !matches!(spec.boundary, Boundary::Open);
    if closed && n < 3 {
        return Err(Error::Argument("a closed chain needs at least 3 sites".into()));
    }
    if let Boundary::WeakLink(w) = spec.boundary {
        if !w.is_finite() {
            return Err(Error::Argument(format!("weak link {w} is not finite")));
        }
    }
    let disorder_variance = match spec.disorder {
        Disorder::None => 0.0,
        Disorder::Bond { variance, .. } | Disorder::Field { variance, .. } => variance,
    };
    if !(disorder_variance >= 0.0 && disorder_variance.is_finite()) {
        return Err(Error::Argument(format!("disorder variance {disorder_variance} must be >= 0")));
    }
    if spec.disorder != Disorder::None && spec.boundary != Boundary::Periodic {
        return Err(Error::Argument("disorder is only defined on the periodic chain".into()));
    }

    let n_bonds = if closed { n } else { n - 1 };
    let mut bonds: Vec<(usize, usize, f64)> = (0..n_bonds).map(|i| (i, (i + 1) % n, spec.j)).collect();
    if let Boundary::WeakLink(w) = spec.boundary {
        bonds[n - 1].2 = w;
    }
    let mut hy = vec![spec.hy; n];
    match spec.disorder {
        Disorder::None => {}
        Disorder::Bond { variance, seed } => {
            for (b, eta) in bonds.iter_mut().zip(gaussians(n_bonds, variance, seed)?) {
                b.2 += eta;
            }
        }
        Disorder::Field { variance, seed } => {
            for (h, xi) in hy.iter_mut().zip(gaussians(n, variance, seed)?) {
                *h += xi;
            }
        }
    }
    Ok(IsingHamiltonian { n, bonds, hx: vec![spec.hx; n], hy })
}

impl IsingHamiltonian {
    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn bonds(&self) -> &[(usize, usize, f64)] {
        &self.bonds
    }

    fn bit(&self, site: usize) -> usize {
        1 << (self.n - 1 - site)
    }

    /// Writes `H v` into `out`.
    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::default());
        let flips: Vec<(usize, f64)> = self
            .bonds
            .iter()
            .map(|&(i, j, c)| (self.bit(i) | self.bit(j), c))
            .chain((0..self.n).map(|s| (self.bit(s), self.hx[s])))
            .collect();
        let ys: Vec<(usize, f64)> = (0..self.n).map(|s| (self.bit(s), self.hy[s])).collect();
        for (x, &a) in v.iter().enumerate() {
            if a == C64::default() {
                continue;
            }
            for &(mask, c) in &flips {
                out[x ^ mask] += a * c;
            }
            // Y|0> = i|1>, Y|1> = -i|0>
            for &(bit, c) in &ys {
                let phase = if x & bit == 0 { C64::new(0.0, c) } else { C64::new(0.0, -c) };
                out[x ^ bit] += a * phase;
            }
        }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.len() != self.dim() {
            return Err(Error::Contract(format!(
                "state of length {} for a {}-site Hamiltonian",
                v.len(),
                self.n
            )));
        }
        let mut out = StateVector::zeros(self.dim());
        self.apply_into(v.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    /// `<v|H|v>`.
    pub fn expectation(&self, v: &StateVector) -> Result<f64> {
        Ok(v.inner(&self.apply(v)?).re)
    }

    pub fn dense(&self) -> Result<Operator> {
        if self.n > DENSE_SITES {
            return Err(Error::Budget(format!(
                "dense Hamiltonian on {} sites exceeds {DENSE_SITES}",
                self.n
            )));
        }
        let dim = self.dim();
        let mut m = Operator::zeros(dim, dim);
        let mut col = vec![C64::default(); dim];
        let mut e = vec![C64::default(); dim];
        for x in 0..dim {
            e[x] = C64::new(1.0, 0.0);
            self.apply_into(&e, &mut col);
            e[x] = C64::default();
            for (y, &c) in col.iter().enumerate() {
                m[(y, x)] = c;
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::SiteMap;

    fn commutator_with_translation(h: &IsingHamiltonian) -> f64 {
        let hd = h.dense().unwrap();
        let t = SiteMap::translation(h.sites(), 1).dense(2);
        hd.matmul(&t).unwrap().sub(&t.matmul(&hd).unwrap()).unwrap().max_abs()
    }

    #[test]
    fn single_site_terms() {
        let spec = IsingSpec { n: 2, hx: 0.0, hy: 1.0, j: 0.0, boundary: Boundary::Open, disorder: Disorder::None };
        let h = build_ising(&spec).unwrap();
        // Y on site 0 of |00> gives i|10>, on site 1 gives i|01>.
        let out = h.apply(&StateVector::basis_state(4, 0)).unwrap();
        assert!((out[0b10] - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((out[0b01] - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn hermitian_and_translation_invariant() {
        let h = build_ising(&IsingSpec::chaotic(6)).unwrap();
        assert!(h.dense().unwrap().hermiticity_defect() < 1e-14);
        assert!(commutator_with_translation(&h) < 1e-12);
        let open = build_ising(&IsingSpec::chaotic(6).with_boundary(Boundary::Open)).unwrap();
        assert!(commutator_with_translation(&open) > 0.1);
        let weak = build_ising(&IsingSpec::chaotic(6).with_boundary(Boundary::WeakLink(0.5))).unwrap();
        assert!(commutator_with_translation(&weak) > 0.1);
    }

    #[test]
    fn disorder_is_reproducible() {
        let spec = IsingSpec::chaotic(5).with_disorder(Disorder::Bond { variance: 0.3, seed: 4 });
        let a = build_ising(&spec).unwrap();
        let b = build_ising(&spec).unwrap();
        assert_eq!(a.bonds(), b.bonds());
        assert!(a.bonds().iter().any(|b| (b.2 - 1.0).abs() > 1e-6));
    }

    #[test]
    fn invalid_specs() {
        assert!(build_ising(&IsingSpec::chaotic(1)).is_err());
        assert!(build_ising(&IsingSpec::chaotic(21)).is_err());
        let bad = IsingSpec::chaotic(4).with_disorder(Disorder::Field { variance: -1.0, seed: 0 });
        assert!(build_ising(&bad).is_err());
        let mixed = IsingSpec::chaotic(4)
            .with_boundary(Boundary::Open)
            .with_disorder(Disorder::Bond { variance: 0.1, seed: 0 });
        assert!(build_ising(&mixed).is_err());
    }
}
