use std::f64::consts::TAU;

use faer::Mat;

use crate::linalg::spectral::canonical_phase;
use crate::linalg::{
    amplitude_matrix, sample_haar_unitary, unitary_eigenbasis, Operator, StateVector,
    SystemGeometry,
};
use crate::rng::stream_rng;
use crate::symmetry::SiteMap;
use crate::{Error, Result, C64};

/// Largest `N_B` for bases that need a dense `d^N_B x d^N_B` matrix.
pub const DENSE_BASIS_SITES: usize = 12;

/// Declarative description of an orthonormal basis on `B`.
#[derive(Clone, Debug)]
pub enum BasisSpec {
    /// `|b_1 ... b_NB>` ordered by integer value.
    Computational,
    /// Haar-random single-site unitaries drawn from `seed`; one `u` on every
    /// site when `shared`, independent ones otherwise.
    LocalProduct { seed: u64, shared: bool },
    /// Explicit single-site unitaries, one per site or one for all sites.
    LocalUnitaries(Vec<Operator>),
    /// Columns of a Haar-random unitary on all of `B`.
    GlobalHaar { seed: u64 },
    /// `|±>` on every site.
    SigmaX,
    /// `sigma^x` eigenbasis on all but the last site, eigenbasis of
    /// `alpha sigma^z + (1 - alpha) sigma^x` on the last site.
    MixedLastSite { alpha: f64 },
    /// Eigenbasis of `T_B^power`, or of `u_1 T_B^power` with a Haar-random
    /// `u` on the first `B` site when `insertion` carries a seed.
    EigTB { power: usize, insertion: Option<u64> },
    /// Columns of a unitary matrix.
    Custom(Operator),
}

impl BasisSpec {
    /// Shorthand for [`MeasurementBasis::build`].
    pub fn build(&self, n_b: usize, local_dim: usize) -> Result<MeasurementBasis> {
        MeasurementBasis::build(self, n_b, local_dim)
    }

    pub fn family(&self) -> &'static str {
        match self {
            BasisSpec::Computational => "computational",
            BasisSpec::LocalProduct { .. } | BasisSpec::LocalUnitaries(_) => "local_product",
            BasisSpec::GlobalHaar { .. } => "global_haar",
            BasisSpec::SigmaX => "sigma_x",
            BasisSpec::MixedLastSite { .. } => "mixed_last_site",
            BasisSpec::EigTB { insertion: None, .. } => "eig_tb",
            BasisSpec::EigTB { insertion: Some(_), .. } => "eig_tb_inserted",
            BasisSpec::Custom(_) => "custom",
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Computational,
    /// Single-site unitaries whose columns are the local basis.
    Product(Vec<Operator>),
    /// Each vector as sorted `(index, amplitude)` pairs.
    Sparse(Vec<Vec<(usize, C64)>>),
    /// Vectors as columns.
    Dense(Operator),
}

/// Complete orthonormal family `{|b>}` on the `B` sites.
#[derive(Clone, Debug)]
pub struct MeasurementBasis {
    family: &'static str,
    n_b: usize,
    local_dim: usize,
    repr: Repr,
}

fn hadamard() -> Operator {
    let h = 1.0 / 2f64.sqrt();
    Operator::from_fn(2, 2, |i, j| C64::new(if i == 1 && j == 1 { -h } else { h }, 0.0))
}

/// Columns: eigenvectors of `alpha sigma^z + (1 - alpha) sigma^x`, larger
/// eigenvalue first, first nonzero component real and positive.
fn mixed_site_basis(alpha: f64) -> Operator {
    let r = (alpha * alpha + (1.0 - alpha) * (1.0 - alpha)).sqrt();
    let mut plus = StateVector::from_real(&[r + alpha, 1.0 - alpha]);
    let mut minus = StateVector::from_real(&[1.0 - alpha, -(r + alpha)]);
    for v in [&mut plus, &mut minus] {
        v.normalize().expect("nonzero for alpha in [0, 1]");
        canonical_phase(v);
    }
    Operator::from_columns(&[plus, minus]).expect("equal lengths")
}

fn check_unitary(u: &Operator, dim: usize, what: &str) -> Result<()> {
    if !u.is_square() || u.dim() != dim {
        return Err(Error::Argument(format!(
            "{what}: expected a {dim}x{dim} matrix, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let defect = u.unitarity_defect();
    if defect > 1e-9 {
        return Err(Error::Argument(format!("{what}: columns are not orthonormal (defect {defect:.3e})")));
    }
    Ok(())
}

/// Eigenvectors of `T^power` on `n` sites from the orbits of basis strings.
fn translation_orbit_basis(n: usize, d: usize, power: usize) -> Vec<Vec<(usize, C64)>> {
    let dim = d.pow(n as u32);
    let step = SiteMap::translation(n, power as i64);
    let mut seen = vec![false; dim];
    let mut vectors: Vec<(f64, usize, Vec<(usize, C64)>)> = Vec::with_capacity(dim);
    for x in 0..dim {
        if seen[x] {
            continue;
        }
        // x is the smallest member of its orbit.
        let mut orbit = vec![x];
        seen[x] = true;
        let mut y = step.map_index(x, d);
        while y != x {
            seen[y] = true;
            orbit.push(y);
            y = step.map_index(y, d);
        }
        let len = orbit.len();
        let amp = 1.0 / (len as f64).sqrt();
        for q in 0..len {
            let mut entries: Vec<(usize, C64)> = orbit
                .iter()
                .enumerate()
                .map(|(m, &z)| (z, C64::from_polar(amp, TAU * (q * m) as f64 / len as f64)))
                .collect();
            entries.sort_by_key(|e| e.0);
            let phase = (-TAU * q as f64 / len as f64).rem_euclid(TAU);
            let phase = if TAU - phase < 1e-12 { 0.0 } else { phase };
            vectors.push((phase, x, entries));
        }
    }
    vectors.sort_by(|a, b| {
        if (a.0 - b.0).abs() > 1e-9 {
            a.0.total_cmp(&b.0)
        } else {
            a.1.cmp(&b.1)
        }
    });
    vectors.into_iter().map(|v| v.2).collect()
}

impl MeasurementBasis {
    pub fn build(spec: &BasisSpec, n_b: usize, local_dim: usize) -> Result<Self> {
        if n_b == 0 {
            return Err(Error::Argument("measurement basis needs at least one site".into()));
        }
        let d = local_dim;
        let qubits_only = || {
            if d == 2 {
                Ok(())
            } else {
                Err(Error::Argument(format!("{} basis needs qubits", spec.family())))
            }
        };
        let dense_budget = || {
            if n_b > DENSE_BASIS_SITES {
                Err(Error::Budget(format!(
                    "{} basis on {n_b} sites exceeds the dense limit of {DENSE_BASIS_SITES}",
                    spec.family()
                )))
            } else {
                Ok(())
            }
        };
        let dim = d.pow(n_b as u32);
        let repr = match spec {
            BasisSpec::Computational => Repr::Computational,
            BasisSpec::LocalProduct { seed, shared } => {
                let mut rng = stream_rng(*seed, 0);
                let count = if *shared { 1 } else { n_b };
                let us: Vec<Operator> = (0..count).map(|_| sample_haar_unitary(d, &mut rng)).collect();
                Repr::Product((0..n_b).map(|s| us[s % count].clone()).collect())
            }
            BasisSpec::LocalUnitaries(us) => {
                if us.len() != 1 && us.len() != n_b {
                    return Err(Error::Argument(format!(
                        "expected 1 or {n_b} single-site unitaries, got {}",
                        us.len()
                    )));
                }
                for u in us {
                    check_unitary(u, d, "local unitary")?;
                }
                Repr::Product((0..n_b).map(|s| us[s % us.len()].clone()).collect())
            }
            BasisSpec::GlobalHaar { seed } => {
                dense_budget()?;
                Repr::Dense(sample_haar_unitary(dim, &mut stream_rng(*seed, 0)))
            }
            BasisSpec::SigmaX => {
                qubits_only()?;
                Repr::Product(vec![hadamard(); n_b])
            }
            BasisSpec::MixedLastSite { alpha } => {
                qubits_only()?;
                if !(0.0..=1.0).contains(alpha) {
                    return Err(Error::Argument(format!("alpha = {alpha} outside [0, 1]")));
                }
                let mut us = vec![hadamard(); n_b];
                us[n_b - 1] = mixed_site_basis(*alpha);
                Repr::Product(us)
            }
            BasisSpec::EigTB { power, insertion: None } => {
                if *power == 0 {
                    return Err(Error::Argument("translation power must be positive".into()));
                }
                Repr::Sparse(translation_orbit_basis(n_b, d, *power))
            }
            BasisSpec::EigTB { power, insertion: Some(seed) } => {
                dense_budget()?;
                let u = sample_haar_unitary(d, &mut stream_rng(*seed, 0));
                let shift = SiteMap::translation(n_b, *power as i64);
                let block = dim / d;
                let mut m = Operator::zeros(dim, dim);
                for x in 0..dim {
                    let z = shift.map_index(x, d);
                    let (z0, rest) = (z / block, z % block);
                    for y0 in 0..d {
                        m[(y0 * block + rest, x)] = u[(y0, z0)];
                    }
                }
                let vecs: Vec<StateVector> = unitary_eigenbasis(&m)?.into_iter().map(|p| p.1).collect();
                Repr::Dense(Operator::from_columns(&vecs)?)
            }
            BasisSpec::Custom(m) => {
                check_unitary(m, dim, "custom basis")?;
                Repr::Dense(m.clone())
            }
        };
        Ok(Self { family: spec.family(), n_b, local_dim: d, repr })
    }

    pub fn family(&self) -> &'static str {
        self.family
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// Number of basis vectors, `d^N_B`.
    pub fn len(&self) -> usize {
        self.local_dim.pow(self.n_b as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Nonzero amplitudes of basis vector `i`.
    pub fn entries(&self, i: usize) -> Vec<(usize, C64)> {
        match &self.repr {
            Repr::Computational => vec![(i, C64::new(1.0, 0.0))],
            Repr::Sparse(v) => v[i].clone(),
            _ => {
                let v = self.vector(i);
                v.amplitudes()
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.norm() > 0.0)
                    .map(|(x, a)| (x, *a))
                    .collect()
            }
        }
    }

    pub fn vector(&self, i: usize) -> StateVector {
        let dim = self.len();
        match &self.repr {
            Repr::Computational => StateVector::basis_state(dim, i),
            Repr::Sparse(v) => {
                let mut out = StateVector::zeros(dim);
                for &(x, a) in &v[i] {
                    out[x] = a;
                }
                out
            }
            Repr::Dense(m) => m.column(i),
            Repr::Product(us) => {
                let d = self.local_dim;
                let digits = crate::linalg::digits(i, self.n_b, d);
                us.iter()
                    .zip(digits)
                    .map(|(u, b)| u.column(b))
                    .reduce(|acc, v| acc.kron(&v))
                    .expect("at least one site")
            }
        }
    }

    /// Matrix whose columns are the basis vectors.
    pub fn dense(&self) -> Operator {
        let cols: Vec<StateVector> = (0..self.len()).map(|i| self.vector(i)).collect();
        Operator::from_columns(&cols).expect("equal lengths")
    }

    /// `max |W^dagger W - I|` for the matrix `W` of basis vectors.
    pub fn gram_defect(&self) -> f64 {
        self.dense().unitarity_defect()
    }

    /// `C[a, b] = (<a| ⊗ <b|) |psi>`: column `b` is the unnormalized
    /// post-measurement state on `A`.
    pub fn coefficients(&self, state: &StateVector, geom: &SystemGeometry) -> Result<Operator> {
        if geom.n_b != self.n_b || geom.local_dim != self.local_dim {
            return Err(Error::Contract(format!(
                "basis on {} sites for a geometry with N_B = {}",
                self.n_b, geom.n_b
            )));
        }
        let psi = amplitude_matrix(state, geom)?;
        let (da, db) = (geom.dim_a(), geom.dim_b());
        Ok(match &self.repr {
            Repr::Computational => psi,
            Repr::Dense(w) => Operator::from_mat(psi.as_mat() * w.as_mat().conjugate()),
            Repr::Sparse(vs) => Operator::from_fn(da, vs.len(), |a, b| {
                vs[b].iter().map(|&(x, c)| c.conj() * psi[(a, x)]).sum()
            }),
            Repr::Product(us) => {
                // Rows transform by W^dagger = ⊗ u_s^dagger, one site at a time.
                let d = self.local_dim;
                let mut rows: Mat<C64> = psi.into_mat();
                let mut buf = vec![C64::default(); d];
                for (s, u) in us.iter().enumerate() {
                    let stride = d.pow((self.n_b - 1 - s) as u32);
                    for a in 0..da {
                        for base in 0..db {
                            if (base / stride) % d != 0 {
                                continue;
                            }
                            for (k, slot) in buf.iter_mut().enumerate() {
                                *slot = (0..d)
                                    .map(|l| u[(l, k)].conj() * rows[(a, base + l * stride)])
                                    .sum();
                            }
                            for (k, v) in buf.iter().enumerate() {
                                rows[(a, base + k * stride)] = *v;
                            }
                        }
                    }
                }
                Operator::from_mat(rows)
            }
        })
    }
}
