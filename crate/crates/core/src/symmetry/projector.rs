use std::collections::HashMap;
use std::f64::consts::TAU;

use super::element::{Chain, SiteMap};
use crate::linalg::{Operator, StateVector};
use crate::{Error, Result, C64};

/// Largest Hilbert space for which [`SectorProjector::dense`] materializes.
pub const DENSE_PROJECTOR_LIMIT: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReflectionAxis {
    /// `s -> N - 1 - s`.
    Mirror,
    /// `s -> 2j - s (mod N)`, fixing site `j` (0-based).
    Site(usize),
}

/// Symmetry sector selected by a projector.
#[derive(Clone, Debug, PartialEq)]
pub enum SectorKind {
    /// The trivial projector `I`.
    Identity,
    /// `T_k = sum_j e^{2 pi i j k / N} T^j`.
    Translation { k: usize },
    /// `Z_k = I + (-1)^k X^{⊗N}`.
    Z2 { parity: u8 },
    /// `R_± = I ± R`.
    Reflection { axis: ReflectionAxis, sign: Sign },
    /// Diagonal projector onto `#1 - #0 = charge`.
    U1 { charge: i64 },
    /// Product of factors; the first entry is applied first.
    Composite(Vec<SectorKind>),
}

impl SectorKind {
    /// `R^{N-1}_+ ... R^0_+ T_0`: common `k = 0` eigenspace of translation and
    /// every site reflection.
    pub fn translation_plus_reflections(n: usize) -> Self {
        let mut factors = vec![SectorKind::Translation { k: 0 }];
        factors.extend((0..n).map(|j| SectorKind::Reflection {
            axis: ReflectionAxis::Site(j),
            sign: Sign::Plus,
        }));
        SectorKind::Composite(factors)
    }

    /// Short family name used in output tables.
    pub fn name(&self) -> &'static str {
        match self {
            SectorKind::Identity => "identity",
            SectorKind::Translation { .. } => "translation",
            SectorKind::Z2 { .. } => "z2",
            SectorKind::Reflection { .. } => "reflection",
            SectorKind::U1 { .. } => "u1",
            SectorKind::Composite(_) => "composite",
        }
    }

    /// Momentum, parity, sign or charge label, when the kind has one.
    pub fn label(&self) -> Option<i64> {
        match self {
            SectorKind::Translation { k } => Some(*k as i64),
            SectorKind::Z2 { parity } => Some(*parity as i64),
            SectorKind::Reflection { sign, .. } => Some(sign.value() as i64),
            SectorKind::U1 { charge } => Some(*charge),
            _ => None,
        }
    }
}

struct Factor {
    terms: HashMap<SiteMap, C64>,
    charge: Option<i64>,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn factor(kind: &SectorKind, chain: Chain) -> Result<Factor> {
    let n = chain.sites;
    let single = |g: SiteMap, c: C64| HashMap::from([(SiteMap::identity(n), one()), (g, c)]);
    let qubits_only = |what: &str| {
        if chain.local_dim == 2 {
            Ok(())
        } else {
            Err(Error::Argument(format!("{what} sectors need qubits (d = 2)")))
        }
    };
    let terms = match kind {
        SectorKind::Identity => HashMap::from([(SiteMap::identity(n), one())]),
        SectorKind::Translation { k } => {
            if *k >= n {
                return Err(Error::Argument(format!("momentum k = {k} outside 0..{n}")));
            }
            (0..n)
                .map(|j| {
                    let phase = TAU * (j * k) as f64 / n as f64;
                    (SiteMap::translation(n, j as i64), C64::from_polar(1.0, phase))
                })
                .collect()
        }
        SectorKind::Z2 { parity } => {
            qubits_only("Z2")?;
            let sign = match parity {
                0 => 1.0,
                1 => -1.0,
                p => return Err(Error::Argument(format!("Z2 parity must be 0 or 1, got {p}"))),
            };
            single(SiteMap::global_flip(n), C64::new(sign, 0.0))
        }
        SectorKind::Reflection { axis, sign } => {
            let g = match axis {
                ReflectionAxis::Mirror => SiteMap::mirror(n),
                ReflectionAxis::Site(j) if *j < n => SiteMap::site_reflection(n, *j),
                ReflectionAxis::Site(j) => {
                    return Err(Error::Argument(format!("reflection site {j} outside 0..{n}")))
                }
            };
            if g.is_identity() {
                // N = 1 or 2 about a site: R = I, so R_± = (1 ± 1) I.
                HashMap::from([(g, C64::new(1.0 + sign.value(), 0.0))])
            } else {
                single(g, C64::new(sign.value(), 0.0))
            }
        }
        SectorKind::U1 { charge } => {
            qubits_only("U(1)")?;
            let s = *charge;
            if s.unsigned_abs() as usize > n || (s + n as i64) % 2 != 0 {
                return Err(Error::Argument(format!(
                    "U(1) charge {s} impossible on {n} sites (need |s| <= N and s = N mod 2)"
                )));
            }
            return Ok(Factor { terms: HashMap::from([(SiteMap::identity(n), one())]), charge: Some(s) });
        }
        SectorKind::Composite(parts) => {
            if parts.is_empty() {
                return Err(Error::Argument("empty composite sector".into()));
            }
            let mut acc = Factor { terms: HashMap::from([(SiteMap::identity(n), one())]), charge: None };
            for part in parts {
                let f = factor(part, chain)?;
                acc.terms = multiply(&f.terms, &acc.terms);
                acc.charge = match (acc.charge, f.charge) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(Error::Argument(format!(
                            "composite mixes U(1) charges {a} and {b}: empty sector"
                        )))
                    }
                    (a, b) => a.or(b),
                };
            }
            return Ok(acc);
        }
    };
    Ok(Factor { terms, charge: None })
}

/// Formal product `left * right` of two group sums.
fn multiply(left: &HashMap<SiteMap, C64>, right: &HashMap<SiteMap, C64>) -> HashMap<SiteMap, C64> {
    let mut out: HashMap<SiteMap, C64> = HashMap::new();
    for (g, a) in left {
        for (h, b) in right {
            *out.entry(g.compose(h)).or_default() += a * b;
        }
    }
    out.retain(|_, c| c.norm() > 1e-12);
    out
}

/// Hermitian operator `P` with `P^2 = c P` projecting onto a symmetry
/// sector, stored as a group sum `sum_g c_g g` and an optional U(1) mask.
///
/// ```
/// use symdesign::symmetry::{Chain, SectorKind, SectorProjector};
/// let p = SectorProjector::new(SectorKind::Translation { k: 0 }, Chain::qubits(5)).unwrap();
/// assert_eq!(p.scale(), 5.0);
/// assert!((p.trace() - 40.0).abs() < 1e-9);
/// assert_eq!(p.rank().unwrap(), 8);
/// ```
#[derive(Clone, Debug)]
pub struct SectorProjector {
    kind: SectorKind,
    chain: Chain,
    terms: Vec<(SiteMap, C64)>,
    charge: Option<i64>,
    scale: f64,
    identity_weight: f64,
}

impl SectorProjector {
    pub fn new(kind: SectorKind, chain: Chain) -> Result<Self> {
        if chain.sites == 0 || chain.local_dim < 2 {
            return Err(Error::Argument("projector needs at least one site and d >= 2".into()));
        }
        let f = factor(&kind, chain)?;
        if f.terms.is_empty() {
            return Err(Error::Argument(format!("{kind:?} is the zero operator: empty sector")));
        }
        if let Some(s) = f.charge {
            if s != 0 && f.terms.keys().any(SiteMap::has_flip) {
                return Err(Error::Argument(format!(
                    "U(1) charge {s} is not invariant under the global flip"
                )));
            }
        }
        // Hermiticity: c_{g^-1} = conj(c_g).
        for (g, c) in &f.terms {
            let back = f.terms.get(&g.inverse()).copied().unwrap_or_default();
            if (back - c.conj()).norm() > 1e-9 {
                return Err(Error::Argument(format!("{kind:?} is not Hermitian in this order")));
            }
        }
        let square = multiply(&f.terms, &f.terms);
        let (g0, c0) = f.terms.iter().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
        let ratio = square.get(g0).copied().unwrap_or_default() / c0;
        let consistent = ratio.im.abs() < 1e-9
            && ratio.re > 1e-9
            && f.terms.len() == square.len()
            && f.terms.iter().all(|(g, c)| {
                (square.get(g).copied().unwrap_or_default() - c * ratio.re).norm() < 1e-9 * ratio.re
            });
        if !consistent {
            return Err(Error::Argument(format!(
                "{kind:?} does not square to a multiple of itself"
            )));
        }
        let identity_weight = f.terms.get(&SiteMap::identity(chain.sites)).map_or(0.0, |c| c.re);
        let mut terms: Vec<(SiteMap, C64)> = f.terms.into_iter().collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let p = Self { kind, chain, terms, charge: f.charge, scale: ratio.re, identity_weight };
        if p.rank()? == 0 {
            return Err(Error::Argument(format!("{:?} projects onto an empty sector", p.kind)));
        }
        Ok(p)
    }

    pub fn kind(&self) -> &SectorKind {
        &self.kind
    }

    pub fn chain(&self) -> Chain {
        self.chain
    }

    /// The constant `c` in `P^2 = c P`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Coefficient of the identity element in the group sum.
    pub fn identity_weight(&self) -> f64 {
        self.identity_weight
    }

    /// Group elements with their coefficients, sorted.
    pub fn terms(&self) -> &[(SiteMap, C64)] {
        &self.terms
    }

    pub fn charge(&self) -> Option<i64> {
        self.charge
    }

    pub(crate) fn in_charge_sector(&self, x: usize) -> bool {
        match self.charge {
            None => true,
            Some(s) => 2 * x.count_ones() as i64 - self.chain.sites as i64 == s,
        }
    }

    /// `P |psi>` without building a matrix.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let dim = self.chain.dim();
        if state.len() != dim {
            return Err(Error::Contract(format!(
                "state of length {} for a projector on dimension {dim}",
                state.len()
            )));
        }
        let d = self.chain.local_dim;
        let mut out = StateVector::zeros(dim);
        for (g, c) in &self.terms {
            for x in 0..dim {
                let a = state[x];
                if a != C64::default() {
                    out[g.map_index(x, d)] += c * a;
                }
            }
        }
        if self.charge.is_some() {
            for x in 0..dim {
                if !self.in_charge_sector(x) {
                    out[x] = C64::default();
                }
            }
        }
        Ok(out)
    }

    /// `Tr P`, summed over group elements.
    pub fn trace(&self) -> f64 {
        let d = self.chain.local_dim;
        let n = self.chain.sites;
        self.terms
            .iter()
            .map(|(g, c)| {
                let fixed = match self.charge {
                    None => g.trace(d),
                    Some(s) => g.fixed_points_with_ones(((s + n as i64) / 2) as usize),
                };
                c.re * fixed
            })
            .sum()
    }

    /// `Tr P / c`, required to be an integer.
    pub fn rank(&self) -> Result<usize> {
        let r = self.trace() / self.scale;
        if (r - r.round()).abs() > 1e-6 || r < -1e-6 {
            return Err(Error::Numerical(format!(
                "non-integer sector rank {r} for {:?}",
                self.kind
            )));
        }
        Ok(r.round() as usize)
    }

    /// Dense matrix of `P` for small chains.
    pub fn dense(&self) -> Result<Operator> {
        let dim = self.chain.dim();
        if dim > DENSE_PROJECTOR_LIMIT {
            return Err(Error::Budget(format!(
                "dense projector of dimension {dim} exceeds {DENSE_PROJECTOR_LIMIT}"
            )));
        }
        let d = self.chain.local_dim;
        let mut m = Operator::zeros(dim, dim);
        for (g, c) in &self.terms {
            for x in 0..dim {
                m[(g.map_index(x, d), x)] += c;
            }
        }
        for x in 0..dim {
            if !self.in_charge_sector(x) {
                for y in 0..dim {
                    m[(x, y)] = C64::default();
                    m[(y, x)] = C64::default();
                }
            }
        }
        Ok(m)
    }

    /// `max |P phi - c phi|`; zero for states inside the sector.
    pub fn eigen_residual(&self, state: &StateVector) -> Result<f64> {
        let mut expected = state.clone();
        expected.scale(C64::new(self.scale, 0.0));
        Ok(self.apply(state)?.max_abs_diff(&expected))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proj(kind: SectorKind, n: usize) -> SectorProjector {
        SectorProjector::new(kind, Chain::qubits(n)).unwrap()
    }

    #[test]
    fn translation_on_basis_state() {
        let p = proj(SectorKind::Translation { k: 0 }, 3);
        let out = p.apply(&StateVector::basis_state(8, 0b100)).unwrap();
        for x in [0b100, 0b010, 0b001] {
            assert!((out[x] - one()).norm() < 1e-14);
        }
        assert!((out.norm_sqr() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn prime_trace_formula() {
        let p0 = proj(SectorKind::Translation { k: 0 }, 5);
        let p1 = proj(SectorKind::Translation { k: 1 }, 5);
        assert!((p0.trace() - 40.0).abs() < 1e-9);
        assert!((p1.trace() - 30.0).abs() < 1e-9);
        assert_eq!((p0.rank().unwrap(), p1.rank().unwrap()), (8, 6));
    }

    #[test]
    fn scales() {
        assert_eq!(proj(SectorKind::Z2 { parity: 1 }, 4).scale(), 2.0);
        let r = SectorKind::Reflection { axis: ReflectionAxis::Mirror, sign: Sign::Minus };
        assert_eq!(proj(r, 5).scale(), 2.0);
        assert_eq!(proj(SectorKind::U1 { charge: 1 }, 3).rank().unwrap(), 3);
        let d = proj(SectorKind::translation_plus_reflections(5), 5);
        assert!((d.scale() - 5.0 * 32.0).abs() < 1e-9);
        assert!((d.identity_weight() - 16.0).abs() < 1e-12);
        assert_eq!(d.terms().len(), 10);
    }

    #[test]
    fn invalid_sectors() {
        let c = Chain::qubits(4);
        for kind in [
            SectorKind::Translation { k: 4 },
            SectorKind::Z2 { parity: 2 },
            SectorKind::U1 { charge: 1 },
            SectorKind::U1 { charge: 6 },
            SectorKind::Composite(vec![SectorKind::Z2 { parity: 0 }, SectorKind::Z2 { parity: 1 }]),
            SectorKind::Composite(vec![SectorKind::Z2 { parity: 0 }, SectorKind::U1 { charge: 2 }]),
            SectorKind::Composite(vec![
                SectorKind::Translation { k: 1 },
                SectorKind::Reflection { axis: ReflectionAxis::Site(0), sign: Sign::Plus },
            ]),
        ] {
            assert!(
                matches!(SectorProjector::new(kind.clone(), c), Err(Error::Argument(_))),
                "{kind:?}"
            );
        }
    }

    #[test]
    fn dense_matches_apply() {
        let p = proj(
            SectorKind::Composite(vec![SectorKind::Z2 { parity: 0 }, SectorKind::U1 { charge: 0 }]),
            4,
        );
        let m = p.dense().unwrap();
        let psi = StateVector::new((0..16).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect());
        assert!(m.apply(&psi).unwrap().max_abs_diff(&p.apply(&psi).unwrap()) < 1e-12);
        let sq = m.matmul(&m).unwrap();
        assert!(sq.max_abs_diff(&m.scaled(C64::new(p.scale(), 0.0))) < 1e-12);
        assert!((m.trace().re - p.trace()).abs() < 1e-12);
    }
}
