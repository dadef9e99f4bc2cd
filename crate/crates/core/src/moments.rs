//! Moment operators on `t` replicas.
//!
//! A `t`-replica index is row-major over the replicas: replica 1 is the most
//! significant digit in base `dim`, each replica using the site convention of
//! [`crate::linalg`].

use faer::Mat;
use itertools::Itertools;

use crate::linalg::{trace_norm, Operator, StateVector};
use crate::symmetry::SectorProjector;
use crate::{Error, Result, C64};

/// Limits on dense moment computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MomentBudget {
    /// Largest replica count `t`.
    pub max_order: usize,
    /// Largest `dim^t`.
    pub max_dim: usize,
}

impl Default for MomentBudget {
    fn default() -> Self {
        Self { max_order: 3, max_dim: 4096 }
    }
}

impl MomentBudget {
    /// Returns `dim^t` or a budget error.
    pub fn check(&self, dim: usize, t: usize) -> Result<usize> {
        if t == 0 {
            return Err(Error::Argument("moment order must be at least 1".into()));
        }
        if t > self.max_order {
            return Err(Error::Budget(format!("moment order {t} exceeds {}", self.max_order)));
        }
        match dim.checked_pow(t as u32) {
            Some(total) if total <= self.max_dim => Ok(total),
            _ => Err(Error::Budget(format!(
                "{dim}^{t} replica dimension exceeds {}",
                self.max_dim
            ))),
        }
    }
}

/// Dense Hermitian operator on `t` replicas of a `dim`-dimensional space.
#[derive(Clone, Debug)]
pub struct MomentOperator {
    op: Operator,
    order: usize,
    replica_dim: usize,
}

impl MomentOperator {
    pub fn new(op: Operator, order: usize, replica_dim: usize) -> Result<Self> {
        let total = replica_dim.pow(order as u32);
        if !op.is_square() || op.dim() != total {
            return Err(Error::Contract(format!(
                "{}x{} matrix is not an operator on {order} replicas of dimension {replica_dim}",
                op.nrows(),
                op.ncols()
            )));
        }
        Ok(Self { op, order, replica_dim })
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn replica_dim(&self) -> usize {
        self.replica_dim
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    /// `max |pi M pi^dagger - M|` over all replica permutations.
    pub fn permutation_defect(&self) -> f64 {
        (0..self.order)
            .permutations(self.order)
            .map(|perm| {
                let p = replica_permutation(self.replica_dim, &perm);
                let conj = p.matmul(&self.op).and_then(|m| m.matmul(&p.adjoint()));
                conj.map_or(f64::INFINITY, |c| c.max_abs_diff(&self.op))
            })
            .fold(0.0, f64::max)
    }
}

/// `sum_{pi in S_t} pi`.
#[derive(Clone, Debug)]
pub struct PermSymProjector {
    pub order: usize,
    pub replica_dim: usize,
    pub op: Operator,
}

impl PermSymProjector {
    /// `dim (dim + 1) ... (dim + t - 1)`.
    pub fn expected_trace(&self) -> f64 {
        (0..self.order).map(|i| (self.replica_dim + i) as f64).product()
    }
}

fn split(mut index: usize, dim: usize, t: usize) -> Vec<usize> {
    let mut out = vec![0; t];
    for slot in out.iter_mut().rev() {
        *slot = index % dim;
        index /= dim;
    }
    out
}

fn join(parts: &[usize], dim: usize) -> usize {
    parts.iter().fold(0, |acc, &x| acc * dim + x)
}

/// Operator moving the content of replica `r` to replica `perm[r]`.
pub fn replica_permutation(dim: usize, perm: &[usize]) -> Operator {
    let t = perm.len();
    let total = dim.pow(t as u32);
    let mut m = Operator::zeros(total, total);
    let mut out = vec![0; t];
    for x in 0..total {
        let parts = split(x, dim, t);
        for (r, &dest) in perm.iter().enumerate() {
            out[dest] = parts[r];
        }
        m[(join(&out, dim), x)] = C64::new(1.0, 0.0);
    }
    m
}

/// `Pi_t = sum_{pi in S_t} pi` on `t` replicas of dimension `dim`.
///
/// ```
/// use symdesign::moments::{perm_sym_projector, MomentBudget};
/// let p = perm_sym_projector(2, 2, &MomentBudget::default()).unwrap();
/// assert!((p.op.trace().re - 6.0).abs() < 1e-12);
/// ```
pub fn perm_sym_projector(dim: usize, t: usize, budget: &MomentBudget) -> Result<PermSymProjector> {
    let total = budget.check(dim, t)?;
    let mut op = Operator::zeros(total, total);
    for perm in (0..t).permutations(t) {
        let p = replica_permutation(dim, &perm);
        op.add_assign_scaled(&p, C64::new(1.0, 0.0))?;
    }
    Ok(PermSymProjector { order: t, replica_dim: dim, op })
}

/// Haar moment `Pi_t / (dim (dim + 1) ... (dim + t - 1))`.
pub fn haar_moment(dim: usize, t: usize, budget: &MomentBudget) -> Result<MomentOperator> {
    let p = perm_sym_projector(dim, t, budget)?;
    let norm = p.expected_trace();
    MomentOperator::new(p.op.scaled(C64::new(1.0 / norm, 0.0)), t, dim)
}

fn normalized(op: Operator, t: usize, dim: usize) -> Result<MomentOperator> {
    let tr = op.trace().re;
    if tr.abs() < 1e-300 {
        return Err(Error::Numerical("moment operator has zero trace".into()));
    }
    MomentOperator::new(op.scaled(C64::new(1.0 / tr, 0.0)), t, dim)
}

/// `A Pi_t` for a dense `A` on `t` replicas.
fn times_perm_sym(a: &Operator, dim: usize, t: usize) -> Result<Operator> {
    let total = a.dim();
    let mut out = Operator::zeros(total, total);
    for perm in (0..t).permutations(t) {
        let p = replica_permutation(dim, &perm);
        out.add_assign_scaled(&a.matmul(&p)?, C64::new(1.0, 0.0))?;
    }
    Ok(out)
}

/// `P^{⊗t} Pi_t / Tr(P^{⊗t} Pi_t)`: the `t`-th moment of states drawn
/// uniformly from the sector of `p`.
pub fn symmetric_ensemble_moment(
    p: &SectorProjector,
    t: usize,
    budget: &MomentBudget,
) -> Result<MomentOperator> {
    let dim = p.chain().dim();
    let total = budget.check(dim, t)?;
    let dense = p.dense()?;
    let perms: Vec<Vec<usize>> = (0..t).permutations(t).collect();
    let mut out = Operator::zeros(total, total);
    let splits: Vec<Vec<usize>> = (0..total).map(|i| split(i, dim, t)).collect();
    let mut moved = vec![0; t];
    for col in 0..total {
        let cs = &splits[col];
        for perm in &perms {
            // (pi J)_{perm[r]} = J_r
            for (r, &dest) in perm.iter().enumerate() {
                moved[dest] = cs[r];
            }
            for (row, rs) in splits.iter().enumerate() {
                let mut v = C64::new(1.0, 0.0);
                for r in 0..t {
                    v *= dense[(rs[r], moved[r])];
                    if v == C64::default() {
                        break;
                    }
                }
                out[(row, col)] += v;
            }
        }
    }
    normalized(out, t, dim)
}

/// Orthonormal basis `V` of the range of a sector projector. Sector moments
/// live on `range(V)^{⊗t}`, so they can be compared there at dimension
/// `rank^t` instead of `d^{Nt}`.
#[derive(Clone, Debug)]
pub struct SectorFrame {
    isometry: Operator,
    scale: f64,
}

impl SectorFrame {
    pub fn new(p: &SectorProjector) -> Result<Self> {
        let dense = p.dense()?;
        let scale = p.scale();
        let eig = crate::linalg::hermitian_eigen(&dense.scaled(C64::new(1.0 / scale, 0.0)))?;
        let cols: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] > 0.5).collect();
        if cols.len() != p.rank()? {
            return Err(Error::Numerical(format!(
                "projector range has {} eigenvalues near 1, expected rank {}",
                cols.len(),
                p.rank()?
            )));
        }
        let isometry = Operator::from_fn(dense.nrows(), cols.len(), |i, j| eig.vectors[(i, cols[j])]);
        Ok(Self { isometry, scale })
    }

    pub fn rank(&self) -> usize {
        self.isometry.ncols()
    }

    pub fn isometry(&self) -> &Operator {
        &self.isometry
    }

    /// `V^† |phi>`.
    pub fn compress(&self, phi: &StateVector) -> Result<StateVector> {
        self.isometry.adjoint().apply(phi)
    }

    /// `(V^† P V)^{⊗t} Pi_t`, normalized: the compression of
    /// [`symmetric_ensemble_moment`].
    pub fn moment(&self, p: &SectorProjector, t: usize, budget: &MomentBudget) -> Result<MomentOperator> {
        let r = self.rank();
        budget.check(r, t)?;
        let v = &self.isometry;
        let q = v.adjoint().matmul(&p.dense()?)?.matmul(v)?.scaled(C64::new(1.0 / self.scale, 0.0));
        let power = (1..t).fold(q.clone(), |acc, _| acc.kron(&q));
        normalized(times_perm_sym(&power, r, t)?, t, r)
    }
}

/// Reference moment `(Z_0^{⊗t} + Z_1^{⊗t}) Pi_t / N` on `n_a` qubits, the
/// limit of `sigma^x`-measured projected ensembles of Z2-symmetric states.
/// The result does not depend on the generator parity.
pub fn z2_sigmax_projected_moment(
    n_a: usize,
    t: usize,
    budget: &MomentBudget,
) -> Result<MomentOperator> {
    let dim = 1usize << n_a;
    budget.check(dim, t)?;
    let flip = crate::symmetry::SiteMap::global_flip(n_a).dense(2);
    let id = Operator::identity(dim);
    let z0 = id.add(&flip)?;
    let z1 = id.sub(&flip)?;
    let power = |z: &Operator| (1..t).fold(z.clone(), |acc, _| acc.kron(z));
    let a = power(&z0).add(&power(&z1))?;
    normalized(times_perm_sym(&a, dim, t)?, t, dim)
}

/// `phi^{⊗t}`.
pub fn tensor_power(phi: &StateVector, t: usize) -> StateVector {
    (1..t).fold(phi.clone(), |acc, _| acc.kron(phi))
}

/// `sum_i w_i (|phi_i><phi_i|)^{⊗t}` for nonnegative weights.
pub fn mixture_moment(
    weights: &[f64],
    states: &[StateVector],
    t: usize,
    budget: &MomentBudget,
) -> Result<MomentOperator> {
    if weights.len() != states.len() || states.is_empty() {
        return Err(Error::Contract("mixture needs one weight per state".into()));
    }
    let dim = states[0].len();
    if states.iter().any(|s| s.len() != dim) {
        return Err(Error::Contract("mixture states of unequal length".into()));
    }
    let total = budget.check(dim, t)?;
    let mut acc = Mat::<C64>::zeros(total, total);
    const BLOCK: usize = 512;
    for (ws, ss) in weights.chunks(BLOCK).zip(states.chunks(BLOCK)) {
        let cols: Vec<StateVector> = ss.iter().map(|s| tensor_power(s, t)).collect();
        let x = Mat::from_fn(total, cols.len(), |i, j| cols[j][i] * ws[j].max(0.0).sqrt());
        acc += &x * x.adjoint();
    }
    MomentOperator::new(Operator::from_mat(acc), t, dim)
}

/// `||a - b||_1`.
pub fn trace_distance(a: &MomentOperator, b: &MomentOperator) -> Result<f64> {
    if a.order != b.order || a.replica_dim != b.replica_dim {
        return Err(Error::Contract(format!(
            "moments on {}x{} and {}x{} replicas",
            a.order, a.replica_dim, b.order, b.replica_dim
        )));
    }
    trace_norm(&a.op.sub(&b.op)?.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::{Chain, SectorKind};

    fn budget() -> MomentBudget {
        MomentBudget::default()
    }

    #[test]
    fn perm_sym_traces() {
        for (dim, t, tr) in [(3, 1, 3.0), (2, 2, 6.0), (2, 3, 24.0), (4, 2, 20.0)] {
            let p = perm_sym_projector(dim, t, &budget()).unwrap();
            assert!((p.op.trace().re - tr).abs() < 1e-12);
            assert_eq!(p.expected_trace(), tr);
        }
    }

    #[test]
    fn swap_on_two_qubits() {
        let p = replica_permutation(2, &[1, 0]);
        // |01> <-> |10>
        assert_eq!(p[(2, 1)].re, 1.0);
        assert_eq!(p[(1, 2)].re, 1.0);
        assert_eq!(p[(0, 0)].re, 1.0);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(haar_moment(2, 4, &budget()), Err(Error::Budget(_))));
        assert!(matches!(haar_moment(32, 3, &budget()), Err(Error::Budget(_))));
        let wide = MomentBudget { max_order: 4, max_dim: 1 << 12 };
        assert!(haar_moment(2, 4, &wide).is_ok());
    }

    #[test]
    fn identity_sector_gives_haar_moment() {
        let p = SectorProjector::new(SectorKind::Identity, Chain::qubits(2)).unwrap();
        for t in 1..=3 {
            let a = symmetric_ensemble_moment(&p, t, &budget()).unwrap();
            let b = haar_moment(4, t, &budget()).unwrap();
            assert!(a.operator().max_abs_diff(b.operator()) < 1e-14);
        }
    }

    #[test]
    fn z2_reference_first_moment_is_maximally_mixed() {
        let m = z2_sigmax_projected_moment(3, 1, &budget()).unwrap();
        assert!(m.operator().max_abs_diff(&Operator::identity(8).scaled((1.0 / 8.0).into())) < 1e-14);
        let m2 = z2_sigmax_projected_moment(2, 2, &budget()).unwrap();
        assert!((m2.trace() - 1.0).abs() < 1e-12);
        assert!(m2.permutation_defect() < 1e-14);
    }

    #[test]
    fn mixture_of_one_state_is_pure_power() {
        let phi = StateVector::from_real(&[0.6, 0.8]);
        let m = mixture_moment(&[1.0], &[phi.clone()], 2, &budget()).unwrap();
        let pp = tensor_power(&phi, 2);
        assert!(m.operator().max_abs_diff(&Operator::outer(&pp, &pp)) < 1e-15);
    }

    #[test]
    fn frame_moment_matches_full_moment() {
        let p = SectorProjector::new(SectorKind::Translation { k: 1 }, Chain::qubits(4)).unwrap();
        let frame = SectorFrame::new(&p).unwrap();
        assert_eq!(frame.rank(), 3);
        let full = symmetric_ensemble_moment(&p, 2, &budget()).unwrap();
        let small = frame.moment(&p, 2, &budget()).unwrap();
        let v = frame.isometry();
        let v2 = v.kron(v);
        let lifted = v2.matmul(small.operator()).unwrap().matmul(&v2.adjoint()).unwrap();
        assert!(lifted.max_abs_diff(full.operator()) < 1e-12);
    }

}
