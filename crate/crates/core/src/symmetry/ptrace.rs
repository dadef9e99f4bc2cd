use super::element::SiteMap;
use crate::linalg::{Operator, SystemGeometry};
use crate::{Error, Result, C64};

/// Shape of an operator on `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceClass {
    ScaledIdentity,
    Permutation,
    Dense,
}

/// `Tr_B(T^j)` in closed form.
#[derive(Clone, Debug)]
pub enum TracedTranslation {
    /// `c * I_A`.
    ScaledIdentity(f64),
    /// Site permutation of `A` (unit scale).
    Permutation(SiteMap),
    Dense(Operator),
}

impl TracedTranslation {
    pub fn class(&self) -> TraceClass {
        match self {
            TracedTranslation::ScaledIdentity(_) => TraceClass::ScaledIdentity,
            TracedTranslation::Permutation(_) => TraceClass::Permutation,
            TracedTranslation::Dense(_) => TraceClass::Dense,
        }
    }

    pub fn dense(&self, local_dim: usize, n_a: usize) -> Operator {
        match self {
            TracedTranslation::ScaledIdentity(c) => {
                Operator::identity(local_dim.pow(n_a as u32)).scaled(C64::new(*c, 0.0))
            }
            TracedTranslation::Permutation(map) => map.dense(local_dim),
            TracedTranslation::Dense(m) => m.clone(),
        }
    }
}

/// Partial trace over `B` of the translation power `T^j`, `1 <= j < N`.
///
/// Following the orbit of `s -> s + j` from an `A` site through `B` gives the
/// induced permutation of `A`; every orbit lying entirely in `B` contributes a
/// free factor `d`. With `g = gcd(N, j)` the result is a permutation when
/// `N_A >= g` and `d^(g - N_A) I` otherwise.
///
/// ```
/// use symdesign::linalg::SystemGeometry;
/// use symdesign::symmetry::{partial_trace_translation_power, TracedTranslation};
/// let geom = SystemGeometry::new(2, 4).unwrap();
/// match partial_trace_translation_power(&geom, 3).unwrap() {
///     TracedTranslation::ScaledIdentity(c) => assert_eq!(c, 2.0),
///     other => panic!("{other:?}"),
/// }
/// ```
pub fn partial_trace_translation_power(geom: &SystemGeometry, j: i64) -> Result<TracedTranslation> {
    let n = geom.n_total;
    if j <= 0 || j as usize >= n {
        return Err(Error::Argument(format!("translation power {j} outside 1..{n}")));
    }
    let sigma = SiteMap::translation(n, j);
    let step = |s: usize| sigma.perm()[s];
    let induced: Vec<usize> = (0..geom.n_a)
        .map(|s| {
            let mut t = step(s);
            while t >= geom.n_a {
                t = step(t);
            }
            t
        })
        .collect();

    let mut seen = vec![false; n];
    let mut free_cycles = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut touches_a = false;
        let mut s = start;
        while !seen[s] {
            seen[s] = true;
            touches_a |= s < geom.n_a;
            s = step(s);
        }
        if !touches_a {
            free_cycles += 1;
        }
    }

    if free_cycles > 0 {
        Ok(TracedTranslation::ScaledIdentity((geom.local_dim as f64).powi(free_cycles)))
    } else {
        Ok(TracedTranslation::Permutation(SiteMap::from_perm(induced)))
    }
}

/// Classifies a dense square operator: 0/1 permutation matrices first, then
/// nontrivial multiples of the identity.
pub fn classify_dense(op: &Operator) -> TraceClass {
    let n = op.dim();
    let tol = 1e-12;
    let is_zero_one = (0..n).all(|i| {
        (0..n).all(|j| {
            let v = op[(i, j)];
            v.norm() < tol || (v - C64::new(1.0, 0.0)).norm() < tol
        })
    });
    if is_zero_one {
        let ones_in = |line: &dyn Fn(usize) -> C64| (0..n).filter(|&k| line(k).norm() > 0.5).count();
        let rows_ok = (0..n).all(|i| ones_in(&|j| op[(i, j)]) == 1);
        let cols_ok = (0..n).all(|j| ones_in(&|i| op[(i, j)]) == 1);
        if rows_ok && cols_ok {
            return TraceClass::Permutation;
        }
    }
    let c = op[(0, 0)];
    if op.max_abs_diff(&Operator::identity(n).scaled(c)) < tol {
        return TraceClass::ScaledIdentity;
    }
    TraceClass::Dense
}
