use crate::linalg::{digits, from_digits, Operator};
use crate::C64;

/// A qudit chain without a bipartition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    pub sites: usize,
    pub local_dim: usize,
}

impl Chain {
    pub fn qubits(sites: usize) -> Self {
        Self { sites, local_dim: 2 }
    }

    pub fn dim(&self) -> usize {
        self.local_dim.pow(self.sites as u32)
    }
}

impl From<crate::linalg::SystemGeometry> for Chain {
    fn from(g: crate::linalg::SystemGeometry) -> Self {
        Self { sites: g.n_total, local_dim: g.local_dim }
    }
}

/// Site permutation, optionally followed by `sigma^x` on every site.
///
/// `perm[s]` is the site that receives the content of site `s`, sites
/// counted from 0 with site 0 the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteMap {
    perm: Vec<usize>,
    flip: bool,
}

impl SiteMap {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect(), flip: false }
    }

    /// `T^j`: content of site `s` moves to `s + j (mod n)`.
    pub fn translation(n: usize, j: i64) -> Self {
        let j = j.rem_euclid(n as i64) as usize;
        Self { perm: (0..n).map(|s| (s + j) % n).collect(), flip: false }
    }

    /// Mirror `s -> n - 1 - s`.
    pub fn mirror(n: usize) -> Self {
        Self { perm: (0..n).rev().collect(), flip: false }
    }

    /// Reflection fixing site `j`: `s -> 2j - s (mod n)`.
    pub fn site_reflection(n: usize, j: usize) -> Self {
        let n_i = n as i64;
        Self {
            perm: (0..n).map(|s| (2 * j as i64 - s as i64).rem_euclid(n_i) as usize).collect(),
            flip: false,
        }
    }

    /// `sigma^x` on all sites.
    pub fn global_flip(n: usize) -> Self {
        Self { perm: (0..n).collect(), flip: true }
    }

    pub fn from_perm(perm: Vec<usize>) -> Self {
        Self { perm, flip: false }
    }

    pub fn sites(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn has_flip(&self) -> bool {
        self.flip
    }

    pub fn is_identity(&self) -> bool {
        !self.flip && self.perm.iter().enumerate().all(|(s, &t)| s == t)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SiteMap) -> SiteMap {
        SiteMap {
            perm: other.perm.iter().map(|&t| self.perm[t]).collect(),
            flip: self.flip ^ other.flip,
        }
    }

    pub fn inverse(&self) -> SiteMap {
        let mut perm = vec![0; self.perm.len()];
        for (s, &t) in self.perm.iter().enumerate() {
            perm[t] = s;
        }
        SiteMap { perm, flip: self.flip }
    }

    /// Cycle lengths of the site permutation.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.perm.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut s = start;
            while !seen[s] {
                seen[s] = true;
                s = self.perm[s];
                len += 1;
            }
            out.push(len);
        }
        out
    }

    /// Image of a computational basis index. A flip is only meaningful for
    /// qubits, where it complements every bit.
    pub fn map_index(&self, x: usize, d: usize) -> usize {
        let n = self.perm.len();
        if d == 2 {
            let mut y = 0;
            for (s, &t) in self.perm.iter().enumerate() {
                y |= ((x >> (n - 1 - s)) & 1) << (n - 1 - t);
            }
            if self.flip {
                y ^= (1 << n) - 1;
            }
            return y;
        }
        let xs = digits(x, n, d);
        let mut ys = vec![0; n];
        for (s, &t) in self.perm.iter().enumerate() {
            ys[t] = if self.flip { d - 1 - xs[s] } else { xs[s] };
        }
        from_digits(&ys, d)
    }

    /// `Tr(g)`: the number of fixed basis states.
    pub fn trace(&self, d: usize) -> f64 {
        let cycles = self.cycle_lengths();
        if self.flip {
            // A fixed string alternates along every cycle.
            if cycles.iter().any(|l| l % 2 == 1) {
                0.0
            } else {
                2f64.powi(cycles.len() as i32)
            }
        } else {
            (d as f64).powi(cycles.len() as i32)
        }
    }

    /// Number of fixed qubit strings containing exactly `ones` ones.
    pub fn fixed_points_with_ones(&self, ones: usize) -> f64 {
        let cycles = self.cycle_lengths();
        if self.flip {
            if cycles.iter().any(|l| l % 2 == 1) || 2 * ones != self.perm.len() {
                return 0.0;
            }
            return 2f64.powi(cycles.len() as i32);
        }
        // Subset-sum count over cycle lengths.
        let mut ways = vec![0f64; self.perm.len() + 1];
        ways[0] = 1.0;
        for l in cycles {
            for total in (l..ways.len()).rev() {
                ways[total] += ways[total - l];
            }
        }
        ways[ones]
    }

    pub fn dense(&self, d: usize) -> Operator {
        let dim = d.pow(self.perm.len() as u32);
        let mut m = Operator::zeros(dim, dim);
        for x in 0..dim {
            m[(self.map_index(x, d), x)] = C64::new(1.0, 0.0);
        }
        m
    }
}
