use super::TOLERANCE;
use crate::{Error, Result, C64};

/// Complex amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Self {
        Self { amps }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { amps: vec![C64::new(0.0, 0.0); dim] }
    }

    /// Computational basis vector `|index>`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut s = Self::zeros(dim);
        s.amps[index] = C64::new(1.0, 0.0);
        s
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self { amps: values.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&mut self, factor: C64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    /// Rescales to unit norm. Fails on (numerically) zero vectors.
    pub fn normalize(&mut self) -> Result<f64> {
        let norm = self.norm();
        if norm < TOLERANCE {
            return Err(Error::Numerical(format!("cannot normalize a vector of norm {norm:.3e}")));
        }
        self.scale(C64::new(1.0 / norm, 0.0));
        Ok(norm)
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= TOLERANCE
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Tensor product `self ⊗ other` in the big-endian layout.
    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in &self.amps {
            out.extend(other.amps.iter().map(|b| a * b));
        }
        StateVector::new(out)
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.amps[i]
    }
}

impl std::ops::IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.amps[i]
    }
}

impl From<Vec<C64>> for StateVector {
    fn from(amps: Vec<C64>) -> Self {
        Self::new(amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_and_inner() {
        let mut s = StateVector::from_real(&[3.0, 4.0]);
        assert_eq!(s.normalize().unwrap(), 5.0);
        assert!(s.is_normalized());
        let e0 = StateVector::basis_state(2, 0);
        assert!((e0.inner(&s).re - 0.6).abs() < 1e-15);
        assert!(StateVector::zeros(4).normalize().is_err());
    }

    #[test]
    fn kron_is_big_endian() {
        let zero = StateVector::basis_state(2, 0);
        let one = StateVector::basis_state(2, 1);
        // |0>|1> = |01> has index 1
        assert_eq!(zero.kron(&one), StateVector::basis_state(4, 1));
        assert_eq!(one.kron(&zero), StateVector::basis_state(4, 2));
    }
}
