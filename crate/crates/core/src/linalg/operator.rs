use faer::Mat;

use super::StateVector;
use crate::{Error, Result, C64};

/// Dense complex matrix; used for density matrices, projectors, moment
/// operators and unitaries alike.
#[derive(Clone, Debug)]
pub struct Operator {
    mat: Mat<C64>,
}

impl Operator {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { mat: Mat::zeros(rows, cols) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: Mat::identity(dim, dim) }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { mat: Mat::from_fn(rows, cols, f) }
    }

    pub fn from_mat(mat: Mat<C64>) -> Self {
        Self { mat }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[StateVector]) -> Result<Self> {
        let rows = columns.first().map_or(0, StateVector::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Contract("columns of unequal length".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    /// `|u><v|`.
    pub fn outer(u: &StateVector, v: &StateVector) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m.mat[(i, i)] = v;
        }
        m
    }

    pub fn as_mat(&self) -> &Mat<C64> {
        &self.mat
    }

    pub fn as_mat_mut(&mut self) -> &mut Mat<C64> {
        &mut self.mat
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.mat
    }

    pub fn nrows(&self) -> usize {
        self.mat.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.mat.ncols()
    }

    /// Side length of a square operator.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn is_square(&self) -> bool {
        self.mat.nrows() == self.mat.ncols()
    }

    pub fn column(&self, j: usize) -> StateVector {
        StateVector::new((0..self.nrows()).map(|i| self.mat[(i, j)]).collect())
    }

    pub fn adjoint(&self) -> Operator {
        Self { mat: self.mat.adjoint().to_owned() }
    }

    pub fn matmul(&self, rhs: &Operator) -> Result<Operator> {
        if self.ncols() != rhs.nrows() {
            return Err(Error::Contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows(),
                self.ncols(),
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        Ok(Self { mat: &self.mat * &rhs.mat })
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if self.ncols() != v.len() {
            return Err(Error::Contract(format!(
                "operator with {} columns applied to vector of length {}",
                self.ncols(),
                v.len()
            )));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.nrows()];
        for j in 0..self.ncols() {
            let x = v[j];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            let col = self.mat.col(j);
            for (o, m) in out.iter_mut().zip(col.iter()) {
                *o += m * x;
            }
        }
        Ok(StateVector::new(out))
    }

    fn check_same_shape(&self, other: &Operator) -> Result<()> {
        if self.nrows() != other.nrows() || self.ncols() != other.ncols() {
            return Err(Error::Contract(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        Ok(())
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other)?;
        Ok(Self { mat: &self.mat - &other.mat })
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other)?;
        Ok(Self { mat: &self.mat + &other.mat })
    }

    pub fn add_assign_scaled(&mut self, other: &Operator, factor: C64) -> Result<()> {
        self.check_same_shape(other)?;
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                self.mat[(i, j)] += factor * other.mat[(i, j)];
            }
        }
        Ok(())
    }

    pub fn scaled(&self, factor: C64) -> Operator {
        Self::from_fn(self.nrows(), self.ncols(), |i, j| factor * self.mat[(i, j)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.nrows().min(self.ncols())).map(|i| self.mat[(i, i)]).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                m = m.max(self.mat[(i, j)].norm());
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.check_same_shape(other).is_err() {
            return f64::INFINITY;
        }
        let mut m: f64 = 0.0;
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                m = m.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        m
    }

    /// `max |M - M^dagger|` entrywise; infinite for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.dim();
        let mut m: f64 = 0.0;
        for j in 0..n {
            for i in 0..=j {
                m = m.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        m
    }

    /// `max |U^dagger U - I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = Self { mat: self.mat.adjoint() * &self.mat };
        gram.max_abs_diff(&Operator::identity(self.ncols()))
    }

    /// Kronecker product `self ⊗ other` in the big-endian layout.
    pub fn kron(&self, other: &Operator) -> Operator {
        let (r2, c2) = (other.nrows(), other.ncols());
        Self::from_fn(self.nrows() * r2, self.ncols() * c2, |i, j| {
            self.mat[(i / r2, j / c2)] * other.mat[(i % r2, j % c2)]
        })
    }

    /// Hermitian part `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Operator {
        let n = self.dim();
        Self::from_fn(n, n, |i, j| (self.mat[(i, j)] + self.mat[(j, i)].conj()) * 0.5)
    }
}

impl std::ops::Index<(usize, usize)> for Operator {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.mat[idx]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.mat[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_of_identities() {
        let id2 = Operator::identity(2);
        assert!(id2.kron(&id2).max_abs_diff(&Operator::identity(4)) < 1e-15);
    }

    #[test]
    fn hermiticity_and_adjoint() {
        let mut m = Operator::zeros(2, 2);
        m[(0, 1)] = c(0.0, 1.0);
        m[(1, 0)] = c(0.0, -1.0);
        assert_eq!(m.hermiticity_defect(), 0.0);
        m[(1, 0)] = c(0.0, 1.0);
        assert!(m.hermiticity_defect() > 1.0);
        assert!(m.adjoint().adjoint().max_abs_diff(&m) == 0.0);
    }

    #[test]
    fn shape_errors() {
        let a = Operator::zeros(2, 3);
        let b = Operator::zeros(2, 3);
        assert!(a.matmul(&b).is_err());
        assert!(a.apply(&StateVector::zeros(2)).is_err());
        assert!(a.sub(&Operator::zeros(3, 3)).is_err());
    }
}
