//! Stacked `(u, v, p)` nodal state.

use crate::error::{Error, Result};

/// Three fields over `n` nodes stored as one vector `[u; v; p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    data: Vec<f64>,
    n: usize,
}

impl StateVector {
    pub fn zeros(n_nodes: usize) -> Self {
        Self {
            data: vec![0.0; 3 * n_nodes],
            n: n_nodes,
        }
    }

    pub fn from_fields(u: &[f64], v: &[f64], p: &[f64]) -> Result<Self> {
        let n = u.len();
        for len in [v.len(), p.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        let mut data = Vec::with_capacity(3 * n);
        data.extend_from_slice(u);
        data.extend_from_slice(v);
        data.extend_from_slice(p);
        Ok(Self { data, n })
    }

    pub fn from_vec(data: Vec<f64>) -> Result<Self> {
        if data.len() % 3 != 0 {
            return Err(Error::invalid(format!(
                "stacked state length {} is not a multiple of 3",
                data.len()
            )));
        }
        let n = data.len() / 3;
        Ok(Self { data, n })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn u(&self) -> &[f64] {
        &self.data[..self.n]
    }

    pub fn v(&self) -> &[f64] {
        &self.data[self.n..2 * self.n]
    }

    pub fn p(&self) -> &[f64] {
        &self.data[2 * self.n..]
    }

    pub fn fields(&self) -> (&[f64], &[f64], &[f64]) {
        let (u, rest) = self.data.split_at(self.n);
        let (v, p) = rest.split_at(self.n);
        (u, v, p)
    }

    pub fn fields_mut(&mut self) -> (&mut [f64], &mut [f64], &mut [f64]) {
        let (u, rest) = self.data.split_at_mut(self.n);
        let (v, p) = rest.split_at_mut(self.n);
        (u, v, p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &StateVector) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// Subtracts the `P`-weighted mean from the pressure block.
    pub fn remove_pressure_mean(&mut self, mass: &[f64]) {
        let total: f64 = mass.iter().sum();
        let mean = self.p().iter().zip(mass).map(|(p, m)| p * m).sum::<f64>() / total;
        for p in &mut self.data[2 * self.n..] {
            *p -= mean;
        }
    }
}

/// `x^T (I_3 ⊗ P) x` for a stacked vector.
pub fn p_norm_sq(mass: &[f64], x: &[f64]) -> f64 {
    let n = mass.len();
    debug_assert_eq!(x.len() % n, 0);
    x.chunks(n)
        .map(|block| block.iter().zip(mass).map(|(v, m)| m * v * v).sum::<f64>())
        .sum()
}

/// `sum_i m_i x_i^2` for a single field.
pub fn field_norm_sq(mass: &[f64], x: &[f64]) -> f64 {
    x.iter().zip(mass).map(|(v, m)| m * v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_accessors() {
        let w = StateVector::from_fields(&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]).unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(w.u(), &[1.0, 2.0]);
        assert_eq!(w.v(), &[3.0, 4.0]);
        assert_eq!(w.p(), &[5.0, 6.0]);
        assert!(StateVector::from_fields(&[1.0], &[1.0, 2.0], &[1.0]).is_err());
        assert!(StateVector::from_vec(vec![0.0; 4]).is_err());
    }

    #[test]
    fn pressure_mean_removal() {
        let mut w = StateVector::from_fields(&[0.0; 2], &[0.0; 2], &[1.0, 4.0]).unwrap();
        w.remove_pressure_mean(&[3.0, 1.0]);
        // weighted mean (3 + 4) / 4
        assert_eq!(w.p(), &[1.0 - 1.75, 4.0 - 1.75]);
    }

    #[test]
    fn norms() {
        let mass = [0.5, 0.5];
        assert_eq!(p_norm_sq(&mass, &[1.0, 1.0, 2.0, 2.0, 0.0, 0.0]), 5.0);
        assert_eq!(field_norm_sq(&mass, &[2.0, 0.0]), 2.0);
    }
}
