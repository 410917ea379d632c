use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::BinaryPoint;
use crate::scalar::Real;

/// Monomials of degree at most `order` over `d` binary variables.
///
/// Terms are the intercept, then singletons in index order, then pairs in
/// lexicographic order, then triples, and so on. Variable indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialBasis {
    d: usize,
    order: usize,
    terms: Vec<Vec<usize>>,
}

/// Σ_{j=0..k} C(d, j).
pub fn term_count(d: usize, order: usize) -> usize {
    let mut total = 0usize;
    let mut binom = 1usize;
    for j in 0..=order.min(d) {
        total += binom;
        binom = binom * (d - j) / (j + 1);
    }
    total
}

impl MonomialBasis {
    pub fn new(d: usize, order: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if order == 0 {
            return Err(Error::InvalidArgument(
                "model order must be at least 1".into(),
            ));
        }
        let mut terms = vec![Vec::new()];
        for size in 1..=order.min(d) {
            let mut combo: Vec<usize> = (0..size).collect();
            loop {
                terms.push(combo.clone());
                // advance to the next combination in lexicographic order
                let mut i = size;
                while i > 0 && combo[i - 1] == d - size + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                combo[i - 1] += 1;
                for j in i..size {
                    combo[j] = combo[j - 1] + 1;
                }
            }
        }
        Ok(Self { d, order, terms })
    }

    pub fn quadratic(d: usize) -> Result<Self> {
        Self::new(d, 2)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of terms `p`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Vec<usize>] {
        &self.terms
    }

    pub fn expand<T: Real>(&self, x: &BinaryPoint) -> Result<Vec<T>> {
        x.check_dim(self.d)?;
        Ok(self
            .terms
            .iter()
            .map(|s| {
                if s.iter().all(|&i| x.is_set(i)) {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect())
    }

    /// f_α(x) = Σ_S α_S Π_{i∈S} x_i.
    pub fn predict<T: Real>(&self, coeffs: &[T], x: &BinaryPoint) -> Result<T> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: coeffs.len(),
            });
        }
        x.check_dim(self.d)?;
        Ok(self
            .terms
            .iter()
            .zip(coeffs)
            .filter(|(s, _)| s.iter().all(|&i| x.is_set(i)))
            .fold(T::zero(), |acc, (_, &c)| acc + c))
    }
}

/// Free-function form of [`MonomialBasis::predict`].
pub fn predict<T: Real>(coeffs: &[T], basis: &MonomialBasis, x: &BinaryPoint) -> Result<T> {
    basis.predict(coeffs, x)
}
