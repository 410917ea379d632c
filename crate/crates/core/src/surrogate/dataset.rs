use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::point::BinaryPoint;
use crate::scalar::Real;
use crate::surrogate::MonomialBasis;

/// Design points, their expanded features and observations.
///
/// Rows are append-only and always equal the basis expansion of the stored
/// point.
#[derive(Clone, Debug)]
pub struct Dataset<T: Real = f64> {
    basis: MonomialBasis,
    features: DMatrix<T>,
    y: DVector<T>,
    points: Vec<BinaryPoint>,
}

impl<T: Real> Dataset<T> {
    pub fn new(basis: MonomialBasis) -> Self {
        let p = basis.len();
        Self {
            basis,
            features: DMatrix::zeros(0, p),
            y: DVector::zeros(0),
            points: Vec::new(),
        }
    }

    pub fn from_points(
        basis: MonomialBasis,
        points: impl IntoIterator<Item = (BinaryPoint, T)>,
    ) -> Result<Self> {
        let mut data = Self::new(basis);
        for (x, y) in points {
            data.push(x, y)?;
        }
        Ok(data)
    }

    pub fn push(&mut self, x: BinaryPoint, y: T) -> Result<()> {
        let row = self.basis.expand::<T>(&x)?;
        let n = self.len();
        let p = self.basis.len();
        let features = std::mem::replace(&mut self.features, DMatrix::zeros(0, p));
        self.features = features.resize_vertically(n + 1, T::zero());
        for (j, v) in row.into_iter().enumerate() {
            self.features[(n, j)] = v;
        }
        let y_old = std::mem::replace(&mut self.y, DVector::zeros(0));
        self.y = y_old.push(y);
        self.points.push(x);
        Ok(())
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    /// N × p feature matrix.
    pub fn features(&self) -> &DMatrix<T> {
        &self.features
    }

    pub fn y(&self) -> &DVector<T> {
        &self.y
    }

    pub fn points(&self) -> &[BinaryPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyDataset)
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rows_equal_expansion_of_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let basis = MonomialBasis::new(5, 3).unwrap();
        let mut data = Dataset::<f64>::new(basis.clone());
        for i in 0..20 {
            data.push(BinaryPoint::random(5, &mut rng), i as f64)
                .unwrap();
        }
        assert_eq!(data.features().shape(), (20, basis.len()));
        for (i, x) in data.points().iter().enumerate() {
            let row: Vec<f64> = basis.expand(x).unwrap();
            let stored: Vec<f64> = data.features().row(i).iter().copied().collect();
            assert_eq!(row, stored);
            assert_eq!(data.y()[i], i as f64);
        }
    }

    #[test]
    fn push_rejects_wrong_dimension() {
        let mut data = Dataset::<f32>::new(MonomialBasis::quadratic(3).unwrap());
        assert!(data.push(BinaryPoint::zeros(2), 0.0).is_err());
        assert!(data.is_empty());
    }
}
