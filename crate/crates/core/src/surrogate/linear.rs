//! Point-estimate and conjugate regression fits used for ablations and model
//! validation.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::surrogate::Dataset;

/// Minimum-norm least-squares coefficients, i.e. the pseudo-inverse solution.
pub fn mle_fit<T: Real>(data: &Dataset<T>) -> DVector<T> {
    least_squares(data.features(), data.y())
}

pub fn least_squares<T: Real>(x: &DMatrix<T>, y: &DVector<T>) -> DVector<T> {
    let p = x.ncols();
    if x.nrows() == 0 {
        return DVector::zeros(p);
    }
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = T::default_epsilon() * T::of(x.nrows().max(p) as f64) * smax;
    let solve = |rhs: &DVector<T>| svd.solve(rhs, eps).expect("U and Vᵀ were requested");
    let mut a = solve(y);
    // iterative refinement against the loss of accuracy in the SVD itself
    for _ in 0..2 {
        let r = y - x * &a;
        a += solve(&r);
    }
    a
}

/// Normal-inverse-gamma prior: α | σ² ~ N(mean, σ² cov), σ² ~ IG(a, b).
#[derive(Clone, Debug)]
pub struct NigPrior<T: Real = f64> {
    pub mean: DVector<T>,
    pub cov: DMatrix<T>,
    pub a: T,
    pub b: T,
}

impl<T: Real> NigPrior<T> {
    /// Zero mean, `scale`·I covariance.
    pub fn isotropic(p: usize, scale: T, a: T, b: T) -> Self {
        Self {
            mean: DVector::zeros(p),
            cov: DMatrix::identity(p, p) * scale,
            a,
            b,
        }
    }
}

/// Conjugate posterior in the same family as [`NigPrior`].
#[derive(Clone, Debug)]
pub struct NigPosterior<T: Real = f64> {
    pub mean: DVector<T>,
    pub cov: DMatrix<T>,
    pub a: T,
    pub b: T,
}

impl<T: Real> NigPosterior<T> {
    /// Posterior mean of σ², finite when a > 1.
    pub fn sigma2_mean(&self) -> Option<T> {
        (self.a > T::one()).then(|| self.b / (self.a - T::one()))
    }
}

pub fn blr_fit<T: Real>(data: &Dataset<T>, prior: &NigPrior<T>) -> Result<NigPosterior<T>> {
    let p = data.basis().len();
    if prior.mean.len() != p || prior.cov.shape() != (p, p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: prior.mean.len(),
        });
    }
    let prior_chol = Cholesky::new(prior.cov.clone()).ok_or(Error::NotPositiveDefinite {
        what: "prior covariance",
    })?;
    if data.is_empty() {
        return Ok(NigPosterior {
            mean: prior.mean.clone(),
            cov: prior.cov.clone(),
            a: prior.a,
            b: prior.b,
        });
    }
    let x = data.features();
    let y = data.y();
    let prior_precision = prior_chol.inverse();
    let precision = &prior_precision + x.tr_mul(x);
    let chol = Cholesky::new(precision.clone()).ok_or(Error::NotPositiveDefinite {
        what: "posterior precision",
    })?;
    let prior_term = &prior_precision * &prior.mean;
    let mean = chol.solve(&(&prior_term + x.tr_mul(y)));
    let half = T::of(0.5);
    let a = prior.a + T::of(data.len() as f64) * half;
    let quad = y.dot(y) + prior.mean.dot(&prior_term) - mean.dot(&(&precision * &mean));
    let b = prior.b + half * quad;
    Ok(NigPosterior {
        mean,
        cov: chol.inverse(),
        a,
        b,
    })
}
