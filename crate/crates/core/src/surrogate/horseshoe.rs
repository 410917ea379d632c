//! Horseshoe-prior sparse Bayesian linear regression via Gibbs sampling.
//!
//! Model: y | X, α, σ² ~ N(Xα, σ² I), α_k ~ N(0, β_k² τ² σ²), τ, β_k ~ C⁺(0, 1),
//! p(σ²) ∝ σ⁻². The half-Cauchy scales are written as inverse-gamma mixtures
//! with auxiliaries ν_k and ξ, which makes every full conditional closed form.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::random::{inverse_gamma, standard_normal_vector};
use crate::scalar::Real;
use crate::seeding::{rng_from, StreamRng};
use crate::surrogate::{Dataset, MonomialBasis};

/// Lower bound applied to every variance parameter.
pub const VARIANCE_FLOOR: f64 = 1e-12;
/// Upper bound applied to every variance parameter, and to Σ* when the fast sampler cannot factor it.
pub const VARIANCE_CAP: f64 = 1e12;
/// Condition number beyond which the O(N²p) sampler refuses to solve.
pub const MAX_CONDITION: f64 = 1e12;

#[inline]
fn clamp_variance(v: f64) -> f64 {
    if v.is_nan() {
        VARIANCE_FLOOR
    } else {
        v.clamp(VARIANCE_FLOOR, VARIANCE_CAP)
    }
}

/// (shape, scale) of the inverse-gamma full conditionals.
pub mod conditionals {
    /// σ² | · with residual sum of squares `rss` and `shrink` = αᵀΣ*⁻¹α.
    pub fn sigma2(n: usize, p: usize, rss: f64, shrink: f64) -> (f64, f64) {
        ((n + p) as f64 / 2.0, rss / 2.0 + shrink / 2.0)
    }

    pub fn beta2(nu: f64, alpha_sq: f64, tau2: f64, sigma2: f64) -> (f64, f64) {
        (1.0, 1.0 / nu + alpha_sq / (2.0 * tau2 * sigma2))
    }

    /// `weighted` = Σ_k α_k² / β_k².
    pub fn tau2(p: usize, xi: f64, weighted: f64, sigma2: f64) -> (f64, f64) {
        ((p as f64 + 1.0) / 2.0, 1.0 / xi + weighted / (2.0 * sigma2))
    }

    pub fn nu(beta2: f64) -> (f64, f64) {
        (1.0, 1.0 + 1.0 / beta2)
    }

    pub fn xi(tau2: f64) -> (f64, f64) {
        (1.0, 1.0 + 1.0 / tau2)
    }
}

/// Which Gaussian sampler produced α in a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaSampler {
    /// Auxiliary-variable scheme, O(N²p).
    Fast,
    /// Cholesky of the p × p precision, O(p³).
    Direct,
}

/// A sampled coefficient vector together with its noise variance.
#[derive(Clone, Debug)]
pub struct CoefficientDraw<T: Real = f64> {
    pub alpha: DVector<T>,
    pub sigma2: T,
    pub basis: MonomialBasis,
}

impl<T: Real> CoefficientDraw<T> {
    pub fn predict(&self, x: &crate::point::BinaryPoint) -> Result<T> {
        self.basis.predict(self.alpha.as_slice(), x)
    }
}

/// State of one persistent Gibbs chain.
#[derive(Clone, Debug)]
pub struct SurrogatePosterior<T: Real = f64> {
    pub alpha: DVector<T>,
    pub sigma2: T,
    pub tau2: T,
    pub beta2: DVector<T>,
    pub nu: DVector<T>,
    pub xi: T,
    rng: StreamRng,
    last_sampler: Option<AlphaSampler>,
}

impl<T: Real> SurrogatePosterior<T> {
    /// Chain at α = 0 with every scale parameter equal to one.
    pub fn new(p: usize, seed: u64) -> Self {
        Self {
            alpha: DVector::zeros(p),
            sigma2: T::one(),
            tau2: T::one(),
            beta2: DVector::from_element(p, T::one()),
            nu: DVector::from_element(p, T::one()),
            xi: T::one(),
            rng: rng_from(seed),
            last_sampler: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn last_sampler(&self) -> Option<AlphaSampler> {
        self.last_sampler
    }

    /// Diagonal of Σ* = τ² diag(β²), floored at [`VARIANCE_FLOOR`].
    pub fn prior_variances(&self) -> DVector<T> {
        let tau2 = self.tau2.as_f64();
        self.beta2
            .map(|b| T::of((b.as_f64() * tau2).max(VARIANCE_FLOOR)))
    }

    /// One pass over α, σ², β², τ², ν, ξ, each drawn from its full conditional.
    pub fn gibbs_sweep(&mut self, data: &Dataset<T>) -> Result<()> {
        data.require_nonempty()?;
        let p = self.dim();
        if data.basis().len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: data.basis().len(),
            });
        }
        let n = data.len();
        let x = data.features();
        let y = data.y();

        // α | ·
        let mut prior_var = self.prior_variances();
        let sigma2 = self.sigma2;
        let (alpha, sampler) = if n < p {
            match sample_alpha_fast(x, y, &prior_var, sigma2, &mut self.rng) {
                Ok(a) => (a, AlphaSampler::Fast),
                Err(Error::IllConditioned { .. } | Error::NotPositiveDefinite { .. }) => {
                    match sample_alpha_direct(x, y, &prior_var, sigma2, &mut self.rng) {
                        Ok(a) => (a, AlphaSampler::Direct),
                        Err(Error::NotPositiveDefinite { .. }) => {
                            // neither factorization survives a huge Σ*; draw with Σ* capped
                            prior_var.apply(|v| *v = T::of(clamp_variance(v.as_f64())));
                            match sample_alpha_fast(x, y, &prior_var, sigma2, &mut self.rng) {
                                Ok(a) => (a, AlphaSampler::Fast),
                                Err(
                                    Error::IllConditioned { .. }
                                    | Error::NotPositiveDefinite { .. },
                                ) => (
                                    sample_alpha_direct(x, y, &prior_var, sigma2, &mut self.rng)?,
                                    AlphaSampler::Direct,
                                ),
                                Err(e) => return Err(e),
                            }
                        }
                        Err(e) => return Err(e),
                    }
                }
                Err(e) => return Err(e),
            }
        } else {
            (
                sample_alpha_direct(x, y, &prior_var, sigma2, &mut self.rng)?,
                AlphaSampler::Direct,
            )
        };
        self.alpha = alpha;
        self.last_sampler = Some(sampler);

        let alpha_sq: Vec<f64> = self.alpha.iter().map(|a| a.as_f64().powi(2)).collect();

        // σ² | ·
        let resid = y - x * &self.alpha;
        let rss = resid.iter().map(|r| r.as_f64().powi(2)).sum::<f64>();
        let shrink = alpha_sq
            .iter()
            .zip(prior_var.iter())
            .map(|(a2, v)| a2 / v.as_f64())
            .sum::<f64>();
        let (shape, scale) = conditionals::sigma2(n, p, rss, shrink);
        let sigma2 = clamp_variance(inverse_gamma(shape, scale, &mut self.rng));
        self.sigma2 = T::of(sigma2);

        // β²_k | ·
        let tau2 = self.tau2.as_f64();
        for k in 0..p {
            let (shape, scale) =
                conditionals::beta2(self.nu[k].as_f64(), alpha_sq[k], tau2, sigma2);
            self.beta2[k] = T::of(clamp_variance(inverse_gamma(shape, scale, &mut self.rng)));
        }

        // τ² | ·
        let weighted = alpha_sq
            .iter()
            .zip(self.beta2.iter())
            .map(|(a2, b2)| a2 / b2.as_f64())
            .sum::<f64>();
        let (shape, scale) = conditionals::tau2(p, self.xi.as_f64(), weighted, sigma2);
        let tau2 = clamp_variance(inverse_gamma(shape, scale, &mut self.rng));
        self.tau2 = T::of(tau2);

        // ν_k | ·
        for k in 0..p {
            let (shape, scale) = conditionals::nu(self.beta2[k].as_f64());
            self.nu[k] = T::of(clamp_variance(inverse_gamma(shape, scale, &mut self.rng)));
        }

        // ξ | ·
        let (shape, scale) = conditionals::xi(tau2);
        self.xi = T::of(clamp_variance(inverse_gamma(shape, scale, &mut self.rng)));
        Ok(())
    }

    /// Advance the chain `sweeps` times and read out (α, σ²).
    pub fn draw_coefficients(
        &mut self,
        data: &Dataset<T>,
        sweeps: usize,
    ) -> Result<CoefficientDraw<T>> {
        if sweeps == 0 {
            return Err(Error::InvalidArgument("sweeps must be at least 1".into()));
        }
        for _ in 0..sweeps {
            self.gibbs_sweep(data)?;
        }
        Ok(CoefficientDraw {
            alpha: self.alpha.clone(),
            sigma2: self.sigma2,
            basis: data.basis().clone(),
        })
    }

    /// Monte Carlo posterior mean of α after `burn_in` discarded sweeps.
    pub fn posterior_mean(
        &mut self,
        data: &Dataset<T>,
        burn_in: usize,
        samples: usize,
    ) -> Result<DVector<T>> {
        if samples == 0 {
            return Err(Error::InvalidArgument("samples must be at least 1".into()));
        }
        for _ in 0..burn_in {
            self.gibbs_sweep(data)?;
        }
        let mut acc = DVector::<T>::zeros(self.dim());
        for _ in 0..samples {
            self.gibbs_sweep(data)?;
            acc += &self.alpha;
        }
        Ok(acc / T::of(samples as f64))
    }

    /// Single-draw form of the fast sampler at the chain's current Σ* and σ².
    pub fn fast_alpha_draw(&mut self, data: &Dataset<T>) -> Result<DVector<T>> {
        data.require_nonempty()?;
        let prior_var = self.prior_variances();
        sample_alpha_fast(
            data.features(),
            data.y(),
            &prior_var,
            self.sigma2,
            &mut self.rng,
        )
    }
}

/// Exact draw from N(A⁻¹Xᵀy, σ²A⁻¹), A = XᵀX + Σ*⁻¹, by factoring A.
pub fn sample_alpha_direct<T: Real, R: Rng + ?Sized>(
    x: &DMatrix<T>,
    y: &DVector<T>,
    prior_var: &DVector<T>,
    sigma2: T,
    rng: &mut R,
) -> Result<DVector<T>> {
    let p = x.ncols();
    let mut a = x.tr_mul(x);
    for k in 0..p {
        a[(k, k)] += T::one() / prior_var[k];
    }
    let chol = Cholesky::new(a).ok_or(Error::NotPositiveDefinite {
        what: "posterior precision XᵀX + Σ*⁻¹",
    })?;
    let mean = chol.solve(&x.tr_mul(y));
    // α = mean + σ L⁻ᵀ z has covariance σ² (L Lᵀ)⁻¹
    let z: DVector<T> = standard_normal_vector(p, rng);
    let l = chol.l();
    let noise = l
        .transpose()
        .solve_upper_triangular(&z)
        .expect("Cholesky factor has a positive diagonal");
    Ok(mean + noise * sigma2.sqrt())
}

/// Exact draw from N(A⁻¹Xᵀy, σ²A⁻¹) in O(N²p) operations.
///
/// With Φ = X/σ, D = σ²Σ*: draw u ~ N(0, D), δ ~ N(0, I_N); set v = Φu + δ;
/// solve (ΦDΦᵀ + I) w = y/σ − v; return u + DΦᵀw.
pub fn sample_alpha_fast<T: Real, R: Rng + ?Sized>(
    x: &DMatrix<T>,
    y: &DVector<T>,
    prior_var: &DVector<T>,
    sigma2: T,
    rng: &mut R,
) -> Result<DVector<T>> {
    let (n, p) = x.shape();
    let sigma = sigma2.sqrt();
    let sd = prior_var.map(|v| v.sqrt());

    let z: DVector<T> = standard_normal_vector(p, rng);
    let u = z.component_mul(&sd) * sigma;
    let delta: DVector<T> = standard_normal_vector(n, rng);
    let v = x * &u / sigma + delta;

    // M = X Σ* Xᵀ + I
    let mut w_scaled = x.clone();
    for (j, mut col) in w_scaled.column_iter_mut().enumerate() {
        col *= sd[j];
    }
    let mut m = &w_scaled * w_scaled.transpose();
    for i in 0..n {
        m[(i, i)] += T::one();
    }
    let chol = Cholesky::new(m).ok_or(Error::NotPositiveDefinite {
        what: "X Σ* Xᵀ + I",
    })?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
        let d = d.as_f64();
        (lo.min(d), hi.max(d))
    });
    let condition = (hi / lo).powi(2);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = y / sigma - v;
    let w = chol.solve(&rhs);
    let back = x.tr_mul(&w).component_mul(prior_var) * sigma;
    Ok(u + back)
}
