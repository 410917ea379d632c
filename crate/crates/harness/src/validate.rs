//! Held-out prediction error of the MLE, conjugate and horseshoe fits.

use bocs_core::benchmarks::Problem;
use bocs_core::seeding::{rng_from, substream, tag};
use bocs_core::surrogate::{
    blr_fit, mle_fit, Dataset, MonomialBasis, NigPrior, SurrogatePosterior,
};
use bocs_core::BinaryPoint;
use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::metrics::MeanSe;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub order: usize,
    pub test_points: usize,
    pub seeds: usize,
    pub burn_in: usize,
    pub samples: usize,
    /// Prior variance scale of the conjugate model's non-intercept terms.
    pub blr_scale: f64,
    /// Prior variance scale of its intercept; large, so the offset is not
    /// shrunk towards zero.
    pub blr_intercept_scale: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            order: 2,
            test_points: 50,
            seeds: 10,
            burn_in: 200,
            samples: 1000,
            blr_scale: 1.0,
            blr_intercept_scale: 1e6,
        }
    }
}

/// Mean absolute test error of each model for one (N, seed).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelErrors {
    pub mle: f64,
    pub blr: f64,
    pub sparse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub n: usize,
    pub mle: MeanSe,
    pub blr: MeanSe,
    pub sparse: MeanSe,
    pub per_seed: Vec<ModelErrors>,
}

fn mean_abs_error(
    coeffs: &DVector<f64>,
    basis: &MonomialBasis,
    test: &[(BinaryPoint, f64)],
) -> Result<f64> {
    let mut total = 0.0;
    for (x, y) in test {
        total += (basis.predict(coeffs.as_slice(), x)? - y).abs();
    }
    Ok(total / test.len() as f64)
}

/// Draw `count` points and their sparsity-free objective values.
fn sample(problem: &Problem, count: usize, seed: u64) -> Result<Vec<(BinaryPoint, f64)>> {
    let mut rng = rng_from(substream(seed, &[tag("points")]));
    let d = problem.dim();
    (0..count)
        .map(|k| {
            let x = BinaryPoint::random(d, &mut rng);
            let obs = problem.observe(&x, substream(seed, &[tag("eval"), k as u64]))?;
            Ok((x, obs.objective))
        })
        .collect()
}

pub fn errors_at(
    problem: &Problem,
    n: usize,
    config: &ValidationConfig,
    seed: u64,
) -> Result<ModelErrors> {
    let basis = MonomialBasis::new(problem.dim(), config.order)?;
    let train = sample(problem, n, substream(seed, &[tag("train")]))?;
    let test = sample(problem, config.test_points, substream(seed, &[tag("test")]))?;
    let data = Dataset::from_points(basis.clone(), train)?;
    let p = basis.len();

    let mle = mle_fit(&data);
    let mut prior = NigPrior::isotropic(p, config.blr_scale, 1.0, 1.0);
    prior.cov[(0, 0)] = config.blr_intercept_scale;
    let blr = blr_fit(&data, &prior)?.mean;
    let mut chain = SurrogatePosterior::<f64>::new(p, substream(seed, &[tag("chain")]));
    let sparse = chain.posterior_mean(&data, config.burn_in, config.samples)?;
    Ok(ModelErrors {
        mle: mean_abs_error(&mle, &basis, &test)?,
        blr: mean_abs_error(&blr, &basis, &test)?,
        sparse: mean_abs_error(&sparse, &basis, &test)?,
    })
}

/// Error table over a grid of training-set sizes; seeds run in parallel.
pub fn validate_models(
    problem: &Problem,
    n_grid: &[usize],
    config: &ValidationConfig,
    master: u64,
) -> Result<Vec<ValidationRow>> {
    if n_grid.contains(&0) {
        return Err(HarnessError::Config(
            "training-set sizes must be positive".into(),
        ));
    }
    if !(config.blr_scale > 0.0 && config.blr_intercept_scale > 0.0) {
        return Err(HarnessError::Config("prior scales must be positive".into()));
    }
    if config.test_points == 0 || config.seeds == 0 || config.samples == 0 {
        return Err(HarnessError::Config(
            "test_points, seeds and samples must be positive".into(),
        ));
    }
    n_grid
        .iter()
        .map(|&n| {
            let per_seed = (0..config.seeds)
                .into_par_iter()
                .map(|s| {
                    errors_at(
                        problem,
                        n,
                        config,
                        substream(master, &[tag("validate"), n as u64, s as u64]),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let col = |f: fn(&ModelErrors) -> f64| {
                MeanSe::of(&per_seed.iter().map(f).collect::<Vec<_>>())
            };
            Ok(ValidationRow {
                n,
                mle: col(|e| e.mle),
                blr: col(|e| e.blr),
                sparse: col(|e| e.sparse),
                per_seed,
            })
        })
        .collect()
}
