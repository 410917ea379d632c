use serde::{Deserialize, Serialize};

use crate::acquisition::{QuadObjective, SdpSolution};
use crate::error::{Error, Result};
use crate::point::BinaryPoint;
use crate::random::standard_normal;
use crate::scalar::Real;
use crate::seeding::rng_from;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RoundingScheme {
    /// Sign of the projection on a Gaussian direction.
    #[default]
    Hyperplane,
    /// Project on a Gaussian direction, scale by 1/T, truncate to [−1, 1] and
    /// draw each sign with P(+1) = (1 + s)/2.
    Truncated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoundingConfig {
    pub draws: usize,
    pub scheme: RoundingScheme,
    /// Truncation scale of the truncated scheme; `None` uses √(4 ln(d+1)).
    pub truncation: Option<f64>,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        Self {
            draws: 20,
            scheme: RoundingScheme::Hyperplane,
            truncation: None,
        }
    }
}

pub fn default_truncation(d: usize) -> f64 {
    (4.0 * ((d + 1) as f64).ln()).sqrt()
}

/// One rounding of the vector solution to z ∈ {−1,1}^{d+1}, sign-fixed so the
/// homogenizing coordinate is +1, mapped back to {0,1}^d.
pub fn round_once<T: Real, R: Rng + ?Sized>(
    sol: &SdpSolution<T>,
    scheme: RoundingScheme,
    truncation: f64,
    rng: &mut R,
) -> BinaryPoint {
    let rows = sol.v.nrows();
    let n = sol.v.ncols();
    let r: Vec<f64> = (0..rows).map(|_| standard_normal::<f64, R>(rng)).collect();
    let signs: Vec<bool> = sol
        .v
        .column_iter()
        .map(|col| {
            let proj: f64 = col.iter().zip(&r).map(|(v, r)| v.as_f64() * r).sum();
            match scheme {
                RoundingScheme::Hyperplane => proj >= 0.0,
                RoundingScheme::Truncated => {
                    let s = (proj / truncation).clamp(-1.0, 1.0);
                    rng.random::<f64>() < (1.0 + s) / 2.0
                }
            }
        })
        .collect();
    let flip = !signs[n - 1];
    let bits = signs[..n - 1].iter().map(|&s| (s != flip) as u8).collect();
    BinaryPoint::new(bits).expect("bits are 0/1")
}

/// Best of `config.draws` independent roundings, ranked by the exact
/// objective. Ties keep the earliest candidate.
pub fn round_geometric<T: Real>(
    sol: &SdpSolution<T>,
    q: &QuadObjective<T>,
    config: &RoundingConfig,
    seed: u64,
) -> Result<BinaryPoint> {
    if config.draws == 0 {
        return Err(Error::InvalidArgument(
            "at least one rounding draw is required".into(),
        ));
    }
    let d = q.dim();
    if sol.v.ncols() != d + 1 {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            found: sol.v.ncols(),
        });
    }
    let truncation = config.truncation.unwrap_or_else(|| default_truncation(d));
    let mut rng = rng_from(seed);
    let mut best: Option<(BinaryPoint, T)> = None;
    for _ in 0..config.draws {
        let x = round_once(sol, config.scheme, truncation, &mut rng);
        let v = q.value(&x);
        if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
            best = Some((x, v));
        }
    }
    Ok(best.expect("draws ≥ 1").0)
}
