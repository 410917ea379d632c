//! Thompson-style acquisition: maximize a sampled surrogate minus a sparsity
//! penalty over {0,1}^d, either through an SDP relaxation with randomized
//! rounding or by simulated annealing on the surrogate.

pub(crate) mod quadratic;
mod rounding;
mod sdp;

use serde::{Deserialize, Serialize};

pub use quadratic::{
    build_quadratic, to_plus_minus, Penalty, PenaltyKind, PlusMinusForm, QuadObjective,
};
pub use rounding::{
    default_truncation, round_geometric, round_once, RoundingConfig, RoundingScheme,
};
pub use sdp::{default_rank, sdp_solve, sdp_solve_best_effort, SdpConfig, SdpMethod, SdpSolution};

use crate::error::{Error, Result};
use crate::point::BinaryPoint;
use crate::scalar::Real;
use crate::search::{simulated_annealing, AnnealSchedule, SearchBudget};
use crate::seeding::{substream, tag};
use crate::surrogate::CoefficientDraw;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SdpAcquisitionConfig {
    pub sdp: SdpConfig,
    pub rounding: RoundingConfig,
    /// Fresh-seed restarts when the SDP misses its tolerance. After the last
    /// attempt the best iterate found is rounded anyway.
    pub attempts: usize,
}

impl Default for SdpAcquisitionConfig {
    fn default() -> Self {
        Self {
            sdp: SdpConfig::default(),
            rounding: RoundingConfig::default(),
            attempts: 3,
        }
    }
}

/// build_quadratic → to_plus_minus → sdp_solve → round_geometric.
pub fn acquire_sdp<T: Real>(
    draw: &CoefficientDraw<T>,
    penalty: &Penalty,
    config: &SdpAcquisitionConfig,
    seed: u64,
) -> Result<BinaryPoint> {
    let q = build_quadratic(draw, penalty)?;
    let pm = to_plus_minus(&q)?;
    let mut best: Option<SdpSolution<T>> = None;
    for attempt in 0..config.attempts.max(1) {
        let sol = sdp_solve_best_effort(
            &pm,
            &config.sdp,
            substream(seed, &[tag("sdp"), attempt as u64]),
        )?;
        let better = best
            .as_ref()
            .map_or(true, |b| sol.objective_value > b.objective_value);
        let done = sol.converged;
        if better {
            best = Some(sol);
        }
        if done {
            break;
        }
    }
    let sol = best.expect("at least one attempt");
    round_geometric(&sol, &q, &config.rounding, substream(seed, &[tag("round")]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaAcquisitionConfig {
    /// Proposals per acquisition; `None` uses max(500, d²).
    pub proposals: Option<usize>,
    pub schedule: AnnealSchedule,
}

impl Default for SaAcquisitionConfig {
    fn default() -> Self {
        Self {
            proposals: None,
            schedule: AnnealSchedule::default(),
        }
    }
}

pub fn default_sa_proposals(d: usize) -> usize {
    (d * d).max(500)
}

/// Anneal f_α(x) − λP(x) on the surrogate; works for models of any order.
pub fn acquire_sa<T: Real>(
    draw: &CoefficientDraw<T>,
    penalty: &Penalty,
    proposals: usize,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<BinaryPoint> {
    if draw.alpha.len() != draw.basis.len() {
        return Err(Error::DimensionMismatch {
            expected: draw.basis.len(),
            found: draw.alpha.len(),
        });
    }
    let d = draw.basis.dim();
    let lambda = T::of(penalty.linear_weight());
    let objective = |x: &BinaryPoint| -> Result<T> {
        Ok(draw.predict(x)? - lambda * T::of(x.count_ones() as f64))
    };
    let result = simulated_annealing(
        objective,
        d,
        SearchBudget::surrogate(proposals),
        schedule,
        seed,
    )?;
    Ok(result.best_point)
}
