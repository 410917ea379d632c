//! Black-box objectives with seeded instances.

mod bqp;
mod contamination;
mod ising;

pub use bqp::{correlation, BqpInstance, Optimum, ENUMERATION_LIMIT};
pub use contamination::{ContaminationInstance, ContaminationOutcome, Rate};
pub use ising::{grid_edges, IsingInstance, GRID_SIDE, WEIGHT_RANGE};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::point::BinaryPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// Map a raw value to the maximization scale used by the optimizers.
    pub fn to_max(self, raw: f64) -> f64 {
        match self {
            Sense::Maximize => raw,
            Sense::Minimize => -raw,
        }
    }

    /// Inverse of [`Sense::to_max`].
    pub fn from_max(self, v: f64) -> f64 {
        self.to_max(v)
    }

    /// True when `a` is at least as good as `b` in this sense.
    pub fn at_least_as_good(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Maximize => a >= b,
            Sense::Minimize => a <= b,
        }
    }
}

/// Result of one benchmark call, in the benchmark's own sense.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    /// Objective without the sparsity term.
    pub objective: f64,
    /// Objective with the sparsity term: f − λ‖x‖₁ when maximizing,
    /// f + λ‖x‖₁ when minimizing.
    pub value: f64,
}

impl Observation {
    /// The sparsity-free part on the maximization scale; this is what the
    /// surrogate models learn.
    pub fn model_target(&self, sense: Sense) -> f64 {
        sense.to_max(self.objective)
    }
}

/// A benchmark instance together with its sparsity weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Problem {
    Bqp(BqpInstance),
    Ising {
        instance: IsingInstance,
        lambda: f64,
    },
    Contamination {
        instance: ContaminationInstance,
        lambda: f64,
    },
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Bqp(_) => "bqp",
            Problem::Ising { .. } => "ising",
            Problem::Contamination { .. } => "contamination",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Problem::Bqp(b) => b.d,
            Problem::Ising { instance, .. } => instance.dim(),
            Problem::Contamination { instance, .. } => instance.d,
        }
    }

    pub fn sense(&self) -> Sense {
        match self {
            Problem::Bqp(_) => Sense::Maximize,
            _ => Sense::Minimize,
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            Problem::Bqp(b) => b.lambda,
            Problem::Ising { lambda, .. } | Problem::Contamination { lambda, .. } => *lambda,
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Problem::Contamination { instance, .. } if !instance.common_random_numbers)
    }

    /// λ‖x‖₁.
    pub fn penalty(&self, x: &BinaryPoint) -> f64 {
        self.lambda() * x.count_ones() as f64
    }

    /// One benchmark call. `key` selects the Monte Carlo stream of stochastic
    /// benchmarks, so repeating a key repeats the observation.
    pub fn observe(&self, x: &BinaryPoint, key: u64) -> Result<Observation> {
        let objective = match self {
            Problem::Bqp(b) => b.quadratic(x)?,
            Problem::Ising { instance, .. } => instance.kl(x)?,
            Problem::Contamination { instance, .. } => {
                instance.evaluate(x, 0.0, instance.evaluation_seed(key))?
            }
        };
        let penalty = self.penalty(x);
        let value = match self.sense() {
            Sense::Maximize => objective - penalty,
            Sense::Minimize => objective + penalty,
        };
        Ok(Observation { objective, value })
    }

    /// Raw objective value, penalty included.
    pub fn evaluate(&self, x: &BinaryPoint, key: u64) -> Result<f64> {
        Ok(self.observe(x, key)?.value)
    }

    /// Exact optimum in the raw sense, when one is known.
    pub fn optimum(&self) -> Option<&Optimum> {
        match self {
            Problem::Bqp(b) => b.optimum.as_ref(),
            _ => None,
        }
    }
}
