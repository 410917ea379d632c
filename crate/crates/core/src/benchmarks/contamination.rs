//! Contamination control in a d-stage supply chain. At stage i the
//! contaminated fraction evolves as
//! Z_i = Λ_i (1 − x_i)(1 − Z_{i−1}) + (1 − Γ_i x_i) Z_{i−1},
//! where x_i = 1 applies prevention at cost c_i. The loss adds ρ/T times the
//! number of (stage, trajectory) pairs whose fraction exceeds U.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::BinaryPoint;
use crate::seeding::{rng_from, substream, tag};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "kebab-case")]
pub enum Rate {
    Beta {
        a: f64,
        b: f64,
    },
    /// Degenerate rate; consumes no randomness.
    Constant {
        value: f64,
    },
}

impl Rate {
    fn validate(&self, name: &str) -> Result<()> {
        let ok = match *self {
            Rate::Beta { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            Rate::Constant { value } => (0.0..=1.0).contains(&value),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid {name} distribution {self:?}"
            )))
        }
    }

    fn sampler(&self) -> RateSampler {
        match *self {
            Rate::Beta { a, b } => RateSampler::Beta(Beta::new(a, b).expect("validated")),
            Rate::Constant { value } => RateSampler::Constant(value),
        }
    }
}

enum RateSampler {
    Beta(Beta<f64>),
    Constant(f64),
}

impl RateSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            RateSampler::Beta(b) => b.sample(rng),
            RateSampler::Constant(v) => *v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContaminationInstance {
    pub d: usize,
    pub trajectories: usize,
    pub costs: Vec<f64>,
    pub limit: f64,
    /// Tolerated violation probability. Recorded for completeness; the
    /// Lagrangian loss does not use it.
    pub epsilon: f64,
    pub rho: f64,
    pub initial: Rate,
    pub growth: Rate,
    pub prevention: Rate,
    pub seed: u64,
    /// Reuse one set of trajectories for every evaluation, which makes the
    /// objective deterministic per instance.
    pub common_random_numbers: bool,
}

impl Default for ContaminationInstance {
    fn default() -> Self {
        Self::new(25, 100, 0)
    }
}

/// Per-evaluation loss decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContaminationOutcome {
    pub cost: f64,
    /// ρ/T × violation count.
    pub penalty: f64,
    pub violations: usize,
}

impl ContaminationInstance {
    pub fn new(d: usize, trajectories: usize, seed: u64) -> Self {
        Self {
            d,
            trajectories,
            costs: vec![1.0; d],
            limit: 0.1,
            epsilon: 0.05,
            rho: 1.0,
            initial: Rate::Beta { a: 1.0, b: 30.0 },
            growth: Rate::Beta {
                a: 1.0,
                b: 17.0 / 3.0,
            },
            prevention: Rate::Beta {
                a: 1.0,
                b: 3.0 / 7.0,
            },
            seed,
            common_random_numbers: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.trajectories == 0 {
            return Err(Error::InvalidArgument(
                "contamination needs d ≥ 1 and T ≥ 1".into(),
            ));
        }
        if self.costs.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: self.costs.len(),
            });
        }
        self.initial.validate("initial")?;
        self.growth.validate("growth")?;
        self.prevention.validate("prevention")?;
        Ok(())
    }

    /// Seed of the Monte Carlo stream for the evaluation with this index.
    pub fn evaluation_seed(&self, index: u64) -> u64 {
        let index = if self.common_random_numbers { 0 } else { index };
        substream(self.seed, &[tag("contamination"), index])
    }

    /// Simulate all trajectories, calling `visit(trajectory, stage, z)` for
    /// every stage fraction.
    pub fn simulate_with<F: FnMut(usize, usize, f64)>(
        &self,
        x: &BinaryPoint,
        stream: u64,
        mut visit: F,
    ) -> Result<()> {
        self.validate()?;
        x.check_dim(self.d)?;
        let (z0, lam, gam) = (
            self.initial.sampler(),
            self.growth.sampler(),
            self.prevention.sampler(),
        );
        let mut rng = rng_from(stream);
        for t in 0..self.trajectories {
            let mut z = z0.sample(&mut rng);
            for i in 0..self.d {
                let l = lam.sample(&mut rng);
                let g = gam.sample(&mut rng);
                let xi = x.get(i) as f64;
                z = l * (1.0 - xi) * (1.0 - z) + (1.0 - g * xi) * z;
                visit(t, i, z);
            }
        }
        Ok(())
    }

    pub fn simulate(&self, x: &BinaryPoint, stream: u64) -> Result<ContaminationOutcome> {
        let mut violations = 0;
        let limit = self.limit;
        self.simulate_with(x, stream, |_, _, z| {
            if z > limit {
                violations += 1;
            }
        })?;
        let cost = x
            .bits()
            .iter()
            .zip(&self.costs)
            .map(|(&b, c)| b as f64 * c)
            .sum();
        Ok(ContaminationOutcome {
            cost,
            penalty: self.rho * violations as f64 / self.trajectories as f64,
            violations,
        })
    }

    /// Σ c_i x_i + (ρ/T) Σ_i Σ_k 1{Z_ik > U} + λ‖x‖₁ on a fresh set of
    /// trajectories drawn from `stream`. To be minimized.
    pub fn evaluate(&self, x: &BinaryPoint, lambda: f64, stream: u64) -> Result<f64> {
        let o = self.simulate(x, stream)?;
        Ok(o.cost + o.penalty + lambda * x.count_ones() as f64)
    }
}
