use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::BinaryPoint;
use crate::random::standard_normal;
use crate::seeding::rng_from;

/// Largest dimension for which the exact optimum is computed on generation.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub value: f64,
    pub point: BinaryPoint,
}

/// Maximize xᵀQx − λ‖x‖₁ with Q = G ∘ K, G standard Gaussian and
/// K_ij = exp(−(i−j)²/Lc²).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BqpInstance {
    pub d: usize,
    pub lc: f64,
    pub lambda: f64,
    pub seed: u64,
    /// Row-major d × d.
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimum: Option<Optimum>,
}

pub fn correlation(i: usize, j: usize, lc: f64) -> f64 {
    let diff = i as f64 - j as f64;
    (-(diff * diff) / (lc * lc)).exp()
}

impl BqpInstance {
    pub fn generate(d: usize, lc: f64, lambda: f64, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument(
                "BQP dimension must be positive".into(),
            ));
        }
        if !(lc > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "correlation length must be positive, got {lc}"
            )));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be nonnegative, got {lambda}"
            )));
        }
        let mut rng = rng_from(seed);
        let mut q = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let g: f64 = standard_normal(&mut rng);
                q.push(g * correlation(i, j, lc));
            }
        }
        let mut inst = Self {
            d,
            lc,
            lambda,
            seed,
            q,
            optimum: None,
        };
        if d <= ENUMERATION_LIMIT {
            inst.optimum = Some(inst.enumerate_optimum());
        }
        Ok(inst)
    }

    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.d + j]
    }

    /// xᵀQx.
    pub fn quadratic(&self, x: &BinaryPoint) -> Result<f64> {
        x.check_dim(self.d)?;
        let on: Vec<usize> = (0..self.d).filter(|&i| x.is_set(i)).collect();
        let mut quad = 0.0;
        for &i in &on {
            for &j in &on {
                quad += self.q(i, j);
            }
        }
        Ok(quad)
    }

    /// xᵀQx − λ‖x‖₁.
    pub fn evaluate(&self, x: &BinaryPoint) -> Result<f64> {
        Ok(self.quadratic(x)? - self.lambda * x.count_ones() as f64)
    }

    /// Gray-code walk over all 2^d points with O(d) incremental updates.
    pub fn enumerate_optimum(&self) -> Optimum {
        let d = self.d;
        assert!(d < 63, "enumeration over 2^{d} points");
        // field[k] = Σ_{j on, j ≠ k} (Q_kj + Q_jk)
        let mut field = vec![0.0; d];
        let mut x = BinaryPoint::zeros(d);
        let mut value = 0.0;
        let mut best = (0.0, 0u64);
        let mut code = 0u64;
        for step in 1..(1u64 << d) {
            let k = step.trailing_zeros() as usize;
            let gain = self.q(k, k) + field[k] - self.lambda;
            let sign = if x.is_set(k) { -1.0 } else { 1.0 };
            value += sign * gain;
            x.flip(k);
            code ^= 1 << k;
            for (j, f) in field.iter_mut().enumerate() {
                if j != k {
                    *f += sign * (self.q(k, j) + self.q(j, k));
                }
            }
            if value > best.0 {
                best = (value, code);
            }
        }
        Optimum {
            value: best.0,
            point: BinaryPoint::from_index(best.1, d),
        }
    }
}
