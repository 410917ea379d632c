//! Sparsifying a zero-field Ising model p(z) ∝ exp(zᵀJz) on a 4 × 4 grid:
//! x switches grid edges on or off and the loss is KL(p ‖ q_x).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::BinaryPoint;
use crate::seeding::rng_from;

pub const GRID_SIDE: usize = 4;
pub const WEIGHT_RANGE: (f64, f64) = (0.05, 5.0);

/// Right and down neighbours of each node in row-major order.
pub fn grid_edges(side: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            let i = r * side + c;
            if c + 1 < side {
                edges.push((i, i + 1));
            }
            if r + 1 < side {
                edges.push((i, i + side));
            }
        }
    }
    edges
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingInstance {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    /// Interaction J_ij = J_ji of each edge; zero off the grid.
    pub weights: Vec<f64>,
    pub seed: u64,
    /// E_p[z_i z_j] per edge.
    pub moments: Vec<f64>,
    pub log_zp: f64,
}

/// Exact partition-function sums over all 2^n spin configurations.
struct Enumeration {
    log_z: f64,
    /// Σ_z exp(E(z) − log Z) z_i z_j per edge.
    moments: Vec<f64>,
}

fn adjacency(n: usize, edges: &[(usize, usize)], weights: &[f64]) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); n];
    for (&(i, j), &w) in edges.iter().zip(weights) {
        if w != 0.0 {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
    }
    adj
}

/// Energy E(z) = zᵀJz = 2 Σ_edges J_e z_i z_j. Configurations come in ±z
/// pairs of equal energy, so the last spin is pinned to +1 and the sums are
/// doubled. Terms are shifted by the largest attainable energy 2Σ|J| so the
/// exponentials never overflow.
fn enumerate(
    n: usize,
    edges: &[(usize, usize)],
    weights: &[f64],
    with_moments: bool,
) -> Enumeration {
    assert!(n >= 1 && n < 40, "enumeration over 2^{n} spin states");
    let adj = adjacency(n, edges, weights);
    let shift: f64 = 2.0 * weights.iter().map(|w| w.abs()).sum::<f64>();
    let free = n - 1;

    let mut z = vec![1.0f64; n];
    // field[k] = Σ_{j~k} J_kj z_j
    let mut field: Vec<f64> = (0..n)
        .map(|k| adj[k].iter().map(|&(_, w)| w).sum())
        .collect();
    let mut energy = 2.0 * weights.iter().sum::<f64>();

    let mut total = 0.0;
    let mut moments = vec![0.0; if with_moments { edges.len() } else { 0 }];
    let mut accumulate = |z: &[f64], energy: f64, total: &mut f64| {
        let w = (energy - shift).exp();
        *total += w;
        for (m, &(i, j)) in moments.iter_mut().zip(edges) {
            *m += w * z[i] * z[j];
        }
    };
    accumulate(&z, energy, &mut total);
    for step in 1..(1u64 << free) {
        let k = step.trailing_zeros() as usize;
        // flipping z_k changes its contribution 2 z_k field_k to its negative
        energy -= 4.0 * z[k] * field[k];
        z[k] = -z[k];
        for &(j, w) in &adj[k] {
            field[j] += 2.0 * w * z[k];
        }
        accumulate(&z, energy, &mut total);
    }
    let log_z = (2.0 * total).ln() + shift;
    let moments = moments.into_iter().map(|m| m / total).collect();
    Enumeration { log_z, moments }
}

impl IsingInstance {
    pub fn generate(seed: u64) -> Self {
        let edges = grid_edges(GRID_SIDE);
        let mut rng = rng_from(seed);
        let weights: Vec<f64> = edges
            .iter()
            .map(|_| {
                let magnitude = rng.random_range(WEIGHT_RANGE.0..=WEIGHT_RANGE.1);
                if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            })
            .collect();
        Self::from_weights(GRID_SIDE * GRID_SIDE, edges, weights, seed)
    }

    pub fn from_weights(
        n: usize,
        edges: Vec<(usize, usize)>,
        weights: Vec<f64>,
        seed: u64,
    ) -> Self {
        assert_eq!(edges.len(), weights.len());
        let e = enumerate(n, &edges, &weights, true);
        Self {
            n,
            edges,
            weights,
            seed,
            moments: e.moments,
            log_zp: e.log_z,
        }
    }

    pub fn dim(&self) -> usize {
        self.edges.len()
    }

    /// Edge weights of q_x: J^q_e = x_e J^p_e.
    pub fn masked_weights(&self, x: &BinaryPoint) -> Result<Vec<f64>> {
        x.check_dim(self.dim())?;
        Ok(self
            .weights
            .iter()
            .zip(x.bits())
            .map(|(&w, &b)| if b == 1 { w } else { 0.0 })
            .collect())
    }

    pub fn log_partition(&self, weights: &[f64]) -> Result<f64> {
        if weights.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: weights.len(),
            });
        }
        Ok(enumerate(self.n, &self.edges, weights, false).log_z)
    }

    /// KL(p ‖ q_x) = 2 Σ_e (J^p_e − J^q_e) E_p[z_i z_j] + log Z_q − log Z_p.
    pub fn kl(&self, x: &BinaryPoint) -> Result<f64> {
        let jq = self.masked_weights(x)?;
        let log_zq = self.log_partition(&jq)?;
        let moment_term: f64 = self
            .weights
            .iter()
            .zip(&jq)
            .zip(&self.moments)
            .map(|((p, q), m)| (p - q) * m)
            .sum();
        Ok(2.0 * moment_term + log_zq - self.log_zp)
    }

    /// KL(p ‖ q_x) + λ‖x‖₁, to be minimized.
    pub fn evaluate(&self, x: &BinaryPoint, lambda: f64) -> Result<f64> {
        Ok(self.kl(x)? + lambda * x.count_ones() as f64)
    }
}
