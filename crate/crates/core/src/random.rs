use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::scalar::Real;

pub fn standard_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::of(StandardNormal.sample(rng))
}

pub fn standard_normal_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<T> {
    DVector::from_iterator(n, (0..n).map(|_| standard_normal::<T, R>(rng)))
}

/// Draw from IG(shape, scale), the law of `scale / G` with `G ~ Gamma(shape, 1)`.
/// Density ∝ x^{-shape-1} exp(-scale / x).
pub fn inverse_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    let g: f64 = Gamma::new(shape, 1.0)
        .expect("inverse-gamma shape must be positive")
        .sample(rng);
    scale / g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_gamma_mean() {
        // E[IG(s, c)] = c / (s - 1) for s > 1
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let (s, c) = (4.0, 3.0);
        let draws: Vec<f64> = (0..n).map(|_| inverse_gamma(s, c, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        // Var = c² / ((s-1)²(s-2)) = 0.5
        let se = (0.5f64 / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 4.0 * se, "mean {mean}");
    }

    #[test]
    fn nu_conditional_with_unit_beta_is_ig_1_2() {
        // IG(1, 2): median = 2 / Gamma(1,1).median = 2 / ln 2
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut draws: Vec<f64> = (0..100_001)
            .map(|_| inverse_gamma(1.0, 1.0 + 1.0 / 1.0, &mut rng))
            .collect();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = draws[50_000];
        let expected = 2.0 / std::f64::consts::LN_2;
        assert!((median / expected - 1.0).abs() < 0.02, "median {median}");
    }
}
