use bocs_core::seeding::rng_from;
use bocs_core::surrogate::{
    mle_fit, sample_alpha_direct, sample_alpha_fast, Dataset, MonomialBasis, SurrogatePosterior,
};
use bocs_core::BinaryPoint;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

fn design(n: usize, p: usize, seed: u64) -> (DMatrix<f64>, DVector<f64>, DVector<f64>) {
    let mut rng = rng_from(seed);
    let x = DMatrix::from_fn(n, p, |_, _| rng.random_range(0..2u8) as f64);
    let y = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
    let prior = DVector::from_fn(p, |_, _| rng.random_range(0.3..2.0));
    (x, y, prior)
}

/// Energy-distance two-sample permutation test; returns the p-value.
fn energy_test(a: &[DVector<f64>], b: &[DVector<f64>], permutations: usize, seed: u64) -> f64 {
    let all: Vec<&DVector<f64>> = a.iter().chain(b).collect();
    let n = all.len();
    let mut dist = vec![0f32; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = (all[i] - all[j]).norm() as f32;
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let n1 = a.len();
    let stat = |labels: &[bool]| {
        let (mut ab, mut aa, mut bb) = (0f64, 0f64, 0f64);
        for i in 0..n {
            let row = &dist[i * n..(i + 1) * n];
            for j in 0..n {
                let d = row[j] as f64;
                match (labels[i], labels[j]) {
                    (true, true) => aa += d,
                    (false, false) => bb += d,
                    _ => ab += d,
                }
            }
        }
        let n2 = (n - n1) as f64;
        let n1 = n1 as f64;
        ab / (n1 * n2) - aa / (n1 * n1) - bb / (n2 * n2)
    };
    let mut labels: Vec<bool> = (0..n).map(|i| i < n1).collect();
    let observed = stat(&labels);
    let mut rng = rng_from(seed);
    let mut exceed = 0;
    for _ in 0..permutations {
        labels.shuffle(&mut rng);
        if stat(&labels) >= observed {
            exceed += 1;
        }
    }
    (exceed + 1) as f64 / (permutations + 1) as f64
}

#[test]
fn fast_and_direct_samplers_agree_in_distribution() {
    for (n, p) in [(5, 30), (50, 3)] {
        let (x, y, prior) = design(n, p, (n * 100 + p) as u64);
        let sigma2 = 0.8;
        let draws = 2000;
        let mut rng = rng_from(1);
        let fast: Vec<_> = (0..draws)
            .map(|_| sample_alpha_fast(&x, &y, &prior, sigma2, &mut rng).unwrap())
            .collect();
        let direct: Vec<_> = (0..draws)
            .map(|_| sample_alpha_direct(&x, &y, &prior, sigma2, &mut rng).unwrap())
            .collect();
        let pval = energy_test(&fast, &direct, 99, 7);
        assert!(pval > 0.01, "(N, p) = ({n}, {p}): p-value {pval}");
    }
}

#[test]
fn sample_means_match_closed_form() {
    // N = 1, p = 2, X = [1 1], y = 2, σ = 1, Σ* = I: mean (XᵀX + I)⁻¹Xᵀy = [2/3, 2/3]
    let x = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
    let y = DVector::from_vec(vec![2.0]);
    let prior = DVector::from_vec(vec![1.0, 1.0]);
    let mut rng = rng_from(3);
    let draws = 40_000;
    let mut sum = DVector::<f64>::zeros(2);
    for _ in 0..draws {
        sum += sample_alpha_fast(&x, &y, &prior, 1.0, &mut rng).unwrap();
    }
    let mean = sum / draws as f64;
    // posterior variances are 2/3, so the standard error is about 0.004
    for m in mean.iter() {
        assert!((m - 2.0 / 3.0).abs() < 0.02, "{m}");
    }
}

#[test]
fn posterior_concentrates_on_least_squares() {
    let d = 4;
    let basis = MonomialBasis::quadratic(d).unwrap();
    let p = basis.len();
    let mut rng = rng_from(11);
    let truth: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
    let data = Dataset::from_points(
        basis.clone(),
        (0..4 * p).map(|_| {
            let x = BinaryPoint::random(d, &mut rng);
            let v = basis.predict(&truth, &x).unwrap();
            (x, v)
        }),
    )
    .unwrap();
    let mle = mle_fit(&data);
    let mut chain = SurrogatePosterior::<f64>::new(p, 5);
    let mean = chain.posterior_mean(&data, 200, 1000).unwrap();
    let err = (mean - mle).amax();
    assert!(err < 0.05, "{err}");
}
