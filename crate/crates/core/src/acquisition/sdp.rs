//! max Tr(BZ) s.t. diag(Z) = 1, Z ⪰ 0, solved through a low-rank factor
//! Z = VᵀV whose columns live on the unit sphere.
//!
//! Two ascent schemes on the product of spheres are available. Coordinate
//! ascent replaces each column in turn by its exact maximizer, the normalized
//! Σ_{j≠i} B_ij v_j. Gradient ascent projects the Euclidean gradient 2VB onto
//! each column's tangent space, steps with Armijo backtracking and
//! renormalizes. Both stop on the projected-gradient norm.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::acquisition::PlusMinusForm;
use crate::error::{Error, Result};
use crate::random::standard_normal;
use crate::scalar::Real;
use crate::seeding::rng_from;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SdpMethod {
    #[default]
    CoordinateAscent,
    GradientAscent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SdpConfig {
    pub method: SdpMethod,
    /// Stop once the projected-gradient Frobenius norm falls below this, or
    /// the certified gap falls below tol·(1 + |objective|).
    pub tol: f64,
    pub max_iterations: usize,
    /// Factor rank; `None` selects ⌈√(2n)⌉ for an n × n problem.
    pub rank: Option<usize>,
}

impl Default for SdpConfig {
    fn default() -> Self {
        Self {
            method: SdpMethod::CoordinateAscent,
            tol: 1e-6,
            max_iterations: 5000,
            rank: None,
        }
    }
}

pub fn default_rank(n: usize) -> usize {
    ((2.0 * n as f64).sqrt().ceil() as usize).clamp(1, n.max(1))
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T: Real = f64> {
    /// n × n factor; column i is the unit vector assigned to variable i.
    /// Rows past the working rank are zero.
    pub v: DMatrix<T>,
    /// Tr(BᵀZ) at Z = VᵀV.
    pub objective_value: T,
    /// Projected-gradient norm at termination.
    pub residual: T,
    /// Certified bound on the distance to the SDP optimum: with multipliers
    /// y_i = (BZ)_ii, Diag(y) − B + μI ⪰ 0 for μ = max(0, −λ_min), so the
    /// optimum is at most objective_value + nμ.
    pub gap: T,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Real> SdpSolution<T> {
    pub fn gram(&self) -> DMatrix<T> {
        self.v.tr_mul(&self.v)
    }

    /// objective_value + gap, an upper bound on the SDP optimum.
    pub fn upper_bound(&self) -> T {
        self.objective_value + self.gap
    }
}

fn objective<T: Real>(v: &DMatrix<T>, b: &DMatrix<T>) -> T {
    (v * b).component_mul(v).sum()
}

fn dual_gap<T: Real>(v: &DMatrix<T>, b: &DMatrix<T>) -> T {
    let n = b.nrows();
    let vb = v * b;
    let mut s = -b.clone();
    for i in 0..n {
        s[(i, i)] += vb.column(i).dot(&v.column(i));
    }
    let lmin = s.symmetric_eigenvalues().min();
    T::of(n as f64) * (-lmin).max(T::zero())
}

fn certified<T: Real>(f: T, gap: T, tol: T) -> bool {
    gap <= tol * (T::one() + f.abs())
}

fn normalize_columns<T: Real>(v: &mut DMatrix<T>) {
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        if norm > T::zero() {
            col /= norm;
        } else {
            col.fill(T::zero());
            col[0] = T::one();
        }
    }
}

/// Tangent-space projection of the Euclidean gradient 2VB.
fn riemannian_gradient<T: Real>(v: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let mut g = v * b * T::of(2.0);
    for (mut gc, vc) in g.column_iter_mut().zip(v.column_iter()) {
        let radial = gc.dot(&vc);
        gc.axpy(-radial, &vc, T::one());
    }
    g
}

fn gradient_ascent<T: Real>(
    v: &mut DMatrix<T>,
    b: &DMatrix<T>,
    tol: T,
    max_iterations: usize,
) -> (T, T, usize) {
    let armijo = T::of(1e-4);
    let b_norm = b.norm();
    let mut step = if b_norm > T::zero() {
        T::one() / (T::of(2.0) * b_norm)
    } else {
        T::one()
    };
    let min_step = T::of(1e-30);

    let mut f = objective(v, b);
    let mut grad = riemannian_gradient(v, b);
    let mut gnorm = grad.norm();
    let mut iterations = 0;
    while gnorm >= tol && iterations < max_iterations {
        iterations += 1;
        let g2 = gnorm * gnorm;
        loop {
            let mut trial = &*v + &grad * step;
            normalize_columns(&mut trial);
            let ft = objective(&trial, b);
            if ft >= f + armijo * step * g2 {
                *v = trial;
                f = ft;
                step *= T::of(2.0);
                break;
            }
            step *= T::of(0.5);
            if step < min_step {
                break;
            }
        }
        if step < min_step {
            // no ascent direction left at working precision
            break;
        }
        grad = riemannian_gradient(v, b);
        gnorm = grad.norm();
    }

    (f, gnorm, iterations)
}

/// One iteration is a full sweep over the columns.
fn coordinate_ascent<T: Real>(
    v: &mut DMatrix<T>,
    b: &DMatrix<T>,
    tol: T,
    max_iterations: usize,
) -> (T, T, usize) {
    let n = b.nrows();
    let mut gnorm = riemannian_gradient(v, b).norm();
    let mut iterations = 0;
    while gnorm >= tol && iterations < max_iterations {
        iterations += 1;
        for i in 0..n {
            let mut g = &*v * b.column(i);
            g.axpy(-b[(i, i)], &v.column(i), T::one());
            let norm = g.norm();
            if norm > T::zero() {
                v.set_column(i, &(g / norm));
            }
        }
        gnorm = riemannian_gradient(v, b).norm();
        // slow tails occur when the optimum is rank deficient; the dual
        // certificate usually settles them long before the gradient does
        if iterations % 25 == 0 && certified(objective(v, b), dual_gap(v, b), tol) {
            break;
        }
    }
    (objective(v, b), gnorm, iterations)
}

/// Solve to tolerance, reporting non-convergence through `converged` rather
/// than an error. The returned factor is always feasible.
pub fn sdp_solve_best_effort<T: Real>(
    pm: &PlusMinusForm<T>,
    config: &SdpConfig,
    seed: u64,
) -> Result<SdpSolution<T>> {
    if !(config.tol > 0.0) {
        return Err(Error::InvalidArgument(
            "SDP tolerance must be positive".into(),
        ));
    }
    crate::acquisition::quadratic::check_symmetric(&pm.b)?;
    let b = &pm.b;
    let n = b.nrows();
    let rank = config.rank.unwrap_or_else(|| default_rank(n)).clamp(1, n);

    let mut rng = rng_from(seed);
    let mut v = DMatrix::<T>::from_fn(rank, n, |_, _| standard_normal(&mut rng));
    normalize_columns(&mut v);

    let tol = T::of(config.tol);
    let (f, gnorm, iterations) = match config.method {
        SdpMethod::CoordinateAscent => coordinate_ascent(&mut v, b, tol, config.max_iterations),
        SdpMethod::GradientAscent => gradient_ascent(&mut v, b, tol, config.max_iterations),
    };

    let gap = dual_gap(&v, b);
    let mut padded = DMatrix::zeros(n, n);
    padded.view_mut((0, 0), (rank, n)).copy_from(&v);
    Ok(SdpSolution {
        v: padded,
        objective_value: f,
        residual: gnorm,
        gap,
        iterations,
        converged: gnorm < tol || certified(f, gap, tol),
    })
}

/// Solve to tolerance or fail with [`Error::NonConvergence`].
pub fn sdp_solve<T: Real>(
    pm: &PlusMinusForm<T>,
    config: &SdpConfig,
    seed: u64,
) -> Result<SdpSolution<T>> {
    let sol = sdp_solve_best_effort(pm, config, seed)?;
    if !sol.converged {
        return Err(Error::NonConvergence {
            iterations: sol.iterations,
            residual: sol.residual.as_f64(),
        });
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pm(b: DMatrix<f64>) -> PlusMinusForm<f64> {
        PlusMinusForm { b, constant: 0.0 }
    }

    #[test]
    fn aligned_pair() {
        let sol = sdp_solve(
            &pm(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])),
            &SdpConfig::default(),
            1,
        )
        .unwrap();
        assert!((sol.objective_value - 2.0).abs() < 1e-9);
        let z = sol.gram();
        assert!((z[(0, 1)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn diagonal_objective_is_its_trace() {
        let b = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 0.5, 2.0]));
        let sol = sdp_solve(&pm(b), &SdpConfig::default(), 2).unwrap();
        assert!((sol.objective_value - 4.5).abs() < 1e-12);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn columns_are_unit_norm_and_gram_is_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 9;
        let mut b = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.random_range(-1.0..1.0);
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        let sol = sdp_solve(&pm(b), &SdpConfig::default(), 3).unwrap();
        for c in sol.v.column_iter() {
            assert!((c.norm() - 1.0).abs() < 1e-6);
        }
        let eig = sol.gram().symmetric_eigenvalues();
        assert!(eig.iter().all(|&e| e > -1e-9));
    }

    #[test]
    fn both_methods_reach_the_same_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 7;
        for _ in 0..10 {
            let mut b = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in i + 1..n {
                    let v = rng.random_range(-1.0..1.0);
                    b[(i, j)] = v;
                    b[(j, i)] = v;
                }
            }
            let ca = sdp_solve_best_effort(&pm(b.clone()), &SdpConfig::default(), 1).unwrap();
            let cfg = SdpConfig {
                method: SdpMethod::GradientAscent,
                max_iterations: 20_000,
                ..Default::default()
            };
            let ga = sdp_solve_best_effort(&pm(b), &cfg, 2).unwrap();
            assert!(ca.converged);
            assert!(
                (ca.objective_value - ga.objective_value).abs() < 1e-5,
                "{} vs {}",
                ca.objective_value,
                ga.objective_value
            );
        }
    }

    #[test]
    fn relaxation_bounds_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 9; // d = 8 plus the homogenizing variable
        for _ in 0..20 {
            let mut b = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in i + 1..n {
                    let v = rng.random_range(-2.0..2.0);
                    b[(i, j)] = v;
                    b[(j, i)] = v;
                }
            }
            let sol = sdp_solve(&pm(b.clone()), &SdpConfig::default(), rng.random()).unwrap();
            // enumeration over z ∈ {−1,1}^9 (the z₀ sign is free here)
            let best = (0..1u32 << n)
                .map(|m| {
                    let z: Vec<f64> = (0..n)
                        .map(|i| if m >> i & 1 == 1 { 1.0 } else { -1.0 })
                        .collect();
                    let mut s = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            s += z[i] * b[(i, j)] * z[j];
                        }
                    }
                    s
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                sol.upper_bound() >= best - 1e-9,
                "{} < {}",
                sol.upper_bound(),
                best
            );
            assert!(sol.gap <= 1e-6 * (1.0 + sol.objective_value.abs()));
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let b = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, -2.0, 1.0, 0.0, 0.5, -2.0, 0.5, 0.0]);
        let a = sdp_solve(&pm(b.clone()), &SdpConfig::default(), 9).unwrap();
        let c = sdp_solve(&pm(b), &SdpConfig::default(), 9).unwrap();
        assert_eq!(a.v, c.v);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let b = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, -2.0, 1.0, 0.0, 0.5, -2.0, 0.5, 0.0]);
        let cfg = SdpConfig {
            tol: 1e-14,
            max_iterations: 1,
            ..Default::default()
        };
        assert!(matches!(
            sdp_solve(&pm(b.clone()), &cfg, 1),
            Err(Error::NonConvergence { .. })
        ));
        let partial = sdp_solve_best_effort(&pm(b), &cfg, 1).unwrap();
        assert!(!partial.converged);
        assert_eq!(partial.iterations, 1);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let b = DMatrix::<f64>::zeros(2, 2);
        let cfg = SdpConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(sdp_solve(&pm(b), &cfg, 0).is_err());
    }
}
