use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::BinaryPoint;
use crate::scalar::Real;
use crate::surrogate::CoefficientDraw;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyKind {
    #[default]
    L1,
    L2Squared,
    None,
}

/// λ·P(x) with P the l1 norm or the squared l2 norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    pub kind: PenaltyKind,
    pub lambda: f64,
}

impl Penalty {
    pub fn new(kind: PenaltyKind, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "penalty weight {lambda} must be non-negative"
            )));
        }
        Ok(Self { kind, lambda })
    }

    pub fn l1(lambda: f64) -> Self {
        Self {
            kind: PenaltyKind::L1,
            lambda,
        }
    }

    pub fn none() -> Self {
        Self {
            kind: PenaltyKind::None,
            lambda: 0.0,
        }
    }

    /// Weight added to each linear coefficient. On {0,1}^d, ‖x‖₂² = ‖x‖₁.
    pub fn linear_weight(&self) -> f64 {
        match self.kind {
            PenaltyKind::None => 0.0,
            PenaltyKind::L1 | PenaltyKind::L2Squared => self.lambda,
        }
    }

    pub fn value(&self, x: &BinaryPoint) -> f64 {
        self.linear_weight() * x.count_ones() as f64
    }
}

/// value(x) = xᵀAx + bᵀx + constant, to be maximized over {0,1}^d.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadObjective<T: Real = f64> {
    pub a: DMatrix<T>,
    pub b: DVector<T>,
    pub constant: T,
}

pub(crate) fn check_symmetric<T: Real>(m: &DMatrix<T>) -> Result<()> {
    let n = m.nrows();
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(m[(i, j)].as_f64().abs());
            if j > i {
                worst = worst.max((m[(i, j)] - m[(j, i)]).as_f64().abs());
            }
        }
    }
    if worst > 1e-12 * scale {
        return Err(Error::Asymmetric { asymmetry: worst });
    }
    Ok(())
}

impl<T: Real> QuadObjective<T> {
    pub fn new(a: DMatrix<T>, b: DVector<T>, constant: T) -> Result<Self> {
        if !a.is_square() || a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: b.len(),
                found: a.nrows(),
            });
        }
        check_symmetric(&a)?;
        Ok(Self { a, b, constant })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn value(&self, x: &BinaryPoint) -> T {
        let bits = x.bits();
        let mut v = self.constant;
        for i in 0..bits.len() {
            if bits[i] == 0 {
                continue;
            }
            v += self.b[i];
            for j in 0..bits.len() {
                if bits[j] == 1 {
                    v += self.a[(i, j)];
                }
            }
        }
        v
    }
}

/// Quadratic acquisition subproblem for a second-order coefficient draw:
/// maximize f_α(x) − λP(x).
pub fn build_quadratic<T: Real>(
    draw: &CoefficientDraw<T>,
    penalty: &Penalty,
) -> Result<QuadObjective<T>> {
    let basis = &draw.basis;
    if basis.order() != 2 {
        return Err(Error::OrderMismatch {
            expected: 2,
            found: basis.order(),
        });
    }
    let d = basis.dim();
    let lambda = T::of(penalty.linear_weight());
    let half = T::of(0.5);
    let mut a = DMatrix::zeros(d, d);
    let mut b = DVector::zeros(d);
    let mut constant = T::zero();
    for (term, &coef) in basis.terms().iter().zip(draw.alpha.iter()) {
        match term.as_slice() {
            [] => constant = coef,
            [i] => b[*i] = coef - lambda,
            [i, j] => {
                a[(*i, *j)] = coef * half;
                a[(*j, *i)] = coef * half;
            }
            _ => unreachable!("order-2 basis"),
        }
    }
    Ok(QuadObjective { a, b, constant })
}

/// The subproblem over z = [y, y₀] ∈ {−1,1}^{d+1} with y = 2x − 1:
/// value(x) = zᵀBz + constant whenever y₀ = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PlusMinusForm<T: Real = f64> {
    pub b: DMatrix<T>,
    pub constant: T,
}

impl<T: Real> PlusMinusForm<T> {
    /// Number of original binary variables (one less than the size of B).
    pub fn dim(&self) -> usize {
        self.b.nrows() - 1
    }

    pub fn value(&self, z: &[T]) -> T {
        let n = self.b.nrows();
        let mut v = self.constant;
        for i in 0..n {
            for j in 0..n {
                v += z[i] * self.b[(i, j)] * z[j];
            }
        }
        v
    }

    /// z = [2x − 1, 1].
    pub fn lift(x: &BinaryPoint) -> Vec<T> {
        x.bits()
            .iter()
            .map(|&b| if b == 1 { T::one() } else { -T::one() })
            .chain(std::iter::once(T::one()))
            .collect()
    }
}

/// B = [[A/4, c], [cᵀ, 0]] with c = b/4 + A1/4, and the constant
/// const + 1ᵀA1/4 + bᵀ1/2 that makes the two forms agree exactly.
pub fn to_plus_minus<T: Real>(q: &QuadObjective<T>) -> Result<PlusMinusForm<T>> {
    check_symmetric(&q.a)?;
    let d = q.dim();
    let quarter = T::of(0.25);
    let row_sums = DVector::from_iterator(d, q.a.row_iter().map(|r| r.sum()));
    let c = (&q.b + &row_sums) * quarter;
    let mut b = DMatrix::zeros(d + 1, d + 1);
    b.view_mut((0, 0), (d, d)).copy_from(&(&q.a * quarter));
    for i in 0..d {
        b[(i, d)] = c[i];
        b[(d, i)] = c[i];
    }
    let constant = q.constant + row_sums.sum() * quarter + q.b.sum() * T::of(0.5);
    Ok(PlusMinusForm { b, constant })
}
