//! Budgeted black-box maximizers over {0,1}^d.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::BinaryPoint;
use crate::scalar::Real;
use crate::seeding::rng_from;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Accounting {
    /// Every objective call, the start point included, counts toward the budget.
    #[default]
    Charged,
    /// Only proposals count; the start point is free. Used when the objective is a
    /// surrogate.
    SurrogateOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub evaluations: usize,
    #[serde(default)]
    pub accounting: Accounting,
}

impl SearchBudget {
    pub fn charged(evaluations: usize) -> Self {
        Self {
            evaluations,
            accounting: Accounting::Charged,
        }
    }

    pub fn surrogate(evaluations: usize) -> Self {
        Self {
            evaluations,
            accounting: Accounting::SurrogateOnly,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.evaluations == 0 {
            return Err(Error::InvalidArgument(
                "search budget must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Objective calls the budget allows.
    pub fn calls(&self) -> usize {
        match self.accounting {
            Accounting::Charged => self.evaluations,
            Accounting::SurrogateOnly => self.evaluations + 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealSchedule {
    pub t0: f64,
    pub t_final: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            t0: 1.0,
            t_final: 1e-3,
        }
    }
}

impl AnnealSchedule {
    pub fn new(t0: f64, t_final: f64) -> Result<Self> {
        let s = Self { t0, t_final };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0 && self.t0 >= self.t_final && self.t0.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "annealing schedule needs t0 >= t_final > 0, got t0 = {}, t_final = {}",
                self.t0, self.t_final
            )));
        }
        Ok(())
    }

    /// Geometric cooling ratio reaching `t_final` after `steps` steps.
    pub fn ratio(&self, steps: usize) -> f64 {
        if steps == 0 {
            return 1.0;
        }
        (self.t_final / self.t0).powf(1.0 / steps as f64)
    }

    /// Temperature at step t (1-based) out of `steps`.
    pub fn temperature(&self, t: usize, steps: usize) -> f64 {
        self.t0 * self.ratio(steps).powi(t as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation<T = f64> {
    pub point: BinaryPoint,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult<T = f64> {
    pub best_point: BinaryPoint,
    pub best_value: T,
    /// Every objective call in order.
    pub trace: Vec<Evaluation<T>>,
}

impl<T: Real> SearchResult<T> {
    /// Running maximum over the trace.
    pub fn running_best(&self) -> Vec<T> {
        let mut best: Option<T> = None;
        self.trace
            .iter()
            .map(|e| {
                let b = match best {
                    Some(b) if b >= e.value => b,
                    _ => e.value,
                };
                best = Some(b);
                b
            })
            .collect()
    }
}

/// Records every call and the first point attaining the best value.
struct Recorder<T, F> {
    objective: F,
    trace: Vec<Evaluation<T>>,
    best: Option<usize>,
    limit: usize,
}

impl<T: Real, F: FnMut(&BinaryPoint) -> Result<T>> Recorder<T, F> {
    fn new(objective: F, limit: usize) -> Self {
        Self {
            objective,
            trace: Vec::with_capacity(limit),
            best: None,
            limit,
        }
    }

    fn exhausted(&self) -> bool {
        self.trace.len() >= self.limit
    }

    fn eval(&mut self, x: &BinaryPoint) -> Result<T> {
        debug_assert!(!self.exhausted());
        let value = (self.objective)(x)?;
        if self.best.map_or(true, |b| value > self.trace[b].value) {
            self.best = Some(self.trace.len());
        }
        self.trace.push(Evaluation {
            point: x.clone(),
            value,
        });
        Ok(value)
    }

    fn finish(self) -> SearchResult<T> {
        let b = self.best.expect("at least one evaluation");
        SearchResult {
            best_point: self.trace[b].point.clone(),
            best_value: self.trace[b].value,
            trace: self.trace,
        }
    }
}

/// Metropolis rule for a maximizer: improvements and ties always pass,
/// a loss `delta < 0` passes with probability exp(delta / temperature).
pub fn accept_move<R: Rng + ?Sized>(delta: f64, temperature: f64, rng: &mut R) -> bool {
    if delta >= 0.0 {
        return true;
    }
    let p = (delta / temperature).exp();
    rng.random::<f64>() < p
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidArgument(
            "search dimension must be positive".into(),
        ));
    }
    Ok(())
}

/// Simulated annealing from a uniform random start with uniform single-bit
/// flip proposals and geometric cooling over the proposal count.
pub fn simulated_annealing<T, F>(
    objective: F,
    d: usize,
    budget: SearchBudget,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<SearchResult<T>>
where
    T: Real,
    F: FnMut(&BinaryPoint) -> Result<T>,
{
    check_dim(d)?;
    budget.validate()?;
    schedule.validate()?;
    let mut rng = rng_from(seed);
    let mut rec = Recorder::new(objective, budget.calls());

    let mut current = BinaryPoint::random(d, &mut rng);
    let mut current_value = rec.eval(&current)?;
    let proposals = rec.limit - 1;
    let gamma = schedule.ratio(proposals);
    let mut temperature = schedule.t0;
    while !rec.exhausted() {
        temperature *= gamma;
        let i = rng.random_range(0..d);
        let candidate = current.flipped(i);
        let value = rec.eval(&candidate)?;
        if accept_move((value - current_value).as_f64(), temperature, &mut rng) {
            current = candidate;
            current_value = value;
        }
    }
    Ok(rec.finish())
}

/// Steepest-ascent local search over the full Hamming-1 neighbourhood,
/// restarting from a fresh random point at each local optimum until the
/// budget is spent.
pub fn oblivious_local_search<T, F>(
    objective: F,
    d: usize,
    budget: SearchBudget,
    seed: u64,
) -> Result<SearchResult<T>>
where
    T: Real,
    F: FnMut(&BinaryPoint) -> Result<T>,
{
    check_dim(d)?;
    budget.validate()?;
    let mut rng = rng_from(seed);
    let mut rec = Recorder::new(objective, budget.calls());

    'restart: while !rec.exhausted() {
        let mut current = BinaryPoint::random(d, &mut rng);
        let mut current_value = rec.eval(&current)?;
        loop {
            let mut best: Option<(usize, T)> = None;
            for i in 0..d {
                if rec.exhausted() {
                    break 'restart;
                }
                let v = rec.eval(&current.flipped(i))?;
                if best.map_or(true, |(_, bv)| v > bv) {
                    best = Some((i, v));
                }
            }
            match best {
                Some((i, v)) if v > current_value => {
                    current.flip(i);
                    current_value = v;
                }
                _ => continue 'restart,
            }
        }
    }
    Ok(rec.finish())
}

/// I.i.d. uniform points.
pub fn random_search<T, F>(
    objective: F,
    d: usize,
    budget: SearchBudget,
    seed: u64,
) -> Result<SearchResult<T>>
where
    T: Real,
    F: FnMut(&BinaryPoint) -> Result<T>,
{
    check_dim(d)?;
    budget.validate()?;
    let mut rng = rng_from(seed);
    let mut rec = Recorder::new(objective, budget.calls());
    while !rec.exhausted() {
        let x = BinaryPoint::random(d, &mut rng);
        rec.eval(&x)?;
    }
    Ok(rec.finish())
}
