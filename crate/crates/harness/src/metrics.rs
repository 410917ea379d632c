//! Regret and best-value curves and their replication summaries.

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::runner::RunRecord;

/// |opt − running best| per evaluation.
pub fn simple_regret(record: &RunRecord, optimum: f64) -> Vec<f64> {
    record
        .rows
        .iter()
        .map(|r| (optimum - r.best).abs())
        .collect()
}

/// Regret against the record's own stored optimum.
pub fn regret_curve(record: &RunRecord) -> Result<Vec<f64>> {
    let opt = record.optimum.ok_or_else(|| {
        HarnessError::Config(format!(
            "{}: no known optimum; use best-value curves",
            record.benchmark
        ))
    })?;
    Ok(simple_regret(record, opt))
}

/// Row index of iteration `t` counted after the initial design; t = 0 is the
/// best of the initial data.
pub fn row_at(record: &RunRecord, t: usize) -> usize {
    (record.n0 + t).clamp(1, record.rows.len()) - 1
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    /// Standard error of the mean: sample SD / √n; zero for n < 2.
    pub se: f64,
    pub n: usize,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                se: f64::NAN,
                n,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = if n < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        Self { mean, se, n }
    }

    pub fn lower(&self) -> f64 {
        self.mean - 2.0 * self.se
    }

    pub fn upper(&self) -> f64 {
        self.mean + 2.0 * self.se
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    SimpleRegret,
    BestValue,
}

impl Statistic {
    /// Regret when every record has an optimum, best value otherwise.
    pub fn for_records(records: &[&RunRecord]) -> Self {
        if !records.is_empty() && records.iter().all(|r| r.optimum.is_some()) {
            Statistic::SimpleRegret
        } else {
            Statistic::BestValue
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistic::SimpleRegret => "simple-regret",
            Statistic::BestValue => "best-value",
        }
    }

    pub fn curve(self, record: &RunRecord) -> Vec<f64> {
        match self {
            Statistic::SimpleRegret => simple_regret(record, record.optimum.unwrap_or(f64::NAN)),
            Statistic::BestValue => record.best_curve(),
        }
    }
}

/// Records grouped by (benchmark, λ, optimizer), in first-seen order.
pub fn group<'a>(records: &'a [RunRecord]) -> Vec<((String, f64, String), Vec<&'a RunRecord>)> {
    let mut groups: Vec<((String, f64, String), Vec<&RunRecord>)> = Vec::new();
    for r in records {
        let key = (r.benchmark.clone(), r.lambda, r.optimizer.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
}

/// Mean ± SE of a statistic at every evaluation, across records.
pub fn band(records: &[&RunRecord], stat: Statistic) -> Vec<MeanSe> {
    let curves: Vec<Vec<f64>> = records.iter().map(|r| stat.curve(r)).collect();
    let len = curves.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|k| MeanSe::of(&curves.iter().map(|c| c[k]).collect::<Vec<_>>()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub benchmark: String,
    pub lambda: f64,
    pub optimizer: String,
    pub statistic: Statistic,
    pub iteration: usize,
    pub mean: f64,
    pub se: f64,
    pub replications: usize,
}

/// One row per group and reported iteration; replications and instances are
/// pooled.
pub fn summarize(records: &[RunRecord], iterations: &[usize]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for ((benchmark, lambda, optimizer), group) in group(records) {
        let stat = Statistic::for_records(&group);
        for &t in iterations {
            let values: Vec<f64> = group.iter().map(|r| stat.curve(r)[row_at(r, t)]).collect();
            let m = MeanSe::of(&values);
            rows.push(SummaryRow {
                benchmark: benchmark.clone(),
                lambda,
                optimizer: optimizer.clone(),
                statistic: stat,
                iteration: t,
                mean: m.mean,
                se: m.se,
                replications: m.n,
            });
        }
    }
    rows
}
