//! The optimization loop for model-based optimizers and the budgeted
//! baselines, plus replication orchestration.

use std::time::Instant;

use bocs_core::acquisition::{acquire_sa, acquire_sdp, default_sa_proposals, Penalty};
use bocs_core::benchmarks::{Optimum, Problem, Sense, ENUMERATION_LIMIT};
use bocs_core::search::{oblivious_local_search, random_search, simulated_annealing, SearchBudget};
use bocs_core::seeding::{rng_from, substream, tag};
use bocs_core::surrogate::{mle_fit, CoefficientDraw, Dataset, MonomialBasis, SurrogatePosterior};
use bocs_core::BinaryPoint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, OptimizerKind, OptimizerSpec};
use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    /// Shared initial design of the model-based optimizers.
    Initial,
    /// Uncounted burn-in evaluations granted to baselines.
    Free,
    /// Budgeted evaluations.
    Search,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// 1-based evaluation count.
    pub evaluation: usize,
    pub phase: Phase,
    pub x: BinaryPoint,
    /// Observed value in the benchmark's own sense, penalty included.
    pub value: f64,
    /// Best observed value so far in the benchmark's sense.
    pub best: f64,
}

/// Wall-clock split of one evaluation, in seconds. Only iterations of the
/// model-based loop have a model and acquisition part.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub model: f64,
    pub acquisition: f64,
    pub evaluation: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSeeds {
    pub master: u64,
    pub instance: u64,
    pub initial: u64,
    pub optimizer: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: String,
    pub benchmark: String,
    pub optimizer: String,
    pub instance: usize,
    pub replication: usize,
    pub sense: Sense,
    pub lambda: f64,
    pub n0: usize,
    pub n_max: usize,
    /// Exact optimum in the benchmark's sense when the instance is enumerable.
    pub optimum: Option<f64>,
    pub seeds: RunSeeds,
    pub spec: OptimizerSpec,
    pub rows: Vec<Row>,
    /// Best evaluated point and its observed value.
    pub final_point: BinaryPoint,
    pub final_value: f64,
    /// Kept out of the serialized trace so reruns are byte-identical.
    #[serde(skip)]
    pub timings: Vec<Timing>,
}

impl RunRecord {
    pub fn best_curve(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.best).collect()
    }
}

/// Shared context of one (instance, replication) pair.
pub struct RunContext<'a> {
    pub experiment: String,
    pub problem: &'a Problem,
    pub instance: usize,
    pub replication: usize,
    pub master_seed: u64,
    pub instance_seed: u64,
    pub n0: usize,
    pub n_max: usize,
}

impl RunContext<'_> {
    pub fn initial_seed(&self) -> u64 {
        substream(
            self.master_seed,
            &[
                tag("initial"),
                self.instance as u64,
                self.replication as u64,
            ],
        )
    }

    pub fn optimizer_seed(&self, label: &str) -> u64 {
        substream(
            self.master_seed,
            &[
                tag("optimizer"),
                tag(label),
                self.instance as u64,
                self.replication as u64,
            ],
        )
    }
}

/// N0 uniform points and their observations, identical for every
/// model-based optimizer of a replication.
pub struct InitialDesign {
    pub points: Vec<BinaryPoint>,
    pub observations: Vec<bocs_core::benchmarks::Observation>,
}

pub fn initial_design(ctx: &RunContext) -> Result<InitialDesign> {
    let seed = ctx.initial_seed();
    let mut rng = rng_from(substream(seed, &[tag("points")]));
    let d = ctx.problem.dim();
    let points: Vec<BinaryPoint> = (0..ctx.n0)
        .map(|_| BinaryPoint::random(d, &mut rng))
        .collect();
    let observations = points
        .iter()
        .enumerate()
        .map(|(k, x)| {
            ctx.problem
                .observe(x, substream(seed, &[tag("eval"), k as u64]))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(InitialDesign {
        points,
        observations,
    })
}

struct Recorder {
    sense: Sense,
    rows: Vec<Row>,
    timings: Vec<Timing>,
    best_index: Option<usize>,
}

impl Recorder {
    fn new(sense: Sense, capacity: usize) -> Self {
        Self {
            sense,
            rows: Vec::with_capacity(capacity),
            timings: Vec::with_capacity(capacity),
            best_index: None,
        }
    }

    fn push(&mut self, phase: Phase, x: BinaryPoint, value: f64, timing: Timing) {
        let improves = match self.best_index {
            None => true,
            Some(b) => self.sense.to_max(value) > self.sense.to_max(self.rows[b].value),
        };
        if improves {
            self.best_index = Some(self.rows.len());
        }
        let best = self
            .rows
            .get(self.best_index.unwrap_or(0))
            .map_or(value, |r| r.value);
        let best = if improves { value } else { best };
        self.rows.push(Row {
            evaluation: self.rows.len() + 1,
            phase,
            x,
            value,
            best,
        });
        self.timings.push(timing);
    }

    fn finish(self, ctx: &RunContext, spec: &OptimizerSpec, seeds: RunSeeds) -> RunRecord {
        let b = self.best_index.expect("at least one evaluation");
        RunRecord {
            experiment: ctx.experiment.clone(),
            benchmark: ctx.problem.name().to_string(),
            optimizer: spec.label(),
            instance: ctx.instance,
            replication: ctx.replication,
            sense: ctx.problem.sense(),
            lambda: ctx.problem.lambda(),
            n0: ctx.n0,
            n_max: ctx.n_max,
            optimum: ctx.problem.optimum().map(|o| o.value),
            seeds,
            spec: spec.clone(),
            final_point: self.rows[b].x.clone(),
            final_value: self.rows[b].value,
            rows: self.rows,
            timings: self.timings,
        }
    }
}

enum Model {
    Horseshoe {
        chain: SurrogatePosterior<f64>,
        burn_in: usize,
        sweeps: usize,
        burned: bool,
    },
    Mle,
}

impl Model {
    fn draw(&mut self, data: &Dataset<f64>) -> Result<CoefficientDraw<f64>> {
        match self {
            Model::Horseshoe {
                chain,
                burn_in,
                sweeps,
                burned,
            } => {
                if !*burned {
                    for _ in 0..*burn_in {
                        chain.gibbs_sweep(data)?;
                    }
                    *burned = true;
                }
                Ok(chain.draw_coefficients(data, *sweeps)?)
            }
            Model::Mle => Ok(CoefficientDraw {
                alpha: mle_fit(data),
                sigma2: 0.0,
                basis: data.basis().clone(),
            }),
        }
    }
}

/// Algorithm loop of BOCS-SDP, BOCS-SA and MLE-SA: draw a model, acquire,
/// evaluate, append. Duplicate suggestions are evaluated and charged.
pub fn run_bocs(
    ctx: &RunContext,
    spec: &OptimizerSpec,
    initial: &InitialDesign,
) -> Result<RunRecord> {
    let label = spec.label();
    let seed = ctx.optimizer_seed(&label);
    let problem = ctx.problem;
    let sense = problem.sense();
    let d = problem.dim();
    let order = spec
        .kind
        .order()
        .ok_or_else(|| HarnessError::Config(format!("{label} is not a model-based optimizer")))?;
    let basis = MonomialBasis::new(d, order)?;
    let lambda = problem.lambda();

    let mut data = Dataset::<f64>::new(basis.clone());
    let mut rec = Recorder::new(sense, ctx.n_max);
    for (x, obs) in initial.points.iter().zip(&initial.observations) {
        data.push(x.clone(), obs.model_target(sense))?;
        rec.push(Phase::Initial, x.clone(), obs.value, Timing::default());
    }

    let mut model = match &spec.kind {
        OptimizerKind::BocsSdp {
            burn_in, sweeps, ..
        }
        | OptimizerKind::BocsSa {
            burn_in, sweeps, ..
        } => Model::Horseshoe {
            chain: SurrogatePosterior::new(basis.len(), substream(seed, &[tag("chain")])),
            burn_in: *burn_in,
            sweeps: *sweeps,
            burned: false,
        },
        OptimizerKind::MleSa { .. } => Model::Mle,
        _ => unreachable!("order() is Some only for model-based optimizers"),
    };

    for t in 0..ctx.n_max - ctx.n0 {
        let acq_seed = substream(seed, &[tag("acquire"), t as u64]);
        let start = Instant::now();
        let draw = model.draw(&data)?;
        let modeled = Instant::now();
        let x = match &spec.kind {
            OptimizerKind::BocsSdp {
                penalty,
                acquisition,
                ..
            } => acquire_sdp(
                &draw,
                &Penalty::new(*penalty, lambda)?,
                acquisition,
                acq_seed,
            )?,
            OptimizerKind::BocsSa {
                penalty,
                proposals,
                schedule,
                ..
            }
            | OptimizerKind::MleSa {
                penalty,
                proposals,
                schedule,
                ..
            } => acquire_sa(
                &draw,
                &Penalty::new(*penalty, lambda)?,
                proposals.unwrap_or_else(|| default_sa_proposals(d)),
                schedule,
                acq_seed,
            )?,
            _ => unreachable!(),
        };
        let acquired = Instant::now();
        let obs = problem.observe(&x, substream(seed, &[tag("eval"), t as u64]))?;
        let evaluated = Instant::now();
        data.push(x.clone(), obs.model_target(sense))?;
        let timing = Timing {
            model: (modeled - start).as_secs_f64(),
            acquisition: (acquired - modeled).as_secs_f64(),
            evaluation: (evaluated - acquired).as_secs_f64(),
            total: (evaluated - start).as_secs_f64(),
        };
        rec.push(Phase::Search, x, obs.value, timing);
    }
    let seeds = RunSeeds {
        master: ctx.master_seed,
        instance: ctx.instance_seed,
        initial: ctx.initial_seed(),
        optimizer: seed,
    };
    Ok(rec.finish(ctx, spec, seeds))
}

/// SA, OLS or RS with N0 free evaluations followed by n_max − n0 counted
/// ones; the searcher sees a single budget of n_max calls.
pub fn run_baseline(ctx: &RunContext, spec: &OptimizerSpec) -> Result<RunRecord> {
    let label = spec.label();
    let seed = ctx.optimizer_seed(&label);
    let problem = ctx.problem;
    let sense = problem.sense();
    let d = problem.dim();
    let budget = SearchBudget::charged(ctx.n_max);
    let mut calls = 0u64;
    let mut timings = Vec::with_capacity(ctx.n_max);
    let objective = |x: &BinaryPoint| {
        let start = Instant::now();
        let v = problem.evaluate(x, substream(seed, &[tag("eval"), calls]));
        calls += 1;
        let e = start.elapsed().as_secs_f64();
        timings.push(Timing {
            evaluation: e,
            total: e,
            ..Timing::default()
        });
        v.map(|v| sense.to_max(v))
    };
    let search_seed = substream(seed, &[tag("search")]);
    let result = match &spec.kind {
        OptimizerKind::Sa { schedule } => {
            simulated_annealing(objective, d, budget, schedule, search_seed)?
        }
        OptimizerKind::Ols {} => oblivious_local_search(objective, d, budget, search_seed)?,
        OptimizerKind::Rs {} => random_search(objective, d, budget, search_seed)?,
        _ => return Err(HarnessError::Config(format!("{label} is not a baseline"))),
    };
    let mut rec = Recorder::new(sense, ctx.n_max);
    for ((k, e), timing) in result.trace.into_iter().enumerate().zip(timings) {
        let phase = if k < ctx.n0 {
            Phase::Free
        } else {
            Phase::Search
        };
        rec.push(phase, e.point, sense.from_max(e.value), timing);
    }
    let seeds = RunSeeds {
        master: ctx.master_seed,
        instance: ctx.instance_seed,
        initial: ctx.initial_seed(),
        optimizer: seed,
    };
    Ok(rec.finish(ctx, spec, seeds))
}

/// Every optimizer of the config on one (instance, replication) pair.
pub fn run_replication(
    cfg: &ExperimentConfig,
    problems: &[Problem],
    instance: usize,
    replication: usize,
) -> Result<Vec<RunRecord>> {
    let ctx = RunContext {
        experiment: cfg.name(),
        problem: &problems[instance],
        instance,
        replication,
        master_seed: cfg.seed,
        instance_seed: cfg.instance_seed(instance),
        n0: cfg.n0,
        n_max: cfg.n_max,
    };
    let needs_initial = cfg.optimizers.iter().any(|o| o.kind.is_model_based());
    let initial = if needs_initial {
        Some(initial_design(&ctx)?)
    } else {
        None
    };
    cfg.optimizers
        .iter()
        .map(|spec| {
            if spec.kind.is_model_based() {
                run_bocs(&ctx, spec, initial.as_ref().expect("built above"))
            } else {
                run_baseline(&ctx, spec)
            }
        })
        .collect()
}

/// All instances × replications, in parallel. Records are ordered by
/// (instance, replication, optimizer) whatever the scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let problems = cfg.problems()?;
    let tasks: Vec<(usize, usize)> = (0..problems.len())
        .flat_map(|i| (0..cfg.replications).map(move |r| (i, r)))
        .collect();
    let per_task: Vec<Result<Vec<RunRecord>>> = tasks
        .par_iter()
        .map(|&(i, r)| run_replication(cfg, &problems, i, r))
        .collect();
    let mut records = Vec::new();
    for r in per_task {
        records.extend(r?);
    }
    Ok(records)
}

/// Exhaustive optimum of a deterministic problem with at most
/// [`ENUMERATION_LIMIT`] variables, in the problem's own sense.
pub fn brute_force(problem: &Problem) -> Result<Optimum> {
    let d = problem.dim();
    if problem.is_stochastic() {
        return Err(HarnessError::Config(format!(
            "{} is stochastic; no exact oracle",
            problem.name()
        )));
    }
    if d > ENUMERATION_LIMIT {
        return Err(HarnessError::Config(format!(
            "{} has d = {d}; enumeration is limited to d ≤ {ENUMERATION_LIMIT}",
            problem.name()
        )));
    }
    if let Problem::Bqp(b) = problem {
        return Ok(b.enumerate_optimum());
    }
    let sense = problem.sense();
    let mut best: Option<Optimum> = None;
    for i in 0..1u64 << d {
        let x = BinaryPoint::from_index(i, d);
        let value = problem.evaluate(&x, 0)?;
        if best
            .as_ref()
            .map_or(true, |b| sense.to_max(value) > sense.to_max(b.value))
        {
            best = Some(Optimum { value, point: x });
        }
    }
    Ok(best.expect("2^d ≥ 1 points"))
}
