//! Declarative experiment files (TOML).

use std::path::{Path, PathBuf};

use bocs_core::acquisition::{PenaltyKind, SdpAcquisitionConfig};
use bocs_core::benchmarks::{BqpInstance, ContaminationInstance, IsingInstance, Problem, Rate};
use bocs_core::search::AnnealSchedule;
use bocs_core::seeding::{substream, tag};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

fn default_replications() -> usize {
    1
}
fn default_instances() -> usize {
    1
}
fn default_order() -> usize {
    2
}
fn default_burn_in() -> usize {
    100
}
fn default_sweeps() -> usize {
    5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub n0: usize,
    pub n_max: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Iterations (counted after the initial design) reported in the summary.
    /// Defaults to 100 and n_max − n0.
    #[serde(default)]
    pub report_at: Vec<usize>,
    pub benchmark: BenchmarkSpec,
    pub optimizers: Vec<OptimizerSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BenchmarkSpec {
    Bqp {
        d: usize,
        lc: f64,
        lambda: f64,
        #[serde(default = "default_instances")]
        instances: usize,
    },
    Ising {
        lambda: f64,
        #[serde(default = "default_instances")]
        instances: usize,
    },
    Contamination {
        #[serde(default = "ContaminationSpec::default_d")]
        d: usize,
        #[serde(default = "ContaminationSpec::default_trajectories")]
        trajectories: usize,
        lambda: f64,
        #[serde(default = "default_instances")]
        instances: usize,
        #[serde(default)]
        model: ContaminationSpec,
    },
    /// Instances previously written by `bench-gen`, one JSON file each.
    Files { paths: Vec<PathBuf> },
}

/// Contamination parameters other than size; defaults match
/// [`ContaminationInstance::new`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContaminationSpec {
    pub cost: f64,
    pub limit: f64,
    pub epsilon: f64,
    pub rho: f64,
    pub initial: Rate,
    pub growth: Rate,
    pub prevention: Rate,
    /// One fixed set of Monte Carlo trajectories per instance.
    pub common_random_numbers: bool,
}

impl ContaminationSpec {
    fn default_d() -> usize {
        25
    }
    fn default_trajectories() -> usize {
        100
    }
}

impl Default for ContaminationSpec {
    fn default() -> Self {
        let c = ContaminationInstance::default();
        Self {
            cost: 1.0,
            limit: c.limit,
            epsilon: c.epsilon,
            rho: c.rho,
            initial: c.initial,
            growth: c.growth,
            prevention: c.prevention,
            common_random_numbers: c.common_random_numbers,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerSpec {
    /// Label used in outputs and for seed namespacing; defaults to the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub kind: OptimizerKind,
}

// serde's flatten disables unknown-field checks, so `name` is split off by hand
impl<'de> Deserialize<'de> for OptimizerSpec {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let mut value = serde_json::Value::deserialize(deserializer)?;
        let table = value
            .as_object_mut()
            .ok_or_else(|| D::Error::custom("optimizer entry must be a table"))?;
        let name = match table.remove("name") {
            None | Some(serde_json::Value::Null) => None,
            Some(serde_json::Value::String(s)) => Some(s),
            Some(_) => return Err(D::Error::custom("optimizer name must be a string")),
        };
        let kind = OptimizerKind::deserialize(value).map_err(D::Error::custom)?;
        Ok(Self { name, kind })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OptimizerKind {
    BocsSdp {
        #[serde(default = "default_burn_in")]
        burn_in: usize,
        #[serde(default = "default_sweeps")]
        sweeps: usize,
        #[serde(default)]
        penalty: PenaltyKind,
        #[serde(default)]
        acquisition: SdpAcquisitionConfig,
    },
    BocsSa {
        #[serde(default = "default_order")]
        order: usize,
        #[serde(default = "default_burn_in")]
        burn_in: usize,
        #[serde(default = "default_sweeps")]
        sweeps: usize,
        #[serde(default)]
        penalty: PenaltyKind,
        #[serde(default)]
        proposals: Option<usize>,
        #[serde(default)]
        schedule: AnnealSchedule,
    },
    MleSa {
        #[serde(default = "default_order")]
        order: usize,
        #[serde(default)]
        penalty: PenaltyKind,
        #[serde(default)]
        proposals: Option<usize>,
        #[serde(default)]
        schedule: AnnealSchedule,
    },
    Sa {
        #[serde(default)]
        schedule: AnnealSchedule,
    },
    Ols {},
    Rs {},
}

impl OptimizerKind {
    pub fn label(&self) -> &'static str {
        match self {
            OptimizerKind::BocsSdp { .. } => "bocs-sdp",
            OptimizerKind::BocsSa { .. } => "bocs-sa",
            OptimizerKind::MleSa { .. } => "mle-sa",
            OptimizerKind::Sa { .. } => "sa",
            OptimizerKind::Ols {} => "ols",
            OptimizerKind::Rs {} => "rs",
        }
    }

    pub fn is_model_based(&self) -> bool {
        matches!(
            self,
            OptimizerKind::BocsSdp { .. }
                | OptimizerKind::BocsSa { .. }
                | OptimizerKind::MleSa { .. }
        )
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            OptimizerKind::BocsSdp { .. } => Some(2),
            OptimizerKind::BocsSa { order, .. } | OptimizerKind::MleSa { order, .. } => {
                Some(*order)
            }
            _ => None,
        }
    }
}

impl OptimizerSpec {
    pub fn new(kind: OptimizerKind) -> Self {
        Self { name: None, kind }
    }

    pub fn named(name: &str, kind: OptimizerKind) -> Self {
        Self {
            name: Some(name.to_string()),
            kind,
        }
    }

    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.kind.label().to_string())
    }

    /// The optimizer with every hyperparameter at its default.
    pub fn default_for(label: &str) -> Option<Self> {
        let kind = match label {
            "bocs-sdp" => OptimizerKind::BocsSdp {
                burn_in: default_burn_in(),
                sweeps: default_sweeps(),
                penalty: PenaltyKind::default(),
                acquisition: SdpAcquisitionConfig::default(),
            },
            "bocs-sa" => OptimizerKind::BocsSa {
                order: 2,
                burn_in: default_burn_in(),
                sweeps: default_sweeps(),
                penalty: PenaltyKind::default(),
                proposals: None,
                schedule: AnnealSchedule::default(),
            },
            "mle-sa" => OptimizerKind::MleSa {
                order: 2,
                penalty: PenaltyKind::default(),
                proposals: None,
                schedule: AnnealSchedule::default(),
            },
            "sa" => OptimizerKind::Sa {
                schedule: AnnealSchedule::default(),
            },
            "ols" => OptimizerKind::Ols {},
            "rs" => OptimizerKind::Rs {},
            _ => return None,
        };
        Some(Self::new(kind))
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| "experiment".into())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.n0 >= self.n_max {
            return bad(format!(
                "n0 ({}) must be below n_max ({})",
                self.n0, self.n_max
            ));
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.optimizers.is_empty() {
            return bad("no optimizers configured".into());
        }
        let mut labels: Vec<String> = self.optimizers.iter().map(|o| o.label()).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return bad(format!(
                "duplicate optimizer label '{}'; set distinct names",
                w[0]
            ));
        }
        for o in &self.optimizers {
            let order = o.kind.order();
            if order == Some(0) {
                return bad(format!("{}: model order must be at least 1", o.label()));
            }
            if o.kind.is_model_based() && self.n0 == 0 {
                return bad(format!("{}: model-based optimizers need n0 ≥ 1", o.label()));
            }
            match &o.kind {
                OptimizerKind::BocsSdp { sweeps, .. } | OptimizerKind::BocsSa { sweeps, .. }
                    if *sweeps == 0 =>
                {
                    return bad(format!("{}: sweeps must be at least 1", o.label()));
                }
                _ => {}
            }
        }
        match &self.benchmark {
            BenchmarkSpec::Bqp {
                d,
                lc,
                lambda,
                instances,
            } => {
                if *d == 0 || !(*lc > 0.0) || !(*lambda >= 0.0) || *instances == 0 {
                    return bad("bqp needs d ≥ 1, lc > 0, lambda ≥ 0, instances ≥ 1".into());
                }
            }
            BenchmarkSpec::Ising { lambda, instances } => {
                if !(*lambda >= 0.0) || *instances == 0 {
                    return bad("ising needs lambda ≥ 0 and instances ≥ 1".into());
                }
            }
            BenchmarkSpec::Contamination {
                d,
                trajectories,
                lambda,
                instances,
                ..
            } => {
                if *d == 0 || *trajectories == 0 || !(*lambda >= 0.0) || *instances == 0 {
                    return bad(
                        "contamination needs d ≥ 1, trajectories ≥ 1, lambda ≥ 0, instances ≥ 1"
                            .into(),
                    );
                }
            }
            BenchmarkSpec::Files { paths } => {
                if paths.is_empty() {
                    return bad("files benchmark lists no paths".into());
                }
            }
        }
        Ok(())
    }

    pub fn report_iterations(&self) -> Vec<usize> {
        let horizon = self.n_max - self.n0;
        let mut its = if self.report_at.is_empty() {
            vec![100.min(horizon), horizon]
        } else {
            self.report_at.iter().map(|&t| t.min(horizon)).collect()
        };
        its.sort_unstable();
        its.dedup();
        its
    }

    pub fn instance_seed(&self, index: usize) -> u64 {
        substream(self.seed, &[tag("instance"), index as u64])
    }

    /// Build every benchmark instance described by the config.
    pub fn problems(&self) -> Result<Vec<Problem>> {
        match &self.benchmark {
            BenchmarkSpec::Bqp {
                d,
                lc,
                lambda,
                instances,
            } => (0..*instances)
                .map(|i| {
                    Ok(Problem::Bqp(BqpInstance::generate(
                        *d,
                        *lc,
                        *lambda,
                        self.instance_seed(i),
                    )?))
                })
                .collect(),
            BenchmarkSpec::Ising { lambda, instances } => Ok((0..*instances)
                .map(|i| Problem::Ising {
                    instance: IsingInstance::generate(self.instance_seed(i)),
                    lambda: *lambda,
                })
                .collect()),
            BenchmarkSpec::Contamination {
                d,
                trajectories,
                lambda,
                instances,
                model,
            } => (0..*instances)
                .map(|i| {
                    let instance = ContaminationInstance {
                        d: *d,
                        trajectories: *trajectories,
                        costs: vec![model.cost; *d],
                        limit: model.limit,
                        epsilon: model.epsilon,
                        rho: model.rho,
                        initial: model.initial,
                        growth: model.growth,
                        prevention: model.prevention,
                        seed: self.instance_seed(i),
                        common_random_numbers: model.common_random_numbers,
                    };
                    instance.validate()?;
                    Ok(Problem::Contamination {
                        instance,
                        lambda: *lambda,
                    })
                })
                .collect(),
            BenchmarkSpec::Files { paths } => paths.iter().map(|p| load_problem(p)).collect(),
        }
    }
}

pub fn load_problem(path: &Path) -> Result<Problem> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}
