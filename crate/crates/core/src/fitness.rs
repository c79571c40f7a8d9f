//! Shaped weighted-sum fitness over (response time, maintenance cost, memory).
//!
//! ```text
//! fitness = w1 * rt / rt_norm + w2 * mc / mc_norm + w3 * sigmoid((mem - x0) / scale)
//! ```
//!
//! Lower is better. Infeasible configurations pay an additive penalty
//! proportional to their fractional constraint overrun.

use serde::{Deserialize, Serialize};

use crate::encoding::Chromosome;
use crate::error::{invalid_param, Result};
use crate::workload::{Constraints, Workload};

/// Raw objective triple for one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    pub response_time: f64,
    pub maintenance_cost: f64,
    pub memory_usage: f64,
}

impl Objectives {
    /// Response time plus maintenance cost; storage is a constraint, not a cost.
    pub fn total_cost(&self) -> f64 {
        self.response_time + self.maintenance_cost
    }
}

/// Direction of the memory sigmoid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmoidOrientation {
    /// `1 / (1 + exp(-(mem - x0) / scale))`: grows with memory, so memory is penalized.
    #[default]
    Increasing,
    /// `1 / (1 + exp((mem - x0) / scale))`: the textbook form as usually
    /// written, which shrinks as memory grows. Kept for comparison runs; with
    /// `scale = 1` it is the unscaled expression verbatim.
    Literal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessParams {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub max_response_time_norm: f64,
    pub max_maintenance_cost_norm: f64,
    /// Sigmoid center, bytes.
    pub x0: f64,
    /// Sigmoid width, bytes.
    pub sigmoid_scale: f64,
    pub penalty_coefficient: f64,
    #[serde(default)]
    pub sigmoid_orientation: SigmoidOrientation,
}

pub const DEFAULT_WEIGHTS: (f64, f64, f64) = (0.5, 0.2, 0.3);
pub const DEFAULT_PENALTY: f64 = 10.0;

impl FitnessParams {
    /// Default weights, workload-derived normalizers, `x0 = budget`,
    /// `scale = budget / 10`.
    pub fn for_workload(w: &Workload) -> Self {
        FitnessSettings::default()
            .resolve(w)
            .expect("default fitness settings are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(invalid_param(format!(
                    "{name} must be a non-negative real, got {v}"
                )))
            }
        };
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid_param(format!("{name} must be positive, got {v}")))
            }
        };
        nonneg("w1", self.w1)?;
        nonneg("w2", self.w2)?;
        nonneg("w3", self.w3)?;
        if self.w1 + self.w2 + self.w3 <= 0.0 {
            return Err(invalid_param(
                "at least one fitness weight must be positive",
            ));
        }
        pos("max_response_time_norm", self.max_response_time_norm)?;
        pos("max_maintenance_cost_norm", self.max_maintenance_cost_norm)?;
        pos("sigmoid_scale", self.sigmoid_scale)?;
        pos("penalty_coefficient", self.penalty_coefficient)?;
        if !self.x0.is_finite() {
            return Err(invalid_param(format!("x0 must be finite, got {}", self.x0)));
        }
        Ok(())
    }
}

/// Fitness settings as written in a run-config file. Unset fields fall back
/// to defaults, some of which depend on the workload.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitnessSettings {
    pub w1: Option<f64>,
    pub w2: Option<f64>,
    pub w3: Option<f64>,
    pub max_response_time_norm: Option<f64>,
    pub max_maintenance_cost_norm: Option<f64>,
    pub x0: Option<f64>,
    pub sigmoid_scale: Option<f64>,
    pub penalty_coefficient: Option<f64>,
    pub sigmoid_orientation: Option<SigmoidOrientation>,
}

impl FitnessSettings {
    pub fn resolve(&self, w: &Workload) -> Result<FitnessParams> {
        let (rt_norm, mc_norm) = default_normalizers(w);
        let budget = w.constraints.storage_budget;
        let params = FitnessParams {
            w1: self.w1.unwrap_or(DEFAULT_WEIGHTS.0),
            w2: self.w2.unwrap_or(DEFAULT_WEIGHTS.1),
            w3: self.w3.unwrap_or(DEFAULT_WEIGHTS.2),
            max_response_time_norm: self.max_response_time_norm.unwrap_or(rt_norm),
            max_maintenance_cost_norm: self.max_maintenance_cost_norm.unwrap_or(mc_norm),
            x0: self.x0.unwrap_or(budget),
            sigmoid_scale: self.sigmoid_scale.unwrap_or(budget / 10.0),
            penalty_coefficient: self.penalty_coefficient.unwrap_or(DEFAULT_PENALTY),
            sigmoid_orientation: self.sigmoid_orientation.unwrap_or_default(),
        };
        params.validate()?;
        Ok(params)
    }
}

/// `(response time of the empty configuration, maintenance cost of the full
/// configuration)`, each clamped to 1.0 when zero.
pub fn default_normalizers(w: &Workload) -> (f64, f64) {
    let rt: f64 = w.queries.iter().map(|q| q.weight * q.base_cost).sum();
    let mc: f64 = w.views.iter().map(|v| v.maintenance_cost).sum();
    let clamp = |x: f64| if x > 0.0 { x } else { 1.0 };
    (clamp(rt), clamp(mc))
}

/// Logistic function without overflow for large `|z|`.
pub fn stable_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn shape_response(rt: f64, params: &FitnessParams) -> f64 {
    rt / params.max_response_time_norm
}

pub fn shape_maintenance(mc: f64, params: &FitnessParams) -> f64 {
    mc / params.max_maintenance_cost_norm
}

pub fn shape_memory(mem: f64, params: &FitnessParams) -> f64 {
    let z = (mem - params.x0) / params.sigmoid_scale;
    match params.sigmoid_orientation {
        SigmoidOrientation::Increasing => stable_sigmoid(z),
        SigmoidOrientation::Literal => stable_sigmoid(-z),
    }
}

/// The three shaped terms `(f1, f2, f3)` before weighting.
pub fn shaped_terms(obj: &Objectives, params: &FitnessParams) -> (f64, f64, f64) {
    (
        shape_response(obj.response_time, params),
        shape_maintenance(obj.maintenance_cost, params),
        shape_memory(obj.memory_usage, params),
    )
}

/// Sum of fractional overruns; zero iff every constraint holds.
pub fn constraint_violation(obj: &Objectives, constraints: &Constraints) -> f64 {
    let budget = constraints.storage_budget;
    let mut v = ((obj.memory_usage - budget) / budget).max(0.0);
    if let Some(cap) = constraints.max_response_time {
        v += ((obj.response_time - cap) / cap).max(0.0);
    }
    v
}

/// Penalized fitness and feasibility.
pub fn fitness(obj: &Objectives, params: &FitnessParams, constraints: &Constraints) -> (f64, bool) {
    let (f1, f2, f3) = shaped_terms(obj, params);
    let base = params.w1 * f1 + params.w2 * f2 + params.w3 * f3;
    if constraints.admits(obj) {
        (base, true)
    } else {
        let penalty = params.penalty_coefficient * constraint_violation(obj, constraints);
        (base + penalty, false)
    }
}

/// A scored configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedIndividual {
    pub chromosome: Chromosome,
    pub objectives: Objectives,
    /// Unweighted cost of each query; these are the lexicase test cases.
    pub per_query_costs: Vec<f64>,
    pub fitness: f64,
    pub feasible: bool,
}

/// Binds a workload to resolved fitness parameters.
#[derive(Clone, Debug)]
pub struct Evaluator<'w> {
    workload: &'w Workload,
    params: FitnessParams,
}

impl<'w> Evaluator<'w> {
    pub fn new(workload: &'w Workload, params: FitnessParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { workload, params })
    }

    pub fn workload(&self) -> &'w Workload {
        self.workload
    }

    pub fn params(&self) -> &FitnessParams {
        &self.params
    }

    pub fn evaluate(&self, chromosome: &Chromosome) -> Result<EvaluatedIndividual> {
        let per_query_costs = self.workload.per_query_costs(chromosome)?;
        let objectives = self
            .workload
            .objectives_from_costs(chromosome, &per_query_costs);
        let (fitness, feasible) = fitness(&objectives, &self.params, &self.workload.constraints);
        Ok(EvaluatedIndividual {
            chromosome: chromosome.clone(),
            objectives,
            per_query_costs,
            fitness,
            feasible,
        })
    }
}
