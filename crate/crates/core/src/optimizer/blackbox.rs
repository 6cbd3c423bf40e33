use serde::Serialize;

use super::SearchVariableMap;
use crate::coverage::eval_constraints;
use crate::estimator::{estimate_objective, EstimatorConfig};
use crate::scenario::Scenario;
use crate::Result;

/// What a solver learns about one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlackBoxResult {
    /// `+∞` when the objective cannot be evaluated at this point.
    pub objective: f64,
    /// Positive entries are violations.
    pub constraints: Vec<f64>,
    pub feasible: bool,
}

impl BlackBoxResult {
    pub fn new(objective: f64, constraints: Vec<f64>) -> BlackBoxResult {
        let feasible = constraints.iter().all(|&c| c <= 0.0) && objective.is_finite();
        BlackBoxResult {
            objective,
            constraints,
            feasible,
        }
    }

    /// Aggregate violation `Σ max(0, c)²`.
    pub fn violation(&self) -> f64 {
        self.constraints.iter().map(|&c| c.max(0.0).powi(2)).sum()
    }
}

/// The function seen by the solvers.
///
/// `eval_index` identifies the call for seeding; `precision` scales the
/// estimator's relative accuracy (1 normal, smaller is tighter).
pub trait BlackBox: Sync {
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &[f64], eval_index: u64, precision: f64) -> Result<BlackBoxResult>;
}

/// SplitMix64 finalizer, used to derive per-evaluation seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Objective estimate plus placement constraints of a scenario.
#[derive(Debug, Clone)]
pub struct ScenarioBlackBox<'a> {
    pub scenario: &'a Scenario,
    pub map: SearchVariableMap,
    pub estimator: EstimatorConfig,
}

impl<'a> ScenarioBlackBox<'a> {
    pub fn new(scenario: &'a Scenario, estimator: EstimatorConfig) -> Self {
        ScenarioBlackBox {
            scenario,
            map: SearchVariableMap::new(scenario),
            estimator,
        }
    }
}

impl BlackBox for ScenarioBlackBox<'_> {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn evaluate(&self, x: &[f64], eval_index: u64, precision: f64) -> Result<BlackBoxResult> {
        let d = self.map.unflatten(x)?;
        let constraints = eval_constraints(&d, self.scenario)?.values();
        // outside every cost zone the placement cost, hence the objective, is undefined
        if self.scenario.placement_cost(&d).is_err() {
            return Ok(BlackBoxResult::new(f64::INFINITY, constraints));
        }
        let cfg = EstimatorConfig {
            eps: (self.estimator.eps * precision).clamp(f64::MIN_POSITIVE, 0.999),
            seed: mix_seed(self.estimator.seed, eval_index),
            ..self.estimator
        };
        let e = estimate_objective(&d, self.scenario, &cfg)?;
        Ok(BlackBoxResult::new(e.total, constraints))
    }
}

/// Evaluates a deployment as the solvers see it.
pub fn black_box(
    d: &crate::scenario::Deployment,
    sc: &Scenario,
    cfg: &EstimatorConfig,
    eval_index: u64,
) -> Result<BlackBoxResult> {
    let bb = ScenarioBlackBox::new(sc, *cfg);
    bb.evaluate(&bb.map.flatten(d)?, eval_index, 1.0)
}
