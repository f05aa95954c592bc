//! Experiment grid configuration read from JSON.
//!
//! Every key is optional; missing keys take the defaults below and unknown
//! keys are rejected. The base constellation defaults to 5 orbits of 5
//! satellites with one permanent and one temporary link pair per neighbor
//! orbit, bandwidths up to 3 and 2, and the grid sweeps 3, 5, 7 and 9
//! commodities over 4, 6, 8, 10 and 12 steps with 5 trials each.

use serde::{Deserialize, Serialize};

use crate::constellation::ConstellationConfig;
use crate::error::InputError;
use crate::joint::{DemandMode, JointParams, JointStrategy};
use crate::mcf::RoutingMode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DemandPolicy {
    /// Every commodity demands the same amount.
    Fixed(f64),
    /// Integer demands drawn uniformly from `lo..=hi`.
    Uniform { lo: u32, hi: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPolicy {
    /// Distinct ordered source-sink pairs, sampled without replacement.
    #[default]
    UniformDistinct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
    pub flow_epsilon: f64,
    pub strategy: JointStrategy,
    pub node_limit: usize,
    pub exact_binary_limit: usize,
    /// Node budget of the per-step support-minimal flow search. Zero keeps
    /// the weighted relaxation and its reweighting rounds but skips
    /// branching, which on full-size steps costs far more than it saves.
    pub canonical_node_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        let joint = JointParams::default();
        SolverOptions {
            big_m: joint.big_m,
            flow_epsilon: joint.flow_epsilon,
            strategy: joint.strategy,
            node_limit: joint.node_limit,
            exact_binary_limit: joint.exact_binary_limit,
            canonical_node_limit: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentGrid {
    /// Constellation shared by every cell. Its `t` and `seed` are replaced
    /// per cell by the grid's step count and the derived cell seed.
    pub base: ConstellationConfig,
    pub k_values: Vec<usize>,
    pub t_values: Vec<usize>,
    pub trials: usize,
    /// Defaults to a fixed demand equal to the base `b_p`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demand_policy: Option<DemandPolicy>,
    pub pair_policy: PairPolicy,
    pub demand_mode: DemandMode,
    pub routing_mode: RoutingMode,
    pub master_seed: u64,
    /// Fill the `runtime_ms` column. Off by default so output is
    /// byte-identical across runs.
    pub record_runtime: bool,
    pub solver: SolverOptions,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        ExperimentGrid {
            base: ConstellationConfig::default(),
            k_values: vec![3, 5, 7, 9],
            t_values: vec![4, 6, 8, 10, 12],
            trials: 5,
            demand_policy: None,
            pair_policy: PairPolicy::UniformDistinct,
            demand_mode: DemandMode::PerGraph,
            routing_mode: RoutingMode::Splittable,
            master_seed: 0,
            record_runtime: false,
            solver: SolverOptions::default(),
        }
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> InputError {
    InputError::Invalid { key: key.to_string(), reason: reason.into() }
}

impl ExperimentGrid {
    pub fn demand_policy(&self) -> DemandPolicy {
        self.demand_policy.unwrap_or(DemandPolicy::Fixed(f64::from(self.base.max_permanent_bw)))
    }

    pub fn max_demand(&self) -> f64 {
        match self.demand_policy() {
            DemandPolicy::Fixed(v) => v,
            DemandPolicy::Uniform { hi, .. } => f64::from(hi),
        }
    }

    pub fn joint_params(&self) -> JointParams {
        JointParams {
            big_m: self.solver.big_m,
            flow_epsilon: self.solver.flow_epsilon,
            demand_mode: self.demand_mode,
            routing_mode: self.routing_mode,
            strategy: self.solver.strategy,
            node_limit: self.solver.node_limit,
            exact_binary_limit: self.solver.exact_binary_limit,
        }
    }

    pub fn validate(&self) -> Result<(), InputError> {
        // `t` is overridden per cell, so only the other base fields matter.
        let base = ConstellationConfig { steps: 1, ..self.base.clone() };
        base.validate().map_err(|e| InputError::nested("base", e))?;
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.k_values.is_empty() {
            return Err(invalid("k_values", "must not be empty"));
        }
        if self.t_values.is_empty() {
            return Err(invalid("t_values", "must not be empty"));
        }
        if self.t_values.iter().any(|&t| t == 0 || t > 10_000) {
            return Err(invalid("t_values", "every entry must lie in 1..=10000"));
        }
        let nodes = base.num_nodes();
        let pairs = nodes * nodes.saturating_sub(1);
        if let Some(&k) = self.k_values.iter().find(|&&k| k == 0 || k > pairs) {
            return Err(invalid("k_values", format!("{k} is outside 1..={pairs} (distinct ordered node pairs)")));
        }
        match self.demand_policy() {
            DemandPolicy::Fixed(v) if !(v.is_finite() && v > 0.0) => {
                return Err(invalid("demand_policy", "fixed demand must be positive and finite"))
            }
            DemandPolicy::Uniform { lo, hi } if lo == 0 || lo > hi => {
                return Err(invalid("demand_policy", "uniform demand needs 1 <= lo <= hi"))
            }
            _ => {}
        }
        let solver = &self.solver;
        if !(solver.flow_epsilon > 0.0 && solver.flow_epsilon <= 1e-3) {
            return Err(invalid("solver.flow_epsilon", "must lie in (0, 0.001]"));
        }
        if let Some(m) = solver.big_m {
            let k_max = *self.k_values.iter().max().unwrap_or(&0) as f64;
            let floor = 1.0 + k_max * self.max_demand();
            if !(m.is_finite() && m >= floor) {
                return Err(invalid("solver.big_m", format!("must be at least 1 + k * max demand = {floor}")));
            }
        }
        if solver.node_limit == 0 {
            return Err(invalid("solver.node_limit", "must be at least 1"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("grid serializes");
        text.push('\n');
        text
    }
}

/// Parses and validates a grid document.
pub fn parse_config(text: &str) -> Result<ExperimentGrid, InputError> {
    let grid: ExperimentGrid = serde_json::from_str(text)?;
    grid.validate()?;
    Ok(grid)
}
