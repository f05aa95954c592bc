//! One edge support reused across every step of a network.
//!
//! The joint model carries per-step copies of the flow model and one binary
//! indicator per commodity and edge. When the indicator is set the edge must
//! carry at least `flow_epsilon` of that commodity at every step; when it is
//! clear the edge carries nothing at any step. The objective maximizes the
//! smallest fraction `epsilon` of each step's maximum throughput that the
//! shared support still delivers.
//!
//! [`solve_epsilon`] either hands the whole model to branch-and-bound
//! ([`JointStrategy::Exact`]) or, for splittable per-step demand, solves it
//! by decomposition ([`JointStrategy::Decomposed`]): the LP relaxation of the
//! joint model separates into one max-flow per step on the edges that are up
//! at every step, which gives an upper bound on epsilon, and the union of
//! those per-step supports is then evaluated exactly. The reported
//! `upper_bound` shows how far from proven optimal the answer is.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constellation::TimeVaryingNetwork;
use crate::error::{Error, Result};
use crate::lp::{
    solve_lp, solve_milp_with, Direction, LinearProgram, LpError, MilpOptions, Sense, Status, VarId, VarKind,
};
use crate::mcf::{
    add_balance_rows, add_path_rows, build_flow_model, link_flow_to_path, max_throughput_with, validate_commodities,
    Commodity, RoutingMode, SUPPORT_THRESHOLD,
};

/// Steps whose maximum throughput is at or below this are treated as
/// disconnected and place no bound on epsilon.
pub const ZERO_THROUGHPUT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemandMode {
    /// Each step may deliver up to the full demand.
    #[default]
    PerGraph,
    /// Deliveries summed over all steps stay within the demand.
    Aggregate,
}

impl FromStr for DemandMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "per_graph" => Ok(DemandMode::PerGraph),
            "aggregate" => Ok(DemandMode::Aggregate),
            _ => Err(format!("unknown demand mode `{s}` (expected per_graph or aggregate)")),
        }
    }
}

impl fmt::Display for DemandMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DemandMode::PerGraph => "per_graph",
            DemandMode::Aggregate => "aggregate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointStrategy {
    /// Exact for small models and for modes decomposition cannot handle.
    #[default]
    Auto,
    Exact,
    Decomposed,
}

impl FromStr for JointStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(JointStrategy::Auto),
            "exact" => Ok(JointStrategy::Exact),
            "decomposed" => Ok(JointStrategy::Decomposed),
            _ => Err(format!("unknown strategy `{s}` (expected auto, exact or decomposed)")),
        }
    }
}

impl fmt::Display for JointStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JointStrategy::Auto => "auto",
            JointStrategy::Exact => "exact",
            JointStrategy::Decomposed => "decomposed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JointParams {
    /// Defaults to `1 + total demand`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
    pub flow_epsilon: f64,
    pub demand_mode: DemandMode,
    pub routing_mode: RoutingMode,
    pub strategy: JointStrategy,
    /// Branch-and-bound node budget for exact solves.
    pub node_limit: usize,
    /// `Auto` solves exactly when the model has at most this many free binaries.
    pub exact_binary_limit: usize,
}

impl Default for JointParams {
    fn default() -> Self {
        JointParams {
            big_m: None,
            flow_epsilon: 1e-6,
            demand_mode: DemandMode::PerGraph,
            routing_mode: RoutingMode::Splittable,
            strategy: JointStrategy::Auto,
            node_limit: 200_000,
            exact_binary_limit: 24,
        }
    }
}

impl JointParams {
    pub fn big_m_for(&self, commodities: &[Commodity]) -> f64 {
        self.big_m.unwrap_or_else(|| 1.0 + commodities.iter().map(|c| c.demand).sum::<f64>())
    }

    pub fn validate(&self, commodities: &[Commodity]) -> Result<()> {
        if !(self.flow_epsilon > 0.0 && self.flow_epsilon <= 1e-3) {
            return Err(Error::invalid("flow_epsilon", "must lie in (0, 0.001]"));
        }
        let floor = 1.0 + commodities.iter().map(|c| c.demand).sum::<f64>();
        let m = self.big_m_for(commodities);
        if !m.is_finite() || m < floor {
            return Err(Error::invalid("big_m", format!("must be finite and at least 1 + total demand = {floor}")));
        }
        if self.node_limit == 0 {
            return Err(Error::invalid("node_limit", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct JointModel {
    pub lp: LinearProgram,
    /// `flow[j][i][e]`, present only for edges up at every step.
    pub flow: Vec<Vec<Vec<Option<VarId>>>>,
    pub delivered: Vec<Vec<VarId>>,
    /// `indicator[i][e]`, fixed to zero off the common support.
    pub indicator: Vec<Vec<VarId>>,
    pub epsilon: VarId,
}

pub fn build_joint(
    network: &TimeVaryingNetwork,
    commodities: &[Commodity],
    max_tp: &[f64],
    params: &JointParams,
) -> Result<JointModel> {
    let steps = network.num_steps();
    if steps == 0 {
        return Err(Error::invalid("steps", "need at least one step"));
    }
    if max_tp.len() != steps {
        return Err(Error::invalid("max_tp", format!("expected {steps} entries, got {}", max_tp.len())));
    }
    if max_tp.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid("max_tp", "entries must be finite and nonnegative"));
    }
    validate_commodities(network.num_nodes(), commodities)?;
    params.validate(commodities)?;
    let big_m = params.big_m_for(commodities);
    let shared = shared_mask(network);

    let mut lp = LinearProgram::new(Direction::Maximize);
    let indicator: Vec<Vec<VarId>> = (0..commodities.len())
        .map(|i| {
            network
                .links
                .iter()
                .zip(&shared)
                .map(|(l, &ok)| {
                    lp.add_var(format!("use_{i}_{}_{}", l.u, l.v), 0.0, f64::from(u8::from(ok)), VarKind::Binary)
                })
                .collect()
        })
        .collect();
    let epsilon = lp.add_continuous("epsilon", 0.0, 1.0);

    let mut flow = Vec::with_capacity(steps);
    let mut delivered = Vec::with_capacity(steps);
    for j in 0..steps {
        let caps = &network.capacities[j];
        let mut step_flow = Vec::with_capacity(commodities.len());
        let mut step_delivered = Vec::with_capacity(commodities.len());
        for (i, c) in commodities.iter().enumerate() {
            step_flow.push(
                network
                    .links
                    .iter()
                    .enumerate()
                    .map(|(e, l)| {
                        shared[e].then(|| {
                            lp.add_continuous(
                                format!("flow_{j}_{i}_{}_{}", l.u, l.v),
                                0.0,
                                f64::from(caps[e]).min(c.demand),
                            )
                        })
                    })
                    .collect::<Vec<_>>(),
            );
            step_delivered.push(lp.add_continuous(format!("delivered_{j}_{i}"), 0.0, c.demand));
        }
        flow.push(step_flow);
        delivered.push(step_delivered);
    }

    for j in 0..steps {
        let graph = network.step_graph(j);
        for (e, l) in network.links.iter().enumerate() {
            let terms: Vec<(VarId, f64)> = flow[j].iter().filter_map(|f| f[e]).map(|x| (x, 1.0)).collect();
            if !terms.is_empty() {
                lp.add_constraint(format!("cap_{j}_{}_{}", l.u, l.v), terms, Sense::Le, graph.caps[e]);
            }
        }
        for (i, c) in commodities.iter().enumerate() {
            add_balance_rows(&mut lp, &graph, &format!("bal_{j}_{i}"), &flow[j][i], c, delivered[j][i]);
        }
        for i in 0..commodities.len() {
            for (e, l) in network.links.iter().enumerate() {
                let Some(f) = flow[j][i][e] else { continue };
                let d = indicator[i][e];
                let tag = format!("{j}_{i}_{}_{}", l.u, l.v);
                lp.add_constraint(format!("on_{tag}"), vec![(f, 1.0), (d, -big_m)], Sense::Le, 0.0);
                lp.add_constraint(
                    format!("min_{tag}"),
                    vec![(f, 1.0), (d, -big_m)],
                    Sense::Ge,
                    params.flow_epsilon - big_m,
                );
            }
        }
        if max_tp[j] > ZERO_THROUGHPUT {
            let mut terms: Vec<(VarId, f64)> = delivered[j].iter().map(|&d| (d, 1.0)).collect();
            terms.push((epsilon, -max_tp[j]));
            lp.add_constraint(format!("ratio_{j}"), terms, Sense::Ge, 0.0);
        }
    }

    if params.demand_mode == DemandMode::Aggregate {
        for (i, c) in commodities.iter().enumerate() {
            let terms = (0..steps).map(|j| (delivered[j][i], 1.0)).collect();
            lp.add_constraint(format!("demand_{i}"), terms, Sense::Le, c.demand);
        }
    }

    if params.routing_mode == RoutingMode::SinglePath {
        let structure = network.step_graph(0);
        for (i, c) in commodities.iter().enumerate() {
            let uses: Vec<Option<VarId>> = indicator[i].iter().zip(&shared).map(|(&d, &ok)| ok.then_some(d)).collect();
            let route = lp.add_binary(format!("route_{i}"));
            add_path_rows(&mut lp, &structure, i, &uses, c, route);
            for j in 0..steps {
                for (e, l) in network.links.iter().enumerate() {
                    let Some(f) = flow[j][i][e] else { continue };
                    let tag = format!("{j}_{i}_{}_{}", l.u, l.v);
                    link_flow_to_path(&mut lp, &tag, f, indicator[i][e], delivered[j][i], c.demand);
                }
                lp.add_constraint(
                    format!("reach_{j}_{i}"),
                    vec![(delivered[j][i], 1.0), (route, -c.demand)],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }

    lp.set_objective(vec![(epsilon, 1.0)]);
    Ok(JointModel { lp, flow, delivered, indicator, epsilon })
}

fn shared_mask(network: &TimeVaryingNetwork) -> Vec<bool> {
    let mut mask = vec![false; network.num_edges()];
    for e in network.common_support_indices() {
        mask[e] = true;
    }
    mask
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonResult {
    pub epsilon: f64,
    /// Proven upper bound on the optimal epsilon. Equal to `epsilon` when
    /// the answer is proven optimal.
    pub upper_bound: f64,
    /// Strategy that produced the answer (never `Auto`).
    pub strategy: JointStrategy,
    pub arcs: Vec<(usize, usize)>,
    pub max_tp: Vec<f64>,
    /// Total delivered throughput per step.
    pub achieved: Vec<f64>,
    /// `achieved / max_tp`, absent for disconnected steps.
    pub ratios: Vec<Option<f64>>,
    pub min_ratio: f64,
    /// `flows[j][i][e]`.
    pub flows: Vec<Vec<Vec<f64>>>,
    /// `delivered[j][i]`.
    pub delivered: Vec<Vec<f64>>,
    /// Shared support edge indices per commodity.
    pub support: Vec<Vec<usize>>,
    /// Indicator values `indicators[i][e]`.
    pub indicators: Vec<Vec<f64>>,
}

impl EpsilonResult {
    pub fn is_proven_optimal(&self) -> bool {
        self.upper_bound - self.epsilon <= 1e-9
    }

    /// Re-checks the result invariants: epsilon in [0, 1], every step
    /// between `epsilon * max_tp` and `max_tp`, `min_ratio >= epsilon`, and
    /// the same per-commodity edge support at every step.
    pub fn check(&self, flow_epsilon: f64) -> std::result::Result<(), String> {
        const SLACK: f64 = 1e-8;
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(format!("epsilon {} outside [0, 1]", self.epsilon));
        }
        for (j, (&a, &tp)) in self.achieved.iter().zip(&self.max_tp).enumerate() {
            let slack = SLACK * (1.0 + tp);
            if a < self.epsilon * tp - slack || a > tp + slack {
                return Err(format!("step {j}: achieved {a} outside [{}, {tp}]", self.epsilon * tp));
            }
        }
        if self.min_ratio < self.epsilon - SLACK {
            return Err(format!("min ratio {} below epsilon {}", self.min_ratio, self.epsilon));
        }
        let threshold = flow_epsilon / 2.0;
        for i in 0..self.support.len() {
            let first: Vec<bool> = self.flows[0][i].iter().map(|&f| f > threshold).collect();
            for (j, step) in self.flows.iter().enumerate().skip(1) {
                if step[i].iter().map(|&f| f > threshold).ne(first.iter().copied()) {
                    return Err(format!("commodity {i}: support at step {j} differs from step 0"));
                }
            }
        }
        Ok(())
    }

    /// Support edges of commodity `i` as `(u, v)` pairs.
    pub fn support_edges(&self, i: usize) -> Vec<(usize, usize)> {
        self.support[i].iter().map(|&e| self.arcs[e]).collect()
    }
}

/// Per-step maximum throughputs under the given routing mode.
pub fn step_max_throughputs(
    network: &TimeVaryingNetwork,
    commodities: &[Commodity],
    mode: RoutingMode,
) -> Result<Vec<f64>> {
    (0..network.num_steps())
        .into_par_iter()
        .map(|j| max_throughput_with(&network.step_graph(j), commodities, mode))
        .collect()
}

pub fn solve_epsilon(
    network: &TimeVaryingNetwork,
    commodities: &[Commodity],
    params: &JointParams,
) -> Result<EpsilonResult> {
    validate_commodities(network.num_nodes(), commodities)?;
    params.validate(commodities)?;
    let max_tp = step_max_throughputs(network, commodities, params.routing_mode)?;
    solve_epsilon_with_max_tp(network, commodities, &max_tp, params)
}

/// As [`solve_epsilon`] with the per-step maximum throughputs supplied.
pub fn solve_epsilon_with_max_tp(
    network: &TimeVaryingNetwork,
    commodities: &[Commodity],
    max_tp: &[f64],
    params: &JointParams,
) -> Result<EpsilonResult> {
    let steps = network.num_steps();
    if max_tp.len() != steps {
        return Err(Error::invalid("max_tp", format!("expected {steps} entries, got {}", max_tp.len())));
    }
    validate_commodities(network.num_nodes(), commodities)?;
    params.validate(commodities)?;
    if max_tp.iter().all(|&v| v <= ZERO_THROUGHPUT) {
        let flows = vec![vec![vec![0.0; network.num_edges()]; commodities.len()]; steps];
        return Ok(assemble(
            network,
            commodities,
            max_tp,
            flows,
            1.0,
            1.0,
            JointStrategy::Exact,
            params.flow_epsilon / 2.0,
        ));
    }

    let decomposable = params.demand_mode == DemandMode::PerGraph && params.routing_mode == RoutingMode::Splittable;
    let free_binaries = commodities.len() * network.common_support_indices().len();
    let strategy = match params.strategy {
        JointStrategy::Auto if decomposable && free_binaries > params.exact_binary_limit => JointStrategy::Decomposed,
        JointStrategy::Auto => JointStrategy::Exact,
        s => s,
    };
    match strategy {
        JointStrategy::Decomposed if !decomposable => {
            Err(Error::invalid("strategy", "decomposition needs per_graph demand and splittable routing"))
        }
        JointStrategy::Decomposed => match solve_decomposed(network, commodities, max_tp, params)? {
            Some(res) => Ok(res),
            None => solve_exact(network, commodities, max_tp, params),
        },
        _ => match solve_exact(network, commodities, max_tp, params) {
            Err(Error::Solver(LpError::NodeLimit { .. })) if params.strategy == JointStrategy::Auto && decomposable => {
                solve_decomposed(network, commodities, max_tp, params)?
                    .ok_or_else(|| Error::Internal("support evaluation infeasible after node limit".into()))
            }
            other => other,
        },
    }
}

fn solve_exact(
    network: &TimeVaryingNetwork,
    commodities: &[Commodity],
    max_tp: &[f64],
    params: &JointParams,
) -> Result<EpsilonResult> {
    let model = build_joint(network, commodities, max_tp, params)?;
    let opts = MilpOptions { node_limit: params.node_limit, ..Default::default() };
    let res = solve_milp_with(&model.lp, &opts)?;
    if res.status != Status::Optimal {
        return Err(Error::Internal(format!("joint model returned {:?}; zero flow is feasible", res.status)));
    }
    let support: Vec<Vec<bool>> =
        model.indicator.iter().map(|row| row.iter().map(|d| res.values[d.0] > 0.5).collect()).collect();

    if params.demand_mode == DemandMode::PerGraph && params.routing_mode == RoutingMode::Splittable {
        // Every step is independent once the support is fixed, so each one
        // is pushed to its own maximum. The minimum ratio is unchanged.
        if let Some(flows) = support_flows(network, commodities, &support, params.flow_epsilon)? {
            let mut out = assemble(
                network,
                commodities,
                max_tp,
                flows,
                0.0,
                0.0,
                JointStrategy::Exact,
                params.flow_epsilon / 2.0,
            );
            out.epsilon = out.min_ratio;
            out.upper_bound = out.min_ratio;
            return Ok(out);
        }
    }
    let flows: Vec<Vec<Vec<f64>>> = model
        .flow
        .iter()
        .map(|step| step.iter().map(|row| row.iter().map(|v| v.map_or(0.0, |v| res.values[v.0])).collect()).collect())
        .collect();
    let epsilon = res.objective_value.clamp(0.0, 1.0);
    Ok(assemble(network, commodities, max_tp, flows, epsilon, epsilon, JointStrategy::Exact, params.flow_epsilon / 2.0))
}

/// Returns `None` when the union support turns out infeasible, which only
/// round-off can cause.
fn solve_decomposed(
    network: &TimeVaryingNetwork,
    commodities: &[Commodity],
    max_tp: &[f64],
    params: &JointParams,
) -> Result<Option<EpsilonResult>> {
    let shared = shared_mask(network);
    let allowed = vec![shared.clone(); commodities.len()];
    let relaxed: Vec<(f64, Vec<Vec<f64>>)> = (0..network.num_steps())
        .into_par_iter()
        .map(|j| {
            let graph = network.step_graph(j);
            let model = build_flow_model(&graph, commodities, RoutingMode::Splittable, &allowed, 0.0);
            let res = solve_lp(&model.lp)?;
            if res.status != Status::Optimal {
                return Err(Error::Internal(format!("relaxed step {j} returned {:?}", res.status)));
            }
            let flows =
                model.flow.iter().map(|row| row.iter().map(|v| v.map_or(0.0, |v| res.values[v.0])).collect()).collect();
            Ok((res.objective_value, flows))
        })
        .collect::<Result<_>>()?;

    let upper_bound = relaxed
        .iter()
        .zip(max_tp)
        .filter(|(_, &tp)| tp > ZERO_THROUGHPUT)
        .map(|((a, _), &tp)| (a / tp).min(1.0))
        .fold(1.0, f64::min);
    let mut support = vec![vec![false; network.num_edges()]; commodities.len()];
    for (_, flows) in &relaxed {
        for (i, row) in flows.iter().enumerate() {
            for (e, &f) in row.iter().enumerate() {
                support[i][e] |= f > SUPPORT_THRESHOLD;
            }
        }
    }
    let Some(flows) = support_flows(network, commodities, &support, params.flow_epsilon)? else {
        return Ok(None);
    };
    let mut out = assemble(
        network,
        commodities,
        max_tp,
        flows,
        0.0,
        upper_bound,
        JointStrategy::Decomposed,
        params.flow_epsilon / 2.0,
    );
    out.epsilon = out.min_ratio;
    out.upper_bound = upper_bound.max(out.epsilon);
    Ok(Some(out))
}

/// Maximum-throughput flows at every step when commodity `i` must use
/// exactly the edges in `support[i]`, each with at least `flow_epsilon`.
/// `None` when some step cannot honor the support.
fn support_flows(
    network: &TimeVaryingNetwork,
    commodities: &[Commodity],
    support: &[Vec<bool>],
    flow_epsilon: f64,
) -> Result<Option<Vec<Vec<Vec<f64>>>>> {
    let per_step: Vec<Option<Vec<Vec<f64>>>> = (0..network.num_steps())
        .into_par_iter()
        .map(|j| {
            let graph = network.step_graph(j);
            for row in support {
                if row.iter().zip(&graph.caps).any(|(&s, &c)| s && c < 1.0) {
                    return Ok(None);
                }
            }
            let model = build_flow_model(&graph, commodities, RoutingMode::Splittable, support, flow_epsilon);
            let res = solve_lp(&model.lp)?;
            match res.status {
                Status::Optimal => Ok(Some(
                    model
                        .flow
                        .iter()
                        .map(|row| row.iter().map(|v| v.map_or(0.0, |v| res.values[v.0])).collect())
                        .collect(),
                )),
                Status::Infeasible => Ok(None),
                Status::Unbounded => Err(Error::Internal(format!("support evaluation at step {j} unbounded"))),
            }
        })
        .collect::<Result<_>>()?;
    Ok(per_step.into_iter().collect())
}

/// Epsilon achieved by reusing a given support at every step, or `None`
/// when the support cannot carry `flow_epsilon` on each of its edges at
/// some step. Splittable routing with per-step demand.
pub fn evaluate_support(
    network: &TimeVaryingNetwork,
    commodities: &[Commodity],
    max_tp: &[f64],
    support: &[Vec<usize>],
    flow_epsilon: f64,
) -> Result<Option<f64>> {
    validate_commodities(network.num_nodes(), commodities)?;
    if support.len() != commodities.len() || max_tp.len() != network.num_steps() {
        return Err(Error::invalid("support", "one edge list per commodity and one max_tp per step required"));
    }
    let mut mask = vec![vec![false; network.num_edges()]; commodities.len()];
    for (i, edges) in support.iter().enumerate() {
        for &e in edges {
            if e >= network.num_edges() {
                return Err(Error::invalid("support", format!("edge index {e} out of range")));
            }
            mask[i][e] = true;
        }
    }
    Ok(support_flows(network, commodities, &mask, flow_epsilon)?.map(|flows| {
        assemble(network, commodities, max_tp, flows, 0.0, 0.0, JointStrategy::Exact, flow_epsilon / 2.0).min_ratio
    }))
}

fn assemble(
    network: &TimeVaryingNetwork,
    commodities: &[Commodity],
    max_tp: &[f64],
    flows: Vec<Vec<Vec<f64>>>,
    epsilon: f64,
    upper_bound: f64,
    strategy: JointStrategy,
    threshold: f64,
) -> EpsilonResult {
    let delivered: Vec<Vec<f64>> = flows
        .iter()
        .map(|step| {
            commodities
                .iter()
                .zip(step)
                .map(|(c, row)| {
                    let out: f64 = network.links.iter().zip(row).filter(|(l, _)| l.u == c.source).map(|(_, f)| f).sum();
                    let back: f64 =
                        network.links.iter().zip(row).filter(|(l, _)| l.v == c.source).map(|(_, f)| f).sum();
                    (out - back).max(0.0)
                })
                .collect()
        })
        .collect();
    let achieved: Vec<f64> = delivered.iter().map(|d| d.iter().sum()).collect();
    let ratios: Vec<Option<f64>> =
        achieved.iter().zip(max_tp).map(|(&a, &tp)| (tp > ZERO_THROUGHPUT).then(|| (a / tp).clamp(0.0, 1.0))).collect();
    let min_ratio = ratios.iter().flatten().copied().fold(1.0, f64::min);
    let support: Vec<Vec<usize>> = (0..commodities.len())
        .map(|i| (0..network.num_edges()).filter(|&e| flows.iter().any(|step| step[i][e] > threshold)).collect())
        .collect();
    let indicators = support
        .iter()
        .map(|s| {
            let mut row = vec![0.0; network.num_edges()];
            for &e in s {
                row[e] = 1.0;
            }
            row
        })
        .collect();
    EpsilonResult {
        epsilon,
        upper_bound,
        strategy,
        arcs: network.links.iter().map(|l| (l.u, l.v)).collect(),
        max_tp: max_tp.to_vec(),
        achieved,
        ratios,
        min_ratio,
        flows,
        delivered,
        support,
        indicators,
    }
}
