//! Path-switching cost against throughput loss, per instance and over a grid.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::config::{DemandPolicy, ExperimentGrid};
use crate::constellation::{generate_network, keyed_rng, ConstellationConfig, TimeVaryingNetwork};
use crate::error::{Error, Result};
use crate::joint::{solve_epsilon_with_max_tp, step_max_throughputs, EpsilonResult};
use crate::mcf::{canonical_optimum_with, CanonicalOptions, Commodity, RoutingMode};

pub const CSV_HEADER: [&str; 9] =
    ["k", "T", "trial", "seed", "epsilon", "mean_drop_pct", "worst_drop_pct", "switching_cost_total", "runtime_ms"];

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingCostReport {
    /// Edges used by the support-minimal optimum of each step.
    pub edge_sets: Vec<BTreeSet<(usize, usize)>>,
    /// `|E_j xor E_{j+1}|` for each consecutive pair of steps.
    pub transitions: Vec<usize>,
    pub total: usize,
    /// False if some step's support search stopped at its node budget.
    pub minimal: bool,
}

pub fn xor_size(a: &BTreeSet<(usize, usize)>, b: &BTreeSet<(usize, usize)>) -> usize {
    a.symmetric_difference(b).count()
}

pub fn switching_cost(network: &TimeVaryingNetwork, commodities: &[Commodity]) -> Result<SwitchingCostReport> {
    switching_cost_with(network, commodities, &CanonicalOptions::default(), None)
}

/// As [`switching_cost`]. `max_tp` may supply the per-step splittable
/// maximum throughputs to skip recomputing them.
pub fn switching_cost_with(
    network: &TimeVaryingNetwork,
    commodities: &[Commodity],
    opts: &CanonicalOptions,
    max_tp: Option<&[f64]>,
) -> Result<SwitchingCostReport> {
    let optima = (0..network.num_steps())
        .into_par_iter()
        .map(|j| {
            let step_opts = CanonicalOptions { max_throughput: max_tp.map(|tp| tp[j]), ..opts.clone() };
            canonical_optimum_with(&network.step_graph(j), commodities, &step_opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let edge_sets: Vec<_> = optima.iter().map(|s| s.edge_set()).collect();
    let transitions: Vec<usize> = edge_sets.windows(2).map(|w| xor_size(&w[0], &w[1])).collect();
    Ok(SwitchingCostReport {
        total: transitions.iter().sum(),
        transitions,
        edge_sets,
        minimal: optima.iter().all(|s| s.minimal),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropReport {
    /// `100 * (1 - r_j)`, absent for disconnected steps.
    pub per_step: Vec<Option<f64>>,
    pub mean_pct: f64,
    /// `100 * (1 - r_min)`.
    pub worst_pct: f64,
}

pub fn throughput_drop(result: &EpsilonResult) -> DropReport {
    let per_step: Vec<Option<f64>> = result.ratios.iter().map(|r| r.map(|r| 100.0 * (1.0 - r))).collect();
    let drops: Vec<f64> = per_step.iter().flatten().copied().collect();
    if drops.is_empty() {
        return DropReport { per_step, mean_pct: 0.0, worst_pct: 0.0 };
    }
    DropReport {
        mean_pct: drops.iter().sum::<f64>() / drops.len() as f64,
        worst_pct: drops.iter().copied().fold(0.0, f64::max),
        per_step,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostBenefitRow {
    pub k: usize,
    pub steps: usize,
    pub trial: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub upper_bound: f64,
    pub mean_drop_pct: f64,
    pub worst_drop_pct: f64,
    pub switching_cost_total: usize,
    pub runtime_ms: Option<u128>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub k: usize,
    pub steps: usize,
    pub trial: usize,
    pub seed: u64,
    pub message: String,
    pub resource: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentOutcome {
    /// Sorted by `(k, T, trial)`.
    pub rows: Vec<CostBenefitRow>,
    pub failures: Vec<CellFailure>,
}

/// Seed of one grid cell, a pure function of its coordinates.
pub fn cell_seed(master_seed: u64, k: usize, steps: usize, trial: usize) -> u64 {
    keyed_rng([master_seed, k as u64, steps as u64, trial as u64]).next_u64()
}

/// `k` distinct ordered source-sink pairs with demands drawn per policy.
pub fn sample_commodities<R: Rng>(
    num_nodes: usize,
    k: usize,
    policy: DemandPolicy,
    rng: &mut R,
) -> Result<Vec<Commodity>> {
    let pairs = num_nodes * num_nodes.saturating_sub(1);
    if k > pairs {
        return Err(Error::invalid("k", format!("only {pairs} distinct ordered pairs exist")));
    }
    let picks = sample(rng, pairs, k).into_vec();
    let mut out = Vec::with_capacity(k);
    for idx in picks {
        let source = idx / (num_nodes - 1);
        let rest = idx % (num_nodes - 1);
        let sink = if rest < source { rest } else { rest + 1 };
        let demand = match policy {
            DemandPolicy::Fixed(v) => v,
            DemandPolicy::Uniform { lo, hi } => f64::from(rng.gen_range(lo..=hi)),
        };
        out.push(Commodity { source, sink, demand });
    }
    Ok(out)
}

/// Network and commodities of one grid cell.
pub fn cell_instance(
    grid: &ExperimentGrid,
    k: usize,
    steps: usize,
    trial: usize,
) -> Result<(u64, TimeVaryingNetwork, Vec<Commodity>)> {
    let seed = cell_seed(grid.master_seed, k, steps, trial);
    let cfg = ConstellationConfig { steps, seed, ..grid.base.clone() };
    let network = generate_network(&cfg)?;
    let commodities = cell_commodities(grid, seed, network.num_nodes(), k)?;
    Ok((seed, network, commodities))
}

/// Commodities of the cell with the given seed. Their stream is separate
/// from the capacity draws, so they do not depend on the step count.
pub fn cell_commodities(grid: &ExperimentGrid, seed: u64, num_nodes: usize, k: usize) -> Result<Vec<Commodity>> {
    // Step index u64::MAX never occurs in capacity draws.
    let mut rng = keyed_rng([seed, u64::MAX, 0, 0]);
    sample_commodities(num_nodes, k, grid.demand_policy(), &mut rng)
}

/// Everything measured for one instance.
#[derive(Debug, Clone)]
pub struct InstanceReport {
    pub epsilon: EpsilonResult,
    pub drop: DropReport,
    pub switching: SwitchingCostReport,
}

pub fn evaluate_instance(
    grid: &ExperimentGrid,
    network: &TimeVaryingNetwork,
    commodities: &[Commodity],
) -> Result<InstanceReport> {
    let params = grid.joint_params();
    let max_tp = step_max_throughputs(network, commodities, params.routing_mode)?;
    let epsilon = solve_epsilon_with_max_tp(network, commodities, &max_tp, &params)?;
    epsilon.check(params.flow_epsilon).map_err(|m| Error::Internal(format!("result failed re-validation: {m}")))?;
    let opts = CanonicalOptions { node_limit: grid.solver.canonical_node_limit, max_throughput: None };
    let splittable_tp = (params.routing_mode == RoutingMode::Splittable).then_some(max_tp.as_slice());
    let switching = switching_cost_with(network, commodities, &opts, splittable_tp)?;
    Ok(InstanceReport { drop: throughput_drop(&epsilon), epsilon, switching })
}

/// Runs every `(k, T, trial)` cell. A failing cell is reported in
/// `failures` and does not stop the others.
pub fn run_experiment(grid: &ExperimentGrid) -> ExperimentOutcome {
    let cells: Vec<(usize, usize, usize)> = grid
        .k_values
        .iter()
        .flat_map(|&k| grid.t_values.iter().flat_map(move |&t| (0..grid.trials).map(move |r| (k, t, r))))
        .collect();
    let results: Vec<std::result::Result<CostBenefitRow, CellFailure>> = cells
        .par_iter()
        .map(|&(k, steps, trial)| {
            let started = Instant::now();
            let seed = cell_seed(grid.master_seed, k, steps, trial);
            let fail =
                |e: Error| CellFailure { k, steps, trial, seed, resource: e.is_resource(), message: e.to_string() };
            let (seed, network, commodities) = cell_instance(grid, k, steps, trial).map_err(fail)?;
            let report = evaluate_instance(grid, &network, &commodities).map_err(fail)?;
            Ok(CostBenefitRow {
                k,
                steps,
                trial,
                seed,
                epsilon: report.epsilon.epsilon,
                upper_bound: report.epsilon.upper_bound,
                mean_drop_pct: report.drop.mean_pct,
                worst_drop_pct: report.drop.worst_pct,
                switching_cost_total: report.switching.total,
                runtime_ms: grid.record_runtime.then(|| started.elapsed().as_millis()),
            })
        })
        .collect();
    let mut outcome = ExperimentOutcome::default();
    for r in results {
        match r {
            Ok(row) => outcome.rows.push(row),
            Err(f) => outcome.failures.push(f),
        }
    }
    outcome.rows.sort_by_key(|r| (r.k, r.steps, r.trial));
    outcome
}

/// Six decimals, never "-0.000000".
pub fn fixed(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn write_table_csv<W: Write>(rows: &[CostBenefitRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.steps.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            fixed(r.epsilon),
            fixed(r.mean_drop_pct),
            fixed(r.worst_drop_pct),
            r.switching_cost_total.to_string(),
            r.runtime_ms.map(|ms| ms.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub k: usize,
    pub steps: usize,
    pub trials: usize,
    pub epsilon: f64,
    pub epsilon_upper_bound: f64,
    pub mean_drop_pct: f64,
    pub worst_drop_pct: f64,
    pub switching_cost: f64,
}

/// Per-`(k, T)` means over trials, in row order.
pub fn summarize(rows: &[CostBenefitRow]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    for r in rows {
        let idx = match out.iter().position(|s| s.k == r.k && s.steps == r.steps) {
            Some(i) => i,
            None => {
                out.push(SummaryRow {
                    k: r.k,
                    steps: r.steps,
                    trials: 0,
                    epsilon: 0.0,
                    epsilon_upper_bound: 0.0,
                    mean_drop_pct: 0.0,
                    worst_drop_pct: 0.0,
                    switching_cost: 0.0,
                });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        s.trials += 1;
        s.epsilon += r.epsilon;
        s.epsilon_upper_bound += r.upper_bound;
        s.mean_drop_pct += r.mean_drop_pct;
        s.worst_drop_pct += r.worst_drop_pct;
        s.switching_cost += r.switching_cost_total as f64;
    }
    for s in &mut out {
        let n = s.trials as f64;
        s.epsilon /= n;
        s.epsilon_upper_bound /= n;
        s.mean_drop_pct /= n;
        s.worst_drop_pct /= n;
        s.switching_cost /= n;
    }
    out
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "k",
        "T",
        "trials",
        "epsilon",
        "epsilon_upper_bound",
        "mean_drop_pct",
        "worst_drop_pct",
        "switching_cost_total",
    ])?;
    for s in rows {
        w.write_record([
            s.k.to_string(),
            s.steps.to_string(),
            s.trials.to_string(),
            fixed(s.epsilon),
            fixed(s.epsilon_upper_bound),
            fixed(s.mean_drop_pct),
            fixed(s.worst_drop_pct),
            fixed(s.switching_cost),
        ])?;
    }
    w.flush()
}
