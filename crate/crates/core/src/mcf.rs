//! Multi-commodity max-flow on a single step graph.
//!
//! Every commodity gets a flow variable per arc with positive capacity and a
//! delivered-amount variable bounded by its demand. Rows are the shared arc
//! capacities and per-commodity flow balance (net outflow equals the
//! delivered amount at the source, net inflow equals it at the sink, zero
//! elsewhere). `SinglePath` routing adds binary arc indicators that force
//! each commodity onto one path carrying its whole delivered amount.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constellation::StepGraph;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, solve_milp, Direction, LinearProgram, Sense, SolveResult, Status, VarId};

/// Flow above this value counts as using an arc.
pub const SUPPORT_THRESHOLD: f64 = 1e-6;
/// Slack allowed when pinning total flow to the maximum throughput.
pub const THROUGHPUT_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutingMode {
    #[default]
    Splittable,
    SinglePath,
}

impl FromStr for RoutingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "splittable" => Ok(RoutingMode::Splittable),
            "single_path" => Ok(RoutingMode::SinglePath),
            _ => Err(format!("unknown routing mode `{s}` (expected splittable or single_path)")),
        }
    }
}

impl fmt::Display for RoutingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoutingMode::Splittable => "splittable",
            RoutingMode::SinglePath => "single_path",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Commodity {
    pub source: usize,
    pub sink: usize,
    pub demand: f64,
}

pub fn validate_commodities(num_nodes: usize, commodities: &[Commodity]) -> Result<()> {
    for (i, c) in commodities.iter().enumerate() {
        if c.source >= num_nodes || c.sink >= num_nodes {
            return Err(Error::invalid("commodities", format!("commodity {i} names a node outside 0..{num_nodes}")));
        }
        if c.source == c.sink {
            return Err(Error::invalid("commodities", format!("commodity {i} has the same source and sink")));
        }
        if !(c.demand.is_finite() && c.demand > 0.0) {
            return Err(Error::invalid("commodities", format!("commodity {i} needs a positive finite demand")));
        }
    }
    Ok(())
}

/// A flow model plus the handles needed to read a solution back.
#[derive(Debug, Clone)]
pub struct McfModel {
    pub lp: LinearProgram,
    /// `flow[i][a]`, absent for arcs the commodity may not use.
    pub flow: Vec<Vec<Option<VarId>>>,
    pub delivered: Vec<VarId>,
}

pub fn build_mcf(graph: &StepGraph, commodities: &[Commodity], mode: RoutingMode) -> Result<McfModel> {
    validate_graph(graph)?;
    validate_commodities(graph.num_nodes, commodities)?;
    let allowed = vec![vec![true; graph.arcs.len()]; commodities.len()];
    Ok(build_flow_model(graph, commodities, mode, &allowed, 0.0))
}

fn validate_graph(graph: &StepGraph) -> Result<()> {
    if graph.caps.len() != graph.arcs.len() {
        return Err(Error::invalid("caps", "one capacity per arc required"));
    }
    for (&(u, v), &c) in graph.arcs.iter().zip(&graph.caps) {
        if u >= graph.num_nodes || v >= graph.num_nodes {
            return Err(Error::invalid("arcs", format!("arc ({u}, {v}) names an unknown node")));
        }
        if u == v {
            return Err(Error::invalid("arcs", format!("self-loop at node {u}")));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::invalid("caps", format!("arc ({u}, {v}) has capacity {c}")));
        }
    }
    Ok(())
}

/// Shared builder. `allowed[i][a]` restricts commodity `i` to a subset of
/// arcs and every allowed arc is forced to carry at least `min_flow`.
pub(crate) fn build_flow_model(
    graph: &StepGraph,
    commodities: &[Commodity],
    mode: RoutingMode,
    allowed: &[Vec<bool>],
    min_flow: f64,
) -> McfModel {
    let mut lp = LinearProgram::new(Direction::Maximize);
    let mut flow = Vec::with_capacity(commodities.len());
    let mut delivered = Vec::with_capacity(commodities.len());
    for (i, c) in commodities.iter().enumerate() {
        let vars = graph
            .arcs
            .iter()
            .zip(&graph.caps)
            .enumerate()
            .map(|(a, (&(u, v), &cap))| {
                (cap > 0.0 && allowed[i][a])
                    .then(|| lp.add_continuous(format!("flow_{i}_{u}_{v}"), min_flow, cap.min(c.demand)))
            })
            .collect::<Vec<_>>();
        flow.push(vars);
        delivered.push(lp.add_continuous(format!("delivered_{i}"), 0.0, c.demand));
    }

    for (a, &(u, v)) in graph.arcs.iter().enumerate() {
        let terms: Vec<(VarId, f64)> = flow.iter().filter_map(|f| f[a]).map(|x| (x, 1.0)).collect();
        if !terms.is_empty() {
            lp.add_constraint(format!("cap_{u}_{v}"), terms, Sense::Le, graph.caps[a]);
        }
    }
    for (i, c) in commodities.iter().enumerate() {
        add_balance_rows(&mut lp, graph, &format!("bal_{i}"), &flow[i], c, delivered[i]);
    }
    if mode == RoutingMode::SinglePath {
        for (i, c) in commodities.iter().enumerate() {
            let uses: Vec<Option<VarId>> = graph
                .arcs
                .iter()
                .zip(&flow[i])
                .map(|(&(u, v), f)| f.map(|_| lp.add_binary(format!("use_{i}_{u}_{v}"))))
                .collect();
            let route = lp.add_binary(format!("route_{i}"));
            add_path_rows(&mut lp, graph, i, &uses, c, route);
            for (a, &(u, v)) in graph.arcs.iter().enumerate() {
                let (Some(f), Some(x)) = (flow[i][a], uses[a]) else { continue };
                link_flow_to_path(&mut lp, &format!("{i}_{u}_{v}"), f, x, delivered[i], c.demand);
            }
            lp.add_constraint(format!("reach_{i}"), vec![(delivered[i], 1.0), (route, -c.demand)], Sense::Le, 0.0);
        }
    }
    lp.set_objective(delivered.iter().map(|&d| (d, 1.0)).collect());
    McfModel { lp, flow, delivered }
}

/// Net outflow minus the delivered amount at the source, plus it at the
/// sink, zero everywhere. Rows with no terms are skipped.
pub(crate) fn add_balance_rows(
    lp: &mut LinearProgram,
    graph: &StepGraph,
    prefix: &str,
    flow: &[Option<VarId>],
    commodity: &Commodity,
    delivered: VarId,
) {
    let mut rows: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); graph.num_nodes];
    for (a, &(u, v)) in graph.arcs.iter().enumerate() {
        if let Some(f) = flow[a] {
            rows[u].push((f, 1.0));
            rows[v].push((f, -1.0));
        }
    }
    rows[commodity.source].push((delivered, -1.0));
    rows[commodity.sink].push((delivered, 1.0));
    for (node, terms) in rows.into_iter().enumerate() {
        if !terms.is_empty() {
            lp.add_constraint(format!("{prefix}_{node}"), terms, Sense::Eq, 0.0);
        }
    }
}

/// Indicator conservation (one unit out of the source when `route` is set)
/// with at most one chosen arc leaving any node.
pub(crate) fn add_path_rows(
    lp: &mut LinearProgram,
    graph: &StepGraph,
    i: usize,
    uses: &[Option<VarId>],
    commodity: &Commodity,
    route: VarId,
) {
    let mut balance: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); graph.num_nodes];
    let mut fanout: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); graph.num_nodes];
    for (a, &(u, v)) in graph.arcs.iter().enumerate() {
        if let Some(x) = uses[a] {
            balance[u].push((x, 1.0));
            balance[v].push((x, -1.0));
            fanout[u].push((x, 1.0));
        }
    }
    balance[commodity.source].push((route, -1.0));
    balance[commodity.sink].push((route, 1.0));
    for (node, terms) in balance.into_iter().enumerate() {
        if !terms.is_empty() {
            lp.add_constraint(format!("path_{i}_{node}"), terms, Sense::Eq, 0.0);
        }
    }
    for (node, terms) in fanout.into_iter().enumerate() {
        if terms.len() > 1 {
            lp.add_constraint(format!("fanout_{i}_{node}"), terms, Sense::Le, 1.0);
        }
    }
}

/// A chosen arc carries exactly the delivered amount, an unchosen one nothing.
pub(crate) fn link_flow_to_path(lp: &mut LinearProgram, tag: &str, f: VarId, x: VarId, delivered: VarId, demand: f64) {
    lp.add_constraint(format!("gate_{tag}"), vec![(f, 1.0), (x, -demand)], Sense::Le, 0.0);
    lp.add_constraint(format!("follow_{tag}"), vec![(f, 1.0), (delivered, -1.0)], Sense::Le, 0.0);
    lp.add_constraint(format!("fill_{tag}"), vec![(f, 1.0), (delivered, -1.0), (x, -demand)], Sense::Ge, -demand);
}

/// Per-commodity arc flows of one step graph.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    pub arcs: Vec<(usize, usize)>,
    pub commodities: Vec<Commodity>,
    /// `flows[i][a]`, zero on arcs the commodity does not use.
    pub flows: Vec<Vec<f64>>,
    pub delivered: Vec<f64>,
    pub total: f64,
    /// False when the support search stopped at its node budget.
    pub minimal: bool,
}

impl FlowSolution {
    pub(crate) fn from_model(
        graph: &StepGraph,
        commodities: &[Commodity],
        model: &McfModel,
        res: &SolveResult,
    ) -> Self {
        let flows: Vec<Vec<f64>> =
            model.flow.iter().map(|row| row.iter().map(|v| v.map_or(0.0, |v| res.values[v.0])).collect()).collect();
        let delivered: Vec<f64> = model.delivered.iter().map(|&d| res.values[d.0]).collect();
        FlowSolution {
            arcs: graph.arcs.clone(),
            commodities: commodities.to_vec(),
            flows,
            total: delivered.iter().sum(),
            delivered,
            minimal: true,
        }
    }

    fn zero(graph: &StepGraph, commodities: &[Commodity]) -> Self {
        FlowSolution {
            arcs: graph.arcs.clone(),
            commodities: commodities.to_vec(),
            flows: vec![vec![0.0; graph.arcs.len()]; commodities.len()],
            delivered: vec![0.0; commodities.len()],
            total: 0.0,
            minimal: true,
        }
    }

    /// Arc indices carrying more than [`SUPPORT_THRESHOLD`] of commodity `i`.
    pub fn support(&self, i: usize) -> Vec<usize> {
        (0..self.arcs.len()).filter(|&a| self.flows[i][a] > SUPPORT_THRESHOLD).collect()
    }

    /// Total flow on each arc.
    pub fn arc_loads(&self) -> Vec<f64> {
        (0..self.arcs.len()).map(|a| self.flows.iter().map(|f| f[a]).sum()).collect()
    }

    fn support_arcs(&self) -> Vec<usize> {
        (0..self.arcs.len()).filter(|&a| self.flows.iter().any(|f| f[a] > SUPPORT_THRESHOLD)).collect()
    }

    fn edge_count(&self) -> usize {
        self.support_arcs().len()
    }

    /// Union of all commodity supports as `(u, v)` pairs.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        (0..self.flows.len()).flat_map(|i| self.support(i)).map(|a| self.arcs[a]).collect()
    }
}

fn expect_optimal(res: &SolveResult, what: &str) -> Result<()> {
    match res.status {
        Status::Optimal => Ok(()),
        other => Err(Error::Internal(format!("{what} returned {other:?}; the zero flow is always feasible"))),
    }
}

fn solve_flow(graph: &StepGraph, commodities: &[Commodity], mode: RoutingMode) -> Result<FlowSolution> {
    let model = build_mcf(graph, commodities, mode)?;
    let res = match mode {
        RoutingMode::Splittable => solve_lp(&model.lp)?,
        RoutingMode::SinglePath => solve_milp(&model.lp)?,
    };
    expect_optimal(&res, "max-flow model")?;
    Ok(FlowSolution::from_model(graph, commodities, &model, &res))
}

/// Maximum total splittable throughput of the step graph.
pub fn max_throughput(graph: &StepGraph, commodities: &[Commodity]) -> Result<f64> {
    max_throughput_with(graph, commodities, RoutingMode::Splittable)
}

pub fn max_throughput_with(graph: &StepGraph, commodities: &[Commodity], mode: RoutingMode) -> Result<f64> {
    Ok(solve_flow(graph, commodities, mode)?.total)
}

#[derive(Debug, Clone)]
pub struct CanonicalOptions {
    /// Branch-and-bound budget for the support search, in LP relaxations.
    /// When it runs out the best support found so far is used and the
    /// result is flagged as not proven minimal.
    pub node_limit: usize,
    /// Known maximum throughput, skipping the first solve.
    pub max_throughput: Option<f64>,
}

impl Default for CanonicalOptions {
    fn default() -> Self {
        CanonicalOptions { node_limit: 40, max_throughput: None }
    }
}

/// Reweighting rounds used to seed the support search.
const REWEIGHT_ROUNDS: usize = 3;
/// Offset in the reweighting `1 / (flow + offset)`.
const REWEIGHT_OFFSET: f64 = 0.05;

pub fn canonical_optimum(graph: &StepGraph, commodities: &[Commodity]) -> Result<FlowSolution> {
    canonical_optimum_with(graph, commodities, &CanonicalOptions::default())
}

/// A maximum-throughput flow using as few arcs as possible.
///
/// This is the binary program "minimize the number of arcs with positive
/// flow while total delivery stays at the maximum", solved by a dedicated
/// depth-first branch-and-bound. At a node every arc is closed, forced open
/// or free. Its relaxation charges each free arc `flow / capacity`, which
/// is the best fractional activity, so it reduces to a minimum-weight
/// maximum flow. Reweighted rounds (`1 / (flow + offset)`) supply the first
/// incumbents. The chosen support is finally re-solved for maximum
/// throughput so the returned total matches the first phase up to simplex
/// round-off.
pub fn canonical_optimum_with(
    graph: &StepGraph,
    commodities: &[Commodity],
    opts: &CanonicalOptions,
) -> Result<FlowSolution> {
    validate_graph(graph)?;
    validate_commodities(graph.num_nodes, commodities)?;
    let best = match opts.max_throughput {
        Some(v) => v,
        None => max_throughput(graph, commodities)?,
    };
    if best <= SUPPORT_THRESHOLD {
        return Ok(FlowSolution::zero(graph, commodities));
    }
    let search = SupportSearch { graph, commodities, target: best - THROUGHPUT_SLACK * (1.0 + best) };
    let arcs = graph.arcs.len();
    let usable: Vec<bool> = graph.caps.iter().map(|&c| c > 0.0).collect();

    // Root relaxation, then reweighted rounds for incumbents.
    let root_weights: Vec<f64> = graph.caps.iter().map(|&c| if c > 0.0 { 1.0 / c } else { 0.0 }).collect();
    let Some(root) = search.relax(&usable, &root_weights)? else {
        return Err(Error::Internal("support search lost the maximum throughput".into()));
    };
    let mut incumbent = root.clone();
    let mut incumbent_size = incumbent.edge_count();
    let mut last = root.clone();
    for _ in 0..REWEIGHT_ROUNDS {
        let load = last.arc_loads();
        let weights: Vec<f64> = load.iter().map(|&x| 1.0 / (x + REWEIGHT_OFFSET)).collect();
        let Some(next) = search.relax(&usable, &weights)? else { break };
        let size = next.edge_count();
        if size < incumbent_size {
            incumbent = next.clone();
            incumbent_size = size;
        }
        if next.support_arcs() == last.support_arcs() {
            break;
        }
        last = next;
    }

    // Depth-first search. Each entry fixes arcs: Some(true) open at no
    // charge, Some(false) closed, None free.
    let mut stack: Vec<(Vec<Option<bool>>, Option<FlowSolution>)> = vec![(vec![None; arcs], Some(root))];
    let mut nodes = 0usize;
    let mut complete = true;
    while let Some((fixed, solved)) = stack.pop() {
        let relaxed = match solved {
            Some(sol) => sol,
            None => {
                if nodes >= opts.node_limit {
                    complete = false;
                    break;
                }
                nodes += 1;
                let open: Vec<bool> = (0..arcs).map(|a| usable[a] && fixed[a] != Some(false)).collect();
                let weights: Vec<f64> =
                    (0..arcs).map(|a| if fixed[a] == Some(true) { 0.0 } else { root_weights[a] }).collect();
                match search.relax(&open, &weights)? {
                    Some(sol) => sol,
                    None => continue,
                }
            }
        };
        let size = relaxed.edge_count();
        if size < incumbent_size {
            incumbent = relaxed.clone();
            incumbent_size = size;
        }
        let load = relaxed.arc_loads();
        let forced = fixed.iter().filter(|&&f| f == Some(true)).count() as f64;
        let bound: f64 =
            forced + (0..arcs).filter(|&a| fixed[a].is_none()).map(|a| load[a] * root_weights[a]).sum::<f64>();
        if (bound - 1e-6).ceil() >= incumbent_size as f64 {
            continue;
        }
        // Branch on the free arc whose activity is smallest but positive:
        // closing it is the likeliest way to a smaller support.
        let pick = (0..arcs)
            .filter(|&a| fixed[a].is_none())
            .map(|a| (a, load[a] * root_weights[a]))
            .filter(|&(_, y)| y > SUPPORT_THRESHOLD && y < 1.0 - SUPPORT_THRESHOLD)
            .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
        let Some((a, _)) = pick else { continue };
        let mut open = fixed.clone();
        open[a] = Some(true);
        let mut closed = fixed;
        closed[a] = Some(false);
        stack.push((open, None));
        stack.push((closed, None));
    }

    // Re-solve on the chosen support for the exact maximum.
    let allowed: Vec<Vec<bool>> =
        (0..commodities.len()).map(|i| incumbent.flows[i].iter().map(|&f| f > 0.0).collect()).collect();
    let polish = build_flow_model(graph, commodities, RoutingMode::Splittable, &allowed, 0.0);
    let res = solve_lp(&polish.lp)?;
    expect_optimal(&res, "support re-solve")?;
    let mut solution = FlowSolution::from_model(graph, commodities, &polish, &res);
    solution.minimal = complete;
    Ok(solution)
}

struct SupportSearch<'a> {
    graph: &'a StepGraph,
    commodities: &'a [Commodity],
    /// Throughput every candidate must reach.
    target: f64,
}

impl SupportSearch<'_> {
    /// Minimum-weight flow among those reaching the target on `open` arcs,
    /// or `None` if the open arcs cannot carry the target.
    ///
    /// Solved as one LP that rewards delivery by a large factor and charges
    /// each unit on arc `a` its weight. A factor above the total weight is
    /// usually enough to make delivery dominate; if the result still falls
    /// short the factor grows, and as a last resort the target becomes a
    /// hard row.
    fn relax(&self, open: &[bool], weights: &[f64]) -> Result<Option<FlowSolution>> {
        let (graph, commodities) = (self.graph, self.commodities);
        let allowed = vec![open.to_vec(); commodities.len()];
        let mut model = build_flow_model(graph, commodities, RoutingMode::Splittable, &allowed, 0.0);
        let total_weight: f64 = (0..graph.arcs.len()).filter(|&a| open[a]).map(|a| weights[a]).sum();
        let mut reward = 1.0 + total_weight;
        for _ in 0..2 {
            set_weighted_objective(&mut model, weights, reward);
            let res = solve_lp(&model.lp)?;
            expect_optimal(&res, "weighted flow")?;
            let sol = FlowSolution::from_model(graph, commodities, &model, &res);
            if sol.total >= self.target {
                return Ok(Some(sol));
            }
            reward *= 1e4;
        }
        let plain = build_flow_model(graph, commodities, RoutingMode::Splittable, &allowed, 0.0);
        let res = solve_lp(&plain.lp)?;
        expect_optimal(&res, "max-flow model")?;
        if res.objective_value < self.target {
            return Ok(None);
        }
        let row = model.delivered.iter().map(|&d| (d, 1.0)).collect();
        model.lp.add_constraint("throughput", row, Sense::Ge, self.target);
        set_weighted_objective(&mut model, weights, 0.0);
        let res = solve_lp(&model.lp)?;
        expect_optimal(&res, "weighted flow")?;
        Ok(Some(FlowSolution::from_model(graph, commodities, &model, &res)))
    }
}

fn set_weighted_objective(model: &mut McfModel, weights: &[f64], reward: f64) {
    let mut terms: Vec<(VarId, f64)> = model.delivered.iter().map(|&d| (d, reward)).collect();
    for row in &model.flow {
        for (a, var) in row.iter().enumerate() {
            if let Some(x) = var {
                if weights[a] != 0.0 {
                    terms.push((*x, -weights[a]));
                }
            }
        }
    }
    model.lp.set_objective(terms);
}

/// A path or cycle as a node sequence (a cycle repeats its first node at
/// the end) with the amount of flow it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPath {
    pub nodes: Vec<usize>,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathDecomposition {
    pub paths: Vec<FlowPath>,
    pub cycles: Vec<FlowPath>,
}

/// Splits commodity `i`'s flow into simple source-sink paths and cycles.
///
/// Arcs are followed in index order, so the decomposition is deterministic.
pub fn decompose_paths(solution: &FlowSolution, i: usize) -> Result<PathDecomposition> {
    const TOL: f64 = 1e-9;
    let Some(commodity) = solution.commodities.get(i) else {
        return Err(Error::invalid("commodity", format!("no commodity {i}")));
    };
    let nodes = solution
        .arcs
        .iter()
        .flat_map(|&(u, v)| [u, v])
        .chain([commodity.source, commodity.sink])
        .max()
        .map_or(0, |m| m + 1);
    let mut residual: Vec<f64> = solution.flows[i].iter().map(|&f| if f > TOL { f } else { 0.0 }).collect();
    let scale = 1.0 + solution.delivered[i].abs();
    let mut net = vec![0.0; nodes];
    for (a, &(u, v)) in solution.arcs.iter().enumerate() {
        net[u] += residual[a];
        net[v] -= residual[a];
    }
    net[commodity.source] -= solution.delivered[i];
    net[commodity.sink] += solution.delivered[i];
    if let Some((node, gap)) = net.iter().enumerate().find(|(_, g)| g.abs() > 1e-6 * scale) {
        return Err(Error::invalid("flow", format!("commodity {i} loses {gap} at node {node}")));
    }

    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (a, &(u, _)) in solution.arcs.iter().enumerate() {
        out[u].push(a);
    }
    let mut result = PathDecomposition::default();
    let next_arc = |residual: &[f64], u: usize| out[u].iter().copied().find(|&a| residual[a] > TOL);

    // Walks from `start` until reaching `stop` or revisiting a node. Every
    // iteration zeroes at least one arc, which bounds the loop.
    let mut starts = vec![commodity.source];
    starts.extend(0..nodes);
    for start in starts {
        while let Some(first) = next_arc(&residual, start) {
            let stop = (start == commodity.source).then_some(commodity.sink);
            let mut walk = vec![start];
            let mut arcs = vec![first];
            let mut pos = vec![usize::MAX; nodes];
            pos[start] = 0;
            let mut cur = solution.arcs[first].1;
            loop {
                if Some(cur) == stop {
                    walk.push(cur);
                    push_piece(&mut residual, &arcs, walk, &mut result.paths);
                    break;
                }
                if pos[cur] != usize::MAX {
                    let from = pos[cur];
                    let mut cycle = walk[from..].to_vec();
                    cycle.push(cur);
                    push_piece(&mut residual, &arcs[from..], cycle, &mut result.cycles);
                    break;
                }
                pos[cur] = walk.len();
                walk.push(cur);
                match next_arc(&residual, cur) {
                    Some(a) => {
                        arcs.push(a);
                        cur = solution.arcs[a].1;
                    }
                    None => {
                        // Round-off dead end: drop the arc that led here.
                        if let Some(&last) = arcs.last() {
                            residual[last] = 0.0;
                        }
                        break;
                    }
                }
            }
            if start != commodity.source && next_arc(&residual, start).is_none() {
                break;
            }
        }
    }
    Ok(result)
}

fn push_piece(residual: &mut [f64], arcs: &[usize], nodes: Vec<usize>, into: &mut Vec<FlowPath>) {
    let amount = arcs.iter().map(|&a| residual[a]).fold(f64::INFINITY, f64::min);
    for &a in arcs {
        residual[a] -= amount;
        if residual[a] <= 1e-9 {
            residual[a] = 0.0;
        }
    }
    into.push(FlowPath { nodes, amount });
}
