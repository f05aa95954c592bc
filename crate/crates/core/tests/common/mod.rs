//! Brute-force oracles and random instance generators shared by the
//! integration tests. Nothing here calls the library's solvers.

#![allow(dead_code)]

use std::collections::VecDeque;

use rand::Rng;
use satroute::constellation::{Link, LinkClass, NodeSpec, StepGraph, TimeVaryingNetwork};
use satroute::lp::{Direction, LinearProgram, Sense, VarId, VarKind};
use satroute::mcf::Commodity;

// ---------------------------------------------------------------------------
// Dense linear algebra and vertex enumeration

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// A row `coefs . x (sense) rhs` over the continuous variables.
#[derive(Clone, Debug)]
pub struct Row {
    pub coefs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

fn row_ok(row: &Row, x: &[f64], tol: f64) -> bool {
    let lhs: f64 = row.coefs.iter().zip(x).map(|(a, v)| a * v).sum();
    match row.sense {
        Sense::Le => lhs <= row.rhs + tol,
        Sense::Ge => lhs >= row.rhs - tol,
        Sense::Eq => (lhs - row.rhs).abs() <= tol,
    }
}

/// Maximum of `obj . x` over a bounded polytope by enumerating every
/// basic solution. `None` when infeasible.
pub fn vertex_max(obj: &[f64], rows: &[Row], lower: &[f64], upper: &[f64]) -> Option<f64> {
    let n = obj.len();
    if n == 0 {
        return rows.iter().all(|r| row_ok(r, &[], 1e-9)).then_some(0.0);
    }
    // Candidate hyperplanes: every row plus both bounds of every variable.
    let mut planes: Vec<(Vec<f64>, f64)> = rows.iter().map(|r| (r.coefs.clone(), r.rhs)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lower[j]));
        planes.push((e, upper[j]));
    }
    let mut best: Option<f64> = None;
    let mut pick = vec![0usize; n];
    fn rec(
        depth: usize,
        start: usize,
        pick: &mut Vec<usize>,
        planes: &[(Vec<f64>, f64)],
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if depth == pick.len() {
            visit(pick);
            return;
        }
        for p in start..planes.len() {
            pick[depth] = p;
            rec(depth + 1, p + 1, pick, planes, visit);
        }
    }
    let mut visit = |chosen: &[usize]| {
        let a: Vec<Vec<f64>> = chosen.iter().map(|&p| planes[p].0.clone()).collect();
        let b: Vec<f64> = chosen.iter().map(|&p| planes[p].1).collect();
        let Some(x) = solve_dense(a, b) else { return };
        let inside = (0..n).all(|j| x[j] >= lower[j] - 1e-9 && x[j] <= upper[j] + 1e-9);
        if inside && rows.iter().all(|r| row_ok(r, &x, 1e-9)) {
            let v: f64 = obj.iter().zip(&x).map(|(c, v)| c * v).sum();
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    };
    rec(0, 0, &mut pick, &planes, &mut visit);
    best
}

/// Random mixed program: `binaries` binary and `continuous` bounded
/// continuous variables, small integer data.
pub fn random_program<R: Rng>(rng: &mut R, binaries: usize, continuous: usize, rows: usize) -> LinearProgram {
    let direction = if rng.gen_bool(0.5) { Direction::Maximize } else { Direction::Minimize };
    let mut lp = LinearProgram::new(direction);
    let mut vars = Vec::new();
    for b in 0..binaries {
        vars.push(lp.add_binary(format!("b{b}")));
    }
    for c in 0..continuous {
        let lo = f64::from(rng.gen_range(-3..=1));
        let hi = lo + f64::from(rng.gen_range(0..=5));
        vars.push(lp.add_continuous(format!("x{c}"), lo, hi));
    }
    for r in 0..rows {
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for &v in &vars {
            if rng.gen_bool(0.7) {
                let c = f64::from(rng.gen_range(-5..=5));
                if c != 0.0 {
                    terms.push((v, c));
                }
            }
        }
        if terms.is_empty() {
            continue;
        }
        let sense = match rng.gen_range(0..6) {
            0 => Sense::Eq,
            1 | 2 => Sense::Ge,
            _ => Sense::Le,
        };
        let rhs = f64::from(rng.gen_range(-4..=8));
        lp.add_constraint(format!("r{r}"), terms, sense, rhs);
    }
    let obj = vars.iter().map(|&v| (v, f64::from(rng.gen_range(-6..=6)))).collect();
    lp.set_objective(obj);
    lp
}

/// Optimum of a mixed program by enumerating every binary assignment and
/// enumerating vertices of the remaining continuous polytope.
pub fn enumerate_program(lp: &LinearProgram) -> Option<f64> {
    let flip = if lp.objective.direction == Direction::Maximize { 1.0 } else { -1.0 };
    let bins: Vec<usize> = (0..lp.num_vars()).filter(|&j| lp.variables[j].kind == VarKind::Binary).collect();
    let conts: Vec<usize> = (0..lp.num_vars()).filter(|&j| lp.variables[j].kind == VarKind::Continuous).collect();
    let dense = lp.dense_objective();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << bins.len()) {
        let mut fixed = vec![0.0; lp.num_vars()];
        for (k, &j) in bins.iter().enumerate() {
            fixed[j] = f64::from((mask >> k) & 1);
        }
        let rows: Vec<Row> = lp
            .constraints
            .iter()
            .map(|c| {
                let mut coefs = vec![0.0; conts.len()];
                let mut rhs = c.rhs;
                for &(v, a) in &c.terms {
                    match conts.iter().position(|&j| j == v.0) {
                        Some(p) => coefs[p] += a,
                        None => rhs -= a * fixed[v.0],
                    }
                }
                Row { coefs, sense: c.sense, rhs }
            })
            .collect();
        let obj: Vec<f64> = conts.iter().map(|&j| flip * dense[j]).collect();
        let lower: Vec<f64> = conts.iter().map(|&j| lp.variables[j].lower).collect();
        let upper: Vec<f64> = conts.iter().map(|&j| lp.variables[j].upper).collect();
        if let Some(v) = vertex_max(&obj, &rows, &lower, &upper) {
            let base: f64 = bins.iter().map(|&j| flip * dense[j] * fixed[j]).sum();
            let total = base + v;
            best = Some(best.map_or(total, |b: f64| b.max(total)));
        }
    }
    best.map(|b| flip * b)
}

// ---------------------------------------------------------------------------
// Graphs

pub fn random_step_graph<R: Rng>(rng: &mut R, nodes: usize, max_arcs: usize) -> StepGraph {
    let mut pairs: Vec<(usize, usize)> =
        (0..nodes).flat_map(|u| (0..nodes).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    // Partial shuffle, then keep a prefix.
    for i in 0..pairs.len() {
        let j = rng.gen_range(i..pairs.len());
        pairs.swap(i, j);
    }
    let count = rng.gen_range(1..=max_arcs.min(pairs.len()));
    let mut arcs: Vec<(usize, usize, f64)> =
        pairs[..count].iter().map(|&(u, v)| (u, v, f64::from(rng.gen_range(1..=3)))).collect();
    arcs.sort_by_key(|&(u, v, _)| (u, v));
    StepGraph::new(nodes, arcs)
}

pub fn random_commodities<R: Rng>(rng: &mut R, nodes: usize, k: usize, max_demand: u32) -> Vec<Commodity> {
    let mut out: Vec<Commodity> = Vec::new();
    while out.len() < k {
        let source = rng.gen_range(0..nodes);
        let sink = rng.gen_range(0..nodes);
        if source == sink || out.iter().any(|c| c.source == source && c.sink == sink) {
            continue;
        }
        out.push(Commodity { source, sink, demand: f64::from(rng.gen_range(1..=max_demand)) });
    }
    out
}

/// Random time-varying network: each ordered pair is absent, permanent or
/// temporary (temporary twice as often); capacities are at most 3.
pub fn random_network<R: Rng>(rng: &mut R, nodes: usize, steps: usize, max_links: usize) -> TimeVaryingNetwork {
    let specs: Vec<NodeSpec> = (0..nodes).map(|id| NodeSpec { id, orbit: 0, slot: id, tx: None, rx: None }).collect();
    let mut links = Vec::new();
    for u in 0..nodes {
        for v in 0..nodes {
            if u != v && links.len() < max_links && rng.gen_bool(0.5) {
                let class = if rng.gen_bool(1.0 / 3.0) { LinkClass::Permanent } else { LinkClass::Temporary };
                links.push(Link { u, v, class });
            }
        }
    }
    let capacities = (0..steps)
        .map(|_| {
            links
                .iter()
                .map(|l| match l.class {
                    LinkClass::Permanent => rng.gen_range(1..=3),
                    LinkClass::Temporary => rng.gen_range(0..=3),
                })
                .collect()
        })
        .collect();
    TimeVaryingNetwork::from_parts(specs, links, capacities).expect("generated network is valid")
}

// ---------------------------------------------------------------------------
// Integral multi-commodity flow by enumeration

fn acyclic(arcs: &[(usize, usize)], flow: &[u32], nodes: usize) -> bool {
    let mut indeg = vec![0usize; nodes];
    for (a, &(_, v)) in arcs.iter().enumerate() {
        if flow[a] > 0 {
            indeg[v] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..nodes).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(u) = queue.pop() {
        seen += 1;
        for (a, &(x, v)) in arcs.iter().enumerate() {
            if x == u && flow[a] > 0 {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push(v);
                }
            }
        }
    }
    seen == nodes
}

/// Every acyclic integral flow of one commodity, with its delivered amount.
fn integral_flows(graph: &StepGraph, c: &Commodity) -> Vec<(Vec<u32>, u32)> {
    let bound: Vec<u32> = graph.caps.iter().map(|&cap| cap.min(c.demand) as u32).collect();
    let m = graph.arcs.len();
    let mut out = Vec::new();
    let mut flow = vec![0u32; m];
    loop {
        let mut net = vec![0i64; graph.num_nodes];
        for (a, &(u, v)) in graph.arcs.iter().enumerate() {
            net[u] += i64::from(flow[a]);
            net[v] -= i64::from(flow[a]);
        }
        let delivered = net[c.source];
        let balanced = (0..graph.num_nodes).all(|x| x == c.source || x == c.sink || net[x] == 0);
        if balanced && delivered >= 0 && delivered as f64 <= c.demand && acyclic(&graph.arcs, &flow, graph.num_nodes) {
            out.push((flow.clone(), delivered as u32));
        }
        // Odometer increment.
        let mut a = 0;
        while a < m && flow[a] == bound[a] {
            flow[a] = 0;
            a += 1;
        }
        if a == m {
            break;
        }
        flow[a] += 1;
    }
    out
}

/// Maximum total integral throughput for one or two commodities.
pub fn integral_max_throughput(graph: &StepGraph, commodities: &[Commodity]) -> u32 {
    let lists: Vec<Vec<(Vec<u32>, u32)>> = commodities.iter().map(|c| integral_flows(graph, c)).collect();
    match lists.len() {
        1 => lists[0].iter().map(|(_, d)| *d).max().unwrap_or(0),
        2 => {
            let mut best = 0;
            for (f1, d1) in &lists[0] {
                for (f2, d2) in &lists[1] {
                    if d1 + d2 > best && (0..graph.arcs.len()).all(|a| f64::from(f1[a] + f2[a]) <= graph.caps[a]) {
                        best = d1 + d2;
                    }
                }
            }
            best
        }
        _ => panic!("oracle handles at most two commodities"),
    }
}

// ---------------------------------------------------------------------------
// Edmonds-Karp with lower bounds

struct Residual {
    head: Vec<usize>,
    cap: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

const EPS: f64 = 1e-12;

impl Residual {
    fn new(nodes: usize) -> Self {
        Residual { head: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    /// Adds `u -> v` and its reverse; returns the forward edge id.
    fn add(&mut self, u: usize, v: usize, cap: f64) -> usize {
        let id = self.head.len();
        self.head.push(v);
        self.cap.push(cap);
        self.adj[u].push(id);
        self.head.push(u);
        self.cap.push(0.0);
        self.adj[v].push(id + 1);
        id
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let mut prev = vec![usize::MAX; self.adj.len()];
            let mut seen = vec![false; self.adj.len()];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let v = self.head[e];
                    if !seen[v] && self.cap[e] > EPS {
                        seen[v] = true;
                        prev[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let e = prev[v];
                push = push.min(self.cap[e]);
                v = self.head[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = prev[v];
                self.cap[e] -= push;
                self.cap[e ^ 1] += push;
                v = self.head[e ^ 1];
            }
            total += push;
        }
    }
}

/// One arc of a lower-bounded flow problem.
#[derive(Clone, Copy, Debug)]
pub struct BoundedArc {
    pub u: usize,
    pub v: usize,
    pub lower: f64,
    pub upper: f64,
}

/// Maximum `source -> sink` flow of at most `limit` honoring every arc's
/// lower bound, or `None` when the lower bounds cannot be met.
pub fn max_flow_with_lower_bounds(
    nodes: usize,
    arcs: &[BoundedArc],
    source: usize,
    sink: usize,
    limit: f64,
) -> Option<f64> {
    // Extra nodes: the capped sink, a super source and a super sink.
    let capped = nodes;
    let (ss, tt) = (nodes + 1, nodes + 2);
    let mut g = Residual::new(nodes + 3);
    let mut excess = vec![0.0; nodes + 3];
    for a in arcs {
        if a.lower > a.upper + EPS {
            return None;
        }
        g.add(a.u, a.v, a.upper - a.lower);
        excess[a.v] += a.lower;
        excess[a.u] -= a.lower;
    }
    g.add(sink, capped, limit);
    let back = g.add(capped, source, f64::INFINITY);
    let mut needed = 0.0;
    let mut helpers = Vec::new();
    for (x, &ex) in excess.iter().enumerate() {
        if ex > EPS {
            helpers.push(g.add(ss, x, ex));
            needed += ex;
        } else if ex < -EPS {
            helpers.push(g.add(x, tt, -ex));
        }
    }
    if g.max_flow(ss, tt) < needed - 1e-9 {
        return None;
    }
    let base = g.cap[back ^ 1];
    for e in helpers.into_iter().chain([back]) {
        g.cap[e] = 0.0;
        g.cap[e ^ 1] = 0.0;
    }
    Some(base + g.max_flow(source, capped))
}

/// Single-commodity maximum flow of a step graph.
pub fn step_max_flow(graph: &StepGraph, c: &Commodity) -> f64 {
    let arcs: Vec<BoundedArc> = graph
        .arcs
        .iter()
        .zip(&graph.caps)
        .filter(|(_, &cap)| cap > 0.0)
        .map(|(&(u, v), &cap)| BoundedArc { u, v, lower: 0.0, upper: cap.min(c.demand) })
        .collect();
    max_flow_with_lower_bounds(graph.num_nodes, &arcs, c.source, c.sink, c.demand).expect("no lower bounds")
}

/// Best epsilon for one commodity by trying every subset of the common
/// support as the fixed edge set. Each subset edge must carry at least
/// `flow_epsilon` at every step.
pub fn joint_oracle(network: &TimeVaryingNetwork, c: &Commodity, flow_epsilon: f64) -> f64 {
    let steps = network.num_steps();
    let max_tp: Vec<f64> = (0..steps).map(|j| step_max_flow(&network.step_graph(j), c)).collect();
    if max_tp.iter().all(|&v| v <= 1e-9) {
        return 1.0;
    }
    let shared = network.common_support_indices();
    let mut best: f64 = 0.0;
    for mask in 0u64..(1 << shared.len()) {
        let chosen: Vec<usize> = (0..shared.len()).filter(|&b| (mask >> b) & 1 == 1).map(|b| shared[b]).collect();
        let mut eps: f64 = 1.0;
        for j in 0..steps {
            let arcs: Vec<BoundedArc> = chosen
                .iter()
                .map(|&e| {
                    let l = &network.links[e];
                    let cap = f64::from(network.capacities[j][e]).min(c.demand);
                    BoundedArc { u: l.u, v: l.v, lower: flow_epsilon, upper: cap }
                })
                .collect();
            match max_flow_with_lower_bounds(network.num_nodes(), &arcs, c.source, c.sink, c.demand) {
                None => {
                    eps = -1.0;
                    break;
                }
                Some(v) if max_tp[j] > 1e-9 => eps = eps.min((v / max_tp[j]).min(1.0)),
                Some(_) => {}
            }
        }
        best = best.max(eps);
    }
    best
}
