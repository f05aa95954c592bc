//! Depth-first branch-and-bound over binary variables.

use super::simplex::solve_bounded;
use super::{Direction, LinearProgram, LpError, SolveResult, Status, VarKind, INTEGRALITY_TOL, PRUNE_TOL};

#[derive(Debug, Clone)]
pub struct MilpOptions {
    /// Maximum number of LP relaxations solved before giving up.
    pub node_limit: usize,
    /// Prune a node when its bound beats the incumbent by no more than this.
    pub abs_gap: f64,
    /// Relative variant of `abs_gap`, scaled by `|incumbent|`.
    pub rel_gap: f64,
    pub integrality_tol: f64,
    /// Round the root relaxation (ceiling and nearest) and evaluate both.
    pub root_rounding: bool,
    /// Binary values of a known feasible point, tried before the search.
    pub warm_start: Option<Vec<(usize, f64)>>,
}

impl Default for MilpOptions {
    fn default() -> Self {
        MilpOptions {
            node_limit: 200_000,
            abs_gap: PRUNE_TOL,
            rel_gap: 0.0,
            integrality_tol: INTEGRALITY_TOL,
            root_rounding: true,
            warm_start: None,
        }
    }
}

pub fn solve_milp(lp: &LinearProgram) -> Result<SolveResult, LpError> {
    solve_milp_with(lp, &MilpOptions::default())
}

struct Search<'a> {
    lp: &'a LinearProgram,
    opts: &'a MilpOptions,
    binaries: Vec<usize>,
    /// Maximization-form sign of the objective.
    flip: f64,
    /// Objective takes integer values on every feasible point.
    integral_objective: bool,
    incumbent: Option<SolveResult>,
    iterations: usize,
    nodes: usize,
}

/// Branch-and-bound: lowest-index fractional binary, depth-first, nearest
/// rounding explored first, nodes pruned against the incumbent.
pub fn solve_milp_with(lp: &LinearProgram, opts: &MilpOptions) -> Result<SolveResult, LpError> {
    lp.validate()?;
    let binaries: Vec<usize> = (0..lp.num_vars()).filter(|&j| lp.variables[j].kind == VarKind::Binary).collect();
    let flip = match lp.objective.direction {
        Direction::Maximize => 1.0,
        Direction::Minimize => -1.0,
    };
    let integral_objective =
        lp.objective.terms.iter().all(|&(v, c)| lp.variables[v.0].kind == VarKind::Binary && c == c.round());
    let mut search = Search { lp, opts, binaries, flip, integral_objective, incumbent: None, iterations: 0, nodes: 0 };
    let lower: Vec<f64> = lp.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = lp.variables.iter().map(|v| v.upper).collect();

    if let Some(start) = &opts.warm_start {
        search.try_fixing(&lower, &upper, start.iter().copied())?;
    }

    let mut stack = vec![(lower, upper)];
    let mut root = true;
    while let Some((lo, hi)) = stack.pop() {
        if search.nodes >= opts.node_limit {
            return Err(LpError::NodeLimit {
                limit: opts.node_limit,
                incumbent: search.incumbent.map(|mut inc| {
                    inc.iterations = search.iterations;
                    inc.nodes = search.nodes;
                    Box::new(inc)
                }),
            });
        }
        search.nodes += 1;
        let relax = solve_bounded(lp, &lo, &hi)?;
        search.iterations += relax.iterations;
        match relax.status {
            Status::Infeasible => continue,
            Status::Unbounded => {
                let mut res = relax;
                res.iterations = search.iterations;
                res.nodes = search.nodes;
                return Ok(res);
            }
            Status::Optimal => {}
        }
        if search.prunable(relax.objective_value) {
            continue;
        }
        let fractional = search
            .binaries
            .iter()
            .copied()
            .find(|&j| (relax.values[j] - relax.values[j].round()).abs() > opts.integrality_tol);
        let Some(j) = fractional else {
            let fixed: Vec<(usize, f64)> = search.binaries.iter().map(|&b| (b, relax.values[b].round())).collect();
            search.try_fixing(&lo, &hi, fixed.into_iter())?;
            continue;
        };
        if root && opts.root_rounding {
            let ceil: Vec<(usize, f64)> = search
                .binaries
                .iter()
                .map(|&b| (b, if relax.values[b] > opts.integrality_tol { 1.0 } else { 0.0 }))
                .collect();
            let nearest: Vec<(usize, f64)> = search.binaries.iter().map(|&b| (b, relax.values[b].round())).collect();
            search.try_fixing(&lo, &hi, ceil.iter().copied())?;
            if nearest != ceil {
                search.try_fixing(&lo, &hi, nearest.into_iter())?;
            }
            if search.prunable(relax.objective_value) {
                continue;
            }
        }
        root = false;

        let v = relax.values[j];
        let mut down = (lo.clone(), hi.clone());
        down.1[j] = 0.0;
        let mut up = (lo, hi);
        up.0[j] = 1.0;
        // Stack order: the branch pushed last is explored first.
        if v >= 0.5 {
            stack.push(down);
            stack.push(up);
        } else {
            stack.push(up);
            stack.push(down);
        }
    }

    match search.incumbent {
        Some(mut inc) => {
            inc.iterations = search.iterations;
            inc.nodes = search.nodes;
            Ok(inc)
        }
        None => {
            let mut res = SolveResult::infeasible(search.iterations);
            res.nodes = search.nodes;
            Ok(res)
        }
    }
}

impl Search<'_> {
    fn prunable(&self, bound: f64) -> bool {
        let Some(inc) = &self.incumbent else {
            return false;
        };
        let bound = self.flip * bound;
        let best = self.flip * inc.objective_value;
        if self.integral_objective && (bound + 1e-6).floor() <= best + 0.5 {
            return true;
        }
        bound <= best + self.opts.abs_gap.max(self.opts.rel_gap * best.abs())
    }

    /// Solves the LP with the given binaries fixed and records an improved
    /// incumbent. Fixing every binary makes the LP answer integral.
    fn try_fixing(
        &mut self,
        lower: &[f64],
        upper: &[f64],
        fixed: impl Iterator<Item = (usize, f64)>,
    ) -> Result<(), LpError> {
        let mut lo = lower.to_vec();
        let mut hi = upper.to_vec();
        for (j, v) in fixed {
            if v < lower[j] || v > upper[j] {
                return Ok(());
            }
            lo[j] = v;
            hi[j] = v;
        }
        let res = solve_bounded(self.lp, &lo, &hi)?;
        self.iterations += res.iterations;
        if res.status != Status::Optimal {
            return Ok(());
        }
        if self.lp.max_fractionality(&res.values) > self.opts.integrality_tol {
            return Ok(());
        }
        let better = match &self.incumbent {
            None => true,
            Some(inc) => self.flip * res.objective_value > self.flip * inc.objective_value + PRUNE_TOL,
        };
        if better {
            self.incumbent = Some(SolveResult { duals: None, ..res });
        }
        Ok(())
    }
}
