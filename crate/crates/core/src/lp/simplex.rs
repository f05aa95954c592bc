//! Bounded-variable primal simplex on a dense tableau.
//!
//! Every row gets a logical column (`a.x + s = b`) whose bounds encode the
//! row sense. Rows whose logical starts out of bounds get an artificial
//! column and a sum-of-artificials phase 1. Pricing is Dantzig's rule with
//! lowest-index tie-breaks; after a run of degenerate pivots the solver
//! switches to Bland's rule until the objective moves again, so the pivot
//! sequence is fully deterministic.
//!
//! The ratio test is the two-pass Harris variant: it first finds the
//! longest step that keeps basics within a small tolerance of their bounds,
//! then pivots on the largest entry among rows blocking within that step.
//! The tableau is rebuilt from the original columns every few hundred
//! pivots so rounding error cannot accumulate.

use super::{Direction, LinearProgram, LpError, Sense, SolveResult, Status, VarKind, FEASIBILITY_TOL};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const HARRIS_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-13;
const PHASE1_TOL: f64 = 1e-8;
const DEGENERATE_RUN: usize = 50;
/// In Bland mode, candidates whose pivot is this much smaller than the best
/// one are ignored.
const BLAND_PIVOT_RATIO: f64 = 1e-3;
const SINGULAR_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    xb: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<State>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    iterations: usize,
    limit: usize,
    pivot_row: Vec<(usize, f64)>,
    /// Original columns as sparse `(row, value)` lists, for refactoring.
    columns: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    refactor_every: usize,
    since_refactor: usize,
}

/// Solves an all-continuous model.
pub fn solve_lp(lp: &LinearProgram) -> Result<SolveResult, LpError> {
    lp.validate()?;
    if let Some(v) = lp.variables.iter().find(|v| v.kind == VarKind::Binary) {
        return Err(LpError::NotContinuous(v.name.clone()));
    }
    let lower: Vec<f64> = lp.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = lp.variables.iter().map(|v| v.upper).collect();
    solve_bounded(lp, &lower, &upper)
}

/// Solves the continuous relaxation of `lp` with overridden variable bounds.
/// The model is assumed valid.
pub(crate) fn solve_bounded(lp: &LinearProgram, lower: &[f64], upper: &[f64]) -> Result<SolveResult, LpError> {
    let n = lp.num_vars();
    let m = lp.constraints.len();
    if lower.iter().zip(upper).any(|(l, u)| l > u) {
        return Ok(SolveResult::infeasible(0));
    }

    // Residuals with every structural at its lower bound.
    let mut residual: Vec<f64> = lp.constraints.iter().map(|c| c.rhs).collect();
    for (r, con) in lp.constraints.iter().enumerate() {
        for &(v, coef) in &con.terms {
            residual[r] -= coef * lower[v.0];
        }
    }

    let mut art_rows = Vec::new();
    let mut sign = vec![1.0; m];
    for (r, con) in lp.constraints.iter().enumerate() {
        let res = residual[r];
        let fits = match con.sense {
            Sense::Le => res >= 0.0,
            Sense::Ge => res <= 0.0,
            Sense::Eq => res.abs() <= 1e-11,
        };
        if !fits {
            art_rows.push(r);
            sign[r] = res.signum();
        }
    }

    let cols = n + m + art_rows.len();
    let mut t = Tableau {
        rows: m,
        cols,
        a: vec![0.0; m * cols],
        xb: vec![0.0; m],
        basis: vec![0; m],
        state: vec![State::Lower; cols],
        lo: vec![0.0; cols],
        hi: vec![0.0; cols],
        cost: vec![0.0; cols],
        d: vec![0.0; cols],
        iterations: 0,
        limit: 50 * (m + cols) + 10_000,
        pivot_row: Vec::new(),
        columns: vec![Vec::new(); cols],
        rhs: lp.constraints.iter().zip(&sign).map(|(c, s)| s * c.rhs).collect(),
        refactor_every: m.max(100),
        since_refactor: 0,
    };
    t.lo[..n].copy_from_slice(lower);
    t.hi[..n].copy_from_slice(upper);
    for (r, con) in lp.constraints.iter().enumerate() {
        let row = &mut t.a[r * cols..(r + 1) * cols];
        for &(v, coef) in &con.terms {
            row[v.0] += sign[r] * coef;
        }
        row[n + r] = sign[r];
        let s = n + r;
        (t.lo[s], t.hi[s]) = match con.sense {
            Sense::Le => (0.0, f64::INFINITY),
            Sense::Ge => (f64::NEG_INFINITY, 0.0),
            Sense::Eq => (0.0, 0.0),
        };
    }
    let mut is_art_row = vec![false; m];
    for (k, &r) in art_rows.iter().enumerate() {
        let col = n + m + k;
        t.a[r * cols + col] = 1.0;
        t.lo[col] = 0.0;
        t.hi[col] = f64::INFINITY;
        t.basis[r] = col;
        t.state[col] = State::Basic;
        t.xb[r] = residual[r].abs();
        // The logical sits at whichever bound is finite (0 for every sense).
        t.state[n + r] = if lp.constraints[r].sense == Sense::Ge { State::Upper } else { State::Lower };
        is_art_row[r] = true;
    }
    for r in 0..m {
        if !is_art_row[r] {
            t.basis[r] = n + r;
            t.state[n + r] = State::Basic;
            t.xb[r] = if lp.constraints[r].sense == Sense::Eq { 0.0 } else { residual[r] };
        }
    }
    for r in 0..m {
        for (j, &v) in t.a[r * cols..(r + 1) * cols].iter().enumerate() {
            if v != 0.0 {
                t.columns[j].push((r, v));
            }
        }
    }

    if !art_rows.is_empty() {
        for k in 0..art_rows.len() {
            t.cost[n + m + k] = -1.0;
        }
        t.reset_reduced_costs();
        t.run()?;
        t.refactor()?;
        let infeasibility: f64 = (0..m).filter(|&r| t.basis[r] >= n + m).map(|r| t.xb[r]).sum();
        if infeasibility > PHASE1_TOL {
            return Ok(SolveResult::infeasible(t.iterations));
        }
        for col in n + m..cols {
            t.hi[col] = 0.0;
            t.cost[col] = 0.0;
        }
        t.drive_out_artificials(n + m);
    }

    let flip = match lp.objective.direction {
        Direction::Maximize => 1.0,
        Direction::Minimize => -1.0,
    };
    let c = lp.dense_objective();
    for j in 0..n {
        t.cost[j] = flip * c[j];
    }
    t.reset_reduced_costs();
    if let Outcome::Unbounded = t.run()? {
        return Ok(SolveResult {
            status: Status::Unbounded,
            objective_value: flip * f64::INFINITY,
            values: Vec::new(),
            duals: None,
            iterations: t.iterations,
            nodes: 0,
        });
    }
    // A final rebuild gives basic values and duals free of accumulated error.
    // Rounding can leave a slightly negative reduced cost, so polish once.
    t.refactor()?;
    t.run()?;

    let mut x = vec![0.0; n];
    for (j, xj) in x.iter_mut().enumerate() {
        *xj = match t.state[j] {
            State::Lower => t.lo[j],
            State::Upper => t.hi[j],
            State::Basic => 0.0,
        };
    }
    for r in 0..m {
        if t.basis[r] < n {
            let j = t.basis[r];
            x[j] = t.xb[r].clamp(t.lo[j], t.hi[j]);
        }
    }
    let mut bounded = lp.clone();
    for (var, (&l, &u)) in bounded.variables.iter_mut().zip(lower.iter().zip(upper)) {
        var.lower = l;
        var.upper = u;
    }
    let violation = bounded.max_violation(&x);
    if violation > FEASIBILITY_TOL {
        return Err(LpError::Numerical(format!("solution violates a constraint by {violation:e}")));
    }
    let duals = (0..m).map(|r| -flip * t.d[n + r]).collect();
    Ok(SolveResult {
        status: Status::Optimal,
        objective_value: lp.objective_value(&x),
        values: x,
        duals: Some(duals),
        iterations: t.iterations,
        nodes: 0,
    })
}

impl Tableau {
    fn value(&self, j: usize) -> f64 {
        match self.state[j] {
            State::Lower => self.lo[j],
            State::Upper => self.hi[j],
            State::Basic => unreachable!("basic values live in xb"),
        }
    }

    fn reset_reduced_costs(&mut self) {
        self.d.copy_from_slice(&self.cost);
        for r in 0..self.rows {
            let cb = self.cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.a[r * self.cols..(r + 1) * self.cols];
                for (dj, &arj) in self.d.iter_mut().zip(row) {
                    *dj -= cb * arj;
                }
            }
        }
        for r in 0..self.rows {
            self.d[self.basis[r]] = 0.0;
        }
    }

    /// Rebuilds the tableau, basic values and reduced costs from the
    /// original columns and the current basis.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.rows;
        self.since_refactor = 0;
        if m == 0 {
            self.reset_reduced_costs();
            return Ok(());
        }
        // Gauss-Jordan on [B | I]; `inv` ends up holding B^-1 with rows
        // permuted to match the pivot order.
        let mut mat = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for &(r, v) in &self.columns[j] {
                mat[r * m + k] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for r in 0..m {
            inv[r * m + r] = 1.0;
        }
        let mut used = vec![false; m];
        let mut pivot_of_col = vec![0usize; m];
        for k in 0..m {
            let mut best = None;
            let mut best_abs = SINGULAR_TOL;
            for r in 0..m {
                let v = mat[r * m + k].abs();
                if !used[r] && v > best_abs {
                    best_abs = v;
                    best = Some(r);
                }
            }
            let Some(p) = best else {
                return Err(LpError::Numerical("basis became singular".into()));
            };
            used[p] = true;
            pivot_of_col[k] = p;
            let piv = mat[p * m + k];
            for j in 0..m {
                mat[p * m + j] /= piv;
                inv[p * m + j] /= piv;
            }
            let prow: Vec<(usize, f64)> =
                (0..m).filter(|&j| mat[p * m + j] != 0.0).map(|j| (j, mat[p * m + j])).collect();
            let irow: Vec<(usize, f64)> =
                (0..m).filter(|&j| inv[p * m + j] != 0.0).map(|j| (j, inv[p * m + j])).collect();
            for r in 0..m {
                if r == p {
                    continue;
                }
                let f = mat[r * m + k];
                if f == 0.0 {
                    continue;
                }
                for &(j, v) in &prow {
                    mat[r * m + j] -= f * v;
                }
                for &(j, v) in &irow {
                    inv[r * m + j] -= f * v;
                }
                mat[r * m + k] = 0.0;
            }
        }
        // Row k of the tableau belongs to basis[k], whose unit entry sits
        // in row pivot_of_col[k] of the reduced matrix.
        let cols = self.cols;
        self.a.iter_mut().for_each(|v| *v = 0.0);
        for (j, column) in self.columns.iter().enumerate() {
            for &(r, v) in column {
                for k in 0..m {
                    let b = inv[pivot_of_col[k] * m + r];
                    if b != 0.0 {
                        self.a[k * cols + j] += b * v;
                    }
                }
            }
        }
        for v in self.a.iter_mut() {
            if v.abs() < DROP_TOL {
                *v = 0.0;
            }
        }
        for (k, &j) in self.basis.iter().enumerate() {
            for i in 0..m {
                self.a[i * cols + j] = if i == k { 1.0 } else { 0.0 };
            }
        }
        let mut rhs = self.rhs.clone();
        for j in 0..cols {
            if self.state[j] == State::Basic {
                continue;
            }
            let x = self.value(j);
            if x != 0.0 {
                for &(r, v) in &self.columns[j] {
                    rhs[r] -= v * x;
                }
            }
        }
        for k in 0..m {
            let row = &inv[pivot_of_col[k] * m..(pivot_of_col[k] + 1) * m];
            self.xb[k] = row.iter().zip(&rhs).map(|(b, r)| b * r).sum();
        }
        self.reset_reduced_costs();
        Ok(())
    }

    fn entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.cols {
            let dir = match self.state[j] {
                State::Basic => continue,
                _ if self.hi[j] <= self.lo[j] => continue,
                State::Lower if self.d[j] > OPT_TOL => 1.0,
                State::Upper if self.d[j] < -OPT_TOL => -1.0,
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            let score = self.d[j].abs();
            if score > best_score {
                best_score = score;
                best = Some((j, dir));
            }
        }
        best
    }

    /// Distance basic `r` may move at unit `rate` before hitting a bound
    /// relaxed by `slack`, or `None` if it never does.
    fn blocking(&self, r: usize, rate: f64, slack: f64) -> Option<f64> {
        let b = self.basis[r];
        let ratio = if rate < 0.0 {
            if self.lo[b] == f64::NEG_INFINITY {
                return None;
            }
            (self.xb[r] - self.lo[b] + slack) / -rate
        } else {
            if self.hi[b] == f64::INFINITY {
                return None;
            }
            (self.hi[b] - self.xb[r] + slack) / rate
        };
        Some(ratio.max(0.0))
    }

    /// Harris ratio test. Returns the step and the leaving row, or `None`
    /// for a bound flip of the entering column.
    fn ratio_test(&self, q: usize, dir: f64, bland: bool) -> (f64, Option<usize>) {
        let range = self.hi[q] - self.lo[q];
        let mut relaxed = f64::INFINITY;
        for r in 0..self.rows {
            let alpha = self.a[r * self.cols + q];
            if alpha.abs() > PIVOT_TOL {
                if let Some(ratio) = self.blocking(r, -dir * alpha, HARRIS_TOL) {
                    relaxed = relaxed.min(ratio);
                }
            }
        }
        if range <= relaxed {
            return (range, None);
        }
        let mut candidates = Vec::new();
        let mut max_alpha: f64 = 0.0;
        for r in 0..self.rows {
            let alpha = self.a[r * self.cols + q];
            if alpha.abs() <= PIVOT_TOL {
                continue;
            }
            if let Some(ratio) = self.blocking(r, -dir * alpha, 0.0) {
                if ratio <= relaxed {
                    candidates.push((r, ratio, alpha.abs()));
                    max_alpha = max_alpha.max(alpha.abs());
                }
            }
        }
        let chosen = if bland {
            candidates.iter().filter(|c| c.2 >= BLAND_PIVOT_RATIO * max_alpha).min_by_key(|c| self.basis[c.0])
        } else {
            // Largest pivot; ties go to the lowest basic index.
            candidates.iter().max_by(|x, y| x.2.total_cmp(&y.2).then_with(|| self.basis[y.0].cmp(&self.basis[x.0])))
        };
        let (r, ratio, _) = *chosen.expect("a finite relaxed step has a blocking row");
        (ratio, Some(r))
    }

    fn run(&mut self) -> Result<Outcome, LpError> {
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            if self.since_refactor >= self.refactor_every {
                self.refactor()?;
            }
            let Some((q, dir)) = self.entering(bland) else {
                return Ok(Outcome::Optimal);
            };
            self.iterations += 1;
            if self.iterations > self.limit {
                return Err(LpError::IterationLimit { limit: self.limit });
            }
            let (step, leave) = self.ratio_test(q, dir, bland);
            if step == f64::INFINITY {
                return Ok(Outcome::Unbounded);
            }

            if step <= PIVOT_TOL {
                degenerate += 1;
                if degenerate >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }

            for r in 0..self.rows {
                let alpha = self.a[r * self.cols + q];
                if alpha != 0.0 {
                    self.xb[r] -= dir * alpha * step;
                }
            }
            match leave {
                None => {
                    self.state[q] = if dir > 0.0 { State::Upper } else { State::Lower };
                }
                Some(r) => {
                    let entering_value = self.value(q) + dir * step;
                    let b = self.basis[r];
                    let rate = -dir * self.a[r * self.cols + q];
                    self.state[b] = if rate < 0.0 { State::Lower } else { State::Upper };
                    self.basis[r] = q;
                    self.state[q] = State::Basic;
                    self.xb[r] = entering_value;
                    self.pivot(r, q);
                    self.since_refactor += 1;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let piv = self.a[r * cols + q];
        self.pivot_row.clear();
        {
            let row = &mut self.a[r * cols..(r + 1) * cols];
            for (j, v) in row.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v /= piv;
                    if v.abs() < DROP_TOL {
                        *v = 0.0;
                    } else {
                        self.pivot_row.push((j, *v));
                    }
                }
            }
            row[q] = 1.0;
        }
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * cols + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.a[i * cols..(i + 1) * cols];
            for &(j, v) in &self.pivot_row {
                let updated = row[j] - f * v;
                row[j] = if updated.abs() < DROP_TOL { 0.0 } else { updated };
            }
            row[q] = 0.0;
        }
        let f = self.d[q];
        if f != 0.0 {
            for &(j, v) in &self.pivot_row {
                self.d[j] -= f * v;
            }
        }
        self.d[q] = 0.0;
    }

    /// Degenerate pivots that swap zero-valued basic artificials for real
    /// columns. Rows where no such column exists are redundant and keep
    /// their artificial fixed at zero.
    fn drive_out_artificials(&mut self, first_art: usize) {
        for r in 0..self.rows {
            if self.basis[r] < first_art {
                continue;
            }
            let row = &self.a[r * self.cols..(r + 1) * self.cols];
            let mut best: Option<(usize, f64)> = None;
            for (j, &v) in row[..first_art].iter().enumerate() {
                if self.state[j] != State::Basic && v.abs() > 1e-7 && best.is_none_or(|(_, b)| v.abs() > b) {
                    best = Some((j, v.abs()));
                }
            }
            if let Some((q, _)) = best {
                let art = self.basis[r];
                let entering_value = self.value(q);
                self.state[art] = State::Lower;
                self.basis[r] = q;
                self.state[q] = State::Basic;
                self.xb[r] = entering_value;
                self.pivot(r, q);
            }
        }
    }
}
