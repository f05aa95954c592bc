//! Linear and mixed-binary programming.
//!
//! [`LinearProgram`] is a plain sparse model container. [`solve_lp`] runs a
//! bounded-variable primal simplex on a dense tableau and [`solve_milp`] adds
//! depth-first branch-and-bound over the binary variables. Models can be
//! written to and read from the CPLEX-style LP text dialect through
//! [`export_lp_text`] and [`parse_lp_text`].

mod milp;
mod simplex;
mod text;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

pub use milp::{solve_milp, solve_milp_with, MilpOptions};
pub use simplex::solve_lp;
pub use text::{export_lp_text, parse_lp_text};

/// Primal feasibility tolerance used when validating returned assignments.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Distance from 0/1 under which a binary counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Default absolute tolerance for bound pruning in branch-and-bound.
pub const PRUNE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("variable `{name}` has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("binary variable `{name}` has bounds outside [0, 1]")]
    BinaryBounds { name: String },
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("constraint `{constraint}` references undeclared variable index {index}")]
    UnknownVariable { constraint: String, index: usize },
    #[error("non-finite coefficient or right-hand side in `{0}`")]
    NonFinite(String),
    #[error("solve_lp needs an all-continuous model, `{0}` is binary")]
    NotContinuous(String),
    #[error("name `{0}` cannot be written in the LP text dialect")]
    InvalidName(String),
    #[error("LP text line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("simplex iteration limit of {limit} exceeded")]
    IterationLimit { limit: usize },
    #[error("branch-and-bound node limit of {limit} exceeded")]
    NodeLimit {
        limit: usize,
        /// Best integral solution found before the limit hit, if any.
        incumbent: Option<Box<SolveResult>>,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl LpError {
    /// Resource exhaustion as opposed to a malformed model.
    pub fn is_resource(&self) -> bool {
        matches!(self, LpError::IterationLimit { .. } | LpError::NodeLimit { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    /// Amount by which `values` violates this row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub direction: Direction,
    pub terms: Vec<(VarId, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
    index: HashMap<String, VarId>,
}

impl LinearProgram {
    pub fn new(direction: Direction) -> Self {
        LinearProgram {
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Objective { direction, terms: Vec::new() },
            index: HashMap::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, kind: VarKind) -> VarId {
        let name = name.into();
        let id = VarId(self.variables.len());
        // Duplicates keep the first mapping and are reported by `validate`.
        self.index.entry(name.clone()).or_insert(id);
        self.variables.push(Variable { name, lower, upper, kind });
        id
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.add_var(name, lower, upper, VarKind::Continuous)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, 0.0, 1.0, VarKind::Binary)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        self.constraints.push(Constraint { name: name.into(), terms, sense, rhs });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, terms: Vec<(VarId, f64)>) {
        self.objective.terms = terms;
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let mut seen = HashMap::with_capacity(self.variables.len());
        for var in &self.variables {
            if seen.insert(var.name.as_str(), ()).is_some() {
                return Err(LpError::DuplicateVariable(var.name.clone()));
            }
            if !var.lower.is_finite() || !var.upper.is_finite() || var.lower > var.upper {
                return Err(LpError::InvalidBounds { name: var.name.clone(), lower: var.lower, upper: var.upper });
            }
            if var.kind == VarKind::Binary && (var.lower < 0.0 || var.upper > 1.0) {
                return Err(LpError::BinaryBounds { name: var.name.clone() });
            }
        }
        let n = self.variables.len();
        for con in &self.constraints {
            if !con.rhs.is_finite() {
                return Err(LpError::NonFinite(con.name.clone()));
            }
            for &(v, a) in &con.terms {
                if v.0 >= n {
                    return Err(LpError::UnknownVariable { constraint: con.name.clone(), index: v.0 });
                }
                if !a.is_finite() {
                    return Err(LpError::NonFinite(con.name.clone()));
                }
            }
        }
        for &(v, a) in &self.objective.terms {
            if v.0 >= n {
                return Err(LpError::UnknownVariable { constraint: "objective".into(), index: v.0 });
            }
            if !a.is_finite() {
                return Err(LpError::NonFinite("objective".into()));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Largest constraint or bound violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.violation(values));
        let bounds = self.variables.iter().zip(values).map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// Largest distance of a binary variable from {0, 1}.
    pub fn max_fractionality(&self, values: &[f64]) -> f64 {
        self.variables
            .iter()
            .zip(values)
            .filter(|(v, _)| v.kind == VarKind::Binary)
            .map(|(_, &x)| (x - x.round()).abs())
            .fold(0.0, f64::max)
    }

    /// Dense objective vector.
    pub fn dense_objective(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.variables.len()];
        for &(v, a) in &self.objective.terms {
            c[v.0] += a;
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    pub objective_value: f64,
    /// Variable values indexed by [`VarId`]; empty unless optimal.
    pub values: Vec<f64>,
    /// Row shadow prices in the model's own objective sense (LP solves only).
    pub duals: Option<Vec<f64>>,
    pub iterations: usize,
    /// Branch-and-bound nodes explored (0 for pure LP solves).
    pub nodes: usize,
}

impl SolveResult {
    pub(crate) fn infeasible(iterations: usize) -> Self {
        SolveResult {
            status: Status::Infeasible,
            objective_value: f64::NAN,
            values: Vec::new(),
            duals: None,
            iterations,
            nodes: 0,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }

    /// Name-keyed view of the assignment.
    pub fn assignment(&self, lp: &LinearProgram) -> BTreeMap<String, f64> {
        lp.variables.iter().zip(&self.values).map(|(v, &x)| (v.name.clone(), x)).collect()
    }
}

/// Duality gap of an optimal LP solve, recomputed from the model data.
///
/// The returned value is `dual bound - primal objective` in maximization
/// form. It is `None` when the result carries no duals or the duals have the
/// wrong sign for their row sense (larger than `sign_tol`).
pub fn duality_gap(lp: &LinearProgram, result: &SolveResult, sign_tol: f64) -> Option<f64> {
    let duals = result.duals.as_ref()?;
    let flip = match lp.objective.direction {
        Direction::Maximize => 1.0,
        Direction::Minimize => -1.0,
    };
    let mut reduced: Vec<f64> = lp.dense_objective().iter().map(|c| flip * c).collect();
    let mut dual_obj = 0.0;
    for (con, &y) in lp.constraints.iter().zip(duals) {
        let y = flip * y;
        match con.sense {
            Sense::Le if y < -sign_tol => return None,
            Sense::Ge if y > sign_tol => return None,
            _ => {}
        }
        dual_obj += y * con.rhs;
        for &(v, a) in &con.terms {
            reduced[v.0] -= y * a;
        }
    }
    for (var, r) in lp.variables.iter().zip(&reduced) {
        dual_obj += if *r > 0.0 { r * var.upper } else { r * var.lower };
    }
    let primal = flip * lp.objective_value(&result.values);
    Some(dual_obj - primal)
}
