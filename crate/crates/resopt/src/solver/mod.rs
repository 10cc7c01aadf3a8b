//! Exact MILP solving: LP relaxations via the built-in simplex, integrality
//! via best-first branch-and-bound, plus a brute-force enumeration oracle and
//! an LP-format writer/re-parser.

mod branch_bound;
pub mod lp_file;
pub mod simplex;

use std::time::Duration;

use thiserror::Error;

use crate::milp::{MilpModel, Relation, VarId, VarKind};

pub use branch_bound::brute_force;
pub use lp_file::{export_lp, parse_lp, LpExport};
pub use simplex::{solve_lp, LpOutcome, LpProblem, LpRow, LpStatus};

/// Absolute feasibility tolerance used when auditing solutions.
pub const FEASIBILITY_TOL: f64 = 1e-6;
/// Tolerance for treating a relaxation value as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Binary-count ceiling of the brute-force oracle.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("model has {count} binary variables; brute force handles at most {limit}")]
    TooManyBinaries { count: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    /// Linear relaxations solved (branch-and-bound nodes or enumerated
    /// assignments).
    pub nodes: u64,
    /// Total simplex iterations.
    pub iterations: u64,
    /// Wall-clock time. Excluded from equality: two runs of the same model
    /// are equal in every other field.
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub values: Option<Vec<f64>>,
    pub stats: SolveStats,
}

impl PartialEq for Solution {
    fn eq(&self, other: &Self) -> bool {
        self.status == other.status
            && self.objective == other.objective
            && self.values == other.values
            && self.stats.nodes == other.stats.nodes
            && self.stats.iterations == other.stats.iterations
    }
}

impl Solution {
    /// Value of one variable; panics when no assignment is present.
    pub fn value(&self, id: VarId) -> f64 {
        self.values.as_ref().expect("solution carries no assignment")[id.index()]
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Absolute optimality gap of branch-and-bound.
    pub abs_gap: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { abs_gap: 1e-6 }
    }
}

/// Flattens a [`MilpModel`] into solver form, merging duplicate terms.
pub fn lp_from_model(model: &MilpModel) -> LpProblem {
    let n = model.num_vars();
    let mut cost = vec![0.0; n];
    for &(v, c) in &model.objective {
        cost[v.index()] += c;
    }
    let rows = model
        .constraints
        .iter()
        .map(|c| {
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(c.terms.len());
            for &(v, a) in &c.terms {
                match merged.iter_mut().find(|(j, _)| *j == v.index()) {
                    Some((_, acc)) => *acc += a,
                    None => merged.push((v.index(), a)),
                }
            }
            merged.retain(|&(_, a)| a != 0.0);
            LpRow { terms: merged, relation: c.relation, rhs: c.rhs }
        })
        .collect();
    LpProblem {
        lower: model.variables.iter().map(|v| v.lower).collect(),
        upper: model.variables.iter().map(|v| v.upper).collect(),
        cost,
        rows,
    }
}

/// Checks an assignment against the original model (bounds, integrality and
/// every constraint, at [`FEASIBILITY_TOL`]); returns human-readable
/// violations.
pub fn audit(model: &MilpModel, values: &[f64]) -> Vec<String> {
    let mut out = Vec::new();
    if values.len() != model.num_vars() {
        out.push(format!(
            "assignment has {} values for {} variables",
            values.len(),
            model.num_vars()
        ));
        return out;
    }
    for (i, var) in model.variables.iter().enumerate() {
        let x = values[i];
        if x < var.lower - FEASIBILITY_TOL || x > var.upper + FEASIBILITY_TOL {
            out.push(format!(
                "variable {} = {x} outside bounds [{}, {}]",
                var.name, var.lower, var.upper
            ));
        }
        if var.kind == VarKind::Binary && (x - x.round()).abs() > INTEGRALITY_TOL {
            out.push(format!("binary variable {} = {x} is fractional", var.name));
        }
    }
    for c in &model.constraints {
        let lhs = model.constraint_lhs(c, values);
        let violated = match c.relation {
            Relation::Le => lhs > c.rhs + FEASIBILITY_TOL,
            Relation::Ge => lhs < c.rhs - FEASIBILITY_TOL,
            Relation::Eq => (lhs - c.rhs).abs() > FEASIBILITY_TOL,
        };
        if violated {
            out.push(format!(
                "constraint {} violated: lhs {lhs} {} rhs {}",
                c.name, c.relation, c.rhs
            ));
        }
    }
    out
}

/// Solves the model to optimality (within the absolute gap) by best-first
/// branch-and-bound on the binary variables. The returned assignment is
/// audited against the original model; infeasibility and unboundedness are
/// statuses, not errors.
pub fn solve_milp(model: &MilpModel, opts: &SolveOptions) -> Result<Solution, SolverError> {
    let solution = branch_bound::solve(model, opts)?;
    if let Some(values) = &solution.values {
        let violations = audit(model, values);
        if !violations.is_empty() {
            return Err(SolverError::NumericalBreakdown(format!(
                "solution failed audit: {}",
                violations.join("; ")
            )));
        }
    }
    Ok(solution)
}
