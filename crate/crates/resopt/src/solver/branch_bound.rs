//! Best-first branch-and-bound over binary variables, and the brute-force
//! enumeration oracle used to cross-check it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::milp::MilpModel;

use super::simplex::{solve_lp, LpProblem, LpStatus};
use super::{
    SolveOptions, SolveStats, SolveStatus, Solution, SolverError, BRUTE_FORCE_LIMIT,
    INTEGRALITY_TOL,
};

struct Node {
    /// Lower bound inherited from the parent relaxation.
    bound: f64,
    id: u64,
    /// (column, fixed value) pairs.
    fixes: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap pops the maximum; order reversed so the node with the
    // smallest (bound, id) is popped first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn apply_fixes(base: &LpProblem, fixes: &[(usize, f64)]) -> LpProblem {
    let mut p = base.clone();
    for &(j, v) in fixes {
        p.lower[j] = v;
        p.upper[j] = v;
    }
    p
}

fn most_fractional(x: &[f64], binaries: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in binaries {
        let frac = (x[j] - x[j].round()).abs();
        if frac <= INTEGRALITY_TOL {
            continue;
        }
        match best {
            Some((_, b)) if frac <= b + 1e-12 => {}
            _ => best = Some((j, frac)),
        }
    }
    best.map(|(j, _)| j)
}

pub(super) fn solve(model: &MilpModel, opts: &SolveOptions) -> Result<Solution, SolverError> {
    let start = Instant::now();
    let base = super::lp_from_model(model);
    let binaries: Vec<usize> = model.binary_vars().iter().map(|v| v.index()).collect();

    let mut stats = SolveStats::default();
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut heap = BinaryHeap::new();
    let mut next_id = 0u64;
    heap.push(Node { bound: f64::NEG_INFINITY, id: 0, fixes: Vec::new() });
    next_id += 1;

    while let Some(node) = heap.pop() {
        if let Some((inc_obj, _)) = &incumbent {
            // Best-first: once the smallest open bound cannot improve on the
            // incumbent by more than the gap, nothing can.
            if node.bound >= inc_obj - opts.abs_gap {
                break;
            }
        }
        let lp = apply_fixes(&base, &node.fixes);
        let out = solve_lp(&lp)?;
        stats.nodes += 1;
        stats.iterations += out.iterations;
        match out.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                if node.fixes.is_empty() {
                    stats.wall = start.elapsed();
                    return Ok(Solution {
                        status: SolveStatus::Unbounded,
                        objective: None,
                        values: None,
                        stats,
                    });
                }
                return Err(SolverError::NumericalBreakdown(
                    "relaxation unbounded below a bounded root".into(),
                ));
            }
            LpStatus::Optimal => {}
        }
        if let Some((inc_obj, _)) = &incumbent {
            if out.objective >= inc_obj - opts.abs_gap {
                continue;
            }
        }
        match most_fractional(&out.x, &binaries) {
            None => {
                let better = match &incumbent {
                    Some((inc_obj, _)) => out.objective < *inc_obj,
                    None => true,
                };
                if better {
                    incumbent = Some((out.objective, out.x));
                }
            }
            Some(j) => {
                for v in [0.0, 1.0] {
                    let mut fixes = node.fixes.clone();
                    fixes.push((j, v));
                    heap.push(Node { bound: out.objective, id: next_id, fixes });
                    next_id += 1;
                }
            }
        }
    }

    stats.wall = start.elapsed();
    match incumbent {
        Some((obj, x)) => Ok(Solution {
            status: SolveStatus::Optimal,
            objective: Some(obj),
            values: Some(x),
            stats,
        }),
        None => Ok(Solution {
            status: SolveStatus::Infeasible,
            objective: None,
            values: None,
            stats,
        }),
    }
}

/// Enumerates every assignment of the binary variables, solving the resulting
/// LP for each, and returns the best. Exact up to LP tolerances — this is the
/// oracle branch-and-bound is tested against. Fails with `TooManyBinaries`
/// beyond [`BRUTE_FORCE_LIMIT`] binaries.
pub fn brute_force(model: &MilpModel, _opts: &SolveOptions) -> Result<Solution, SolverError> {
    let start = Instant::now();
    let base = super::lp_from_model(model);
    let binaries: Vec<usize> = model.binary_vars().iter().map(|v| v.index()).collect();
    let k = binaries.len();
    if k > BRUTE_FORCE_LIMIT {
        return Err(SolverError::TooManyBinaries { count: k, limit: BRUTE_FORCE_LIMIT });
    }

    let mut stats = SolveStats::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u64..(1u64 << k) {
        let fixes: Vec<(usize, f64)> = binaries
            .iter()
            .enumerate()
            .map(|(pos, &j)| (j, ((mask >> pos) & 1) as f64))
            .collect();
        let lp = apply_fixes(&base, &fixes);
        let out = solve_lp(&lp)?;
        stats.nodes += 1;
        stats.iterations += out.iterations;
        match out.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                stats.wall = start.elapsed();
                return Ok(Solution {
                    status: SolveStatus::Unbounded,
                    objective: None,
                    values: None,
                    stats,
                });
            }
            LpStatus::Optimal => {
                let better = match &best {
                    Some((obj, _)) => out.objective < *obj,
                    None => true,
                };
                if better {
                    best = Some((out.objective, out.x));
                }
            }
        }
    }

    stats.wall = start.elapsed();
    match best {
        Some((obj, x)) => Ok(Solution {
            status: SolveStatus::Optimal,
            objective: Some(obj),
            values: Some(x),
            stats,
        }),
        None => Ok(Solution {
            status: SolveStatus::Infeasible,
            objective: None,
            values: None,
            stats,
        }),
    }
}
