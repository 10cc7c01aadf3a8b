//! Bounded-variable primal simplex with dense basis inverse.
//!
//! Two-phase method: phase 1 minimises the sum of per-row artificial
//! variables starting from all structurals at their nearest-to-zero bound,
//! phase 2 minimises the real objective with the artificials pinned to zero.
//! Pricing is steepest reduced cost with lowest-index tie-breaking; after a
//! run of degenerate pivots the pivot rule switches to Bland's rule until
//! progress resumes, which guarantees termination. All iteration orders are
//! fixed, so runs are bit-for-bit deterministic.

use crate::milp::Relation;

use super::SolverError;

/// Reduced-cost tolerance for optimality.
const DUAL_TOL: f64 = 1e-9;
/// Smallest pivot magnitude the basis update will accept.
const PIVOT_TOL: f64 = 1e-10;
/// Ratio-test tie window.
const RATIO_TIE_TOL: f64 = 1e-9;
/// Phase-1 objective below this counts as feasible.
const PHASE1_TOL: f64 = 1e-7;
/// Consecutive degenerate pivots before switching to Bland's rule.
const STALL_LIMIT: u32 = 64;
/// Pivots between basis refactorisations.
const REFACTOR_EVERY: u32 = 64;

#[derive(Debug, Clone)]
pub struct LpRow {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A bounded linear program `min cᵀx, rows, l ≤ x ≤ u`.
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cost: Vec<f64>,
    pub rows: Vec<LpRow>,
}

impl LpProblem {
    pub fn num_cols(&self) -> usize {
        self.lower.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub objective: f64,
    /// Values of the structural columns (empty unless `Optimal`).
    pub x: Vec<f64>,
    pub iterations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    FreeZero,
}

struct Simplex {
    m: usize,
    /// Structural + slack columns; artificials start at `nreal`.
    nreal: usize,
    ntot: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lo: Vec<f64>,
    up: Vec<f64>,
    rhs: Vec<f64>,
    state: Vec<VState>,
    basis: Vec<usize>,
    /// Row-major m×m basis inverse.
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: u64,
    pivots_since_refactor: u32,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Simplex {
    fn build(p: &LpProblem) -> Simplex {
        let n = p.num_cols();
        let m = p.rows.len();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut lo = p.lower.clone();
        let mut up = p.upper.clone();
        for (i, row) in p.rows.iter().enumerate() {
            for &(j, a) in &row.terms {
                if a != 0.0 {
                    cols[j].push((i, a));
                }
            }
        }
        // Slack columns turn every row into an equality.
        for (i, row) in p.rows.iter().enumerate() {
            match row.relation {
                Relation::Le => {
                    cols.push(vec![(i, 1.0)]);
                    lo.push(0.0);
                    up.push(f64::INFINITY);
                }
                Relation::Ge => {
                    cols.push(vec![(i, -1.0)]);
                    lo.push(0.0);
                    up.push(f64::INFINITY);
                }
                Relation::Eq => {}
            }
        }
        let nreal = cols.len();

        // Nonbasic start: every column at its bound nearest zero.
        let mut state = Vec::with_capacity(nreal + m);
        for j in 0..nreal {
            state.push(if lo[j].is_finite() {
                VState::AtLower
            } else if up[j].is_finite() {
                VState::AtUpper
            } else {
                VState::FreeZero
            });
        }

        // Residuals decide the sign of each artificial column.
        let mut resid: Vec<f64> = p.rows.iter().map(|r| r.rhs).collect();
        for (j, col) in cols.iter().enumerate() {
            let v = match state[j] {
                VState::AtLower => lo[j],
                VState::AtUpper => up[j],
                _ => 0.0,
            };
            if v != 0.0 {
                for &(i, a) in col {
                    resid[i] -= a * v;
                }
            }
        }

        let mut basis = Vec::with_capacity(m);
        let mut binv = vec![0.0; m * m];
        let mut xb = Vec::with_capacity(m);
        for (i, &r) in resid.iter().enumerate() {
            let sign = if r >= 0.0 { 1.0 } else { -1.0 };
            cols.push(vec![(i, sign)]);
            lo.push(0.0);
            up.push(f64::INFINITY);
            state.push(VState::Basic(i));
            basis.push(nreal + i);
            binv[i * m + i] = sign;
            xb.push(r.abs());
        }
        let ntot = cols.len();

        Simplex {
            m,
            nreal,
            ntot,
            cols,
            lo,
            up,
            rhs: resid.iter().enumerate().map(|(i, _)| p.rows[i].rhs).collect(),
            state,
            basis,
            binv,
            xb,
            iterations: 0,
            pivots_since_refactor: 0,
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VState::Basic(k) => self.xb[k],
            VState::AtLower => self.lo[j],
            VState::AtUpper => self.up[j],
            VState::FreeZero => 0.0,
        }
    }

    /// Rebuilds the basis inverse from scratch and recomputes basic values.
    fn refactor(&mut self) -> Result<(), SolverError> {
        let m = self.m;
        if m == 0 {
            return Ok(());
        }
        // Augmented Gauss-Jordan inversion of the basis matrix.
        let mut a = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for &(i, v) in &self.cols[j] {
                a[i * m + k] += v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv_row = col;
            let mut piv_val = a[col * m + col].abs();
            for r in col + 1..m {
                let v = a[r * m + col].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < PIVOT_TOL {
                return Err(SolverError::NumericalBreakdown(
                    "singular basis during refactorisation".into(),
                ));
            }
            if piv_row != col {
                for c in 0..m {
                    a.swap(piv_row * m + c, col * m + c);
                    inv.swap(piv_row * m + c, col * m + c);
                }
            }
            let p = a[col * m + col];
            for c in 0..m {
                a[col * m + c] /= p;
                inv[col * m + c] /= p;
            }
            for r in 0..m {
                if r != col {
                    let f = a[r * m + col];
                    if f != 0.0 {
                        for c in 0..m {
                            a[r * m + c] -= f * a[col * m + c];
                            inv[r * m + c] -= f * inv[col * m + c];
                        }
                    }
                }
            }
        }
        self.binv = inv;

        // xb = B⁻¹ (rhs − Σ nonbasic columns at their values)
        let mut resid = self.rhs.clone();
        for j in 0..self.ntot {
            if let VState::Basic(_) = self.state[j] {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for &(i, a) in &self.cols[j] {
                    resid[i] -= a * v;
                }
            }
        }
        for k in 0..m {
            let mut s = 0.0;
            for i in 0..m {
                s += self.binv[k * m + i] * resid[i];
            }
            self.xb[k] = s;
        }
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn run_phase(&mut self, costs: &[f64]) -> Result<PhaseEnd, SolverError> {
        let m = self.m;
        let cap = 20_000 + 100 * (m as u64 + self.ntot as u64);
        let mut bland = false;
        let mut stall: u32 = 0;
        let mut y = vec![0.0; m];
        let mut w = vec![0.0; m];

        loop {
            self.iterations += 1;
            if self.iterations > cap {
                return Err(SolverError::NumericalBreakdown(format!(
                    "simplex iteration limit ({cap}) exceeded"
                )));
            }

            // Duals y = c_B B⁻¹.
            for i in 0..m {
                let mut s = 0.0;
                for k in 0..m {
                    let cb = costs[self.basis[k]];
                    if cb != 0.0 {
                        s += cb * self.binv[k * m + i];
                    }
                }
                y[i] = s;
            }

            // Pricing.
            let mut entering: Option<(usize, f64, f64)> = None; // (col, |d|, direction)
            for j in 0..self.ntot {
                if let VState::Basic(_) = self.state[j] {
                    continue;
                }
                if self.lo[j] == self.up[j] {
                    continue; // fixed (includes pinned artificials)
                }
                let mut d = costs[j];
                for &(i, a) in &self.cols[j] {
                    d -= y[i] * a;
                }
                let dir = match self.state[j] {
                    VState::AtLower if d < -DUAL_TOL => 1.0,
                    VState::AtUpper if d > DUAL_TOL => -1.0,
                    VState::FreeZero if d < -DUAL_TOL => 1.0,
                    VState::FreeZero if d > DUAL_TOL => -1.0,
                    _ => continue,
                };
                if bland {
                    entering = Some((j, d.abs(), dir));
                    break;
                }
                match entering {
                    Some((_, best, _)) if d.abs() <= best + 1e-12 => {}
                    _ => entering = Some((j, d.abs(), dir)),
                }
            }
            let Some((e, _, sigma)) = entering else {
                return Ok(PhaseEnd::Optimal);
            };

            // Direction w = B⁻¹ A_e.
            for i in 0..m {
                let mut s = 0.0;
                for &(r, a) in &self.cols[e] {
                    s += self.binv[i * m + r] * a;
                }
                w[i] = s;
            }

            // Ratio test: largest step t ≥ 0 for x_e moving by σ·t.
            let mut t_rows = f64::INFINITY;
            for k in 0..m {
                let coef = sigma * w[k]; // x_B[k] changes by −coef·t
                let bk = self.basis[k];
                let t = if coef > PIVOT_TOL {
                    if self.lo[bk].is_finite() {
                        (self.xb[k] - self.lo[bk]).max(0.0) / coef
                    } else {
                        continue;
                    }
                } else if coef < -PIVOT_TOL {
                    if self.up[bk].is_finite() {
                        (self.up[bk] - self.xb[k]).max(0.0) / -coef
                    } else {
                        continue;
                    }
                } else {
                    continue;
                };
                if t < t_rows {
                    t_rows = t;
                }
            }
            let t_flip = if self.lo[e].is_finite() && self.up[e].is_finite() {
                self.up[e] - self.lo[e]
            } else {
                f64::INFINITY
            };

            if !t_rows.is_finite() && !t_flip.is_finite() {
                return Ok(PhaseEnd::Unbounded);
            }

            if t_flip <= t_rows + RATIO_TIE_TOL {
                // Bound flip: no basis change.
                for k in 0..m {
                    self.xb[k] -= sigma * w[k] * t_flip;
                }
                self.state[e] = match self.state[e] {
                    VState::AtLower => VState::AtUpper,
                    VState::AtUpper => VState::AtLower,
                    other => other,
                };
                stall = 0;
                bland = false;
                continue;
            }

            // Choose the leaving row among ratio ties.
            let mut leave: Option<usize> = None;
            for k in 0..m {
                let coef = sigma * w[k];
                let bk = self.basis[k];
                let t = if coef > PIVOT_TOL {
                    if self.lo[bk].is_finite() {
                        (self.xb[k] - self.lo[bk]).max(0.0) / coef
                    } else {
                        continue;
                    }
                } else if coef < -PIVOT_TOL {
                    if self.up[bk].is_finite() {
                        (self.up[bk] - self.xb[k]).max(0.0) / -coef
                    } else {
                        continue;
                    }
                } else {
                    continue;
                };
                if t > t_rows + RATIO_TIE_TOL {
                    continue;
                }
                match leave {
                    None => leave = Some(k),
                    Some(cur) => {
                        let better = if bland {
                            self.basis[k] < self.basis[cur]
                        } else {
                            let a = w[k].abs();
                            let b = w[cur].abs();
                            a > b + 1e-12 || (a >= b - 1e-12 && self.basis[k] < self.basis[cur])
                        };
                        if better {
                            leave = Some(k);
                        }
                    }
                }
            }
            let r = leave.ok_or_else(|| {
                SolverError::NumericalBreakdown("ratio test found no leaving row".into())
            })?;
            let piv = w[r];
            if piv.abs() < PIVOT_TOL {
                return Err(SolverError::NumericalBreakdown(format!(
                    "pivot {piv:.3e} below tolerance"
                )));
            }

            // Exact step for the chosen row.
            let coef = sigma * piv;
            let bk = self.basis[r];
            let t = if coef > 0.0 {
                (self.xb[r] - self.lo[bk]).max(0.0) / coef
            } else {
                (self.up[bk] - self.xb[r]).max(0.0) / -coef
            };

            let x_e_new = self.nonbasic_value(e) + sigma * t;
            for k in 0..m {
                if k != r {
                    self.xb[k] -= sigma * w[k] * t;
                }
            }
            self.state[self.basis[r]] = if coef > 0.0 { VState::AtLower } else { VState::AtUpper };
            self.basis[r] = e;
            self.state[e] = VState::Basic(r);
            self.xb[r] = x_e_new;

            // Rank-one basis inverse update.
            for c in 0..m {
                self.binv[r * m + c] /= piv;
            }
            for i in 0..m {
                if i != r && w[i] != 0.0 {
                    let f = w[i];
                    for c in 0..m {
                        self.binv[i * m + c] -= f * self.binv[r * m + c];
                    }
                }
            }

            if t <= 1e-10 {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            } else {
                stall = 0;
                bland = false;
            }

            self.pivots_since_refactor += 1;
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
        }
    }

    fn phase1_objective(&self) -> f64 {
        (self.nreal..self.ntot).map(|j| self.nonbasic_value(j)).sum()
    }

    fn extract(&self, ncols: usize) -> Vec<f64> {
        (0..ncols).map(|j| self.nonbasic_value(j)).collect()
    }
}

/// Solves a bounded LP. `Infeasible`/`Unbounded` are reported in the outcome;
/// `Err` is reserved for numerical failure.
pub fn solve_lp(p: &LpProblem) -> Result<LpOutcome, SolverError> {
    debug_assert_eq!(p.lower.len(), p.upper.len());
    debug_assert_eq!(p.lower.len(), p.cost.len());
    for j in 0..p.num_cols() {
        if p.lower[j] > p.upper[j] || p.lower[j] == f64::INFINITY || p.upper[j] == f64::NEG_INFINITY
        {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                objective: 0.0,
                x: Vec::new(),
                iterations: 0,
            });
        }
    }

    let mut s = Simplex::build(p);

    let mut phase1_cost = vec![0.0; s.ntot];
    for j in s.nreal..s.ntot {
        phase1_cost[j] = 1.0;
    }
    match s.run_phase(&phase1_cost)? {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => {
            return Err(SolverError::NumericalBreakdown(
                "phase-1 objective unbounded".into(),
            ))
        }
    }
    if s.phase1_objective() > PHASE1_TOL {
        return Ok(LpOutcome {
            status: LpStatus::Infeasible,
            objective: 0.0,
            x: Vec::new(),
            iterations: s.iterations,
        });
    }
    for j in s.nreal..s.ntot {
        s.lo[j] = 0.0;
        s.up[j] = 0.0;
    }

    let mut phase2_cost = vec![0.0; s.ntot];
    phase2_cost[..p.num_cols()].copy_from_slice(&p.cost);
    let end = s.run_phase(&phase2_cost)?;
    match end {
        PhaseEnd::Optimal => {
            let x = s.extract(p.num_cols());
            let objective = p.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
            Ok(LpOutcome { status: LpStatus::Optimal, objective, x, iterations: s.iterations })
        }
        PhaseEnd::Unbounded => Ok(LpOutcome {
            status: LpStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            x: Vec::new(),
            iterations: s.iterations,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(lower: Vec<f64>, upper: Vec<f64>, cost: Vec<f64>, rows: Vec<LpRow>) -> LpProblem {
        LpProblem { lower, upper, cost, rows }
    }

    fn row(terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> LpRow {
        LpRow { terms, relation, rhs }
    }

    #[test]
    fn box_constrained_capacity() {
        // min −x−y, x+y ≤ 1, x,y ∈ [0,1]; optimum −1 on the face x+y = 1.
        let p = lp(
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![-1.0, -1.0],
            vec![row(vec![(0, 1.0), (1, 1.0)], Relation::Le, 1.0)],
        );
        let out = solve_lp(&p).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective + 1.0).abs() < 1e-9, "objective {}", out.objective);
        assert!((out.x[0] + out.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_with_upper_bounds() {
        // min 2x+3y, x+y = 10, x,y ∈ [0,6] → x = 6, y = 4, objective 24.
        let p = lp(
            vec![0.0, 0.0],
            vec![6.0, 6.0],
            vec![2.0, 3.0],
            vec![row(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 10.0)],
        );
        let out = solve_lp(&p).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective - 24.0).abs() < 1e-9, "objective {}", out.objective);
        assert!((out.x[0] - 6.0).abs() < 1e-9 && (out.x[1] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_by_bounds() {
        // x ≥ 2 but x+y ≤ 1 with y ≥ 0.
        let p = lp(
            vec![2.0, 0.0],
            vec![f64::INFINITY, f64::INFINITY],
            vec![0.0, 0.0],
            vec![row(vec![(0, 1.0), (1, 1.0)], Relation::Le, 1.0)],
        );
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_objective() {
        let p = lp(vec![0.0], vec![f64::INFINITY], vec![-1.0], vec![]);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn scaled_inequality() {
        // min −x, 2x ≤ 8, x ∈ [0,10] → x = 4.
        let p = lp(
            vec![0.0],
            vec![10.0],
            vec![-1.0],
            vec![row(vec![(0, 2.0)], Relation::Le, 8.0)],
        );
        let out = solve_lp(&p).unwrap();
        assert!((out.x[0] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn ge_row_binds_from_below() {
        // min x, x ≥ 3.5, x ∈ [0,10].
        let p = lp(
            vec![0.0],
            vec![10.0],
            vec![1.0],
            vec![row(vec![(0, 1.0)], Relation::Ge, 3.5)],
        );
        let out = solve_lp(&p).unwrap();
        assert!((out.objective - 3.5).abs() < 1e-9);
    }

    #[test]
    fn bound_flip_reaches_optimum() {
        // min −x−2y, x+y ≤ 1.5, x,y ∈ [0,1] → y = 1, x = 0.5, objective −2.5.
        let p = lp(
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![-1.0, -2.0],
            vec![row(vec![(0, 1.0), (1, 1.0)], Relation::Le, 1.5)],
        );
        let out = solve_lp(&p).unwrap();
        assert!((out.objective + 2.5).abs() < 1e-9, "objective {}", out.objective);
        assert!((out.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn beale_degenerate_cycle_terminates() {
        // Beale's classic cycling example; the optimum is −1/20 at
        // x = (1/25, 0, 1, 0). Terminates thanks to the Bland fallback.
        let p = lp(
            vec![0.0; 4],
            vec![f64::INFINITY; 4],
            vec![-0.75, 150.0, -0.02, 6.0],
            vec![
                row(
                    vec![(0, 0.25), (1, -60.0), (2, -1.0 / 25.0), (3, 9.0)],
                    Relation::Le,
                    0.0,
                ),
                row(
                    vec![(0, 0.5), (1, -90.0), (2, -1.0 / 50.0), (3, 3.0)],
                    Relation::Le,
                    0.0,
                ),
                row(vec![(2, 1.0)], Relation::Le, 1.0),
            ],
        );
        let out = solve_lp(&p).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective + 0.05).abs() < 1e-9, "objective {}", out.objective);
    }

    #[test]
    fn equality_only_system_solves_exactly() {
        // x + y = 4, x − y = 1 → x = 2.5, y = 1.5 (free objective 0).
        let p = lp(
            vec![f64::NEG_INFINITY; 2],
            vec![f64::INFINITY; 2],
            vec![0.0, 0.0],
            vec![
                row(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 4.0),
                row(vec![(0, 1.0), (1, -1.0)], Relation::Eq, 1.0),
            ],
        );
        let out = solve_lp(&p).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.x[0] - 2.5).abs() < 1e-9 && (out.x[1] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn fixed_variables_participate_as_constants() {
        // x fixed to 3; min y with y ≥ x → y = 3.
        let p = lp(
            vec![3.0, 0.0],
            vec![3.0, f64::INFINITY],
            vec![0.0, 1.0],
            vec![row(vec![(1, 1.0), (0, -1.0)], Relation::Ge, 0.0)],
        );
        let out = solve_lp(&p).unwrap();
        assert!((out.x[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_repeat_runs() {
        let p = lp(
            vec![0.0, 0.0, 0.0],
            vec![4.0, 4.0, 4.0],
            vec![-3.0, -1.0, -2.0],
            vec![
                row(vec![(0, 1.0), (1, 2.0), (2, 1.0)], Relation::Le, 7.0),
                row(vec![(0, 2.0), (2, 1.0)], Relation::Le, 6.0),
            ],
        );
        let a = solve_lp(&p).unwrap();
        let b = solve_lp(&p).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.objective, b.objective);
    }

    #[test]
    fn randomized_feasible_by_construction_boxes() {
        // Rows are built around a known interior point, so every instance is
        // feasible; the solver must agree and its optimum must not exceed the
        // witness objective.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for case in 0..100 {
            let n = rng.gen_range(2..6);
            let m = rng.gen_range(1..5);
            let lower: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..0.0)).collect();
            let upper: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..5.0)).collect();
            let witness: Vec<f64> = (0..n)
                .map(|j| rng.gen_range(lower[j]..upper[j]))
                .collect();
            let cost: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let rows: Vec<LpRow> = (0..m)
                .map(|_| {
                    let terms: Vec<(usize, f64)> =
                        (0..n).map(|j| (j, rng.gen_range(-2.0..2.0))).collect();
                    let lhs: f64 = terms.iter().map(|&(j, a)| a * witness[j]).sum();
                    row(terms, Relation::Le, lhs + rng.gen_range(0.0..1.0))
                })
                .collect();
            let p = lp(lower, upper, cost.clone(), rows.clone());
            let out = solve_lp(&p).unwrap();
            assert_eq!(out.status, LpStatus::Optimal, "case {case} must be feasible");
            let witness_obj: f64 = cost.iter().zip(&witness).map(|(c, v)| c * v).sum();
            assert!(
                out.objective <= witness_obj + 1e-7,
                "case {case}: optimum {} worse than witness {}",
                out.objective,
                witness_obj
            );
            for r in &rows {
                let lhs: f64 = r.terms.iter().map(|&(j, a)| a * out.x[j]).sum();
                assert!(lhs <= r.rhs + 1e-6, "case {case}: row violated by {}", lhs - r.rhs);
            }
            for j in 0..out.x.len() {
                assert!(
                    out.x[j] >= p.lower[j] - 1e-6 && out.x[j] <= p.upper[j] + 1e-6,
                    "case {case}: bound violated"
                );
            }
        }
    }
}
