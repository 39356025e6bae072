//! Dense linear-program solver: two-phase revised simplex with Bland's
//! anti-cycling rule, deterministic across runs.
//!
//! Instances with many more constraints than variables are solved through
//! their dual, so the basis stays on the small variable space; the reported
//! solution and statuses are those of the original program.

use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub row: Vec<f64>,
    pub rel: Relation,
    pub rhs: f64,
}

/// Per-variable bounds; infinities allowed.
#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn free() -> Self {
        Bounds {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn nonneg() -> Self {
        Bounds {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn range(lo: f64, hi: f64) -> Self {
        Bounds { lo, hi }
    }
}

/// `minimize c.x` subject to rows, with per-variable bounds.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            bounds: vec![Bounds::free(); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, row: Vec<f64>, rel: Relation, rhs: f64) {
        assert_eq!(row.len(), self.num_vars(), "row length mismatch");
        assert!(rhs.is_finite(), "rhs must be finite");
        self.constraints.push(Constraint { row, rel, rhs });
    }

    /// Default iteration budget: `50 * (num_vars + num_constraints)`.
    pub fn default_max_iters(&self) -> usize {
        50 * (self.num_vars() + self.constraints.len())
    }

    /// Fixed one-constraint-per-line text dump for external cross-checking.
    pub fn dump(&self, w: &mut impl Write) -> std::io::Result<()> {
        write!(w, "minimize")?;
        for c in &self.objective {
            write!(w, " {c}")?;
        }
        writeln!(w)?;
        write!(w, "bounds")?;
        for b in &self.bounds {
            write!(w, " {},{}", b.lo, b.hi)?;
        }
        writeln!(w)?;
        for c in &self.constraints {
            for a in &c.row {
                write!(w, "{a} ")?;
            }
            let rel = match c.rel {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            writeln!(w, "{rel} {}", c.rhs)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
}

const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGEN_LIMIT: usize = 30;

pub fn solve_default(lp: &LinearProgram) -> LpSolution {
    solve(lp, lp.default_max_iters().max(1000))
}

pub fn solve(lp: &LinearProgram, max_iters: usize) -> LpSolution {
    let n = lp.num_vars();
    assert_eq!(lp.bounds.len(), n);
    let finite_bound_rows = lp
        .bounds
        .iter()
        .map(|b| (b.lo.is_finite() as usize) + (b.hi.is_finite() as usize))
        .sum::<usize>();
    let m_total = lp.constraints.len() + finite_bound_rows;
    if m_total > 2 * n.max(4) {
        match solve_via_dual(lp, max_iters) {
            Some(sol) => sol,
            // Dual infeasible leaves primal unbounded-or-infeasible open;
            // classify on the primal, whatever the size.
            None => solve_primal(lp, max_iters),
        }
    } else {
        solve_primal(lp, max_iters)
    }
}

// ---------------------------------------------------------------------------
// Row normal form: every constraint and finite bound as `g . x >= h`.
// ---------------------------------------------------------------------------

struct IneqForm {
    rows: Vec<(Vec<(usize, f64)>, f64)>,
}

fn to_inequalities(lp: &LinearProgram) -> IneqForm {
    let mut rows = Vec::new();
    let sparse = |row: &[f64]| -> Vec<(usize, f64)> {
        row.iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect()
    };
    for c in &lp.constraints {
        match c.rel {
            Relation::Ge => rows.push((sparse(&c.row), c.rhs)),
            Relation::Le => rows.push((
                sparse(&c.row).into_iter().map(|(i, v)| (i, -v)).collect(),
                -c.rhs,
            )),
            Relation::Eq => {
                rows.push((sparse(&c.row), c.rhs));
                rows.push((
                    sparse(&c.row).into_iter().map(|(i, v)| (i, -v)).collect(),
                    -c.rhs,
                ));
            }
        }
    }
    for (i, b) in lp.bounds.iter().enumerate() {
        if b.lo.is_finite() {
            rows.push((vec![(i, 1.0)], b.lo));
        }
        if b.hi.is_finite() {
            rows.push((vec![(i, -1.0)], -b.hi));
        }
    }
    IneqForm { rows }
}

/// Solves `min c.x, G x >= h` through `max h.l, G^T l = c, l >= 0`.
/// Returns `None` when the dual is infeasible (primal unbounded or infeasible).
fn solve_via_dual(lp: &LinearProgram, max_iters: usize) -> Option<LpSolution> {
    let n = lp.num_vars();
    let ineq = to_inequalities(lp);
    let mut sf = StandardForm::new(n);
    for (g, h) in &ineq.rows {
        sf.push_column(g.clone(), -h);
    }
    sf.b = lp.objective.clone();
    let mut core = Simplex::new(sf);
    let outcome = core.run(max_iters);
    match outcome {
        CoreStatus::Optimal => {
            let pi = core.multipliers();
            let x: Vec<f64> = pi.iter().map(|&v| -v).collect();
            let objective_value = dot(&lp.objective, &x);
            Some(LpSolution {
                status: LpStatus::Optimal,
                x,
                objective_value,
            })
        }
        CoreStatus::Unbounded => Some(LpSolution {
            status: LpStatus::Infeasible,
            x: vec![0.0; n],
            objective_value: f64::NAN,
        }),
        CoreStatus::Infeasible => None,
        CoreStatus::IterationLimit => Some(LpSolution {
            status: LpStatus::IterationLimit,
            x: vec![0.0; n],
            objective_value: f64::NAN,
        }),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Primal route for small instances: shift bounds, add slacks, run the core.
// ---------------------------------------------------------------------------

fn solve_primal(lp: &LinearProgram, max_iters: usize) -> LpSolution {
    let n = lp.num_vars();

    // Map each variable onto nonnegative standard-form columns.
    enum VarMap {
        Shifted { col: usize, lo: f64 },         // x = lo + u
        Mirrored { col: usize, hi: f64 },        // x = hi - u
        Split { pos: usize, neg: usize },        // x = u - v
    }
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    for b in &lp.bounds {
        if b.lo.is_finite() {
            maps.push(VarMap::Shifted { col: ncols, lo: b.lo });
            ncols += 1;
        } else if b.hi.is_finite() {
            maps.push(VarMap::Mirrored { col: ncols, hi: b.hi });
            ncols += 1;
        } else {
            maps.push(VarMap::Split {
                pos: ncols,
                neg: ncols + 1,
            });
            ncols += 2;
        }
    }

    // Rows: original constraints plus `u <= hi - lo` for doubly bounded vars.
    struct Row {
        coeffs: Vec<(usize, f64)>,
        rel: Relation,
        rhs: f64,
    }
    let mut rows = Vec::new();
    let translate = |row: &[f64]| -> (Vec<(usize, f64)>, f64) {
        let mut coeffs: Vec<(usize, f64)> = Vec::new();
        let mut shift = 0.0;
        for (i, &a) in row.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[i] {
                VarMap::Shifted { col, lo } => {
                    coeffs.push((col, a));
                    shift += a * lo;
                }
                VarMap::Mirrored { col, hi } => {
                    coeffs.push((col, -a));
                    shift += a * hi;
                }
                VarMap::Split { pos, neg } => {
                    coeffs.push((pos, a));
                    coeffs.push((neg, -a));
                }
            }
        }
        (coeffs, shift)
    };
    for c in &lp.constraints {
        let (coeffs, shift) = translate(&c.row);
        rows.push(Row {
            coeffs,
            rel: c.rel,
            rhs: c.rhs - shift,
        });
    }
    for (i, b) in lp.bounds.iter().enumerate() {
        if b.lo.is_finite() && b.hi.is_finite() {
            if let VarMap::Shifted { col, lo } = maps[i] {
                rows.push(Row {
                    coeffs: vec![(col, 1.0)],
                    rel: Relation::Le,
                    rhs: b.hi - lo,
                });
            }
        }
    }

    let mut obj = vec![0.0; ncols];
    let mut obj_shift = 0.0;
    for (i, &ci) in lp.objective.iter().enumerate() {
        match maps[i] {
            VarMap::Shifted { col, lo } => {
                obj[col] += ci;
                obj_shift += ci * lo;
            }
            VarMap::Mirrored { col, hi } => {
                obj[col] -= ci;
                obj_shift += ci * hi;
            }
            VarMap::Split { pos, neg } => {
                obj[pos] += ci;
                obj[neg] -= ci;
            }
        }
    }

    let nrows = rows.len();
    let mut sf = StandardForm::new(nrows);
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for &(col, v) in &row.coeffs {
            columns[col].push((r, v));
        }
    }
    for (j, col) in columns.into_iter().enumerate() {
        sf.push_column(col, obj[j]);
    }
    // Slack / surplus columns.
    for (r, row) in rows.iter().enumerate() {
        match row.rel {
            Relation::Le => sf.push_column(vec![(r, 1.0)], 0.0),
            Relation::Ge => sf.push_column(vec![(r, -1.0)], 0.0),
            Relation::Eq => {}
        }
    }
    sf.b = rows.iter().map(|r| r.rhs).collect();

    let mut core = Simplex::new(sf);
    let status = match core.run(max_iters) {
        CoreStatus::Optimal => LpStatus::Optimal,
        CoreStatus::Infeasible => LpStatus::Infeasible,
        CoreStatus::Unbounded => LpStatus::Unbounded,
        CoreStatus::IterationLimit => LpStatus::IterationLimit,
    };
    if status != LpStatus::Optimal {
        return LpSolution {
            status,
            x: vec![0.0; n],
            objective_value: f64::NAN,
        };
    }
    let u = core.primal_values();
    let mut x = vec![0.0; n];
    for (i, map) in maps.iter().enumerate() {
        x[i] = match *map {
            VarMap::Shifted { col, lo } => lo + u[col],
            VarMap::Mirrored { col, hi } => hi - u[col],
            VarMap::Split { pos, neg } => u[pos] - u[neg],
        };
    }
    let objective_value = core.objective() + obj_shift;
    LpSolution {
        status,
        x,
        objective_value,
    }
}

// ---------------------------------------------------------------------------
// Core: standard form `min c.x, A x = b, x >= 0`, sparse columns, explicit
// dense basis inverse, two phases, Dantzig pricing with Bland fallback.
// ---------------------------------------------------------------------------

struct StandardForm {
    nrows: usize,
    cols: Vec<Vec<(usize, f64)>>,
    c: Vec<f64>,
    b: Vec<f64>,
}

impl StandardForm {
    fn new(nrows: usize) -> Self {
        StandardForm {
            nrows,
            cols: Vec::new(),
            c: Vec::new(),
            b: vec![0.0; nrows],
        }
    }

    fn push_column(&mut self, col: Vec<(usize, f64)>, cost: f64) {
        debug_assert!(col.iter().all(|&(r, _)| r < self.nrows));
        self.cols.push(col);
        self.c.push(cost);
    }
}

enum CoreStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

struct Simplex {
    sf: StandardForm,
    nart: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>, // nrows x nrows, row-major
    xb: Vec<f64>,
    pi: Vec<f64>,
    iters: usize,
    pivots_since_refactor: usize,
}

impl Simplex {
    fn new(mut sf: StandardForm) -> Self {
        let m = sf.nrows;
        // Artificial start: one signed unit column per row, so the initial
        // basic values |b_i| are nonnegative without renumbering rows.
        let ncols = sf.cols.len();
        for r in 0..m {
            let sign = if sf.b[r] < 0.0 { -1.0 } else { 1.0 };
            sf.push_column(vec![(r, sign)], 0.0);
        }
        let basis: Vec<usize> = (ncols..ncols + m).collect();
        let mut in_basis = vec![false; ncols + m];
        for &j in &basis {
            in_basis[j] = true;
        }
        let mut binv = vec![0.0; m * m];
        let mut xb = vec![0.0; m];
        for r in 0..m {
            let sign = if sf.b[r] < 0.0 { -1.0 } else { 1.0 };
            binv[r * m + r] = sign;
            xb[r] = sf.b[r].abs();
        }
        Simplex {
            sf,
            nart: m,
            basis,
            in_basis,
            binv,
            xb,
            pi: vec![0.0; m],
            iters: 0,
            pivots_since_refactor: 0,
        }
    }

    fn m(&self) -> usize {
        self.sf.nrows
    }

    fn nstruct(&self) -> usize {
        self.sf.cols.len() - self.nart
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.nstruct()
    }

    fn column_times_binv_row(&self, j: usize) -> f64 {
        // pi . a_j
        self.sf.cols[j]
            .iter()
            .map(|&(r, v)| self.pi[r] * v)
            .sum()
    }

    fn compute_pi(&mut self, costs: &[f64]) {
        let m = self.m();
        for col in 0..m {
            let mut s = 0.0;
            for row in 0..m {
                let cb = costs[self.basis[row]];
                if cb != 0.0 {
                    s += cb * self.binv[row * m + col];
                }
            }
            self.pi[col] = s;
        }
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m();
        let mut u = vec![0.0; m];
        for &(r, v) in &self.sf.cols[j] {
            if v != 0.0 {
                for row in 0..m {
                    u[row] += self.binv[row * m + r] * v;
                }
            }
        }
        u
    }

    fn pivot(&mut self, entering: usize, leave_row: usize, u: &[f64]) {
        let m = self.m();
        let pivot = u[leave_row];
        let step = self.xb[leave_row] / pivot;
        for r in 0..m {
            if r != leave_row {
                self.xb[r] -= step * u[r];
                if self.xb[r] < 0.0 && self.xb[r] > -FEAS_TOL {
                    self.xb[r] = 0.0;
                }
            }
        }
        self.xb[leave_row] = step;
        for r in 0..m {
            if r == leave_row {
                continue;
            }
            let factor = u[r] / pivot;
            if factor != 0.0 {
                for col in 0..m {
                    self.binv[r * m + col] -= factor * self.binv[leave_row * m + col];
                }
            }
        }
        for col in 0..m {
            self.binv[leave_row * m + col] /= pivot;
        }
        self.in_basis[self.basis[leave_row]] = false;
        self.in_basis[entering] = true;
        self.basis[leave_row] = entering;
        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= 500 {
            self.refactor();
        }
    }

    /// Rebuilds the basis inverse from scratch by Gauss-Jordan elimination.
    fn refactor(&mut self) {
        let m = self.m();
        let mut a = vec![0.0; m * m]; // basis matrix
        for (bcol, &j) in self.basis.iter().enumerate() {
            for &(r, v) in &self.sf.cols[j] {
                a[r * m + bcol] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for r in 0..m {
            inv[r * m + r] = 1.0;
        }
        for col in 0..m {
            let mut best = col;
            for r in col + 1..m {
                if a[r * m + col].abs() > a[best * m + col].abs() {
                    best = r;
                }
            }
            if a[best * m + col].abs() < 1e-13 {
                continue; // numerically singular; keep going with what we have
            }
            if best != col {
                for k in 0..m {
                    a.swap(col * m + k, best * m + k);
                    inv.swap(col * m + k, best * m + k);
                }
            }
            let p = a[col * m + col];
            for k in 0..m {
                a[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for r in 0..m {
                if r != col {
                    let f = a[r * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            a[r * m + k] -= f * a[col * m + k];
                            inv[r * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        // inv now maps original row order: rows of inv are permuted to basis
        // column order, so recompute xb consistently.
        self.binv = inv;
        let m2 = self.m();
        let mut xb = vec![0.0; m2];
        for r in 0..m2 {
            let mut s = 0.0;
            for k in 0..m2 {
                s += self.binv[r * m2 + k] * self.sf.b[k];
            }
            xb[r] = s;
        }
        self.xb = xb;
        self.pivots_since_refactor = 0;
    }

    fn run_phase(
        &mut self,
        costs: &[f64],
        allow_artificial_entering: bool,
        max_iters: usize,
    ) -> CoreStatus {
        let mut degenerate_streak = 0usize;
        loop {
            if self.iters >= max_iters {
                return CoreStatus::IterationLimit;
            }
            self.iters += 1;
            self.compute_pi(costs);
            let bland = degenerate_streak >= DEGEN_LIMIT;
            let mut entering: Option<usize> = None;
            let mut best = -PIVOT_TOL;
            for j in 0..self.sf.cols.len() {
                if self.in_basis[j] || (!allow_artificial_entering && self.is_artificial(j)) {
                    continue;
                }
                let d = costs[j] - self.column_times_binv_row(j);
                if d < -PIVOT_TOL {
                    if bland {
                        entering = Some(j);
                        break;
                    }
                    if d < best {
                        best = d;
                        entering = Some(j);
                    }
                }
            }
            let Some(q) = entering else {
                return CoreStatus::Optimal;
            };
            let u = self.ftran(q);
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for r in 0..self.m() {
                if u[r] > PIVOT_TOL {
                    let ratio = self.xb[r] / u[r];
                    let better = match leave {
                        None => true,
                        Some(cur) => {
                            ratio < best_ratio - 1e-12
                                || (ratio < best_ratio + 1e-12
                                    && self.basis[r] < self.basis[cur])
                        }
                    };
                    if better {
                        best_ratio = ratio;
                        leave = Some(r);
                    }
                }
            }
            let Some(r) = leave else {
                return CoreStatus::Unbounded;
            };
            if best_ratio <= FEAS_TOL {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            self.pivot(q, r, &u);
        }
    }

    fn run(&mut self, max_iters: usize) -> CoreStatus {
        // Phase 1: minimize the sum of artificials.
        let mut phase1_costs = vec![0.0; self.sf.cols.len()];
        for j in self.nstruct()..self.sf.cols.len() {
            phase1_costs[j] = 1.0;
        }
        match self.run_phase(&phase1_costs, true, max_iters) {
            CoreStatus::Optimal => {}
            CoreStatus::IterationLimit => return CoreStatus::IterationLimit,
            CoreStatus::Unbounded => return CoreStatus::Infeasible, // cannot happen; be safe
            CoreStatus::Infeasible => return CoreStatus::Infeasible,
        }
        let phase1_obj: f64 = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(j, _)| self.is_artificial(**j))
            .map(|(_, &v)| v)
            .sum();
        let scale = 1.0 + self.sf.b.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if phase1_obj > 1e-7 * scale {
            return CoreStatus::Infeasible;
        }
        // Drive basic artificials (all at level ~0) out where possible.
        for r in 0..self.m() {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let m = self.m();
            let mut replacement: Option<(usize, Vec<f64>)> = None;
            for j in 0..self.nstruct() {
                if self.in_basis[j] {
                    continue;
                }
                let mut ur = 0.0;
                for &(row, v) in &self.sf.cols[j] {
                    ur += self.binv[r * m + row] * v;
                }
                if ur.abs() > 1e-7 {
                    replacement = Some((j, self.ftran(j)));
                    break;
                }
            }
            if let Some((j, u)) = replacement {
                self.pivot(j, r, &u);
            }
            // Otherwise the row is redundant; the artificial stays basic at 0
            // and is barred from re-entering in phase 2.
        }
        // Phase 2.
        let costs = self.sf.c.clone();
        self.run_phase(&costs, false, max_iters)
    }

    fn multipliers(&mut self) -> Vec<f64> {
        let costs = self.sf.c.clone();
        self.compute_pi(&costs);
        self.pi.clone()
    }

    fn primal_values(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.nstruct()];
        for (r, &j) in self.basis.iter().enumerate() {
            if j < x.len() {
                x[j] = self.xb[r];
            }
        }
        x
    }

    fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .map(|(&j, &v)| self.sf.c[j] * v)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp1() -> LinearProgram {
        // minimize x s.t. x >= 3, x <= 10
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add(vec![1.0], Relation::Ge, 3.0);
        lp.add(vec![1.0], Relation::Le, 10.0);
        lp
    }

    #[test]
    fn simple_bounded_minimum() {
        let sol = solve_default(&lp1());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 3.0).abs() < 1e-9);
        assert!((sol.objective_value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LinearProgram::new(vec![0.0]);
        lp.add(vec![1.0], Relation::Ge, 1.0);
        lp.add(vec![1.0], Relation::Le, 0.0);
        let sol = solve_default(&lp);
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.add(vec![1.0], Relation::Ge, 0.0);
        let sol = solve_default(&lp);
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn determinism_bitwise() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0, -1.0]);
        lp.bounds = vec![Bounds::range(-4.0, 4.0); 3];
        lp.add(vec![1.0, 1.0, 1.0], Relation::Ge, 1.0);
        lp.add(vec![2.0, -1.0, 0.5], Relation::Le, 3.0);
        lp.add(vec![0.0, 1.0, -1.0], Relation::Eq, 0.25);
        let a = solve_default(&lp);
        let b = solve_default(&lp);
        assert_eq!(a.status, b.status);
        assert_eq!(a.x, b.x);
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
    }

    #[test]
    fn degenerate_instance_terminates() {
        // Many redundant constraints through the same vertex.
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.bounds = vec![Bounds::nonneg(); 2];
        for k in 1..=12 {
            let k = k as f64;
            lp.add(vec![k, 1.0], Relation::Ge, 0.0);
            lp.add(vec![1.0, k], Relation::Ge, 0.0);
        }
        lp.add(vec![1.0, 1.0], Relation::Ge, 1.0);
        let sol = solve_default(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 1.0).abs() < 1e-8);
    }

    fn random_lp(rng: &mut crate::rng::SeedStream, nvars: usize, nrows: usize) -> LinearProgram {
        let mut lp =
            LinearProgram::new((0..nvars).map(|_| rng.next_in(-1.0, 1.0)).collect());
        lp.bounds = vec![Bounds::range(-5.0, 5.0); nvars];
        // Anchor point kept feasible so the instance is never empty.
        let x0: Vec<f64> = (0..nvars).map(|_| rng.next_in(-2.0, 2.0)).collect();
        for _ in 0..nrows {
            let row: Vec<f64> = (0..nvars).map(|_| rng.next_in(-1.0, 1.0)).collect();
            let at_x0 = dot(&row, &x0);
            if rng.next_f64() < 0.5 {
                lp.add(row, Relation::Ge, at_x0 - rng.next_f64());
            } else {
                lp.add(row, Relation::Le, at_x0 + rng.next_f64());
            }
        }
        lp
    }

    /// Enumerates candidate vertices of a fully bounded LP and returns the
    /// best feasible objective, if any.
    fn brute_force_min(lp: &LinearProgram) -> Option<f64> {
        let n = lp.num_vars();
        let ineq = to_inequalities(lp);
        let rows: Vec<(Vec<f64>, f64)> = ineq
            .rows
            .iter()
            .map(|(g, h)| {
                let mut dense = vec![0.0; n];
                for &(i, v) in g {
                    dense[i] = v;
                }
                (dense, *h)
            })
            .collect();
        let feasible = |x: &[f64]| rows.iter().all(|(g, h)| dot(g, x) >= h - 1e-7);
        let mut best: Option<f64> = None;
        let idx: Vec<usize> = (0..rows.len()).collect();
        let mut choose = vec![0usize; n];
        fn rec(
            rows: &[(Vec<f64>, f64)],
            idx: &[usize],
            choose: &mut Vec<usize>,
            depth: usize,
            start: usize,
            lp: &LinearProgram,
            feasible: &dyn Fn(&[f64]) -> bool,
            best: &mut Option<f64>,
        ) {
            let n = lp.num_vars();
            if depth == n {
                // Solve the active system by Gaussian elimination.
                let mut a = vec![0.0; n * n];
                let mut b = vec![0.0; n];
                for (r, &k) in choose.iter().enumerate() {
                    for c in 0..n {
                        a[r * n + c] = rows[k].0[c];
                    }
                    b[r] = rows[k].1;
                }
                for col in 0..n {
                    let mut piv = col;
                    for r in col..n {
                        if a[r * n + col].abs() > a[piv * n + col].abs() {
                            piv = r;
                        }
                    }
                    if a[piv * n + col].abs() < 1e-9 {
                        return;
                    }
                    if piv != col {
                        for k in 0..n {
                            a.swap(col * n + k, piv * n + k);
                        }
                        b.swap(col, piv);
                    }
                    for r in 0..n {
                        if r != col {
                            let f = a[r * n + col] / a[col * n + col];
                            if f != 0.0 {
                                for k in 0..n {
                                    a[r * n + k] -= f * a[col * n + k];
                                }
                                b[r] -= f * b[col];
                            }
                        }
                    }
                }
                let x: Vec<f64> = (0..n).map(|i| b[i] / a[i * n + i]).collect();
                if feasible(&x) {
                    let v = dot(&lp.objective, &x);
                    *best = Some(best.map_or(v, |cur: f64| cur.min(v)));
                }
                return;
            }
            for pos in start..idx.len() {
                choose[depth] = idx[pos];
                rec(rows, idx, choose, depth + 1, pos + 1, lp, feasible, best);
            }
        }
        rec(&rows, &idx, &mut choose, 0, 0, lp, &feasible, &mut best);
        best
    }

    #[test]
    fn agrees_with_vertex_enumeration() {
        let mut rng = crate::rng::SeedStream::new(123);
        for trial in 0..60 {
            let nvars = 1 + (rng.next_u64() % 4) as usize;
            let nrows = 2 + (rng.next_u64() % 6) as usize;
            let lp = random_lp(&mut rng, nvars, nrows);
            let sol = solve_default(&lp);
            let brute = brute_force_min(&lp);
            match (sol.status, brute) {
                (LpStatus::Optimal, Some(v)) => {
                    assert!(
                        (sol.objective_value - v).abs() < 1e-6,
                        "trial {trial}: solver {} vs brute {v}",
                        sol.objective_value
                    );
                }
                (LpStatus::Infeasible, None) => {}
                (s, b) => panic!("trial {trial}: solver {s:?} vs brute {b:?}"),
            }
        }
    }

    #[test]
    fn tall_instances_agree_with_vertex_enumeration() {
        let mut rng = crate::rng::SeedStream::new(321);
        for trial in 0..20 {
            let nvars = 2 + (rng.next_u64() % 2) as usize;
            let lp = random_lp(&mut rng, nvars, 30);
            assert!(lp.constraints.len() + 2 * nvars > 2 * nvars.max(4)); // dual path
            let sol = solve_default(&lp);
            let brute = brute_force_min(&lp);
            match (sol.status, brute) {
                (LpStatus::Optimal, Some(v)) => {
                    assert!(
                        (sol.objective_value - v).abs() < 1e-6,
                        "trial {trial}: solver {} vs brute {v}",
                        sol.objective_value
                    );
                }
                (LpStatus::Infeasible, None) => {}
                (s, b) => panic!("trial {trial}: solver {s:?} vs brute {b:?}"),
            }
        }
    }

    #[test]
    fn weak_duality_spot_check() {
        let mut rng = crate::rng::SeedStream::new(777);
        let mut optimal_seen = 0;
        for _ in 0..100 {
            let nvars = 2 + (rng.next_u64() % 19) as usize;
            let nrows = 3 + (rng.next_u64() % 10) as usize;
            let lp = random_lp(&mut rng, nvars, nrows);
            let sol = solve_default(&lp);
            if sol.status != LpStatus::Optimal {
                continue;
            }
            optimal_seen += 1;
            // Constraints hold at the reported solution.
            for c in &lp.constraints {
                let v = dot(&c.row, &sol.x);
                match c.rel {
                    Relation::Ge => assert!(v >= c.rhs - 1e-7),
                    Relation::Le => assert!(v <= c.rhs + 1e-7),
                    Relation::Eq => assert!((v - c.rhs).abs() < 1e-7),
                }
            }
            // Rejection-sample feasible points; none may beat the optimum.
            let ineq = to_inequalities(&lp);
            let mut found = 0;
            for _ in 0..2000 {
                if found > 20 {
                    break;
                }
                let p: Vec<f64> = (0..lp.num_vars()).map(|_| rng.next_in(-5.0, 5.0)).collect();
                let ok = ineq.rows.iter().all(|(g, h)| {
                    g.iter().map(|&(i, v)| v * p[i]).sum::<f64>() >= h - 1e-12
                });
                if ok {
                    found += 1;
                    assert!(dot(&lp.objective, &p) >= sol.objective_value - 1e-6);
                }
            }
        }
        assert!(optimal_seen >= 50, "too few optimal instances: {optimal_seen}");
    }

    #[test]
    fn dump_format_is_stable() {
        let mut buf = Vec::new();
        lp1().dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "minimize 1\nbounds -inf,inf\n1 >= 3\n1 <= 10\n"
        );
    }
}
