//! Dense revised simplex for the L1 minimization behind robustness of magic.
//!
//! The problem `min sum_j w_j |x_j|  s.t.  A x = b` is solved in split
//! standard form: `u = [x+; x-] >= 0`, constraint matrix `[A, -A]`, cost
//! `[w; w]`. A two-phase revised simplex with an explicitly maintained basis
//! inverse handles it; phase 1 starts from artificial variables, phase 2
//! prices both split halves of every column from one sparse dot product per
//! column. Dantzig pricing is used until degenerate stalling is detected,
//! then Bland's rule until the objective moves again, which guarantees
//! termination. The returned multipliers `y = c_B B^-1` are exact basis
//! duals: at optimality `|a_j^T y| <= w_j` for every supplied column (up to
//! tolerance), and `b^T y` equals the objective.
//!
//! Everything is deterministic: single-threaded, fixed scan orders, ties in
//! entering/leaving choices broken by variable index.

use crate::error::{Error, Result};
use crate::stab::StabilizerId;

/// Primal feasibility tolerance on `||Ax - b||_inf`.
pub const PRIMAL_FEAS_TOL: f64 = 1e-9;
/// Dual feasibility tolerance on `max_j (|a_j^T y| - w_j)`.
pub const DUAL_FEAS_TOL: f64 = 1e-7;
/// Relative duality-gap tolerance.
pub const GAP_TOL: f64 = 1e-6;

/// Reduced costs above `-REDUCED_COST_TOL` do not qualify for entering.
const REDUCED_COST_TOL: f64 = 1e-9;
/// Minimum pivot magnitude accepted by the ratio test.
const PIVOT_TOL: f64 = 1e-9;
/// Basic values below this are reported as zero.
const ZERO_TOL: f64 = 1e-12;
/// Eta updates between refactorizations of the basis inverse.
const REFACTOR_EVERY: usize = 96;

/// Stable identity of an LP column across solver calls.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum ColumnId {
    /// A stabilizer state from the main enumeration.
    Stab(StabilizerId),
    /// A state of the cover family: cover block index plus sign pattern.
    Cover { block: u32, delta: u32 },
    /// Caller-assigned tag (used by the symmetric compression).
    Tag(u64),
}

/// One sparse constraint column.
#[derive(Clone, Debug)]
pub struct LpColumn {
    pub id: ColumnId,
    /// `(row, value)` pairs; rows are unique and in-range.
    pub entries: Vec<(u32, f64)>,
}

/// A set of columns sharing one row dimension.
#[derive(Clone, Debug, Default)]
pub struct ColumnSet {
    pub n_rows: usize,
    pub columns: Vec<LpColumn>,
}

impl ColumnSet {
    pub fn new(n_rows: usize) -> Self {
        ColumnSet {
            n_rows,
            columns: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Appends a column after validating its rows.
    pub fn push(&mut self, col: LpColumn) -> Result<()> {
        let mut seen_rows: Vec<u32> = col.entries.iter().map(|e| e.0).collect();
        seen_rows.sort_unstable();
        if seen_rows.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid_argument("column has a duplicate row"));
        }
        if seen_rows.last().is_some_and(|&r| r as usize >= self.n_rows) {
            return Err(Error::invalid_argument(format!(
                "column row {} out of range (n_rows = {})",
                seen_rows.last().unwrap(),
                self.n_rows
            )));
        }
        self.columns.push(col);
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

impl LpStatus {
    /// Errors out unless the solve reached a certified optimum.
    pub fn require_optimal(self, what: &str) -> Result<()> {
        match self {
            LpStatus::Optimal => Ok(()),
            LpStatus::Infeasible => Err(Error::Infeasible(format!(
                "{what}: the column set cannot reproduce the target"
            ))),
            LpStatus::IterationLimit => Err(Error::IterationLimit(format!(
                "{what}: simplex iteration budget exhausted"
            ))),
        }
    }
}

/// Primal/dual solution pair.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// `sum_j w_j |x_j|` at the returned point.
    pub objective: f64,
    /// Nonzero signed weights, in column order.
    pub x: Vec<(ColumnId, f64)>,
    /// Basis duals, one per row.
    pub y: Vec<f64>,
    pub iterations: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub max_iterations: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: 200_000,
        }
    }
}

/// Minimizes `sum_j w_j |x_j|` subject to `sum_j x_j a_j = b`.
///
/// `weights` defaults to all ones; entries must be positive. The solution
/// reports `Infeasible` when phase 1 cannot zero the artificials, and
/// `IterationLimit` with the current (primal-feasible) iterate when the
/// budget runs out.
pub fn solve_l1(cols: &ColumnSet, b: &[f64], weights: Option<&[f64]>) -> Result<LpSolution> {
    solve_l1_with(cols, b, weights, SolveOptions::default())
}

pub fn solve_l1_with(
    cols: &ColumnSet,
    b: &[f64],
    weights: Option<&[f64]>,
    opts: SolveOptions,
) -> Result<LpSolution> {
    if b.len() != cols.n_rows {
        return Err(Error::invalid_argument(format!(
            "rhs has {} rows, column set has {}",
            b.len(),
            cols.n_rows
        )));
    }
    if cols.is_empty() {
        return Err(Error::invalid_argument("empty column set"));
    }
    let w: Vec<f64> = match weights {
        Some(w) => {
            if w.len() != cols.len() {
                return Err(Error::invalid_argument(format!(
                    "{} weights for {} columns",
                    w.len(),
                    cols.len()
                )));
            }
            if w.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                return Err(Error::invalid_argument("weights must be positive and finite"));
            }
            w.to_vec()
        }
        None => vec![1.0; cols.len()],
    };
    let mut s = Simplex::new(cols, b, w, opts);
    s.run()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pricing {
    Dantzig,
    Bland,
}

struct Simplex<'a> {
    m: usize,
    nc: usize,
    cols: &'a [LpColumn],
    w: Vec<f64>,
    b: &'a [f64],
    opts: SolveOptions,
    /// Basis inverse, column-major: `binv[c * m + r] = (B^-1)[r][c]`.
    binv: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    xb: Vec<f64>,
    art_sign: Vec<f64>,
    iterations: u64,
    pivots_since_refactor: usize,
    // scratch
    y: Vec<f64>,
    t: Vec<f64>,
}

impl<'a> Simplex<'a> {
    fn new(cols: &'a ColumnSet, b: &'a [f64], w: Vec<f64>, opts: SolveOptions) -> Self {
        let m = cols.n_rows;
        let nc = cols.len();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let basis: Vec<usize> = (0..m).map(|i| 2 * nc + i).collect();
        let mut in_basis = vec![false; 2 * nc + m];
        for &v in &basis {
            in_basis[v] = true;
        }
        let art_sign: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let xb: Vec<f64> = b.iter().map(|v| v.abs()).collect();
        // fold the artificial signs into the initial inverse so B = I holds
        for i in 0..m {
            binv[i * m + i] = art_sign[i];
        }
        Simplex {
            m,
            nc,
            cols: &cols.columns,
            w,
            b,
            opts,
            binv,
            basis,
            in_basis,
            xb,
            art_sign,
            iterations: 0,
            pivots_since_refactor: 0,
            y: vec![0.0; m],
            t: vec![0.0; m],
        }
    }

    fn is_artificial(&self, var: usize) -> bool {
        var >= 2 * self.nc
    }

    fn cost(&self, var: usize, phase: Phase) -> f64 {
        match phase {
            Phase::One => {
                if self.is_artificial(var) {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => {
                if self.is_artificial(var) {
                    0.0
                } else {
                    self.w[var % self.nc]
                }
            }
        }
    }

    /// `y = c_B^T B^-1`.
    fn btran(&mut self, phase: Phase) {
        for r in 0..self.m {
            let col = &self.binv[r * self.m..(r + 1) * self.m];
            let mut acc = 0.0;
            for (i, &v) in col.iter().enumerate() {
                let c = self.cost(self.basis[i], phase);
                if c != 0.0 {
                    acc += c * v;
                }
            }
            self.y[r] = acc;
        }
    }

    /// `t = B^-1 a_var` for a structural or artificial variable.
    fn ftran(&mut self, var: usize) {
        self.t.iter_mut().for_each(|v| *v = 0.0);
        if self.is_artificial(var) {
            let r = var - 2 * self.nc;
            let sign = self.art_sign[r];
            let col = &self.binv[r * self.m..(r + 1) * self.m];
            for (i, &v) in col.iter().enumerate() {
                self.t[i] = sign * v;
            }
            return;
        }
        let (j, sign) = if var < self.nc {
            (var, 1.0)
        } else {
            (var - self.nc, -1.0)
        };
        for &(row, val) in &self.cols[j].entries {
            let scale = sign * val;
            let col = &self.binv[row as usize * self.m..(row as usize + 1) * self.m];
            for (i, &v) in col.iter().enumerate() {
                self.t[i] += scale * v;
            }
        }
    }

    /// Entering variable under the given rule; `None` means phase-optimal.
    fn price(&self, phase: Phase, pricing: Pricing) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.nc {
            let s: f64 = self.cols[j]
                .entries
                .iter()
                .map(|&(row, val)| val * self.y[row as usize])
                .sum();
            let base_cost = match phase {
                Phase::One => 0.0,
                Phase::Two => self.w[j],
            };
            for (var, d) in [(j, base_cost - s), (self.nc + j, base_cost + s)] {
                if self.in_basis[var] || d >= -REDUCED_COST_TOL {
                    continue;
                }
                match pricing {
                    Pricing::Bland => {
                        // smallest variable index wins; the scan visits +j
                        // before -j but variable order is (+0..+nc, -0..-nc)
                        if best.is_none_or(|(bv, _)| var < bv) {
                            best = Some((var, d));
                        }
                    }
                    Pricing::Dantzig => {
                        if best.is_none_or(|(_, bd)| d < bd) {
                            best = Some((var, d));
                        }
                    }
                }
            }
        }
        best
    }

    /// Leaving position by minimum ratio; ties go to the smallest basis
    /// variable index.
    fn ratio_test(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let ti = self.t[i];
            if ti <= PIVOT_TOL {
                continue;
            }
            let ratio = (self.xb[i].max(0.0)) / ti;
            match best {
                None => best = Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - 1e-12
                        || ((ratio - br).abs() <= 1e-12 && self.basis[i] < self.basis[bi])
                    {
                        best = Some((i, ratio));
                    }
                }
            }
        }
        best
    }

    fn pivot(&mut self, enter: usize, leave_pos: usize, theta: f64) {
        let tr = self.t[leave_pos];
        debug_assert!(tr.abs() > PIVOT_TOL);
        for i in 0..self.m {
            if i != leave_pos {
                self.xb[i] -= theta * self.t[i];
                if self.xb[i] < 0.0 && self.xb[i] > -1e-11 {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[leave_pos] = theta;
        // eta update of the inverse: row ops in column-major layout
        let m = self.m;
        for c in 0..m {
            let base = c * m;
            let pivot_val = self.binv[base + leave_pos] / tr;
            if pivot_val == 0.0 {
                continue;
            }
            self.binv[base + leave_pos] = pivot_val;
            for i in 0..m {
                if i != leave_pos {
                    self.binv[base + i] -= self.t[i] * pivot_val;
                }
            }
        }
        let leaving = self.basis[leave_pos];
        self.in_basis[leaving] = false;
        self.in_basis[enter] = true;
        self.basis[leave_pos] = enter;
        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    /// Rebuilds the inverse (and the basic values) from scratch.
    fn refactor(&mut self) {
        let m = self.m;
        let mat = nalgebra::DMatrix::<f64>::from_fn(m, m, |r, c| {
            let var = self.basis[c];
            if self.is_artificial(var) {
                let row = var - 2 * self.nc;
                if row == r {
                    self.art_sign[row]
                } else {
                    0.0
                }
            } else {
                let (j, sign) = if var < self.nc {
                    (var, 1.0)
                } else {
                    (var - self.nc, -1.0)
                };
                self.cols[j]
                    .entries
                    .iter()
                    .find(|&&(row, _)| row as usize == r)
                    .map_or(0.0, |&(_, v)| sign * v)
            }
        });
        let inv = mat
            .try_inverse()
            .expect("basis matrix is nonsingular by the simplex invariant");
        self.binv.copy_from_slice(inv.as_slice());
        // xb = B^-1 b
        self.xb.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..m {
            let scale = self.b[r];
            if scale == 0.0 {
                continue;
            }
            let col = &self.binv[r * m..(r + 1) * m];
            for (i, &v) in col.iter().enumerate() {
                self.xb[i] += scale * v;
            }
        }
        for v in self.xb.iter_mut() {
            if *v < 0.0 && *v > -1e-9 {
                *v = 0.0;
            }
        }
        self.pivots_since_refactor = 0;
    }

    fn objective(&self, phase: Phase) -> f64 {
        (0..self.m)
            .map(|i| self.cost(self.basis[i], phase) * self.xb[i])
            .sum()
    }

    /// Runs one phase to optimality; returns false on iteration exhaustion.
    fn optimize(&mut self, phase: Phase) -> Result<bool> {
        let stall_limit = 4 * self.m as u64 + 64;
        let mut pricing = Pricing::Dantzig;
        let mut stalled: u64 = 0;
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Ok(false);
            }
            self.btran(phase);
            let Some((enter, _)) = self.price(phase, pricing) else {
                return Ok(true);
            };
            self.ftran(enter);
            let Some((leave_pos, theta)) = self.ratio_test() else {
                // A descent direction with no blocking row cannot occur for
                // these objectives; treat as numerical breakdown.
                return Err(Error::invalid_state(
                    "simplex found an unbounded direction on a bounded problem",
                ));
            };
            self.pivot(enter, leave_pos, theta);
            self.iterations += 1;
            if theta <= ZERO_TOL {
                stalled += 1;
                if stalled > stall_limit {
                    pricing = Pricing::Bland;
                }
            } else {
                stalled = 0;
                pricing = Pricing::Dantzig;
            }
        }
    }

    /// Pivots zero-valued artificials out of the basis where a structural
    /// column can replace them; remaining ones sit on redundant rows.
    fn drive_out_artificials(&mut self) {
        for pos in 0..self.m {
            if !self.is_artificial(self.basis[pos]) || self.xb[pos].abs() > 1e-8 {
                continue;
            }
            // row pos of B^-1
            let row: Vec<f64> = (0..self.m).map(|r| self.binv[r * self.m + pos]).collect();
            let candidate = (0..2 * self.nc).find(|&var| {
                if self.in_basis[var] {
                    return false;
                }
                let (j, sign) = if var < self.nc {
                    (var, 1.0)
                } else {
                    (var - self.nc, -1.0)
                };
                let dot: f64 = self.cols[j]
                    .entries
                    .iter()
                    .map(|&(r, v)| sign * v * row[r as usize])
                    .sum();
                dot.abs() > 1e-7
            });
            if let Some(var) = candidate {
                self.ftran(var);
                if self.t[pos].abs() > PIVOT_TOL {
                    self.pivot(var, pos, 0.0);
                }
            }
        }
    }

    fn run(&mut self) -> Result<LpSolution> {
        let scale = 1.0 + self.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let feasible = self.optimize(Phase::One)?;
        let phase1 = self.objective(Phase::One);
        if !feasible {
            return Ok(self.extract(LpStatus::IterationLimit, Phase::One));
        }
        if phase1 > PRIMAL_FEAS_TOL * scale * self.m as f64 {
            return Ok(self.extract(LpStatus::Infeasible, Phase::One));
        }
        self.drive_out_artificials();
        let done = self.optimize(Phase::Two)?;
        let status = if done {
            LpStatus::Optimal
        } else {
            LpStatus::IterationLimit
        };
        Ok(self.extract(status, Phase::Two))
    }

    fn extract(&mut self, status: LpStatus, phase: Phase) -> LpSolution {
        self.btran(phase);
        let mut net = vec![0.0f64; self.nc];
        for (pos, &var) in self.basis.iter().enumerate() {
            if self.is_artificial(var) {
                continue;
            }
            if var < self.nc {
                net[var] += self.xb[pos];
            } else {
                net[var - self.nc] -= self.xb[pos];
            }
        }
        let x: Vec<(ColumnId, f64)> = net
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v.abs() > ZERO_TOL)
            .map(|(j, &v)| (self.cols[j].id, v))
            .collect();
        let objective = net
            .iter()
            .enumerate()
            .map(|(j, v)| self.w[j] * v.abs())
            .sum();
        LpSolution {
            status,
            objective,
            x,
            y: self.y.clone(),
            iterations: self.iterations,
        }
    }
}

/// Independent check of a solution against its column set.
#[derive(Clone, Copy, Debug)]
pub struct VerifyReport {
    pub primal_residual_inf: f64,
    /// `max_j (|a_j^T y| - w_j)`; negative slack means strictly feasible.
    pub dual_margin: f64,
    /// `|objective - b^T y|` relative to the objective scale.
    pub duality_gap: f64,
    /// `max_j |x_j| * max(0, w_j - |a_j^T y|)`: complementary slackness.
    pub complementarity: f64,
    pub primal_ok: bool,
    pub dual_ok: bool,
    pub gap_ok: bool,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.primal_ok && self.dual_ok && self.gap_ok
    }
}

pub fn verify_solution(
    cols: &ColumnSet,
    b: &[f64],
    sol: &LpSolution,
    weights: Option<&[f64]>,
) -> Result<VerifyReport> {
    if sol.y.len() != cols.n_rows || b.len() != cols.n_rows {
        return Err(Error::invalid_argument("row dimension mismatch"));
    }
    let by_id: std::collections::HashMap<ColumnId, f64> = sol.x.iter().copied().collect();
    let mut residual = vec![0.0f64; cols.n_rows];
    for (r, &v) in b.iter().enumerate() {
        residual[r] = -v;
    }
    let mut dual_margin = f64::NEG_INFINITY;
    let mut complementarity = 0.0f64;
    for (j, col) in cols.columns.iter().enumerate() {
        let wj = weights.map_or(1.0, |w| w[j]);
        let xj = by_id.get(&col.id).copied().unwrap_or(0.0);
        let mut dot = 0.0;
        for &(row, val) in &col.entries {
            if xj != 0.0 {
                residual[row as usize] += xj * val;
            }
            dot += val * sol.y[row as usize];
        }
        dual_margin = dual_margin.max(dot.abs() - wj);
        complementarity = complementarity.max(xj.abs() * (wj - dot.abs()).max(0.0));
    }
    let primal_residual_inf = residual.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let bty: f64 = b.iter().zip(&sol.y).map(|(a, b)| a * b).sum();
    let duality_gap = (sol.objective - bty).abs();
    let scale = 1.0 + sol.objective.abs();
    Ok(VerifyReport {
        primal_residual_inf,
        dual_margin,
        duality_gap,
        complementarity,
        primal_ok: primal_residual_inf <= PRIMAL_FEAS_TOL * (1.0 + b.len() as f64).sqrt(),
        dual_ok: dual_margin <= DUAL_FEAS_TOL,
        gap_ok: duality_gap <= GAP_TOL * scale,
    })
}
