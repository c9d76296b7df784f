//! Robustness-of-magic solvers over the stabilizer column set.
//!
//! Robustness of a state with Pauli vector `b` is the minimum of
//! `sum_j |x_j|` over decompositions `sum_j x_j a_j = b`, where the `a_j`
//! are the (`+-1`-valued) Pauli vectors of all stabilizer states. Four
//! routes are provided:
//!
//! * [`rom_naive`] materializes every column and solves one LP — exact, but
//!   only viable for small `n`;
//! * [`rom_top_overlap`] keeps only the states with the largest and
//!   smallest overlaps plus the always-feasible cover columns — an upper
//!   bound with a certified dual lower bound;
//! * [`rom_column_generation`] grows the top-overlap set by repeatedly
//!   adding columns whose dual constraint `|a_j^T y| <= 1` is violated,
//!   until a full sweep finds no violation — exact on termination, with the
//!   sweep itself as the certificate;
//! * [`rom_fwht`] returns the closed-form cover-basis solution — an upper
//!   bound costing one pass of Walsh–Hadamard transforms.
//!
//! Every result carries primal weights, the dual vector used for its
//! certificate, and a lower bound `max(1, b^T y / max(1, max_j |a_j^T y|))`
//! that is valid no matter how the solve went.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use crate::cover;
use crate::error::{Error, Result};
use crate::lp::{self, ColumnId, ColumnSet, LpColumn};
use crate::pauli::PauliVector;
use crate::stab::{self, BlockIter, StabilizerId};

/// `rom_naive` refuses above this many qubits unless the caller raises the
/// guard explicitly.
pub const NAIVE_DEFAULT_MAX_QUBITS: u32 = 4;
/// Hard ceiling for the naive solver even with a raised guard.
pub const NAIVE_HARD_MAX_QUBITS: u32 = 5;
/// Most columns any selection-based solver will materialize.
pub const SELECT_MAX_COLUMNS: usize = 4_000_000;

/// Duals violating `|a^T y| > 1 + CERT_TOL` count as certificate failures.
pub const CERT_TOL: f64 = 1e-7;
/// Two objective values within this are treated as equal.
const VALUE_TOL: f64 = 1e-9;

/// Outcome of a robustness computation.
#[derive(Clone, Debug)]
pub struct RomResult {
    /// Total L1 weight of the best decomposition found (an upper bound).
    pub value: f64,
    /// True only when a full dual sweep certified global optimality.
    pub exact: bool,
    /// Best certified lower bound on the robustness (at least 1).
    pub lower_bound: f64,
    /// Equal to `value`.
    pub upper_bound: f64,
    /// Outer iterations (column-generation rounds; 0 for one-shot solvers).
    pub iterations: u64,
    /// Columns in the final LP.
    pub n_columns_final: usize,
    /// Wall-clock time.
    pub seconds: f64,
    /// Sparse decomposition weights.
    pub decomposition: Vec<(ColumnId, f64)>,
    /// Dual vector backing the certificate and lower bound.
    pub dual: Vec<f64>,
}

fn require_unit_trace(b: &PauliVector) -> Result<()> {
    if (b.b0() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid_state(format!(
            "state must have unit trace (identity coefficient 1), got {}",
            b.b0()
        )));
    }
    Ok(())
}

fn lp_column_from_stab(col: &stab::SparseColumn) -> LpColumn {
    LpColumn {
        id: ColumnId::Stab(col.id),
        entries: col
            .entries
            .iter()
            .map(|&(row, sign)| (row as u32, sign as f64))
            .collect(),
    }
}

/// Columns of the cover family: every cover block with every sign pattern.
pub fn cover_columns(n: u32) -> Result<Vec<LpColumn>> {
    let cover = cover::build_cover_set(n)?;
    let dim = 1usize << n;
    let mut out = Vec::with_capacity((dim + 1) * dim);
    for (j, block) in cover.blocks().iter().enumerate() {
        let elems = stab::block_paulis(block);
        for delta in 0..dim as u32 {
            let entries: Vec<(u32, f64)> = elems
                .iter()
                .enumerate()
                .map(|(gamma, e)| {
                    let flip = (gamma as u32 & delta).count_ones() & 1;
                    let sign = if flip == 0 { e.sign } else { -e.sign };
                    (e.index as u32, sign as f64)
                })
                .collect();
            out.push(LpColumn {
                id: ColumnId::Cover {
                    block: j as u32,
                    delta,
                },
                entries,
            });
        }
    }
    Ok(out)
}

/// Sign vector `y = sgn(b) / 2^n`: always dual feasible, with
/// `b^T y = st_norm(b)`. Used as the certificate whenever the primal value
/// already equals the st-norm.
fn st_dual(b: &PauliVector) -> Vec<f64> {
    let scale = 1.0 / b.n().hilbert_dim() as f64;
    b.entries()
        .iter()
        .map(|&v| {
            if v > 0.0 {
                scale
            } else if v < 0.0 {
                -scale
            } else {
                0.0
            }
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Certificate {
    violations: u64,
    lower: f64,
    top: Vec<stab::Selected>,
}

/// Full dual sweep of `y`; converts the outcome into a lower bound.
fn certify(
    b: &PauliVector,
    y: &[f64],
    tol_dual: f64,
    take: usize,
    skip: &HashSet<StabilizerId>,
) -> Result<Certificate> {
    let report = stab::dual_sweep(b.n().get(), y, 1.0 + tol_dual, take, skip)?;
    let bty = dot(b.entries(), y);
    let lower = (bty / report.max_abs.max(1.0)).max(1.0);
    Ok(Certificate {
        violations: report.violations,
        lower,
        top: report.top,
    })
}

/// Exact robustness by materializing the entire column set.
///
/// Guarded at [`NAIVE_DEFAULT_MAX_QUBITS`]; `rom_naive_with_guard` raises
/// the limit to at most [`NAIVE_HARD_MAX_QUBITS`].
pub fn rom_naive(b: &PauliVector) -> Result<RomResult> {
    rom_naive_with_guard(b, NAIVE_DEFAULT_MAX_QUBITS)
}

pub fn rom_naive_with_guard(b: &PauliVector, max_qubits: u32) -> Result<RomResult> {
    let n = b.n().get();
    let limit = max_qubits.min(NAIVE_HARD_MAX_QUBITS);
    if n > limit {
        return Err(Error::cap(format!(
            "naive solver materializes all {} stabilizer columns; n = {n} exceeds the guard \
             of {limit} qubits — use the column-generation method instead",
            stab::stabilizer_state_count(n)
                .map(|c| c.to_string())
                .unwrap_or_else(|_| "~".into())
        )));
    }
    require_unit_trace(b)?;
    let t0 = Instant::now();
    let dim = 1usize << n;
    let mut cols = ColumnSet::new(dim * dim);
    let mut elems = Vec::new();
    for (rank, block) in BlockIter::new(n)?.enumerate() {
        stab::block_paulis_into(&block, &mut elems);
        for delta in 0..dim as u32 {
            let entries: Vec<(u32, f64)> = elems
                .iter()
                .enumerate()
                .map(|(gamma, e)| {
                    let flip = (gamma as u32 & delta).count_ones() & 1;
                    let sign = if flip == 0 { e.sign } else { -e.sign };
                    (e.index as u32, sign as f64)
                })
                .collect();
            cols.push(LpColumn {
                id: ColumnId::Stab(StabilizerId {
                    block: rank as u64,
                    delta,
                }),
                entries,
            })?;
        }
    }
    let sol = lp::solve_l1(&cols, b.entries(), None)?;
    sol.status.require_optimal("naive solve")?;
    let st = b.st_norm();
    let y_used = if (sol.objective - st).abs() <= VALUE_TOL {
        st_dual(b)
    } else {
        sol.y.clone()
    };
    let cert = certify(b, &y_used, CERT_TOL, 8, &HashSet::new())?;
    Ok(RomResult {
        value: sol.objective,
        exact: cert.violations == 0,
        lower_bound: cert.lower,
        upper_bound: sol.objective,
        iterations: 0,
        n_columns_final: cols.len(),
        seconds: t0.elapsed().as_secs_f64(),
        decomposition: sol.x,
        dual: y_used,
    })
}

/// Turns a per-side fraction of the state count into (largest, smallest)
/// selection sizes, clamped so the two selections stay disjoint.
fn split_counts(n: u32, k: f64) -> Result<(usize, usize)> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::invalid_argument(format!(
            "selection fraction must lie in (0, 1], got {k}"
        )));
    }
    let total = stab::state_count_u64(n)? as f64;
    // `k` is the fraction selected on each side: the k|S| largest overlaps
    // and the k|S| smallest, clamped so the two never overlap.
    let per_side = (k * total).ceil() as u64;
    let hi = per_side.max(1).min(total as u64);
    let lo = per_side.min(total as u64 - hi);
    let picked = (hi + lo) as usize;
    if picked > SELECT_MAX_COLUMNS {
        return Err(Error::cap(format!(
            "selection of {picked} columns exceeds the {SELECT_MAX_COLUMNS}-column cap"
        )));
    }
    Ok((hi as usize, lo as usize))
}

fn selection_columns(
    b: &PauliVector,
    hi: usize,
    lo: usize,
    present: &mut HashSet<StabilizerId>,
) -> Result<Vec<LpColumn>> {
    let n = b.n().get();
    let (top, bottom) = stab::top_overlap_select(b, hi, lo)?;
    let mut out = Vec::with_capacity(top.len() + bottom.len());
    for sel in top.iter().chain(bottom.iter()) {
        if present.insert(sel.id) {
            out.push(lp_column_from_stab(&stab::column(n, sel.id)?));
        }
    }
    Ok(out)
}

/// Approximate robustness from the extreme-overlap column subset — the
/// `k|S|` largest and `k|S|` smallest overlaps — optionally with the cover
/// columns for guaranteed feasibility. `exact` is still set when the dual
/// sweep happens to certify the restricted optimum globally.
pub fn rom_top_overlap(b: &PauliVector, k: f64, include_cover: bool) -> Result<RomResult> {
    require_unit_trace(b)?;
    let n = b.n().get();
    let t0 = Instant::now();
    let (hi, lo) = split_counts(n, k)?;
    let dim = 1usize << n;
    let mut present = HashSet::new();
    let mut cols = ColumnSet::new(dim * dim);
    for c in selection_columns(b, hi, lo, &mut present)? {
        cols.push(c)?;
    }
    if include_cover {
        for c in cover_columns(n)? {
            cols.push(c)?;
        }
    }
    let sol = lp::solve_l1(&cols, b.entries(), None)?;
    sol.status.require_optimal("top-overlap solve")?;
    let st = b.st_norm();
    let y_used = if (sol.objective - st).abs() <= VALUE_TOL {
        st_dual(b)
    } else {
        sol.y.clone()
    };
    let cert = certify(b, &y_used, CERT_TOL, 8, &present)?;
    Ok(RomResult {
        value: sol.objective,
        exact: cert.violations == 0,
        lower_bound: cert.lower,
        upper_bound: sol.objective,
        iterations: 0,
        n_columns_final: cols.len(),
        seconds: t0.elapsed().as_secs_f64(),
        decomposition: sol.x,
        dual: y_used,
    })
}

/// Column-generation controls.
#[derive(Clone, Copy, Debug)]
pub struct CgParams {
    /// Initial per-side selection fraction of the state count.
    pub k0: f64,
    /// Columns with `|a^T y| < discard` and zero weight are dropped.
    pub discard: f64,
    /// Cap on columns added per round; `None` = `ceil(k0 * state count)`.
    pub max_new: Option<usize>,
    /// Cap on generation rounds before giving up (`exact = false`).
    pub max_iters: u64,
    /// Dual feasibility tolerance for the violation sweep.
    pub tol_dual: f64,
    /// Include the cover columns so every LP is feasible.
    pub include_cover: bool,
}

impl Default for CgParams {
    fn default() -> Self {
        CgParams {
            k0: 1e-3,
            discard: 0.8,
            max_new: None,
            max_iters: 100,
            tol_dual: CERT_TOL,
            include_cover: true,
        }
    }
}

/// Exact robustness by column generation.
///
/// Each round solves the restricted LP, sweeps the dual against every
/// stabilizer state, discards slack zero-weight columns, and adds the worst
/// violators. Termination with no violation certifies global optimality;
/// hitting `max_iters` returns the current upper/lower bounds with
/// `exact = false`.
pub fn rom_column_generation(b: &PauliVector, params: &CgParams) -> Result<RomResult> {
    require_unit_trace(b)?;
    if !(params.discard > 0.0 && params.discard < 1.0) {
        return Err(Error::invalid_argument(format!(
            "discard threshold must lie in (0, 1), got {}",
            params.discard
        )));
    }
    if !(params.tol_dual > 0.0) {
        return Err(Error::invalid_argument("tol_dual must be positive"));
    }
    let n = b.n().get();
    let t0 = Instant::now();
    let (hi, lo) = split_counts(n, params.k0)?;
    let max_new = params
        .max_new
        .unwrap_or_else(|| (hi + lo).max(1))
        .max(1);
    let dim = 1usize << n;
    let mut present = HashSet::new();
    let mut cols = ColumnSet::new(dim * dim);
    for c in selection_columns(b, hi, lo, &mut present)? {
        cols.push(c)?;
    }
    if params.include_cover {
        for c in cover_columns(n)? {
            cols.push(c)?;
        }
    }
    let st = b.st_norm();
    let mut tabu: HashSet<StabilizerId> = HashSet::new();
    let mut lower = 1.0f64;
    let mut iterations = 0u64;
    let mut prev_value = f64::INFINITY;
    loop {
        let sol = lp::solve_l1(&cols, b.entries(), None)?;
        sol.status.require_optimal("column-generation round")?;
        debug_assert!(
            sol.objective <= prev_value + 1e-7,
            "objective increased: {} -> {}",
            prev_value,
            sol.objective
        );
        prev_value = sol.objective;
        let y_used = if (sol.objective - st).abs() <= VALUE_TOL {
            st_dual(b)
        } else {
            sol.y.clone()
        };
        let take = max_new + tabu.len() + 16;
        let cert = certify(b, &y_used, params.tol_dual, take, &present)?;
        lower = lower.max(cert.lower);
        let out_of_rounds = iterations >= params.max_iters;
        if cert.violations == 0 || out_of_rounds {
            return Ok(RomResult {
                value: sol.objective,
                exact: cert.violations == 0,
                lower_bound: lower,
                upper_bound: sol.objective,
                iterations,
                n_columns_final: cols.len(),
                seconds: t0.elapsed().as_secs_f64(),
                decomposition: sol.x,
                dual: y_used,
            });
        }
        // Drop zero-weight columns far inside the dual constraint; remember
        // them for one round so an add/drop pair cannot oscillate. Cover
        // columns always stay (they carry the feasibility guarantee).
        let in_solution: HashMap<ColumnId, f64> = sol.x.iter().copied().collect();
        let mut next_tabu = HashSet::new();
        cols.columns.retain(|c| {
            let ColumnId::Stab(id) = c.id else {
                return true;
            };
            if in_solution.contains_key(&c.id) {
                return true;
            }
            let a_y: f64 = c
                .entries
                .iter()
                .map(|&(row, val)| val * sol.y[row as usize])
                .sum();
            if a_y.abs() < params.discard {
                next_tabu.insert(id);
                present.remove(&id);
                false
            } else {
                true
            }
        });
        // Add the worst violators, skipping anything just discarded.
        let mut added = 0usize;
        for sel in &cert.top {
            if added >= max_new {
                break;
            }
            if tabu.contains(&sel.id) || !present.insert(sel.id) {
                continue;
            }
            cols.push(lp_column_from_stab(&stab::column(n, sel.id)?))?;
            added += 1;
        }
        tabu = next_tabu;
        if added == 0 {
            // Every violator is tabu; forget the tabu list and retry —
            // the next round may re-admit them.
            if !tabu.is_empty() {
                tabu.clear();
            } else {
                // No violator could be added at all: bail out honestly.
                return Ok(RomResult {
                    value: sol.objective,
                    exact: false,
                    lower_bound: lower,
                    upper_bound: sol.objective,
                    iterations,
                    n_columns_final: cols.len(),
                    seconds: t0.elapsed().as_secs_f64(),
                    decomposition: sol.x,
                    dual: y_used,
                });
            }
        }
        iterations += 1;
    }
}

/// Closed-form cover-basis decomposition (`O(n 4^n)`): always feasible,
/// value within a factor `2^n` of the optimum.
pub fn rom_fwht(b: &PauliVector) -> Result<RomResult> {
    require_unit_trace(b)?;
    let t0 = Instant::now();
    let fd = cover::minimal_feasible_solution(b)?;
    let st = b.st_norm();
    let lower = st.max(1.0);
    let mut decomposition = Vec::new();
    for (j, ws) in fd.weights.iter().enumerate() {
        for (delta, &w) in ws.iter().enumerate() {
            if w.abs() > 1e-12 {
                decomposition.push((
                    ColumnId::Cover {
                        block: j as u32,
                        delta: delta as u32,
                    },
                    w,
                ));
            }
        }
    }
    let n_columns_final = decomposition.len();
    Ok(RomResult {
        value: fd.r_fwht,
        exact: fd.r_fwht <= lower + VALUE_TOL,
        lower_bound: lower,
        upper_bound: fd.r_fwht,
        iterations: 0,
        n_columns_final,
        seconds: t0.elapsed().as_secs_f64(),
        decomposition,
        dual: st_dual(b),
    })
}
