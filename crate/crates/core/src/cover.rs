//! A closed-form family of blocks covering every Pauli string exactly once.
//!
//! Take the lexicographically smallest monic irreducible polynomial `f` of
//! degree `n` over GF(2) and form the symmetric coefficient matrices `C_l`
//! with `(C_l)_{ij} = [x^l] (x^{i+j} mod f)` (indices from 0). The `2^n`
//! subset sums of `{C_l}` are pairwise distinct symmetric matrices `X_k`, and
//! the blocks
//!
//! ```text
//!   [ X_k | I ]  for each k,   plus   [ I | 0 ]
//! ```
//!
//! are all valid check matrices whose non-identity members partition the
//! non-identity Pauli strings: every string appears in exactly one block.
//! That yields `(2^n + 1) 2^n` stabilizer states touching every row of the
//! overlap matrix, which is why appending these columns to any L1 program
//! guarantees feasibility. Solving each block against a target in closed
//! form (one Walsh–Hadamard transform per block) produces the `R_FWHT`
//! upper bound of [`minimal_feasible_solution`] in `O(n 4^n)` total.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fwht::fwht_pow2;
use crate::gf2::{Poly, SymMatrix};
use crate::pauli::PauliVector;
use crate::stab::{block_paulis, CheckMatrix, PauliWord};

/// Cover construction cap: `2^n + 1` blocks of `2^n` states stay desk-sized
/// through here.
pub const COVER_MAX_QUBITS: u32 = 14;

/// Exhaustive cover verification walks a `4^n` occupancy table.
pub const VERIFY_MAX_QUBITS: u32 = 10;

/// Lexicographically smallest monic irreducible polynomial of degree `n`
/// over GF(2), smallest meaning lowest value with coefficients read as a
/// binary integer (so `n = 1` gives `x`, `n = 3` gives `x^3 + x + 1`).
pub fn find_irreducible(n: u32) -> Result<Poly> {
    if n == 0 || n > 31 {
        return Err(Error::invalid_argument(format!(
            "irreducible polynomial degree must be in 1..=31, got {n}"
        )));
    }
    for low in 0..1u64 << n {
        let cand = Poly(1u64 << n | low);
        if cand.is_irreducible() {
            return Ok(cand);
        }
    }
    unreachable!("an irreducible polynomial of every degree exists");
}

/// The symmetric coefficient matrices `C_0..C_{n-1}` for an irreducible `f`
/// of degree `n`.
pub fn coefficient_matrices(n: u32, f: Poly) -> Result<Vec<SymMatrix>> {
    if f.degree() != n {
        return Err(Error::invalid_argument(format!(
            "polynomial degree {} does not match n = {n}",
            f.degree()
        )));
    }
    if !f.is_irreducible() {
        return Err(Error::invalid_argument(
            "coefficient matrices require an irreducible modulus",
        ));
    }
    // powers x^0 .. x^{2n-2} mod f, each of degree < n
    let mut powers = Vec::with_capacity(2 * n as usize - 1);
    let mut cur = Poly::ONE;
    for _ in 0..2 * n - 1 {
        powers.push(cur);
        cur = cur.mul(Poly(0b10)).rem(f);
    }
    let mut out = vec![SymMatrix::zero(n); n as usize];
    for i in 0..n as usize {
        for j in i..n as usize {
            let p = powers[i + j];
            for (l, m) in out.iter_mut().enumerate() {
                if p.0 >> l & 1 != 0 {
                    m.set(i, j);
                }
            }
        }
    }
    debug_assert!(out.iter().all(|m| m.is_symmetric()));
    Ok(out)
}

/// All `2^n` subset sums of the coefficient matrices, indexed by the subset
/// bitmask (bit `l` selects `C_l`). Pairwise distinct by construction,
/// asserted in debug builds.
pub fn symmetric_family(n: u32) -> Result<Vec<SymMatrix>> {
    let ci = coefficient_matrices(n, find_irreducible(n)?)?;
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0..1u32 << n {
        let mut acc = SymMatrix::zero(n);
        for (l, c) in ci.iter().enumerate() {
            if mask >> l & 1 != 0 {
                acc.xor_assign(c);
            }
        }
        out.push(acc);
    }
    #[cfg(debug_assertions)]
    {
        let mut seen = std::collections::HashSet::new();
        for m in &out {
            assert!(seen.insert(m.rows.clone()), "subset sums must be distinct");
        }
    }
    Ok(out)
}

/// The cover family of check matrices.
#[derive(Clone, Debug)]
pub struct CoverSet {
    n: u32,
    blocks: Vec<CheckMatrix>,
}

impl CoverSet {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn blocks(&self) -> &[CheckMatrix] {
        &self.blocks
    }

    /// Exhaustively checks the cover property: the identity appears in every
    /// block, every other Pauli string in exactly one.
    pub fn verify(&self) -> Result<bool> {
        if self.n > VERIFY_MAX_QUBITS {
            return Err(Error::cap(format!(
                "cover verification is capped at {VERIFY_MAX_QUBITS} qubits, got {}",
                self.n
            )));
        }
        let mut seen = vec![0u8; 1usize << (2 * self.n)];
        for c in &self.blocks {
            for e in block_paulis(c) {
                if e.word.is_identity() {
                    continue;
                }
                let slot = &mut seen[e.index as usize];
                if *slot == 1 {
                    return Ok(false);
                }
                *slot = 1;
            }
        }
        Ok(seen.iter().skip(1).all(|&s| s == 1))
    }
}

/// Builds the `2^n + 1` cover blocks: `[X_k | I]` for each subset sum in
/// mask order, then `[I | 0]`.
pub fn build_cover_set(n: u32) -> Result<CoverSet> {
    if n == 0 || n > COVER_MAX_QUBITS {
        return Err(Error::cap(format!(
            "cover construction supports 1..={COVER_MAX_QUBITS} qubits, got {n}"
        )));
    }
    let family = symmetric_family(n)?;
    let mut blocks = Vec::with_capacity(family.len() + 1);
    for xk in &family {
        let rows: Vec<PauliWord> = (0..n)
            .map(|i| PauliWord {
                x: xk.rows[i as usize] as u32,
                z: 1 << i,
            })
            .collect();
        blocks.push(CheckMatrix::new(n, &rows)?);
    }
    let rows: Vec<PauliWord> = (0..n).map(|i| PauliWord { x: 1 << i, z: 0 }).collect();
    blocks.push(CheckMatrix::new(n, &rows)?);
    debug_assert!(blocks.iter().all(|c| c.is_valid()));
    Ok(CoverSet { n, blocks })
}

/// A feasible decomposition over the cover states: per cover block `j`, the
/// weight vector over its `2^n` sign patterns.
#[derive(Clone, Debug)]
pub struct FeasibleDecomposition {
    pub n: u32,
    /// `weights[j][delta]` multiplies state `(cover block j, delta)`.
    pub weights: Vec<Vec<f64>>,
    /// Total L1 mass, an upper bound on the robustness of magic.
    pub r_fwht: f64,
    /// Max-norm of `(sum of weighted columns) - b`, honestly recomputed
    /// through the decomposition itself.
    pub residual_inf: f64,
}

/// Closed-form feasible solution: block `j` absorbs the entries of `b` its
/// non-identity members own (sign-adjusted), the identity row is split
/// evenly, and one Walsh–Hadamard transform per block turns that into sign
/// pattern weights. Runs in `O(n 4^n)` and never fails on a unit-trace
/// target.
pub fn minimal_feasible_solution(b: &PauliVector) -> Result<FeasibleDecomposition> {
    let n = b.n().get();
    if n > COVER_MAX_QUBITS {
        return Err(Error::cap(format!(
            "feasible decomposition supports 1..={COVER_MAX_QUBITS} qubits, got {n}"
        )));
    }
    if (b.b0() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid_state(format!(
            "target must have unit trace (b_0 = 1), got {}",
            b.b0()
        )));
    }
    let cover = build_cover_set(n)?;
    let dim = 1usize << n;
    let id_share = 1.0 / (cover.blocks.len() as f64);
    let entries = b.entries();
    let weights: Vec<Vec<f64>> = cover
        .blocks
        .par_iter()
        .map(|c| {
            let elems = block_paulis(c);
            let mut v = vec![0.0; dim];
            v[0] = id_share;
            for (gamma, e) in elems.iter().enumerate().skip(1) {
                v[gamma] = e.sign as f64 * entries[e.index as usize];
            }
            fwht_pow2(&mut v);
            let scale = 1.0 / dim as f64;
            for w in &mut v {
                *w *= scale;
            }
            v
        })
        .collect();

    let r_fwht = weights
        .iter()
        .map(|w| w.iter().map(|v| v.abs()).sum::<f64>())
        .sum();

    // Reconstruct sum_j column(j, delta) * weight and compare against b.
    let mut recon = vec![0.0; entries.len()];
    let mut buf = vec![0.0; dim];
    for (c, w) in cover.blocks.iter().zip(&weights) {
        buf.copy_from_slice(w);
        fwht_pow2(&mut buf);
        for (gamma, e) in block_paulis(c).iter().enumerate() {
            recon[e.index as usize] += e.sign as f64 * buf[gamma];
        }
    }
    let residual_inf = recon
        .iter()
        .zip(entries)
        .fold(0.0f64, |acc, (r, e)| acc.max((r - e).abs()));

    Ok(FeasibleDecomposition {
        n,
        weights,
        r_fwht,
        residual_inf,
    })
}
