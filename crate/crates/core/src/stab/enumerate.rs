//! Enumeration of unsigned stabilizer groups in standard form.
//!
//! Every maximal stabilizer group on `n` qubits has a unique generator matrix
//! of the shape
//!
//! ```text
//!   rows 1..=k:      X part = R,          Z part = S on the pivot columns
//!   rows k+1..=n:    X part = 0,          Z part = R-complement
//! ```
//!
//! where `R` is a rank-`k` reduced row echelon form over GF(2) (pivot columns
//! carry an identity, the free entries live right of each pivot), `S` is a
//! symmetric `k x k` matrix placed on the pivot columns, and the
//! "R-complement" puts the identity on the non-pivot columns and `R`'s free
//! entries transposed on the pivot columns. Counting choices gives
//! `sum_k [n k]_2 * 2^(k(k+1)/2)` blocks, matching `|S_n| / 2^n`.
//!
//! The enumeration order is total and documented: ascending `k`; then pivot
//! column sets in lexicographic order; then the free `R` entries in row-major
//! order (first free entry most significant); then the upper triangle of `S`
//! in row-major order (first entry most significant). Ranks under this order
//! are what [`super::StabilizerId::block`] stores, and [`block_at`] inverts
//! them.

use super::{qbinom2_u64, CheckMatrix, ENUM_MAX_QUBITS};
#[cfg(test)]
use super::PauliWord;
use crate::error::{Error, Result};

/// Iterator over all blocks for `n` qubits in the documented order.
pub struct BlockIter {
    n: u32,
    k: u32,
    pivots: Vec<u32>,
    nonpivots: Vec<u32>,
    /// Free positions `(i, j)`: row `i`'s pivot sits left of non-pivot `j`.
    free_pairs: Vec<(u32, u32)>,
    xhat: u64,
    zhat: u64,
    done: bool,
}

impl BlockIter {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > ENUM_MAX_QUBITS {
            return Err(Error::cap(format!(
                "block enumeration supports 1..={ENUM_MAX_QUBITS} qubits, got {n}"
            )));
        }
        let mut it = BlockIter {
            n,
            k: 0,
            pivots: Vec::new(),
            nonpivots: Vec::new(),
            free_pairs: Vec::new(),
            xhat: 0,
            zhat: 0,
            done: false,
        };
        it.load_pivot_metadata();
        Ok(it)
    }

    /// Iterator positioned at block `rank`, by unranking the order above.
    pub fn from_rank(n: u32, rank: u64) -> Result<Self> {
        let mut it = BlockIter::new(n)?;
        let mut rem = rank;
        for k in 0..=n {
            let zbits = k * (k + 1) / 2;
            let k_total = qbinom2_u64(n, k) << zbits;
            if rem >= k_total {
                rem -= k_total;
                continue;
            }
            it.k = k;
            it.pivots = (0..k).collect();
            it.load_pivot_metadata();
            loop {
                let here = 1u64 << (it.free_pairs.len() as u32 + zbits);
                if rem < here {
                    it.xhat = rem >> zbits;
                    it.zhat = rem & ((1u64 << zbits) - 1);
                    return Ok(it);
                }
                rem -= here;
                if !it.advance_pivots() {
                    break; // cannot happen while rem < k_total
                }
            }
        }
        Err(Error::invalid_argument(format!(
            "block rank {rank} out of range for n = {n}"
        )))
    }

    fn load_pivot_metadata(&mut self) {
        self.nonpivots = (0..self.n)
            .filter(|c| !self.pivots.contains(c))
            .collect();
        self.free_pairs.clear();
        for (i, &p) in self.pivots.iter().enumerate() {
            for (j, &q) in self.nonpivots.iter().enumerate() {
                if p < q {
                    self.free_pairs.push((i as u32, j as u32));
                }
            }
        }
    }

    /// Next lexicographic `k`-subset of `0..n`; false when exhausted.
    fn advance_pivots(&mut self) -> bool {
        let k = self.k as usize;
        let n = self.n;
        if k == 0 {
            return false;
        }
        let Some(i) = (0..k)
            .rev()
            .find(|&i| self.pivots[i] < n - (k - i) as u32)
        else {
            return false;
        };
        self.pivots[i] += 1;
        for t in i + 1..k {
            self.pivots[t] = self.pivots[t - 1] + 1;
        }
        self.load_pivot_metadata();
        true
    }

    fn advance(&mut self) {
        let zbits = self.k * (self.k + 1) / 2;
        self.zhat += 1;
        if self.zhat < 1u64 << zbits {
            return;
        }
        self.zhat = 0;
        self.xhat += 1;
        if self.xhat < 1u64 << self.free_pairs.len() {
            return;
        }
        self.xhat = 0;
        if self.advance_pivots() {
            return;
        }
        self.k += 1;
        if self.k > self.n {
            self.done = true;
            return;
        }
        self.pivots = (0..self.k).collect();
        self.load_pivot_metadata();
    }

    fn emit(&self) -> CheckMatrix {
        let n = self.n;
        let k = self.k as usize;
        let mut c = CheckMatrix::empty(n);
        let rows = c.rows_mut();
        for (i, &p) in self.pivots.iter().enumerate() {
            rows[i].x |= 1 << p;
        }
        for (j, &q) in self.nonpivots.iter().enumerate() {
            rows[k + j].z |= 1 << q;
        }
        let f = self.free_pairs.len();
        for (t, &(i, j)) in self.free_pairs.iter().enumerate() {
            if self.xhat >> (f - 1 - t) & 1 != 0 {
                rows[i as usize].x |= 1 << self.nonpivots[j as usize];
                rows[k + j as usize].z |= 1 << self.pivots[i as usize];
            }
        }
        let zbits = (k * (k + 1) / 2) as u32;
        let mut t = 0;
        for i in 0..k {
            for l in i..k {
                if self.zhat >> (zbits - 1 - t) & 1 != 0 {
                    rows[i].z |= 1 << self.pivots[l];
                    rows[l].z |= 1 << self.pivots[i];
                }
                t += 1;
            }
        }
        c
    }
}

impl Iterator for BlockIter {
    type Item = CheckMatrix;

    fn next(&mut self) -> Option<CheckMatrix> {
        if self.done {
            return None;
        }
        let out = self.emit();
        self.advance();
        Some(out)
    }
}

/// Check matrix of the block at `rank` in the enumeration order.
pub fn block_at(n: u32, rank: u64) -> Result<CheckMatrix> {
    Ok(BlockIter::from_rank(n, rank)?.emit())
}

/// All `2^n` group members of a block (without signs), used by the cover
/// verifier; kept here because it only needs the check matrix rows.
#[cfg(test)]
pub(crate) fn member_words(c: &CheckMatrix) -> Vec<PauliWord> {
    let n = c.n();
    let mut out = vec![PauliWord::IDENTITY; 1 << n];
    let mut cur = PauliWord::IDENTITY;
    for t in 1u32..1 << n {
        cur = cur.xor(c.rows()[t.trailing_zeros() as usize]);
        out[(t ^ (t >> 1)) as usize] = cur;
    }
    out
}
