//! Enumeration of pure stabilizer states and their overlap machinery.
//!
//! The `2^n (prod_{j=1}^n (2^j + 1))` pure stabilizer states on `n` qubits
//! are organized into *blocks* of `2^n` states: a block fixes an unsigned
//! stabilizer group (a check matrix of `n` commuting, independent generators)
//! and the `2^n` members differ only in the generator sign pattern `delta`.
//! A state is addressed by [`StabilizerId`]: block rank plus sign pattern.
//!
//! Blocks are enumerated in a documented total order (see
//! [`enumerate::BlockIter`]); within a block, all `2^n` overlaps with a state
//! are produced by one gather plus one length-`2^n` Walsh–Hadamard transform,
//! which is what makes full sweeps over every stabilizer state affordable
//! through `n = 8`.

mod enumerate;
mod overlaps;

pub use enumerate::{block_at, BlockIter};
pub(crate) use overlaps::block_paulis_into;
pub use overlaps::{
    block_paulis, column, dual_sweep, max_fidelity, overlaps_block, overlaps_for_each,
    top_overlap_select, PauliElement, Selected, SparseColumn, SweepReport,
};

use arrayvec::ArrayVec;
use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::gf2;

/// Full sweeps (overlaps, top-k selection, dual scans) refuse above this.
pub const SWEEP_MAX_QUBITS: u32 = 8;

/// Block ranks are kept in `u64`; the block count fits through `n = 10`.
pub const ENUM_MAX_QUBITS: u32 = 10;

/// A Pauli string modulo phase, in binary symplectic form: bit `j` of
/// `x`/`z` says whether the letter on qubit `j + 1` has an X/Z component
/// (`Y` sets both).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct PauliWord {
    pub x: u32,
    pub z: u32,
}

impl PauliWord {
    pub const IDENTITY: PauliWord = PauliWord { x: 0, z: 0 };

    pub fn is_identity(self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Symplectic inner product: zero iff the two strings commute.
    pub fn commutes(self, other: PauliWord) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2 == 0
    }

    pub fn xor(self, other: PauliWord) -> PauliWord {
        PauliWord {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    /// Power of `i` (mod 4) picked up when multiplying the Hermitian
    /// representatives: `W(a) W(b) = i^phase W(a xor b)`.
    pub(crate) fn mul_phase(self, other: PauliWord) -> u32 {
        let t1 = (self.x & self.z).count_ones();
        let t2 = (other.x & other.z).count_ones();
        let t3 = 2 * (self.z & other.x).count_ones();
        let t4 = 3 * ((self.x ^ other.x) & (self.z ^ other.z)).count_ones();
        (t1 + t2 + t3 + t4) % 4
    }

    /// Base-4 Pauli-string index (qubit 1 most significant; digits
    /// `I,X,Y,Z -> 0,1,2,3`).
    pub fn index(self, n: u32) -> u64 {
        debug_assert!(n >= 1 && n <= 16);
        let xr = self.x.reverse_bits() >> (32 - n);
        let zr = self.z.reverse_bits() >> (32 - n);
        // digit = 2*z + (x xor z), interleaved bitwise
        (gf2::spread_u16(zr) as u64) << 1 | gf2::spread_u16(xr ^ zr) as u64
    }
}

/// Generator matrix of an unsigned stabilizer group: `n` commuting,
/// independent Pauli strings.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CheckMatrix {
    n: u32,
    rows: ArrayVec<PauliWord, 16>,
}

impl CheckMatrix {
    pub fn new(n: u32, rows: &[PauliWord]) -> Result<Self> {
        if n == 0 || n > 16 {
            return Err(Error::invalid_argument(format!(
                "check matrix qubit count must be in 1..=16, got {n}"
            )));
        }
        if rows.len() != n as usize {
            return Err(Error::invalid_argument(format!(
                "expected {n} generator rows, got {}",
                rows.len()
            )));
        }
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        if rows.iter().any(|r| r.x & !mask != 0 || r.z & !mask != 0) {
            return Err(Error::invalid_argument(
                "generator row uses bits beyond the qubit count",
            ));
        }
        Ok(CheckMatrix {
            n,
            rows: rows.iter().copied().collect(),
        })
    }

    pub(crate) fn empty(n: u32) -> Self {
        let mut rows = ArrayVec::new();
        for _ in 0..n {
            rows.push(PauliWord::IDENTITY);
        }
        CheckMatrix { n, rows }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn rows(&self) -> &[PauliWord] {
        &self.rows
    }

    pub(crate) fn rows_mut(&mut self) -> &mut [PauliWord] {
        &mut self.rows
    }

    /// True iff the rows are GF(2)-independent and pairwise commuting — i.e.
    /// the matrix generates a maximal stabilizer group.
    pub fn is_valid(&self) -> bool {
        let words: Vec<u64> = self
            .rows
            .iter()
            .map(|r| r.x as u64 | (r.z as u64) << self.n)
            .collect();
        if gf2::rank(&words) != self.n as usize {
            return false;
        }
        for i in 0..self.rows.len() {
            for j in i + 1..self.rows.len() {
                if !self.rows[i].commutes(self.rows[j]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Address of a pure stabilizer state: enumeration rank of its unsigned
/// group plus the generator sign pattern (bit `i` flips generator `i + 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct StabilizerId {
    pub block: u64,
    pub delta: u32,
}

/// Exact number of pure stabilizer states: `2^n prod_{j=1}^n (2^j + 1)`.
pub fn stabilizer_state_count(n: u32) -> Result<BigUint> {
    if n == 0 || n > 20 {
        return Err(Error::invalid_argument(format!(
            "stabilizer counting supports 1..=20 qubits, got {n}"
        )));
    }
    let mut acc = BigUint::from(1u32) << n;
    for j in 1..=n {
        acc *= (BigUint::from(1u32) << j) + 1u32;
    }
    Ok(acc)
}

/// Gaussian binomial coefficient over GF(2), by the Pascal-type recurrence
/// `[n k] = [n-1 k-1] + 2^k [n-1 k]`.
pub fn qbinom2(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    // row-by-row table of the recurrence
    let mut row: Vec<BigUint> = vec![BigUint::from(1u32)];
    for _ in 1..=n {
        let mut next = vec![BigUint::from(1u32)];
        for kk in 1..row.len() {
            next.push(&row[kk - 1] + (&row[kk] << kk));
        }
        next.push(BigUint::from(1u32));
        row = next;
    }
    row[k as usize].clone()
}

pub(crate) fn qbinom2_u64(n: u32, k: u32) -> u64 {
    debug_assert!(n <= ENUM_MAX_QUBITS);
    if k > n {
        return 0;
    }
    let mut row: Vec<u64> = vec![1];
    for _ in 1..=n {
        let mut next = vec![1u64];
        for kk in 1..row.len() {
            next.push(row[kk - 1] + (row[kk] << kk));
        }
        next.push(1);
        row = next;
    }
    row[k as usize]
}

/// Number of enumeration blocks, `|S_n| / 2^n = prod_{j=1}^n (2^j + 1)`.
pub fn block_count(n: u32) -> Result<u64> {
    if n == 0 || n > ENUM_MAX_QUBITS {
        return Err(Error::cap(format!(
            "block enumeration supports 1..={ENUM_MAX_QUBITS} qubits, got {n}"
        )));
    }
    let mut acc = 1u64;
    for j in 1..=n {
        acc *= (1u64 << j) + 1;
    }
    Ok(acc)
}

/// `|S_n|` as a machine word, valid wherever [`block_count`] is.
pub fn state_count_u64(n: u32) -> Result<u64> {
    Ok(block_count(n)? << n)
}
