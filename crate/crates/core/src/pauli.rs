//! States and their Pauli-basis representation.
//!
//! A density matrix on `n` qubits is carried either as a dense row-major
//! complex matrix ([`DensityMatrix`]) or as its expectation vector in the
//! Pauli-string basis ([`PauliVector`]): entry `i` is `Tr[P_i rho]` where
//! `P_i` ranges over the `4^n` Pauli strings.
//!
//! Pauli strings are indexed base-4 with qubit 1 most significant and digits
//! `I -> 0, X -> 1, Y -> 2, Z -> 3`, so e.g. `X (x) Z` on two qubits has index
//! `1*4 + 3 = 7`.
//!
//! The conversion between the two representations is a tensor-structured
//! in-place transform costing `O(n 4^n)` — exponentially cheaper than the
//! `O(8^n)` trace-per-string evaluation, which survives here only as a test
//! oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fwht;
use crate::gf2::spread_u16;

/// Residue above which a "real" quantity coming out of a Hermitian transform
/// is treated as evidence of a non-Hermitian input rather than rounding.
const HERMITICITY_TOL: f64 = 1e-9;

/// Number of qubits, validated once so the vector sizes below cannot overflow.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct QubitCount(u32);

impl QubitCount {
    /// Largest `n` for which `4^n`-entry vectors are representable at all.
    pub const MAX: u32 = 16;

    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid_argument("qubit count must be positive"));
        }
        if n > Self::MAX {
            return Err(Error::cap(format!(
                "qubit count {n} exceeds the vector cap of {}",
                Self::MAX
            )));
        }
        Ok(QubitCount(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Hilbert-space dimension `2^n`.
    pub fn hilbert_dim(self) -> usize {
        1usize << self.0
    }

    /// Number of Pauli strings `4^n`.
    pub fn pauli_dim(self) -> usize {
        1usize << (2 * self.0)
    }
}

impl std::fmt::Display for QubitCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index of a Pauli string in the base-4 ordering described in the module doc.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct PauliIndex(pub u64);

impl PauliIndex {
    /// Base-4 digit for `qubit` (1-indexed, qubit 1 most significant).
    pub fn letter(self, n: QubitCount, qubit: u32) -> u8 {
        debug_assert!(qubit >= 1 && qubit <= n.get());
        (self.0 >> (2 * (n.get() - qubit)) & 3) as u8
    }

    /// Human-readable string of letters, qubit 1 first.
    pub fn letters(self, n: QubitCount) -> String {
        (1..=n.get())
            .map(|q| b"IXYZ"[self.letter(n, q) as usize] as char)
            .collect()
    }
}

/// Dense row-major complex matrix, `2^n x 2^n`.
///
/// Constructed matrices are Hermitian with unit trace within `1e-9`; positive
/// semidefiniteness is deliberately not enforced (see
/// [`PauliVector::validate`] for the optional spectral check).
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n: QubitCount,
    entries: Vec<Complex64>,
}

/// Caps dense-matrix construction: `4^12` complex entries is 256 MiB.
const DENSITY_MAX_QUBITS: u32 = 12;

impl DensityMatrix {
    pub fn new(n: QubitCount, entries: Vec<Complex64>) -> Result<Self> {
        if n.get() > DENSITY_MAX_QUBITS {
            return Err(Error::cap(format!(
                "dense density matrices are capped at {DENSITY_MAX_QUBITS} qubits, got {n}"
            )));
        }
        if entries.len() != n.pauli_dim() {
            return Err(Error::invalid_argument(format!(
                "expected {} entries for n = {n}, got {}",
                n.pauli_dim(),
                entries.len()
            )));
        }
        let m = DensityMatrix { n, entries };
        let dim = n.hilbert_dim();
        for r in 0..dim {
            for c in r..dim {
                let d = (m.get(r, c) - m.get(c, r).conj()).norm();
                if d > HERMITICITY_TOL {
                    return Err(Error::invalid_state(format!(
                        "matrix is not Hermitian: |rho[{r},{c}] - conj(rho[{c},{r}])| = {d:.3e}"
                    )));
                }
            }
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > HERMITICITY_TOL || tr.im.abs() > HERMITICITY_TOL {
            return Err(Error::invalid_state(format!(
                "trace is {tr}, expected 1 within {HERMITICITY_TOL:.0e}"
            )));
        }
        Ok(m)
    }

    /// Constructor for matrices that are Hermitian by construction but whose
    /// trace is whatever the caller's Pauli vector dictated.
    pub(crate) fn from_entries_unchecked(n: QubitCount, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), n.pauli_dim());
        DensityMatrix { n, entries }
    }

    pub fn n(&self) -> QubitCount {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.n.hilbert_dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.n.hilbert_dim();
        (0..dim).map(|i| self.get(i, i)).sum()
    }

    /// Expectation vector in the Pauli basis, in `O(n 4^n)`.
    ///
    /// The matrix entries are first laid out so that the row and column bits
    /// of each qubit sit in adjacent base-4 digit positions; one radix-4
    /// butterfly per qubit then turns matrix elements into Pauli traces. Any
    /// imaginary residue above `1e-9` aborts (a Hermitian input cannot
    /// produce one).
    pub fn to_pauli_vector(&self) -> Result<PauliVector> {
        let n = self.n;
        let dim = n.hilbert_dim();
        let mut work = vec![Complex64::ZERO; n.pauli_dim()];
        for r in 0..dim {
            let r_spread = (spread_u16(r as u32) as usize) << 1;
            for c in 0..dim {
                work[r_spread | spread_u16(c as u32) as usize] = self.get(r, c);
            }
        }
        for digit in 0..n.get() {
            pauli_butterfly(&mut work, digit as usize);
        }
        let mut entries = Vec::with_capacity(work.len());
        for (i, v) in work.iter().enumerate() {
            if v.im.abs() > HERMITICITY_TOL {
                return Err(Error::invalid_state(format!(
                    "Pauli coefficient {i} has imaginary residue {:.3e}",
                    v.im
                )));
            }
            entries.push(v.re);
        }
        PauliVector::new(n, entries)
    }
}

/// One radix-4 stage of the matrix-to-Pauli transform, acting on base-4 digit
/// `digit`: `(c0,c1,c2,c3) -> (c0+c3, c1+c2, i(c1-c2), c0-c3)`.
fn pauli_butterfly(work: &mut [Complex64], digit: usize) {
    let stride = 1usize << (2 * digit);
    let step = stride << 2;
    for base in (0..work.len()).step_by(step) {
        for off in base..base + stride {
            let c0 = work[off];
            let c1 = work[off + stride];
            let c2 = work[off + 2 * stride];
            let c3 = work[off + 3 * stride];
            work[off] = c0 + c3;
            work[off + stride] = c1 + c2;
            work[off + 2 * stride] = Complex64::i() * (c1 - c2);
            work[off + 3 * stride] = c0 - c3;
        }
    }
}

/// Inverse stage: `(b0,b1,b2,b3) -> (b0+b3, b1-i b2, b1+i b2, b0-b3) / 2`.
fn pauli_butterfly_inv(work: &mut [Complex64], digit: usize) {
    let stride = 1usize << (2 * digit);
    let step = stride << 2;
    for base in (0..work.len()).step_by(step) {
        for off in base..base + stride {
            let b0 = work[off];
            let b1 = work[off + stride];
            let b2 = work[off + 2 * stride];
            let b3 = work[off + 3 * stride];
            work[off] = (b0 + b3) * 0.5;
            work[off + stride] = (b1 - Complex64::i() * b2) * 0.5;
            work[off + 2 * stride] = (b1 + Complex64::i() * b2) * 0.5;
            work[off + 3 * stride] = (b0 - b3) * 0.5;
        }
    }
}

/// Report produced by [`PauliVector::validate`].
#[derive(Clone, Debug, serde::Serialize)]
pub struct StateReport {
    pub n: u32,
    pub b0: f64,
    /// `b0 == 1` within tolerance (unit trace).
    pub b0_ok: bool,
    pub max_abs_entry: f64,
    /// Every entry within `[-1, 1]` up to tolerance.
    pub entries_ok: bool,
    /// Present only when the spectral check was requested.
    pub min_eigenvalue: Option<f64>,
    pub psd_ok: Option<bool>,
}

impl StateReport {
    pub fn all_ok(&self) -> bool {
        self.b0_ok && self.entries_ok && self.psd_ok.unwrap_or(true)
    }
}

/// Largest `n` for which [`PauliVector::validate`] will reconstruct the dense
/// matrix and diagonalize it.
const SPECTRUM_MAX_QUBITS: u32 = 10;

/// Pauli-basis expectation vector of a Hermitian operator: `4^n` reals.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliVector {
    n: QubitCount,
    entries: Vec<f64>,
}

impl PauliVector {
    pub fn new(n: QubitCount, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n.pauli_dim() {
            return Err(Error::invalid_argument(format!(
                "expected {} entries for n = {n}, got {}",
                n.pauli_dim(),
                entries.len()
            )));
        }
        Ok(PauliVector { n, entries })
    }

    pub fn zero(n: QubitCount) -> Self {
        PauliVector {
            n,
            entries: vec![0.0; n.pauli_dim()],
        }
    }

    pub fn n(&self) -> QubitCount {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn get(&self, i: PauliIndex) -> f64 {
        self.entries[i.0 as usize]
    }

    /// Identity component `b_0 = Tr[rho]`.
    pub fn b0(&self) -> f64 {
        self.entries[0]
    }

    /// Stabilizer norm `||b||_1 / 2^n`, a dual-feasible lower bound on the
    /// robustness of magic.
    pub fn st_norm(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).sum::<f64>() / self.n.hilbert_dim() as f64
    }

    /// Kronecker product; `self` takes the most significant digit positions.
    pub fn tensor(&self, other: &PauliVector) -> Result<PauliVector> {
        let n = QubitCount::new(self.n.get() + other.n.get())?;
        let mut entries = Vec::with_capacity(n.pauli_dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a * b);
            }
        }
        PauliVector::new(n, entries)
    }

    /// `m`-fold tensor power.
    pub fn tensor_power(&self, m: u32) -> Result<PauliVector> {
        if m == 0 {
            return Err(Error::invalid_argument("tensor power must be positive"));
        }
        let mut acc = self.clone();
        for _ in 1..m {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }

    /// Dense matrix `rho = 2^-n sum_i b_i P_i`, the inverse of
    /// [`DensityMatrix::to_pauli_vector`], in `O(n 4^n)`.
    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        let n = self.n;
        if n.get() > DENSITY_MAX_QUBITS {
            return Err(Error::cap(format!(
                "dense reconstruction is capped at {DENSITY_MAX_QUBITS} qubits, got {n}"
            )));
        }
        let mut work: Vec<Complex64> = self
            .entries
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        for digit in 0..n.get() {
            pauli_butterfly_inv(&mut work, digit as usize);
        }
        let dim = n.hilbert_dim();
        let mut entries = vec![Complex64::ZERO; n.pauli_dim()];
        for r in 0..dim {
            let r_spread = (spread_u16(r as u32) as usize) << 1;
            for c in 0..dim {
                entries[r * dim + c] = work[r_spread | spread_u16(c as u32) as usize];
            }
        }
        Ok(DensityMatrix::from_entries_unchecked(n, entries))
    }

    /// Structural checks on the vector; with `check_spectrum` the state is
    /// reconstructed and its minimum eigenvalue reported (capped at
    /// `n <= 10`).
    pub fn validate(&self, check_spectrum: bool) -> Result<StateReport> {
        let b0 = self.b0();
        let max_abs = self
            .entries
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        let mut report = StateReport {
            n: self.n.get(),
            b0,
            b0_ok: (b0 - 1.0).abs() <= 1e-9,
            max_abs_entry: max_abs,
            entries_ok: max_abs <= 1.0 + 1e-9,
            min_eigenvalue: None,
            psd_ok: None,
        };
        if check_spectrum {
            if self.n.get() > SPECTRUM_MAX_QUBITS {
                return Err(Error::cap(format!(
                    "spectral validation is capped at {SPECTRUM_MAX_QUBITS} qubits, got {}",
                    self.n
                )));
            }
            let rho = self.to_density_matrix()?;
            let dim = self.n.hilbert_dim();
            let mat = nalgebra::DMatrix::from_fn(dim, dim, |r, c| rho.get(r, c));
            let eigs = mat.symmetric_eigenvalues();
            let min = eigs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            report.min_eigenvalue = Some(min);
            report.psd_ok = Some(min >= -1e-9);
        }
        Ok(report)
    }
}

/// In-place unnormalized Walsh–Hadamard transform; re-exported here because
/// the Pauli-overlap machinery is its main consumer.
pub use fwht::fwht_inplace;
