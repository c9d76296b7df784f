//! Quantifying magic (nonstabilizerness) of n-qubit quantum states.
//!
//! The crate provides, in rough dependency order:
//!
//! - [`pauli`]: density matrices, Pauli-basis expectation vectors, and the
//!   `O(n 4^n)` transforms between them, plus the st-norm and fidelity
//!   building blocks;
//! - [`stab`]: enumeration of all pure stabilizer states in sign-pattern
//!   blocks, and Walsh–Hadamard overlap sweeps that price every state
//!   against a target in `O(n |S_n|)`;
//! - [`cover`]: a closed-form family of `2^n + 1` blocks whose states cover
//!   every Pauli string, yielding an always-feasible decomposition and the
//!   `R_FWHT` upper bound in `O(n 4^n)`;
//! - [`lp`]: a dense revised-simplex solver for the L1 minimization
//!   underlying robustness of magic, with exact basis duals;
//! - [`rom`]: robustness-of-magic drivers — full enumeration, top-overlap
//!   column selection, and column generation with a dual certificate;
//! - [`product`]: permutation-symmetric compression for `rho^(x)n` targets,
//!   divide-and-conquer over copy counts, and partitioned tensor bounds;
//! - [`io`] / [`gen`]: state file formats and deterministic state
//!   generators for the CLI and tests.

pub mod cover;
pub mod error;
pub mod fwht;
pub mod gen;
pub mod gf2;
pub mod io;
pub mod lp;
pub mod pauli;
pub mod product;
pub mod rom;
pub mod stab;

pub use error::{Error, Result};
pub use fwht::fwht_inplace;
pub use num_complex::Complex64;
pub use pauli::{DensityMatrix, PauliIndex, PauliVector, QubitCount, StateReport};
pub use stab::{CheckMatrix, PauliWord, StabilizerId};
