//! Seeded state generators: Haar-random pure and mixed states, the
//! single-qubit H and F magic states, and uniformly random stabilizer
//! states. All randomness flows through a ChaCha12 stream seeded from a
//! caller-supplied 64-bit value, so equal seeds give bit-identical output.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::io::StateFile;
use crate::pauli::{DensityMatrix, PauliVector, QubitCount};
use crate::stab::{self, StabilizerId};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GenKind {
    HaarPure,
    HaarMixed,
    HState,
    FState,
    StabilizerRandom,
}

#[derive(Clone, Copy, Debug)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: u32,
    pub copies: u32,
    pub seed: u64,
}

/// The single-qubit H state: Bloch vector `(1/sqrt2, 1/sqrt2, 0)`.
pub fn h_state() -> PauliVector {
    let s = 1.0 / f64::sqrt(2.0);
    PauliVector::new(QubitCount::new(1).unwrap(), vec![1.0, s, s, 0.0]).unwrap()
}

/// The single-qubit F state: Bloch vector `(1, 1, 1)/sqrt3`.
pub fn f_state() -> PauliVector {
    let s = 1.0 / f64::sqrt(3.0);
    PauliVector::new(QubitCount::new(1).unwrap(), vec![1.0, s, s, s]).unwrap()
}

fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Projector onto a Haar-random pure state (normalized Gaussian vector).
pub fn haar_pure_density(n: QubitCount, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let dim = n.hilbert_dim();
    let mut v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::invalid_state("degenerate zero sample"));
    }
    for c in v.iter_mut() {
        *c /= norm;
    }
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|k| v[k / dim] * v[k % dim].conj())
        .collect();
    DensityMatrix::new(n, entries)
}

/// Haar-random mixed state under the Hilbert-Schmidt measure:
/// `G G^dag / Tr(G G^dag)` for a square complex-Gaussian `G`.
pub fn haar_mixed_density(n: QubitCount, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let dim = n.hilbert_dim();
    let g: Vec<Complex64> = (0..dim * dim).map(|_| complex_gaussian(rng)).collect();
    let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += g[r * dim + k] * g[c * dim + k].conj();
            }
            rho[r * dim + c] = acc;
        }
    }
    let trace: f64 = (0..dim).map(|i| rho[i * dim + i].re).sum();
    if trace <= 0.0 {
        return Err(Error::invalid_state("degenerate zero sample"));
    }
    for e in rho.iter_mut() {
        *e /= trace;
    }
    DensityMatrix::new(n, rho)
}

/// A uniformly random stabilizer state, returned with its identity.
pub fn random_stabilizer(n: QubitCount, rng: &mut impl Rng) -> Result<(StabilizerId, PauliVector)> {
    let blocks = stab::block_count(n.get())?;
    let block = rng.gen_range(0..blocks);
    let delta = rng.gen_range(0..n.hilbert_dim() as u32);
    let id = StabilizerId { block, delta };
    Ok((id, stabilizer_pauli_vector(n, id)?))
}

/// The exact Pauli vector of a stabilizer state.
pub fn stabilizer_pauli_vector(n: QubitCount, id: StabilizerId) -> Result<PauliVector> {
    let col = stab::column(n.get(), id)?;
    let mut pv = PauliVector::zero(n);
    let entries = pv.entries_mut();
    for &(row, sign) in &col.entries {
        entries[row as usize] = sign as f64;
    }
    Ok(pv)
}

/// Convenience Pauli vectors for random states (decomposed densities).
pub fn haar_pure_pauli(n: QubitCount, rng: &mut impl Rng) -> Result<PauliVector> {
    haar_pure_density(n, rng)?.to_pauli_vector()
}

pub fn haar_mixed_pauli(n: QubitCount, rng: &mut impl Rng) -> Result<PauliVector> {
    haar_mixed_density(n, rng)?.to_pauli_vector()
}

pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Runs a generation spec. Single-copy Haar kinds return the density
/// matrix; everything else (and any multi-copy request) returns a Pauli
/// vector, with `copies` applied as a tensor power.
pub fn generate(spec: &GenSpec) -> Result<StateFile> {
    if spec.copies == 0 {
        return Err(Error::invalid_argument("copies must be at least 1"));
    }
    let mut rng = rng_from_seed(spec.seed);
    match spec.kind {
        GenKind::HState | GenKind::FState => {
            if spec.n != 1 {
                return Err(Error::invalid_argument(
                    "h-state and f-state are single-qubit; use --copies for tensor powers",
                ));
            }
            let base = if spec.kind == GenKind::HState {
                h_state()
            } else {
                f_state()
            };
            Ok(StateFile::Pauli(base.tensor_power(spec.copies)?))
        }
        GenKind::StabilizerRandom => {
            let n = QubitCount::new(spec.n)?;
            let (_, base) = random_stabilizer(n, &mut rng)?;
            Ok(StateFile::Pauli(base.tensor_power(spec.copies)?))
        }
        GenKind::HaarPure | GenKind::HaarMixed => {
            let n = QubitCount::new(spec.n)?;
            let dm = if spec.kind == GenKind::HaarPure {
                haar_pure_density(n, &mut rng)?
            } else {
                haar_mixed_density(n, &mut rng)?
            };
            if spec.copies == 1 {
                Ok(StateFile::Density(dm))
            } else {
                Ok(StateFile::Pauli(
                    dm.to_pauli_vector()?.tensor_power(spec.copies)?,
                ))
            }
        }
    }
}
