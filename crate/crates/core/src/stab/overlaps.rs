//! Overlap sweeps over the stabilizer-state enumeration.
//!
//! For a block with generators `P_1..P_n`, the group member at exponent
//! vector `gamma` is the operator product `P_1^g1 ... P_n^gn`, whose
//! accumulated phase is always `+-1` for a valid block (asserted). The state
//! with sign pattern `delta` then has overlap
//!
//! ```text
//!   a(block, delta)^T b = sum_gamma (-1)^(gamma.delta) sign_gamma b[index_gamma]
//! ```
//!
//! i.e. a Walsh–Hadamard transform of the gathered, sign-adjusted entries of
//! `b`. One gather plus one length-`2^n` transform therefore prices all
//! `2^n` states of a block at once; sweeps below stream that over all blocks,
//! optionally in parallel over fixed-size block ranges so results are
//! identical for every thread count.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::collections::HashSet;
use std::marker::PhantomData;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fwht::fwht_pow2;
use crate::pauli::PauliVector;

use super::enumerate::BlockIter;
use super::{block_at, block_count, CheckMatrix, PauliWord, StabilizerId, SWEEP_MAX_QUBITS};

/// One member of an expanded block: Hermitian Pauli string plus the sign it
/// carries in the `delta = 0` group.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PauliElement {
    pub word: PauliWord,
    pub index: u64,
    pub sign: i8,
}

/// Expands all `2^n` members of a block in `gamma` order via a Gray-code
/// walk: each step multiplies by a single generator and tracks the phase mod
/// 4. A phase of `+-i` is impossible for a valid block and panics.
pub fn block_paulis(c: &CheckMatrix) -> Vec<PauliElement> {
    let mut out = Vec::new();
    block_paulis_into(c, &mut out);
    out
}

pub(crate) fn block_paulis_into(c: &CheckMatrix, out: &mut Vec<PauliElement>) {
    let n = c.n();
    out.clear();
    out.resize(
        1 << n,
        PauliElement {
            word: PauliWord::IDENTITY,
            index: 0,
            sign: 1,
        },
    );
    let mut cur = PauliWord::IDENTITY;
    let mut phase = 0u32;
    for t in 1u32..1 << n {
        let gen = c.rows()[t.trailing_zeros() as usize];
        phase = (phase + cur.mul_phase(gen)) & 3;
        cur = cur.xor(gen);
        assert!(
            phase & 1 == 0,
            "stabilizer group product landed on imaginary phase i^{phase}; invalid block"
        );
        out[(t ^ (t >> 1)) as usize] = PauliElement {
            word: cur,
            index: cur.index(n),
            sign: if phase == 0 { 1 } else { -1 },
        };
    }
}

/// Overlaps of every state in one block with `b`, indexed by `delta`.
pub fn overlaps_block(c: &CheckMatrix, b: &PauliVector) -> Result<Vec<f64>> {
    if c.n() != b.n().get() {
        return Err(Error::invalid_argument(format!(
            "block is on {} qubits but the state is on {}",
            c.n(),
            b.n()
        )));
    }
    let mut elems = Vec::new();
    let mut out = vec![0.0; 1 << c.n()];
    overlaps_block_into(c, b.entries(), &mut elems, &mut out);
    Ok(out)
}

fn overlaps_block_into(
    c: &CheckMatrix,
    b: &[f64],
    elems: &mut Vec<PauliElement>,
    out: &mut [f64],
) {
    block_paulis_into(c, elems);
    for (slot, e) in out.iter_mut().zip(elems.iter()) {
        *slot = e.sign as f64 * b[e.index as usize];
    }
    fwht_pow2(out);
}

fn check_sweep_n(n: u32) -> Result<()> {
    if n > SWEEP_MAX_QUBITS {
        return Err(Error::cap(format!(
            "full stabilizer sweeps are capped at {SWEEP_MAX_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

/// Streams `(id, overlap)` over every stabilizer state in enumeration order
/// (sequentially; the parallel drivers below are for selection sweeps).
pub fn overlaps_for_each(
    b: &PauliVector,
    mut visit: impl FnMut(StabilizerId, f64),
) -> Result<()> {
    let n = b.n().get();
    check_sweep_n(n)?;
    let mut elems = Vec::new();
    let mut buf = vec![0.0; 1 << n];
    for (block, c) in BlockIter::new(n)?.enumerate() {
        overlaps_block_into(&c, b.entries(), &mut elems, &mut buf);
        for (delta, &v) in buf.iter().enumerate() {
            visit(
                StabilizerId {
                    block: block as u64,
                    delta: delta as u32,
                },
                v,
            );
        }
    }
    Ok(())
}

/// A state together with the value a sweep selected it by.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Selected {
    pub id: StabilizerId,
    pub overlap: f64,
}

fn id_key(s: &Selected) -> (u64, u32) {
    (s.id.block, s.id.delta)
}

/// Strict total order on candidates; ties on the value always fall back to
/// the id so selections are reproducible and thread-count independent.
trait SelOrder {
    fn better(a: &Selected, b: &Selected) -> bool;
}

/// Largest overlap first.
enum HiFirst {}
impl SelOrder for HiFirst {
    fn better(a: &Selected, b: &Selected) -> bool {
        match a.overlap.total_cmp(&b.overlap) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => id_key(a) < id_key(b),
        }
    }
}

/// Smallest overlap first.
enum LoFirst {}
impl SelOrder for LoFirst {
    fn better(a: &Selected, b: &Selected) -> bool {
        match a.overlap.total_cmp(&b.overlap) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => id_key(a) < id_key(b),
        }
    }
}

/// Largest absolute value first.
enum AbsFirst {}
impl SelOrder for AbsFirst {
    fn better(a: &Selected, b: &Selected) -> bool {
        match a.overlap.abs().total_cmp(&b.overlap.abs()) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => id_key(a) < id_key(b),
        }
    }
}

/// Bounded best-`cap` selector: a max-heap whose top is the worst kept
/// candidate, so each push is `O(log cap)` with memory exactly `cap`.
struct Selector<O: SelOrder> {
    cap: usize,
    heap: BinaryHeap<HeapItem<O>>,
}

struct HeapItem<O>(Selected, PhantomData<O>);

impl<O: SelOrder> PartialEq for HeapItem<O> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<O: SelOrder> Eq for HeapItem<O> {}
impl<O: SelOrder> PartialOrd for HeapItem<O> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<O: SelOrder> Ord for HeapItem<O> {
    fn cmp(&self, other: &Self) -> Ordering {
        // "worse" sorts greater, so the heap top is the eviction candidate
        if O::better(&self.0, &other.0) {
            Ordering::Less
        } else if O::better(&other.0, &self.0) {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }
}

impl<O: SelOrder> Selector<O> {
    fn new(cap: usize) -> Self {
        Selector {
            cap,
            heap: BinaryHeap::with_capacity(cap.saturating_add(1)),
        }
    }

    fn push(&mut self, cand: Selected) {
        if self.cap == 0 {
            return;
        }
        if self.heap.len() < self.cap {
            self.heap.push(HeapItem(cand, PhantomData));
        } else if O::better(&cand, &self.heap.peek().unwrap().0) {
            self.heap.pop();
            self.heap.push(HeapItem(cand, PhantomData));
        }
    }

    fn merge(&mut self, other: Selector<O>) {
        for item in other.heap {
            self.push(item.0);
        }
    }

    /// Contents, best first.
    fn into_sorted(self) -> Vec<Selected> {
        let mut v: Vec<Selected> = self.heap.into_iter().map(|h| h.0).collect();
        v.sort_by(|a, b| {
            if O::better(a, b) {
                Ordering::Less
            } else if O::better(b, a) {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        });
        v
    }
}

/// Fixed chunking of the block range: parallelism never changes results
/// because chunk boundaries depend only on the block count.
const CHUNK_BLOCKS: u64 = 512;

fn par_chunks<T: Send>(
    n: u32,
    per_chunk: impl Fn(u64, u64) -> T + Sync,
) -> Result<Vec<T>> {
    let blocks = block_count(n)?;
    let nchunks = blocks.div_ceil(CHUNK_BLOCKS);
    Ok((0..nchunks)
        .into_par_iter()
        .map(|ci| {
            let start = ci * CHUNK_BLOCKS;
            per_chunk(start, (start + CHUNK_BLOCKS).min(blocks))
        })
        .collect())
}

/// The `count_hi` largest and `count_lo` smallest overlaps over all
/// stabilizer states, each sorted (descending / ascending respectively).
pub fn top_overlap_select(
    b: &PauliVector,
    count_hi: usize,
    count_lo: usize,
) -> Result<(Vec<Selected>, Vec<Selected>)> {
    let n = b.n().get();
    check_sweep_n(n)?;
    let entries = b.entries();
    let parts = par_chunks(n, |start, end| {
        let mut hi = Selector::<HiFirst>::new(count_hi);
        let mut lo = Selector::<LoFirst>::new(count_lo);
        let mut elems = Vec::new();
        let mut buf = vec![0.0; 1 << n];
        let iter = BlockIter::from_rank(n, start).expect("rank in range");
        for (off, c) in iter.take((end - start) as usize).enumerate() {
            overlaps_block_into(&c, entries, &mut elems, &mut buf);
            let block = start + off as u64;
            for (delta, &v) in buf.iter().enumerate() {
                let cand = Selected {
                    id: StabilizerId {
                        block,
                        delta: delta as u32,
                    },
                    overlap: v,
                };
                hi.push(cand);
                lo.push(cand);
            }
        }
        (hi, lo)
    })?;
    let mut hi = Selector::<HiFirst>::new(count_hi);
    let mut lo = Selector::<LoFirst>::new(count_lo);
    for (h, l) in parts {
        hi.merge(h);
        lo.merge(l);
    }
    Ok((hi.into_sorted(), lo.into_sorted()))
}

/// Maximum stabilizer fidelity `max_sigma <sigma|rho|sigma>` and its argmax
/// (ties resolved toward the smaller id).
pub fn max_fidelity(b: &PauliVector) -> Result<(f64, StabilizerId)> {
    let (hi, _) = top_overlap_select(b, 1, 0)?;
    let best = hi[0];
    Ok((best.overlap / b.n().hilbert_dim() as f64, best.id))
}

/// Outcome of a full dual-feasibility scan of `y` against every stabilizer
/// state.
#[derive(Clone, Debug)]
pub struct SweepReport {
    /// `max_j |a_j^T y|` over all states.
    pub max_abs: f64,
    /// Number of states with `|a_j^T y| > threshold`.
    pub violations: u64,
    /// The worst violators (largest `|a_j^T y|` first), excluding `skip`.
    pub top: Vec<Selected>,
}

/// Scans `a_j^T y` for every stabilizer state `j` using the same kernel as
/// the overlap sweep (`y` need not be a state). Candidates in `skip` are
/// withheld from `top` but still counted in `violations`.
pub fn dual_sweep(
    n: u32,
    y: &[f64],
    threshold: f64,
    take: usize,
    skip: &HashSet<StabilizerId>,
) -> Result<SweepReport> {
    check_sweep_n(n)?;
    if y.len() != 1usize << (2 * n) {
        return Err(Error::invalid_argument(format!(
            "dual vector has {} entries, expected 4^{n}",
            y.len()
        )));
    }
    let parts = par_chunks(n, |start, end| {
        let mut top = Selector::<AbsFirst>::new(take);
        let mut max_abs = 0.0f64;
        let mut violations = 0u64;
        let mut elems = Vec::new();
        let mut buf = vec![0.0; 1 << n];
        let iter = BlockIter::from_rank(n, start).expect("rank in range");
        for (off, c) in iter.take((end - start) as usize).enumerate() {
            overlaps_block_into(&c, y, &mut elems, &mut buf);
            let block = start + off as u64;
            for (delta, &v) in buf.iter().enumerate() {
                max_abs = max_abs.max(v.abs());
                if v.abs() > threshold {
                    violations += 1;
                    let id = StabilizerId {
                        block,
                        delta: delta as u32,
                    };
                    if !skip.contains(&id) {
                        top.push(Selected { id, overlap: v });
                    }
                }
            }
        }
        (top, max_abs, violations)
    })?;
    let mut top = Selector::<AbsFirst>::new(take);
    let mut max_abs = 0.0f64;
    let mut violations = 0;
    for (t, m, c) in parts {
        top.merge(t);
        max_abs = max_abs.max(m);
        violations += c;
    }
    Ok(SweepReport {
        max_abs,
        violations,
        top: top.into_sorted(),
    })
}

/// Explicit sparse column of the stabilizer-overlap matrix: `2^n` rows with
/// values `+-1`. Row 0 (the identity string) always carries `+1`.
#[derive(Clone, Debug)]
pub struct SparseColumn {
    pub id: StabilizerId,
    pub n: u32,
    pub entries: Vec<(u64, i8)>,
}

/// Materializes the column for one stabilizer state.
pub fn column(n: u32, id: StabilizerId) -> Result<SparseColumn> {
    if id.delta as u64 >= 1u64 << n {
        return Err(Error::invalid_argument(format!(
            "delta {} out of range for n = {n}",
            id.delta
        )));
    }
    let c = block_at(n, id.block)?;
    let entries = block_paulis(&c)
        .iter()
        .enumerate()
        .map(|(gamma, e)| {
            let flip = (gamma as u32 & id.delta).count_ones() & 1;
            (e.index, if flip == 0 { e.sign } else { -e.sign })
        })
        .collect();
    Ok(SparseColumn { id, n, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::QubitCount;

    const SQ2: f64 = std::f64::consts::SQRT_2;

    fn h_state() -> PauliVector {
        PauliVector::new(
            QubitCount::new(1).unwrap(),
            vec![1.0, 1.0 / SQ2, 0.0, 1.0 / SQ2],
        )
        .unwrap()
    }

    fn mixed(n: u32) -> PauliVector {
        let mut v = PauliVector::zero(QubitCount::new(n).unwrap());
        v.entries_mut()[0] = 1.0;
        v
    }

    /// Dense oracle: build each column from the expanded block and dot it
    /// with `b`, no transform involved.
    fn overlaps_block_oracle(c: &CheckMatrix, b: &PauliVector) -> Vec<f64> {
        let elems = block_paulis(c);
        (0..elems.len())
            .map(|delta| {
                elems
                    .iter()
                    .enumerate()
                    .map(|(gamma, e)| {
                        let flip = if (gamma & delta).count_ones() % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        flip * e.sign as f64 * b.entries()[e.index as usize]
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn block_paulis_signs_for_xx_zz() {
        // <XX, ZZ>: product is -YY.
        let c = CheckMatrix::new(
            2,
            &[
                PauliWord { x: 0b11, z: 0 },
                PauliWord { x: 0, z: 0b11 },
            ],
        )
        .unwrap();
        let elems = block_paulis(&c);
        assert_eq!(elems[0].sign, 1);
        assert_eq!(elems[0].index, 0);
        assert_eq!(elems[0b01].index, 5); // XX
        assert_eq!(elems[0b01].sign, 1);
        assert_eq!(elems[0b10].index, 15); // ZZ
        assert_eq!(elems[0b10].sign, 1);
        assert_eq!(elems[0b11].index, 10); // YY with sign -1
        assert_eq!(elems[0b11].sign, -1);
    }

    #[test]
    fn overlaps_match_dense_oracle() {
        let b = h_state();
        for c in BlockIter::new(1).unwrap() {
            let fast = overlaps_block(&c, &b).unwrap();
            let slow = overlaps_block_oracle(&c, &b);
            for (a, e) in fast.iter().zip(&slow) {
                assert!((a - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn per_block_overlap_sum_is_2n_b0() {
        let b = h_state().tensor(&h_state()).unwrap();
        for c in BlockIter::new(2).unwrap() {
            let o = overlaps_block(&c, &b).unwrap();
            let sum: f64 = o.iter().sum();
            assert!((sum - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn h_state_max_fidelity() {
        let (f, _) = max_fidelity(&h_state()).unwrap();
        assert!((f - (1.0 + 1.0 / SQ2) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_state_fidelity_and_argmax() {
        for n in 1..=3 {
            let (f, id) = max_fidelity(&mixed(n)).unwrap();
            assert!((f - 0.5f64.powi(n as i32)).abs() < 1e-12);
            assert_eq!(id, StabilizerId { block: 0, delta: 0 });
        }
    }

    #[test]
    fn top_selection_matches_full_sort() {
        let b = h_state().tensor(&h_state()).unwrap();
        let mut all: Vec<Selected> = Vec::new();
        overlaps_for_each(&b, |id, overlap| all.push(Selected { id, overlap })).unwrap();
        assert_eq!(all.len(), 60); // |S_2|
        let (hi, lo) = top_overlap_select(&b, 7, 5).unwrap();
        let mut sorted = all.clone();
        sorted.sort_by(|a, b| {
            b.overlap
                .total_cmp(&a.overlap)
                .then_with(|| id_key(a).cmp(&id_key(b)))
        });
        for (got, want) in hi.iter().zip(&sorted) {
            assert_eq!(got.id, want.id);
            assert_eq!(got.overlap, want.overlap);
        }
        sorted.sort_by(|a, b| {
            a.overlap
                .total_cmp(&b.overlap)
                .then_with(|| id_key(a).cmp(&id_key(b)))
        });
        for (got, want) in lo.iter().zip(&sorted) {
            assert_eq!(got.id, want.id);
        }
    }

    #[test]
    fn columns_have_unit_identity_row() {
        for n in 1..=2u32 {
            let blocks = block_count(n).unwrap();
            for block in 0..blocks {
                for delta in 0..1u32 << n {
                    let col = column(n, StabilizerId { block, delta }).unwrap();
                    assert_eq!(col.entries.len(), 1 << n);
                    let (row0, v0) = col.entries[0];
                    assert_eq!((row0, v0), (0, 1));
                    // all rows distinct
                    let mut rows: Vec<u64> = col.entries.iter().map(|e| e.0).collect();
                    rows.sort_unstable();
                    rows.dedup();
                    assert_eq!(rows.len(), 1 << n);
                }
            }
        }
    }

    #[test]
    fn column_dot_b_equals_sweep_overlap() {
        let b = h_state();
        overlaps_for_each(&b, |id, overlap| {
            let col = column(1, id).unwrap();
            let dot: f64 = col
                .entries
                .iter()
                .map(|&(r, v)| v as f64 * b.entries()[r as usize])
                .sum();
            assert!((dot - overlap).abs() < 1e-12);
        })
        .unwrap();
    }

    #[test]
    fn dual_sweep_counts_and_certifies() {
        // y = sgn(b)/2^n is always dual feasible: no violations.
        let b = h_state();
        let y: Vec<f64> = b.entries().iter().map(|v| v.signum() * 0.5).collect();
        let rep = dual_sweep(1, &y, 1.0 + 1e-7, 4, &HashSet::new()).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.max_abs <= 1.0 + 1e-12);
        // Scale it up and violations appear, worst-first.
        let y2: Vec<f64> = y.iter().map(|v| v * 2.0).collect();
        let rep2 = dual_sweep(1, &y2, 1.0 + 1e-7, 6, &HashSet::new()).unwrap();
        assert!(rep2.violations > 0);
        assert!(rep2.max_abs > 1.5);
        for w in rep2.top.windows(2) {
            assert!(w[0].overlap.abs() >= w[1].overlap.abs());
        }
    }

    #[test]
    fn overlap_count_lower_bound_per_unit_interval() {
        // Every block holds one overlap >= 1 and one <= 1, so each count is
        // at least the block count.
        let b = h_state();
        let blocks = block_count(1).unwrap();
        let mut ge = 0u64;
        let mut le = 0u64;
        overlaps_for_each(&b, |_, o| {
            assert!((-1e-12..=2.0 + 1e-12).contains(&o));
            if o >= 1.0 - 1e-12 {
                ge += 1;
            }
            if o <= 1.0 + 1e-12 {
                le += 1;
            }
        })
        .unwrap();
        assert!(ge >= blocks && le >= blocks);
    }
}
