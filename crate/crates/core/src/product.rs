//! Robustness for tensor-product targets.
//!
//! Three tools, all built on the observation that qubit permutations and
//! tensor splits act simply on Pauli vectors:
//!
//! * a permutation-symmetric compression for `rho^{(x) n}`: Pauli strings
//!   collapse to their letter-count *type*, stabilizer columns collapse to
//!   type-aggregated integer vectors `q`, and the resulting small LP has
//!   exactly the same optimum as the uncompressed one (averaging a
//!   decomposition over qubit permutations preserves feasibility and L1
//!   mass, and a compressed solution lifts by spreading each class evenly
//!   over its orbit);
//! * a divide-and-conquer ladder `R_1, R_2, ...` for copies of one state:
//!   exact solves up to a cutoff, then restricted LPs over tensor products
//!   of previously recorded supports — upper bounds obeying
//!   `R_i <= R_l * R_m` for every split `l + m = i`;
//! * subsystem-partition optimization for a list of states: minimize the
//!   product of per-group robustness over all set partitions whose groups
//!   fit a qubit cap, with per-subset memoization, plus a certificate that
//!   a tensor primal/dual pair solves the restricted tensor-column problem.

use std::collections::HashMap;
use std::time::Instant;

use crate::cover;
use crate::error::{Error, Result};
use crate::lp::{self, ColumnId, ColumnSet, LpColumn, LpSolution, LpStatus};
use crate::pauli::{PauliVector, QubitCount};
use crate::rom::{self, CgParams, RomResult};
use crate::stab::{self, StabilizerId};

/// Cap for type tables and compressed vectors.
pub const TYPE_MAX_QUBITS: u32 = 20;
/// Cap for full symmetric-basis builds (enumerates all stabilizer states).
pub const SYM_BASIS_MAX_QUBITS: u32 = 5;
/// Cap on the copies ladder.
pub const COPIES_MAX: u32 = 12;
/// Largest group a partition may form.
pub const PARTITION_MAX_GROUP_QUBITS: u32 = 6;
/// Most states a partition call accepts (Bell-number growth beyond).
pub const PARTITION_MAX_STATES: usize = 12;
/// Primal weights at or below this count as zero support.
pub const SUPPORT_EPS: f64 = 1e-10;

/// Letter-count class of a Pauli string: `(n_I, n_X, n_Y, n_Z)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct PauliType {
    pub counts: [u8; 4],
}

impl PauliType {
    pub fn n(&self) -> u32 {
        self.counts.iter().map(|&c| c as u32).sum()
    }

    /// Componentwise sum, the type of a tensor product.
    pub fn add(&self, other: &PauliType) -> PauliType {
        let mut counts = [0u8; 4];
        for i in 0..4 {
            counts[i] = self.counts[i] + other.counts[i];
        }
        PauliType { counts }
    }
}

/// All types on `n` qubits in lexicographic order, with index lookups and
/// class sizes (multinomial coefficients).
#[derive(Clone, Debug)]
pub struct TypeTable {
    n: u32,
    types: Vec<PauliType>,
    index: HashMap<[u8; 4], u32>,
    class_sizes: Vec<u64>,
}

fn multinomial(n: u32, counts: [u8; 4]) -> u64 {
    fn binom(n: u64, k: u64) -> u64 {
        let k = k.min(n - k);
        let mut acc = 1u64;
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    }
    let mut rest = n as u64;
    let mut acc = 1u64;
    for &c in &counts {
        acc *= binom(rest, c as u64);
        rest -= c as u64;
    }
    acc
}

impl TypeTable {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > TYPE_MAX_QUBITS {
            return Err(Error::cap(format!(
                "type tables support 1..={TYPE_MAX_QUBITS} qubits, got {n}"
            )));
        }
        let mut types = Vec::new();
        for ni in 0..=n {
            for nx in 0..=(n - ni) {
                for ny in 0..=(n - ni - nx) {
                    let nz = n - ni - nx - ny;
                    types.push(PauliType {
                        counts: [ni as u8, nx as u8, ny as u8, nz as u8],
                    });
                }
            }
        }
        debug_assert!(types.windows(2).all(|w| w[0] < w[1]));
        let index = types
            .iter()
            .enumerate()
            .map(|(i, t)| (t.counts, i as u32))
            .collect();
        let class_sizes = types.iter().map(|t| multinomial(n, t.counts)).collect();
        Ok(TypeTable {
            n,
            types,
            index,
            class_sizes,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn types(&self) -> &[PauliType] {
        &self.types
    }

    pub fn index_of(&self, t: &PauliType) -> u32 {
        self.index[&t.counts]
    }

    pub fn class_size(&self, idx: u32) -> u64 {
        self.class_sizes[idx as usize]
    }

    /// Index of the all-identity type `(n, 0, 0, 0)` (last in lex order).
    pub fn identity_index(&self) -> u32 {
        (self.len() - 1) as u32
    }

    /// Type of a Pauli index: counts its base-4 letter digits.
    pub fn type_of_index(&self, idx: u64) -> u32 {
        let mut counts = [0u8; 4];
        let mut rest = idx;
        for _ in 0..self.n {
            counts[(rest & 3) as usize] += 1;
            rest >>= 2;
        }
        debug_assert_eq!(rest, 0);
        self.index[&counts]
    }
}

/// `b^{(x) n}` of a symmetric product target, one entry per type.
#[derive(Clone, Debug)]
pub struct CompressedPauliVector {
    pub n: u32,
    /// Aligned with `TypeTable::new(n)` order.
    pub entries: Vec<f64>,
}

/// Compresses the `n`-fold tensor power of a single-qubit state: the entry
/// at type `t` is the product of single-qubit coefficients, one factor per
/// letter.
pub fn compress_pauli_vector(b1: &PauliVector, n: u32) -> Result<CompressedPauliVector> {
    if b1.n().get() != 1 {
        return Err(Error::invalid_argument(
            "compression targets are built from a single-qubit state",
        ));
    }
    let table = TypeTable::new(n)?;
    let b = b1.entries();
    let entries = table
        .types()
        .iter()
        .map(|t| {
            (0..4)
                .map(|l| b[l].powi(t.counts[l] as i32))
                .product::<f64>()
        })
        .collect();
    Ok(CompressedPauliVector { n, entries })
}

/// Expands a compressed vector back to all `4^n` Pauli rows (test oracle).
pub fn expand_compressed(cpv: &CompressedPauliVector) -> Result<PauliVector> {
    let table = TypeTable::new(cpv.n)?;
    let n = QubitCount::new(cpv.n)?;
    let entries = (0..n.pauli_dim() as u64)
        .map(|idx| cpv.entries[table.type_of_index(idx) as usize])
        .collect();
    PauliVector::new(n, entries)
}

/// A stabilizer column with its rows aggregated by type: `q_t` sums the
/// `+-1` entries over all Pauli strings of type `t`.
#[derive(Clone, Debug)]
pub struct CompressedColumn {
    /// Opaque identity (first merged state, encoded `block << n | delta`).
    pub tag: u64,
    /// One integer per type, aligned with the type table.
    pub q: Vec<i64>,
    /// Number of stabilizer states merged into this class.
    pub orbit_weight: u64,
}

/// Compresses one stabilizer state's column.
pub fn symmetrize_column(table: &TypeTable, id: StabilizerId) -> Result<CompressedColumn> {
    let col = stab::column(table.n(), id)?;
    let mut q = vec![0i64; table.len()];
    for &(row, sign) in &col.entries {
        q[table.type_of_index(row) as usize] += sign as i64;
    }
    Ok(CompressedColumn {
        tag: (id.block << table.n()) | id.delta as u64,
        q,
        orbit_weight: 1,
    })
}

/// Tensor product in compressed form: the type-indexed convolution
/// `q_t = sum_{t_a + t_b = t} qa_{t_a} qb_{t_b}`.
pub fn compressed_tensor(
    ta: &TypeTable,
    qa: &CompressedColumn,
    tb: &TypeTable,
    qb: &CompressedColumn,
    tout: &TypeTable,
) -> CompressedColumn {
    debug_assert_eq!(ta.n() + tb.n(), tout.n());
    let mut q = vec![0i64; tout.len()];
    for (ia, &va) in qa.q.iter().enumerate() {
        if va == 0 {
            continue;
        }
        let tya = ta.types()[ia];
        for (ib, &vb) in qb.q.iter().enumerate() {
            if vb == 0 {
                continue;
            }
            let t = tya.add(&tb.types()[ib]);
            q[tout.index_of(&t) as usize] += va * vb;
        }
    }
    CompressedColumn {
        tag: qa.tag.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(qb.tag),
        q,
        orbit_weight: qa.orbit_weight * qb.orbit_weight,
    }
}

/// The full compressed basis: one representative per distinct `q` vector
/// over all stabilizer states.
#[derive(Clone, Debug)]
pub struct SymmetricBasis {
    pub table: TypeTable,
    pub columns: Vec<CompressedColumn>,
}

/// Enumerates all stabilizer states and merges columns with identical `q`.
/// Deterministic: representatives keep the first-encountered state tag.
pub fn build_symmetric_basis(n: u32) -> Result<SymmetricBasis> {
    if n > SYM_BASIS_MAX_QUBITS {
        return Err(Error::cap(format!(
            "symmetric basis builds are capped at {SYM_BASIS_MAX_QUBITS} qubits, got {n}"
        )));
    }
    let table = TypeTable::new(n)?;
    let dim = 1usize << n;
    let mut columns: Vec<CompressedColumn> = Vec::new();
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut elems = Vec::new();
    for (rank, block) in stab::BlockIter::new(n)?.enumerate() {
        stab::block_paulis_into(&block, &mut elems);
        // type of each member row is delta-independent; precompute
        let types: Vec<u32> = elems.iter().map(|e| table.type_of_index(e.index)).collect();
        for delta in 0..dim as u32 {
            let mut q = vec![0i64; table.len()];
            for (gamma, e) in elems.iter().enumerate() {
                let flip = (gamma as u32 & delta).count_ones() & 1;
                let sign = if flip == 0 { e.sign } else { -e.sign } as i64;
                q[types[gamma] as usize] += sign;
            }
            match seen.entry(q) {
                std::collections::hash_map::Entry::Occupied(o) => {
                    columns[*o.get()].orbit_weight += 1;
                }
                std::collections::hash_map::Entry::Vacant(v) => {
                    let q = v.key().clone();
                    v.insert(columns.len());
                    columns.push(CompressedColumn {
                        tag: ((rank as u64) << n) | delta as u64,
                        q,
                        orbit_weight: 1,
                    });
                }
            }
        }
    }
    Ok(SymmetricBasis { table, columns })
}

/// LP encoding of compressed columns: constraint entries are
/// `q_t / |class t|`, so the RHS can be the compressed target and the
/// objective stays plain L1 (see module docs for why this is exact).
fn compressed_column_set(table: &TypeTable, columns: &[CompressedColumn]) -> Result<ColumnSet> {
    let mut cols = ColumnSet::new(table.len());
    for c in columns {
        let entries: Vec<(u32, f64)> = c
            .q
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0)
            .map(|(t, &v)| (t as u32, v as f64 / table.class_size(t as u32) as f64))
            .collect();
        cols.push(LpColumn {
            id: ColumnId::Tag(c.tag),
            entries,
        })?;
    }
    Ok(cols)
}

fn solve_compressed(
    table: &TypeTable,
    columns: &[CompressedColumn],
    target: &CompressedPauliVector,
) -> Result<(LpSolution, lp::VerifyReport)> {
    let cols = compressed_column_set(table, columns)?;
    let sol = lp::solve_l1(&cols, &target.entries, None)?;
    sol.status.require_optimal("compressed solve")?;
    let report = lp::verify_solution(&cols, &target.entries, &sol, None)?;
    Ok((sol, report))
}

/// Exact robustness of `rho^{(x) n}` via the compressed LP over the full
/// symmetric basis.
pub fn rom_symmetric_exact(b1: &PauliVector, n: u32) -> Result<RomResult> {
    if (b1.b0() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid_state("state must have unit trace"));
    }
    let t0 = Instant::now();
    let basis = build_symmetric_basis(n)?;
    let target = compress_pauli_vector(b1, n)?;
    let (sol, report) = solve_compressed(&basis.table, &basis.columns, &target)?;
    let bty: f64 = target.entries.iter().zip(&sol.y).map(|(a, b)| a * b).sum();
    let exact = report.all_ok();
    let lower = (bty / (1.0 + report.dual_margin.max(0.0))).max(1.0);
    Ok(RomResult {
        value: sol.objective,
        exact,
        lower_bound: if exact { sol.objective } else { lower },
        upper_bound: sol.objective,
        iterations: 0,
        n_columns_final: basis.columns.len(),
        seconds: t0.elapsed().as_secs_f64(),
        decomposition: sol.x,
        dual: sol.y,
    })
}

/// One rung of the copies ladder.
#[derive(Clone, Debug)]
pub struct CopiesStep {
    pub copies: u32,
    pub value: f64,
    /// True for the exact rungs (`copies <= k_exact`).
    pub exact: bool,
    /// Number of columns with weight above [`SUPPORT_EPS`].
    pub support_size: usize,
    /// Splits whose product bound the restricted LP improved on
    /// (empty for exact rungs).
    pub splits: Vec<(u32, u32)>,
}

/// Divide-and-conquer ladder for `R(rho^{(x) i})`, `i = 1..=n_copies`:
/// exact compressed solves for `i <= k_exact`, then restricted LPs over
/// tensor products of recorded supports. Every returned value satisfies
/// `R_i <= R_l * R_m` for each split `l + m = i`.
pub fn rom_copies(b1: &PauliVector, n_copies: u32, k_exact: u32) -> Result<Vec<CopiesStep>> {
    if n_copies == 0 || n_copies > COPIES_MAX {
        return Err(Error::cap(format!(
            "copies ladder supports 1..={COPIES_MAX} copies, got {n_copies}"
        )));
    }
    let k = k_exact.clamp(1, SYM_BASIS_MAX_QUBITS.min(n_copies));
    let mut steps: Vec<CopiesStep> = Vec::new();
    let mut tables: Vec<TypeTable> = Vec::new();
    let mut supports: Vec<Vec<CompressedColumn>> = Vec::new();
    for i in 1..=n_copies {
        let table = TypeTable::new(i)?;
        let target = compress_pauli_vector(b1, i)?;
        let (value, exact, sol_x, columns, splits) = if i <= k {
            let basis = build_symmetric_basis(i)?;
            let (sol, report) = solve_compressed(&basis.table, &basis.columns, &target)?;
            (sol.objective, report.all_ok(), sol.x, basis.columns, vec![])
        } else {
            // candidate columns: tensor products of supports over all splits
            let mut cand: Vec<CompressedColumn> = Vec::new();
            let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
            let mut splits = Vec::new();
            for l in 1..=(i / 2) {
                let m = i - l;
                splits.push((l, m));
                let (tl, tm) = (&tables[l as usize - 1], &tables[m as usize - 1]);
                for ca in &supports[l as usize - 1] {
                    for cb in &supports[m as usize - 1] {
                        let prod = compressed_tensor(tl, ca, tm, cb, &table);
                        match seen.entry(prod.q.clone()) {
                            std::collections::hash_map::Entry::Occupied(_) => {}
                            std::collections::hash_map::Entry::Vacant(v) => {
                                v.insert(cand.len());
                                cand.push(prod);
                            }
                        }
                    }
                }
            }
            let (sol, _) = solve_compressed(&table, &cand, &target)?;
            (sol.objective, false, sol.x, cand, splits)
        };
        // record the support for later splits
        let weights: HashMap<ColumnId, f64> = sol_x.iter().copied().collect();
        let support: Vec<CompressedColumn> = columns
            .into_iter()
            .filter(|c| {
                weights
                    .get(&ColumnId::Tag(c.tag))
                    .is_some_and(|w| w.abs() > SUPPORT_EPS)
            })
            .collect();
        // dominance: the product of any split's values bounds this rung
        for &(l, m) in &splits {
            let bound = steps[l as usize - 1].value * steps[m as usize - 1].value;
            debug_assert!(
                value <= bound + 1e-7,
                "rung {i}: {value} > split ({l},{m}) product {bound}"
            );
        }
        steps.push(CopiesStep {
            copies: i,
            value,
            exact,
            support_size: support.len(),
            splits,
        });
        supports.push(support);
        tables.push(table);
    }
    Ok(steps)
}

/// Result of subsystem-partition optimization.
#[derive(Clone, Debug)]
pub struct PartitionResult {
    /// Best product of per-group robustness values (an upper bound on the
    /// robustness of the full tensor product).
    pub value: f64,
    /// Groups of input-state indices forming the best partition.
    pub best_partition: Vec<Vec<usize>>,
    pub per_group_values: Vec<f64>,
    /// Whether every group in the best partition solved to exactness.
    pub all_groups_exact: bool,
    /// Per-group solver results, aligned with `best_partition`.
    pub group_results: Vec<RomResult>,
    /// Distinct subsets solved (memoization hits excluded).
    pub groups_solved: usize,
    pub seconds: f64,
}

fn tensor_of(states: &[PauliVector], members: &[usize]) -> Result<PauliVector> {
    let mut acc = states[members[0]].clone();
    for &i in &members[1..] {
        acc = acc.tensor(&states[i])?;
    }
    Ok(acc)
}

/// Enumerates restricted-growth partition labelings of `k` items.
fn for_each_partition(k: usize, mut visit: impl FnMut(&[usize])) {
    let mut labels = vec![0usize; k];
    loop {
        visit(&labels);
        // advance: find the rightmost position that can be incremented
        let mut i = k;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            let max_prev = labels[..i].iter().copied().max().unwrap();
            if labels[i] <= max_prev {
                labels[i] += 1;
                for l in labels[i + 1..].iter_mut() {
                    *l = 0;
                }
                break;
            }
        }
    }
}

/// Minimizes the product of per-group robustness over all set partitions
/// of `states` whose every group totals at most `max_group_qubits` qubits.
/// Each group is solved by column generation and memoized by subset.
pub fn rom_partition(
    states: &[PauliVector],
    max_group_qubits: u32,
    params: &CgParams,
) -> Result<PartitionResult> {
    if states.is_empty() {
        return Err(Error::invalid_argument("no states given"));
    }
    if states.len() > PARTITION_MAX_STATES {
        return Err(Error::cap(format!(
            "partition optimization accepts at most {PARTITION_MAX_STATES} states"
        )));
    }
    let cap = max_group_qubits.min(PARTITION_MAX_GROUP_QUBITS).max(1);
    for (i, s) in states.iter().enumerate() {
        if s.n().get() > cap {
            return Err(Error::cap(format!(
                "state {i} has {} qubits, above the group cap {cap}",
                s.n().get()
            )));
        }
    }
    let t0 = Instant::now();
    let k = states.len();
    let qubits: Vec<u32> = states.iter().map(|s| s.n().get()).collect();
    let mut memo: HashMap<u32, (f64, bool)> = HashMap::new();
    let mut memo_results: HashMap<u32, RomResult> = HashMap::new();
    let mut best: Option<(f64, Vec<Vec<usize>>)> = None;

    // collect candidate partitions first, then solve groups lazily
    let mut partitions: Vec<Vec<Vec<usize>>> = Vec::new();
    for_each_partition(k, |labels| {
        let ngroups = labels.iter().copied().max().unwrap() + 1;
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); ngroups];
        for (i, &l) in labels.iter().enumerate() {
            groups[l].push(i);
        }
        if groups
            .iter()
            .all(|g| g.iter().map(|&i| qubits[i]).sum::<u32>() <= cap)
        {
            partitions.push(groups);
        }
    });
    if partitions.is_empty() {
        return Err(Error::cap(format!(
            "no partition fits the group cap of {cap} qubits"
        )));
    }
    for groups in &partitions {
        let mut value = 1.0f64;
        for g in groups {
            let mask: u32 = g.iter().fold(0, |m, &i| m | 1 << i);
            let (v, _) = match memo.get(&mask) {
                Some(&hit) => hit,
                None => {
                    let joint = tensor_of(states, g)?;
                    let res = rom_column_generation_group(&joint, params)?;
                    let entry = (res.value, res.exact);
                    memo.insert(mask, entry);
                    memo_results.insert(mask, res);
                    entry
                }
            };
            value *= v;
        }
        if best.as_ref().is_none_or(|(bv, _)| value < bv - 1e-12) {
            best = Some((value, groups.clone()));
        }
    }
    let (value, best_partition) = best.unwrap();
    let mut per_group_values = Vec::new();
    let mut group_results = Vec::new();
    let mut all_groups_exact = true;
    for g in &best_partition {
        let mask: u32 = g.iter().fold(0, |m, &i| m | 1 << i);
        let res = memo_results[&mask].clone();
        per_group_values.push(res.value);
        all_groups_exact &= res.exact;
        group_results.push(res);
    }
    Ok(PartitionResult {
        value,
        best_partition,
        per_group_values,
        all_groups_exact,
        group_results,
        groups_solved: memo.len(),
        seconds: t0.elapsed().as_secs_f64(),
    })
}

fn rom_column_generation_group(b: &PauliVector, params: &CgParams) -> Result<RomResult> {
    rom::rom_column_generation(b, params)
}

/// Certificate that a tensor primal/dual pair solves the restricted
/// tensor-column problem: the Kronecker primal hits the Kronecker target,
/// the Kronecker dual prices every product column within tolerance, and
/// each factor's dual also passes a full sweep of its own state space (so
/// the product dual is feasible for *all* tensor columns, not just the
/// materialized ones).
#[derive(Clone, Debug)]
pub struct TensorCertificate {
    pub report: lp::VerifyReport,
    /// `max_j |a_j^T y_i|` per factor, from full dual sweeps.
    pub factor_max_abs: Vec<f64>,
    pub product_dual_feasible: bool,
    /// Product of the factor objectives.
    pub value: f64,
}

/// Resolves a solver column id back to its sparse `+-1` state column.
fn resolve_column(
    n: u32,
    id: ColumnId,
    cover_cache: &mut Option<cover::CoverSet>,
) -> Result<Vec<(u64, f64)>> {
    match id {
        ColumnId::Stab(sid) => Ok(stab::column(n, sid)?
            .entries
            .iter()
            .map(|&(r, s)| (r, s as f64))
            .collect()),
        ColumnId::Cover { block, delta } => {
            if cover_cache.is_none() {
                *cover_cache = Some(cover::build_cover_set(n)?);
            }
            let cov = cover_cache.as_ref().unwrap();
            let cm = cov
                .blocks()
                .get(block as usize)
                .ok_or_else(|| Error::invalid_argument("cover block out of range"))?;
            Ok(stab::block_paulis(cm)
                .iter()
                .enumerate()
                .map(|(gamma, e)| {
                    let flip = (gamma as u32 & delta).count_ones() & 1;
                    (e.index, if flip == 0 { e.sign as f64 } else { -e.sign as f64 })
                })
                .collect())
        }
        ColumnId::Tag(_) => Err(Error::invalid_argument(
            "compressed columns cannot be expanded into a tensor certificate",
        )),
    }
}

/// Builds and verifies the tensor primal/dual pair for a list of factor
/// solutions (each must carry its decomposition and dual).
pub fn tensor_certificate(factors: &[(&PauliVector, &RomResult)]) -> Result<TensorCertificate> {
    if factors.is_empty() {
        return Err(Error::invalid_argument("no factors given"));
    }
    // Full sweeps per factor.
    let mut factor_max_abs = Vec::new();
    for &(b, r) in factors {
        let rep = stab::dual_sweep(b.n().get(), &r.dual, 1.0 + rom::CERT_TOL, 0, &Default::default())?;
        factor_max_abs.push(rep.max_abs);
    }
    let product_dual_feasible = factor_max_abs
        .iter()
        .all(|&m| m <= 1.0 + 2.0 * rom::CERT_TOL);

    // Kronecker primal/dual/target, folding left to right (later factors
    // are least significant in the row index).
    let mut b_total = factors[0].0.clone();
    let mut y_total = factors[0].1.dual.clone();
    let mut cols_total: Vec<(ColumnId, Vec<(u64, f64)>, f64)> = {
        let mut cache = None;
        factors[0]
            .1
            .decomposition
            .iter()
            .map(|&(id, w)| Ok((id, resolve_column(factors[0].0.n().get(), id, &mut cache)?, w)))
            .collect::<Result<_>>()?
    };
    let mut value = factors[0].1.value;
    for &(b, r) in &factors[1..] {
        let nb = b.n().get();
        let dim_b = 1u64 << (2 * nb);
        let mut cache = None;
        let cols_b: Vec<(Vec<(u64, f64)>, f64)> = r
            .decomposition
            .iter()
            .map(|&(id, w)| Ok((resolve_column(nb, id, &mut cache)?, w)))
            .collect::<Result<_>>()?;
        b_total = b_total.tensor(b)?;
        let mut y_new = Vec::with_capacity(y_total.len() * dim_b as usize);
        for &ya in &y_total {
            for yb in &r.dual {
                y_new.push(ya * yb);
            }
        }
        y_total = y_new;
        let mut next = Vec::with_capacity(cols_total.len() * cols_b.len());
        for (tag, ca, wa) in &cols_total {
            for (cb, wb) in &cols_b {
                let entries: Vec<(u64, f64)> = ca
                    .iter()
                    .flat_map(|&(ra, va)| {
                        cb.iter().map(move |&(rb, vb)| (ra * dim_b + rb, va * vb))
                    })
                    .collect();
                next.push((*tag, entries, wa * wb));
            }
        }
        cols_total = next;
        value *= r.value;
    }

    // Materialize as an LP and verify with the product primal/dual.
    let n_rows = b_total.entries().len();
    let mut cols = ColumnSet::new(n_rows);
    let mut x = Vec::new();
    for (i, (_, entries, w)) in cols_total.iter().enumerate() {
        let id = ColumnId::Tag(i as u64);
        cols.push(LpColumn {
            id,
            entries: entries.iter().map(|&(r, v)| (r as u32, v)).collect(),
        })?;
        x.push((id, *w));
    }
    let sol = LpSolution {
        status: LpStatus::Optimal,
        objective: value,
        x,
        y: y_total,
        iterations: 0,
    };
    let report = lp::verify_solution(&cols, b_total.entries(), &sol, None)?;
    Ok(TensorCertificate {
        report,
        factor_max_abs,
        product_dual_feasible,
        value,
    })
}
