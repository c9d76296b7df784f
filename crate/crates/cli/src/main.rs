//! `romkit`: command-line driver for the robustness-of-magic library.
//!
//! Every command prints a single line of JSON to stdout on success and
//! human-readable notes to stderr. Exit codes: 0 success, 2 when a request
//! is refused (infeasible problem or a size guard), 1 for any other error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use romkit_core::error::Error as CoreError;
use romkit_core::gen::{self, GenKind, GenSpec};
use romkit_core::io::{self, StateFile};
use romkit_core::pauli::PauliVector;
use romkit_core::product;
use romkit_core::rom::{self, CgParams};
use romkit_core::stab;

#[derive(Parser)]
#[command(
    name = "romkit",
    version,
    about = "Stabilizer overlaps and robustness of magic for n-qubit states",
    after_help = "Outputs one line of JSON on stdout; logs go to stderr.\n\
                  Exit codes: 0 success, 2 infeasible/guard refusal, 1 error."
)]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    /// Falls back to the ROMKIT_THREADS environment variable.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a state file from a seeded distribution or a named state.
    Gen(GenArgs),
    /// Convert between .qdm, .qpv and .json state files.
    Convert(ConvertArgs),
    /// Print basic facts about a state: qubit count, identity coefficient,
    /// st-norm (a robustness lower bound).
    Info(InArgs),
    /// Check state-vector sanity: unit identity coefficient, coefficient
    /// bounds, optionally the reconstructed spectrum.
    Validate(ValidateArgs),
    /// Stabilizer overlaps: top/bottom selections as JSON, or a full
    /// binary dump of every (block, delta, overlap) record.
    Overlaps(OverlapsArgs),
    /// Maximal squared overlap with any stabilizer state.
    Fidelity(InArgs),
    /// Robustness of magic by one of four methods.
    Rom(RomArgs),
    /// Closed-form feasible decomposition over the cover family.
    FwhtFeasible(InArgs),
    /// Robustness ladder for tensor copies of a single-qubit state.
    RomCopies(RomCopiesArgs),
    /// Best subsystem partition: minimize the product of per-group
    /// robustness values.
    RomPartition(RomPartitionArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    HaarPure,
    HaarMixed,
    HState,
    FState,
    StabilizerRandom,
}

impl From<KindArg> for GenKind {
    fn from(k: KindArg) -> GenKind {
        match k {
            KindArg::HaarPure => GenKind::HaarPure,
            KindArg::HaarMixed => GenKind::HaarMixed,
            KindArg::HState => GenKind::HState,
            KindArg::FState => GenKind::FState,
            KindArg::StabilizerRandom => GenKind::StabilizerRandom,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// State family. haar-mixed draws from the Hilbert-Schmidt (Ginibre)
    /// measure: G G^dag normalized to unit trace, G square complex Gaussian.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Qubits of the base state (h-state/f-state are fixed at 1).
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Tensor copies of the base state.
    #[arg(long, default_value_t = 1)]
    copies: u32,
    /// RNG seed; equal seeds give byte-identical files.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; the extension picks the format (.qdm/.qpv/.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Also reconstruct the density matrix and report its minimum
    /// eigenvalue (costs an eigendecomposition).
    #[arg(long, default_value_t = false)]
    spectrum: bool,
}

#[derive(Args)]
struct OverlapsArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// How many of the largest overlaps to report.
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// How many of the smallest overlaps to report (adds a JSON object
    /// with "top" and "bottom" keys instead of a bare array).
    #[arg(long, default_value_t = 0)]
    bottom: usize,
    /// Stream every (u64 block, u32 delta, f64 overlap) record,
    /// little-endian, to this file instead of selecting.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Naive,
    Top,
    Cg,
    Fwht,
}

#[derive(Args)]
struct RomArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "cg")]
    method: MethodArg,
    /// Fraction of all stabilizer states selected per side: the k|S|
    /// largest and k|S| smallest overlaps (top/cg initialization).
    #[arg(long, default_value_t = 1e-3)]
    k: f64,
    /// Discard threshold: zero-weight columns with |a^T y| below this are
    /// dropped each round (cg).
    #[arg(long, default_value_t = 0.8)]
    d: f64,
    /// Columns added per round (cg): "auto" = ceil(k * state count).
    #[arg(long, default_value = "auto")]
    max_new: String,
    /// Column-generation rounds before giving up.
    #[arg(long, default_value_t = 100)]
    max_iters: u64,
    /// Dual feasibility tolerance for the violation sweep.
    #[arg(long, default_value_t = 1e-7)]
    tol_dual: f64,
    /// Skip the cover columns (top/cg); the restricted LP may then be
    /// infeasible.
    #[arg(long, default_value_t = false)]
    no_cover: bool,
    /// Raise the naive-method guard from 4 to 5 qubits.
    #[arg(long, default_value_t = false)]
    force: bool,
}

#[derive(Args)]
struct RomCopiesArgs {
    /// "h", "f", or a path to a single-qubit state file.
    #[arg(long)]
    state: String,
    /// Number of copies (ladder length).
    #[arg(long)]
    n: u32,
    /// Exact-solve cutoff; higher rungs use restricted tensor LPs.
    #[arg(long, default_value_t = 3)]
    k: u32,
}

#[derive(Args)]
struct RomPartitionArgs {
    /// State files, one per subsystem, in order.
    #[arg(long = "in", value_name = "FILE", num_args = 1.., required = true)]
    input: Vec<PathBuf>,
    /// Largest qubit total a group may have.
    #[arg(long, default_value_t = 4)]
    max_group: u32,
}

fn exit_code_for(err: &CoreError) -> u8 {
    match err {
        CoreError::Infeasible(_) | CoreError::CapExceeded(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("ROMKIT_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        if t > 0 {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
                eprintln!("romkit: could not configure {t} threads: {e}");
                return ExitCode::from(1);
            }
        }
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("romkit: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn emit(value: serde_json::Value) {
    println!("{value}");
}

/// Writes a state in the format chosen by the output extension.
fn write_state(path: &Path, state: StateFile) -> Result<(), CoreError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "qdm" => {
            let dm = match state {
                StateFile::Density(d) => d,
                StateFile::Pauli(p) => p.to_density_matrix()?,
            };
            io::save_qdm(path, &dm)
        }
        "qpv" => {
            let pv = state.into_pauli_vector()?;
            io::save_qpv(path, &pv)
        }
        "json" => {
            let f = std::fs::File::create(path)?;
            let mut w = std::io::BufWriter::new(f);
            match state {
                StateFile::Density(d) => io::write_json_density(&mut w, &d)?,
                StateFile::Pauli(p) => io::write_json_pauli(&mut w, &p)?,
            }
            use std::io::Write;
            w.flush()?;
            Ok(())
        }
        other => Err(CoreError::invalid_argument(format!(
            "unknown output format {other:?}; use .qdm, .qpv or .json"
        ))),
    }
}

fn load_pauli(path: &Path) -> Result<PauliVector, CoreError> {
    io::load_pauli_vector(path)
}

fn run(cmd: Cmd) -> Result<(), CoreError> {
    match cmd {
        Cmd::Gen(a) => {
            let spec = GenSpec {
                kind: a.kind.into(),
                n: a.n,
                copies: a.copies,
                seed: a.seed,
            };
            let state = gen::generate(&spec)?;
            let n = state.n().get();
            write_state(&a.out, state)?;
            eprintln!("romkit: wrote {}", a.out.display());
            emit(json!({"n": n, "out": a.out.display().to_string(), "seed": a.seed}));
            Ok(())
        }
        Cmd::Convert(a) => {
            let state = io::load_state(&a.input)?;
            let n = state.n().get();
            write_state(&a.out, state)?;
            emit(json!({"n": n, "out": a.out.display().to_string()}));
            Ok(())
        }
        Cmd::Info(a) => {
            let pv = load_pauli(&a.input)?;
            emit(json!({
                "n": pv.n().get(),
                "b0": pv.b0(),
                "st_norm": pv.st_norm(),
            }));
            Ok(())
        }
        Cmd::Validate(a) => {
            let pv = load_pauli(&a.input)?;
            let report = pv.validate(a.spectrum)?;
            let mut v = serde_json::to_value(&report)?;
            v["ok"] = json!(report.all_ok());
            emit(v);
            Ok(())
        }
        Cmd::Overlaps(a) => {
            let pv = load_pauli(&a.input)?;
            if let Some(dump) = a.dump {
                use std::io::Write;
                let f = std::fs::File::create(&dump)?;
                let mut w = std::io::BufWriter::new(f);
                let mut records = 0u64;
                stab::overlaps_for_each(&pv, |id, v| {
                    w.write_all(&id.block.to_le_bytes()).unwrap();
                    w.write_all(&id.delta.to_le_bytes()).unwrap();
                    w.write_all(&v.to_le_bytes()).unwrap();
                    records += 1;
                })?;
                w.flush()?;
                eprintln!("romkit: dumped {records} records to {}", dump.display());
                emit(json!({"records": records, "out": dump.display().to_string()}));
                return Ok(());
            }
            let (top, bottom) = stab::top_overlap_select(&pv, a.top, a.bottom)?;
            let as_json = |sel: &[stab::Selected]| -> Vec<serde_json::Value> {
                sel.iter()
                    .map(|s| json!({"block": s.id.block, "delta": s.id.delta, "overlap": s.overlap}))
                    .collect()
            };
            if a.bottom == 0 {
                emit(json!(as_json(&top)));
            } else {
                emit(json!({"top": as_json(&top), "bottom": as_json(&bottom)}));
            }
            Ok(())
        }
        Cmd::Fidelity(a) => {
            let pv = load_pauli(&a.input)?;
            let (f, id) = stab::max_fidelity(&pv)?;
            emit(json!({"fidelity_sq": f, "block": id.block, "delta": id.delta}));
            Ok(())
        }
        Cmd::Rom(a) => {
            let pv = load_pauli(&a.input)?;
            let result = match a.method {
                MethodArg::Naive => {
                    let guard = if a.force { 5 } else { 4 };
                    rom::rom_naive_with_guard(&pv, guard)?
                }
                MethodArg::Top => rom::rom_top_overlap(&pv, a.k, !a.no_cover)?,
                MethodArg::Fwht => rom::rom_fwht(&pv)?,
                MethodArg::Cg => {
                    let max_new = match a.max_new.as_str() {
                        "auto" => None,
                        s => Some(s.parse::<usize>().map_err(|_| {
                            CoreError::invalid_argument(format!(
                                "--max-new expects a count or \"auto\", got {s:?}"
                            ))
                        })?),
                    };
                    let params = CgParams {
                        k0: a.k,
                        discard: a.d,
                        max_new,
                        max_iters: a.max_iters,
                        tol_dual: a.tol_dual,
                        include_cover: !a.no_cover,
                    };
                    rom::rom_column_generation(&pv, &params)?
                }
            };
            eprintln!(
                "romkit: value {:.12} exact {} in {:.3}s",
                result.value, result.exact, result.seconds
            );
            emit(json!({
                "value": result.value,
                "exact": result.exact,
                "lower_bound": result.lower_bound,
                "iterations": result.iterations,
                "n_columns_final": result.n_columns_final,
                "seconds": result.seconds,
            }));
            Ok(())
        }
        Cmd::FwhtFeasible(a) => {
            let pv = load_pauli(&a.input)?;
            let fd = romkit_core::cover::minimal_feasible_solution(&pv)?;
            emit(json!({
                "r_fwht": fd.r_fwht,
                "residual_inf": fd.residual_inf,
                "blocks": fd.weights.len(),
            }));
            Ok(())
        }
        Cmd::RomCopies(a) => {
            let base = match a.state.as_str() {
                "h" => gen::h_state(),
                "f" => gen::f_state(),
                path => load_pauli(Path::new(path))?,
            };
            let steps = product::rom_copies(&base, a.n, a.k)?;
            let values: Vec<f64> = steps.iter().map(|s| s.value).collect();
            let detail: Vec<serde_json::Value> = steps
                .iter()
                .map(|s| {
                    json!({
                        "copies": s.copies,
                        "value": s.value,
                        "exact": s.exact,
                        "support": s.support_size,
                    })
                })
                .collect();
            emit(json!({"values": values, "steps": detail}));
            Ok(())
        }
        Cmd::RomPartition(a) => {
            let states: Vec<PauliVector> = a
                .input
                .iter()
                .map(|p| load_pauli(p))
                .collect::<Result<_, _>>()?;
            let res = product::rom_partition(&states, a.max_group, &CgParams::default())?;
            eprintln!(
                "romkit: best of {} group solves in {:.3}s",
                res.groups_solved, res.seconds
            );
            emit(json!({
                "value": res.value,
                "best_partition": res.best_partition,
                "per_group_values": res.per_group_values,
                "all_groups_exact": res.all_groups_exact,
            }));
            Ok(())
        }
    }
}
