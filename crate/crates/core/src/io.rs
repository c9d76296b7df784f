//! State files: binary density matrices (`.qdm`), binary Pauli vectors
//! (`.qpv`), and small-`n` JSON equivalents.
//!
//! Binary layout (little-endian): 4 magic bytes (`QDM1` / `QPV1`), a `u32`
//! qubit count, then the payload — `4^n` complex entries as `(re, im)` f64
//! pairs in row-major matrix order for `.qdm`, or `4^n` f64 Pauli
//! coefficients for `.qpv`. Trailing bytes and truncation are format errors
//! carrying the byte offset where reading stopped making sense. JSON files
//! hold `{"n": .., "entries": [..]}` with `[re, im]` pairs (density) or
//! plain numbers (Pauli vector) and are capped at `n <= 6`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{DensityMatrix, PauliVector, QubitCount};

const QDM_MAGIC: [u8; 4] = *b"QDM1";
const QPV_MAGIC: [u8; 4] = *b"QPV1";

/// Largest `n` accepted by the binary readers (134 MiB of payload).
pub const IO_MAX_QUBITS: u32 = 12;
/// Largest `n` accepted by the JSON readers/writers.
pub const JSON_MAX_QUBITS: u32 = 6;

/// A state loaded from disk in whichever representation the file used.
#[derive(Clone, Debug)]
pub enum StateFile {
    Density(DensityMatrix),
    Pauli(PauliVector),
}

impl StateFile {
    pub fn n(&self) -> QubitCount {
        match self {
            StateFile::Density(d) => d.n(),
            StateFile::Pauli(p) => p.n(),
        }
    }

    /// Converts to the Pauli-vector representation, decomposing if needed.
    pub fn into_pauli_vector(self) -> Result<PauliVector> {
        match self {
            StateFile::Density(d) => d.to_pauli_vector(),
            StateFile::Pauli(p) => Ok(p),
        }
    }
}

struct Counted<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Counted<R> {
    fn new(inner: R) -> Self {
        Counted { inner, offset: 0 }
    }

    fn fill(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        let mut done = 0;
        while done < buf.len() {
            let got = self.inner.read(&mut buf[done..]).map_err(Error::Io)?;
            if got == 0 {
                return Err(Error::Format {
                    offset: self.offset + done as u64,
                    what: format!("unexpected end of file while reading {what}"),
                });
            }
            done += got;
        }
        self.offset += done as u64;
        Ok(())
    }

    fn read_u32(&mut self, what: &str) -> Result<u32> {
        let mut b = [0u8; 4];
        self.fill(&mut b, what)?;
        Ok(u32::from_le_bytes(b))
    }

    fn read_f64(&mut self, what: &str) -> Result<f64> {
        let mut b = [0u8; 8];
        self.fill(&mut b, what)?;
        Ok(f64::from_le_bytes(b))
    }

    fn expect_eof(&mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        match self.inner.read(&mut probe).map_err(Error::Io)? {
            0 => Ok(()),
            _ => Err(Error::Format {
                offset: self.offset,
                what: "trailing bytes after payload".into(),
            }),
        }
    }
}

fn read_header<R: Read>(r: &mut Counted<R>, magic: [u8; 4], kind: &str) -> Result<QubitCount> {
    let mut got = [0u8; 4];
    r.fill(&mut got, "magic bytes")?;
    if got != magic {
        return Err(Error::Format {
            offset: 0,
            what: format!(
                "bad magic {:?}, expected {:?} ({kind})",
                String::from_utf8_lossy(&got),
                String::from_utf8_lossy(&magic)
            ),
        });
    }
    let raw_n = r.read_u32("qubit count")?;
    if raw_n == 0 || raw_n > IO_MAX_QUBITS {
        return Err(Error::Format {
            offset: 4,
            what: format!("qubit count {raw_n} outside 1..={IO_MAX_QUBITS}"),
        });
    }
    QubitCount::new(raw_n)
}

/// Reads a `.qdm` density matrix; the state is validated on construction.
pub fn read_qdm<R: Read>(reader: R) -> Result<DensityMatrix> {
    let mut r = Counted::new(reader);
    let n = read_header(&mut r, QDM_MAGIC, "density matrix")?;
    let len = n.pauli_dim();
    let mut entries = Vec::with_capacity(len);
    for _ in 0..len {
        let re = r.read_f64("matrix entry (re)")?;
        let im = r.read_f64("matrix entry (im)")?;
        entries.push(Complex64::new(re, im));
    }
    r.expect_eof()?;
    DensityMatrix::new(n, entries)
}

pub fn write_qdm<W: Write>(mut w: W, dm: &DensityMatrix) -> Result<()> {
    w.write_all(&QDM_MAGIC)?;
    w.write_all(&dm.n().get().to_le_bytes())?;
    for e in dm.entries() {
        w.write_all(&e.re.to_le_bytes())?;
        w.write_all(&e.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a `.qpv` Pauli vector (coefficients in Pauli-index order).
pub fn read_qpv<R: Read>(reader: R) -> Result<PauliVector> {
    let mut r = Counted::new(reader);
    let n = read_header(&mut r, QPV_MAGIC, "Pauli vector")?;
    let len = n.pauli_dim();
    let mut entries = Vec::with_capacity(len);
    for _ in 0..len {
        entries.push(r.read_f64("Pauli coefficient")?);
    }
    r.expect_eof()?;
    PauliVector::new(n, entries)
}

pub fn write_qpv<W: Write>(mut w: W, pv: &PauliVector) -> Result<()> {
    w.write_all(&QPV_MAGIC)?;
    w.write_all(&pv.n().get().to_le_bytes())?;
    for e in pv.entries() {
        w.write_all(&e.to_le_bytes())?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    n: u32,
    /// `[re, im]` pairs, row-major.
    entries: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct PauliJson {
    n: u32,
    entries: Vec<f64>,
}

fn check_json_n(n: u32) -> Result<QubitCount> {
    if n == 0 || n > JSON_MAX_QUBITS {
        return Err(Error::cap(format!(
            "JSON state files support 1..={JSON_MAX_QUBITS} qubits, got {n}"
        )));
    }
    QubitCount::new(n)
}

pub fn write_json_density<W: Write>(w: W, dm: &DensityMatrix) -> Result<()> {
    check_json_n(dm.n().get())?;
    let doc = DensityJson {
        n: dm.n().get(),
        entries: dm.entries().iter().map(|c| (c.re, c.im)).collect(),
    };
    serde_json::to_writer(w, &doc)?;
    Ok(())
}

pub fn write_json_pauli<W: Write>(w: W, pv: &PauliVector) -> Result<()> {
    check_json_n(pv.n().get())?;
    let doc = PauliJson {
        n: pv.n().get(),
        entries: pv.entries().to_vec(),
    };
    serde_json::to_writer(w, &doc)?;
    Ok(())
}

/// Parses a JSON state file, accepting either entry shape.
pub fn read_json_state(text: &str) -> Result<StateFile> {
    // Complex entries are [re, im] arrays, real entries plain numbers; try
    // the density shape first since its entries do not parse as f64.
    if let Ok(doc) = serde_json::from_str::<DensityJson>(text) {
        let n = check_json_n(doc.n)?;
        let entries: Vec<Complex64> = doc
            .entries
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect();
        return Ok(StateFile::Density(DensityMatrix::new(n, entries)?));
    }
    let doc: PauliJson = serde_json::from_str(text)?;
    let n = check_json_n(doc.n)?;
    Ok(StateFile::Pauli(PauliVector::new(n, doc.entries)?))
}

pub fn save_qdm(path: &Path, dm: &DensityMatrix) -> Result<()> {
    let f = File::create(path)?;
    let mut w = BufWriter::new(f);
    write_qdm(&mut w, dm)?;
    w.flush()?;
    Ok(())
}

pub fn save_qpv(path: &Path, pv: &PauliVector) -> Result<()> {
    let f = File::create(path)?;
    let mut w = BufWriter::new(f);
    write_qpv(&mut w, pv)?;
    w.flush()?;
    Ok(())
}

pub fn load_qdm(path: &Path) -> Result<DensityMatrix> {
    read_qdm(BufReader::new(File::open(path)?))
}

pub fn load_qpv(path: &Path) -> Result<PauliVector> {
    read_qpv(BufReader::new(File::open(path)?))
}

/// Loads any supported state file, dispatching on the file extension and
/// falling back to magic-byte sniffing for unknown extensions.
pub fn load_state(path: &Path) -> Result<StateFile> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("qdm") => Ok(StateFile::Density(load_qdm(path)?)),
        Some("qpv") => Ok(StateFile::Pauli(load_qpv(path)?)),
        Some("json") => read_json_state(&std::fs::read_to_string(path)?),
        _ => {
            let bytes = std::fs::read(path)?;
            if bytes.starts_with(&QDM_MAGIC) {
                Ok(StateFile::Density(read_qdm(&bytes[..])?))
            } else if bytes.starts_with(&QPV_MAGIC) {
                Ok(StateFile::Pauli(read_qpv(&bytes[..])?))
            } else {
                read_json_state(std::str::from_utf8(&bytes).map_err(|_| Error::Format {
                    offset: 0,
                    what: "unrecognized file format".into(),
                })?)
            }
        }
    }
}

/// Loads any supported state file directly as a Pauli vector.
pub fn load_pauli_vector(path: &Path) -> Result<PauliVector> {
    load_state(path)?.into_pauli_vector()
}
