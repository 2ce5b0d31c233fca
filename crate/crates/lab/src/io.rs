//! Output formats: CSV tables, binary grid dumps and JSON reports.
//!
//! Every float is written with 17 significant digits so regression diffs are
//! exact.
//!
//! Binary grid layout (all little-endian):
//!
//! | offset | size | content                          |
//! |--------|------|----------------------------------|
//! | 0      | 8    | magic `EPSGRID1`                 |
//! | 8      | 8    | `nq` (u64)                       |
//! | 16     | 8    | `np` (u64)                       |
//! | 24     | 32   | `q_min, q_max, p_min, p_max` (f64) |
//! | 56     | 8    | `t` (f64)                        |
//! | 64     | 8·nq·np | values, row-major: `w[i·np + j]` at `(q_i, p_j)` |

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context};
use eps_core::algebra::OperatorPolynomial;
use eps_core::dynamics::{GridGeometry, PhaseGrid};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

pub const GRID_MAGIC: &[u8; 8] = b"EPSGRID1";
const HEADER_LEN: usize = 64;

/// `{:.16e}`: 17 significant digits, round-trips every f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A float serialized to JSON with 17 significant digits (`null` if not finite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Float17(pub f64);

impl Serialize for Float17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(fmt_f64(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(serializer)
        } else {
            serializer.serialize_none()
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    std::fs::write(path, to_json(value)?).with_context(|| format!("writing {}", path.display()))
}

/// One row of a mean-value time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub mean_q: f64,
    pub mean_p: f64,
    pub mean_qdot: f64,
    pub e_of_t: f64,
}

pub const SERIES_HEADER: &str = "t,mean_q,mean_p,mean_qdot,E_of_t";

pub fn write_series_csv<W: Write>(out: W, rows: &[SeriesRow]) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "{SERIES_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.mean_q),
            fmt_f64(r.mean_p),
            fmt_f64(r.mean_qdot),
            fmt_f64(r.e_of_t)
        )?;
    }
    out.flush()
}

pub fn read_series_csv<R: Read>(mut input: R) -> anyhow::Result<Vec<SeriesRow>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut lines = text.lines();
    if lines.next() != Some(SERIES_HEADER) {
        bail!("missing series header `{SERIES_HEADER}`");
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let v = parse_floats(line, 5).with_context(|| format!("series row {}", n + 2))?;
            Ok(SeriesRow { t: v[0], mean_q: v[1], mean_p: v[2], mean_qdot: v[3], e_of_t: v[4] })
        })
        .collect()
}

pub fn write_grid_csv<W: Write>(out: W, grid: &PhaseGrid) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "q,p,w")?;
    for (q, p, w) in grid.samples() {
        writeln!(out, "{},{},{}", fmt_f64(q), fmt_f64(p), fmt_f64(w))?;
    }
    out.flush()
}

/// `(q, p, w)` rows of a grid CSV.
pub fn read_grid_csv<R: Read>(mut input: R) -> anyhow::Result<Vec<(f64, f64, f64)>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut lines = text.lines();
    if lines.next() != Some("q,p,w") {
        bail!("missing grid header `q,p,w`");
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let v = parse_floats(line, 3).with_context(|| format!("grid row {}", n + 2))?;
            Ok((v[0], v[1], v[2]))
        })
        .collect()
}

fn parse_floats(line: &str, expected: usize) -> anyhow::Result<Vec<f64>> {
    let v: Vec<f64> = line.split(',').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>()?;
    if v.len() != expected {
        bail!("expected {expected} columns, found {}", v.len());
    }
    Ok(v)
}

pub fn write_grid_binary<W: Write>(out: W, grid: &PhaseGrid) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    let g = grid.geometry();
    out.write_all(GRID_MAGIC)?;
    out.write_all(&(g.nq as u64).to_le_bytes())?;
    out.write_all(&(g.np as u64).to_le_bytes())?;
    for x in [g.q_min, g.q_max, g.p_min, g.p_max, grid.t()] {
        out.write_all(&x.to_le_bytes())?;
    }
    for v in grid.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()
}

pub fn read_grid_binary<R: Read>(mut input: R) -> anyhow::Result<PhaseGrid> {
    let mut header = [0u8; HEADER_LEN];
    input.read_exact(&mut header).context("truncated grid header")?;
    if &header[..8] != GRID_MAGIC {
        bail!("not a grid dump (bad magic)");
    }
    let u64_at = |o: usize| u64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    let (nq, np) = (usize::try_from(u64_at(8))?, usize::try_from(u64_at(16))?);
    let geometry = GridGeometry::new(f64_at(24), f64_at(32), f64_at(40), f64_at(48), nq, np)?;
    let t = f64_at(56);
    let count = nq.checked_mul(np).context("grid size overflows")?;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() != count * 8 {
        bail!("grid body has {} bytes, expected {}", body.len(), count * 8);
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(PhaseGrid::from_values(geometry, t, values)?)
}

pub fn create(path: &Path) -> anyhow::Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

/// One `(monomial, coefficient)` entry of a Hamiltonian dump.
#[derive(Debug, Clone, Serialize)]
pub struct TermRecord {
    pub monomial: String,
    pub exponents: [u32; 4],
    pub re: Float17,
    pub im: Float17,
}

/// Terms in normal-order key order (`q^a p^b π_q^c π_p^d`, lexicographic in
/// `(a, b, c, d)`).
pub fn hamiltonian_terms(h: &OperatorPolynomial) -> Vec<TermRecord> {
    h.terms()
        .map(|(m, c)| TermRecord {
            monomial: m.to_string(),
            exponents: m.exponents(),
            re: Float17(c.re),
            im: Float17(c.im),
        })
        .collect()
}
