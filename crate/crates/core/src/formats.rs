//! On-disk schemas for systems, bi-systems, and signals.
//!
//! A system is stored either inline as JSON
//!
//! ```json
//! { "field": "real", "d": 2, "n": 2,
//!   "vectors": [[1, 0], [0, 1]],
//!   "functionals": [[1, 0], [0, 1]] }
//! ```
//!
//! with `vectors` the `d x n` matrix row by row and `functionals` the `n x d`
//! matrix row by row, or as a CSV manifest
//!
//! ```json
//! { "field": "complex", "d": 4, "n": 4,
//!   "vectors": "tau.csv", "functionals": "f.csv" }
//! ```
//!
//! whose paths are relative to the manifest. Real entries are plain numbers;
//! complex entries are `[re, im]` pairs in JSON and `re+imi` cells in CSV.
//! A bi-system file is `{ "first": <system>, "second": <system> }` where
//! each side is an inline system or a path to a system file.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Complex;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::system::{BiSystem, Field, PairedSystem, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn encode(z: C64, field: Field) -> Entry {
        match field {
            Field::Real => Entry::Real(z.re),
            Field::Complex => Entry::Complex([z.re, z.im]),
        }
    }

    fn value(self) -> C64 {
        match self {
            Entry::Real(re) => Complex::new(re, 0.0),
            Entry::Complex([re, im]) => Complex::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixData {
    Inline(Vec<Vec<Entry>>),
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub field: Field,
    pub d: usize,
    pub n: usize,
    pub vectors: MatrixData,
    pub functionals: MatrixData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSource {
    Inline(SystemFile),
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiSystemFile {
    pub first: SystemSource,
    pub second: SystemSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalFile {
    pub field: Field,
    pub d: usize,
    pub coordinates: Vec<Entry>,
}

fn encode_matrix(m: &CMatrix, field: Field) -> Vec<Vec<Entry>> {
    m.row_iter()
        .map(|row| row.iter().map(|&z| Entry::encode(z, field)).collect())
        .collect()
}

fn decode_rows(rows: &[Vec<C64>], nrows: usize, ncols: usize, what: &str) -> Result<CMatrix> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        let found: Vec<usize> = rows.iter().map(Vec::len).collect();
        return Err(Error::Shape(format!(
            "{what}: expected {nrows} rows of {ncols} entries, found row lengths {found:?}"
        )));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn parse_cell(cell: &str) -> Result<C64> {
    let cell = cell.trim();
    let bad = || Error::Parse(format!("bad matrix entry {cell:?}"));
    if let Ok(v) = cell.parse::<f64>() {
        return Ok(Complex::new(v, 0.0));
    }
    let body = cell.strip_suffix('i').ok_or_else(bad)?;
    // split before the sign of the imaginary part, skipping exponent signs
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re = body[..split].parse::<f64>().map_err(|_| bad())?;
    let im = body[split..].trim_start_matches('+').parse::<f64>().map_err(|_| bad())?;
    Ok(Complex::new(re, im))
}

fn format_cell(z: C64, field: Field) -> String {
    match field {
        Field::Real => format!("{:?}", z.re),
        Field::Complex => format!("{:?}{}{:?}i", z.re, if z.im.is_sign_negative() { "" } else { "+" }, z.im),
    }
}

fn read_csv_rows(path: &Path) -> Result<Vec<Vec<C64>>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(record.iter().map(parse_cell).collect::<Result<Vec<_>>>()?);
    }
    Ok(rows)
}

fn write_csv(path: &Path, m: &CMatrix, field: Field) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in m.row_iter() {
        writer.write_record(row.iter().map(|&z| format_cell(z, field)))?;
    }
    writer.flush()?;
    Ok(())
}

impl SystemFile {
    pub fn from_system(p: &PairedSystem) -> Self {
        SystemFile {
            field: p.field(),
            d: p.dim(),
            n: p.len(),
            vectors: MatrixData::Inline(encode_matrix(p.vectors(), p.field())),
            functionals: MatrixData::Inline(encode_matrix(p.functionals(), p.field())),
        }
    }

    /// Builds the system; CSV paths resolve against `base_dir`.
    pub fn to_system(&self, base_dir: &Path) -> Result<PairedSystem> {
        let load = |data: &MatrixData, nrows, ncols, what| -> Result<CMatrix> {
            let rows = match data {
                MatrixData::Inline(rows) => {
                    rows.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect()
                }
                MatrixData::Csv(path) => read_csv_rows(&base_dir.join(path))?,
            };
            decode_rows(&rows, nrows, ncols, what)
        };
        let vectors = load(&self.vectors, self.d, self.n, "vectors")?;
        let functionals = load(&self.functionals, self.n, self.d, "functionals")?;
        PairedSystem::new(self.field, vectors, functionals)
    }
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn load_system(path: &Path) -> Result<PairedSystem> {
    let file: SystemFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    file.to_system(&parent_dir(path))
}

/// Writes a CSV manifest at `manifest` plus `<stem>.vectors.csv` and
/// `<stem>.functionals.csv` next to it.
pub fn save_system_csv(p: &PairedSystem, manifest: &Path) -> Result<()> {
    let dir = parent_dir(manifest);
    let stem = manifest
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Parameter(format!("bad manifest path {}", manifest.display())))?;
    let vectors = PathBuf::from(format!("{stem}.vectors.csv"));
    let functionals = PathBuf::from(format!("{stem}.functionals.csv"));
    write_csv(&dir.join(&vectors), p.vectors(), p.field())?;
    write_csv(&dir.join(&functionals), p.functionals(), p.field())?;
    let file = SystemFile {
        field: p.field(),
        d: p.dim(),
        n: p.len(),
        vectors: MatrixData::Csv(vectors),
        functionals: MatrixData::Csv(functionals),
    };
    fs::write(manifest, to_json_pretty(&file)?)?;
    Ok(())
}

impl BiSystemFile {
    pub fn from_bisystem(b: &BiSystem) -> Self {
        BiSystemFile {
            first: SystemSource::Inline(SystemFile::from_system(b.first())),
            second: SystemSource::Inline(SystemFile::from_system(b.second())),
        }
    }

    pub fn to_bisystem(&self, base_dir: &Path) -> Result<BiSystem> {
        let side = |s: &SystemSource| match s {
            SystemSource::Inline(file) => file.to_system(base_dir),
            SystemSource::Path(path) => load_system(&base_dir.join(path)),
        };
        BiSystem::new(side(&self.first)?, side(&self.second)?)
    }
}

pub fn load_bisystem(path: &Path) -> Result<BiSystem> {
    let file: BiSystemFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    file.to_bisystem(&parent_dir(path))
}

impl SignalFile {
    pub fn from_signal(x: &Signal) -> Self {
        let field = Field::of(&CMatrix::from_column_slice(x.dim(), 1, x.coordinates().as_slice()));
        SignalFile {
            field,
            d: x.dim(),
            coordinates: x.coordinates().iter().map(|&z| Entry::encode(z, field)).collect(),
        }
    }

    pub fn to_signal(&self, eta: f64) -> Result<Signal> {
        if self.coordinates.len() != self.d {
            return Err(Error::Shape(format!(
                "signal declares d = {} but has {} coordinates",
                self.d,
                self.coordinates.len()
            )));
        }
        if self.field == Field::Real && self.coordinates.iter().any(|e| e.value().im != 0.0) {
            return Err(Error::Shape("real signal has complex coordinates".into()));
        }
        let coords = CVector::from_iterator(self.d, self.coordinates.iter().map(|e| e.value()));
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Shape("non-finite signal coordinate".into()));
        }
        Signal::new(coords, eta)
    }
}

pub fn load_signal(path: &Path, eta: f64) -> Result<Signal> {
    let file: SignalFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    file.to_signal(eta)
}

pub fn serialize_signal<S: Serializer>(x: &Signal, s: S) -> std::result::Result<S::Ok, S::Error> {
    SignalFile::from_signal(x).serialize(s)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
