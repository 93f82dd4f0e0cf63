//! JSON matrix and permutation files, CSV tables, atomic writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qda_core::{ComplexMatrix, Permutation, C64};

use crate::{invalid, CliError, Result};

/// Row-major complex matrix as two real arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixFile {
    pub fn from_matrix(a: &ComplexMatrix) -> Self {
        Self {
            rows: a.rows(),
            cols: a.cols(),
            re: a.data().iter().map(|z| z.re).collect(),
            im: a.data().iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let len = self.rows * self.cols;
        if self.re.len() != len || self.im.len() != len {
            return Err(invalid(format!(
                "matrix file declares {}x{} but has {} real and {} imaginary entries",
                self.rows,
                self.cols,
                self.re.len(),
                self.im.len()
            )));
        }
        if self.re.iter().chain(&self.im).any(|v| !v.is_finite()) {
            return Err(invalid("matrix file has non-finite entries"));
        }
        let data = self.re.iter().zip(&self.im).map(|(&r, &i)| C64::new(r, i)).collect();
        Ok(ComplexMatrix::new(self.rows, self.cols, data)?)
    }
}

/// Write through a temp file in the target directory, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_slice(&bytes).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

pub fn write_matrix(path: &Path, a: &ComplexMatrix) -> Result<()> {
    write_json(path, &MatrixFile::from_matrix(a))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    read_json::<MatrixFile>(path)?.to_matrix()
}

/// Permutations are stored as 0-based index arrays.
pub fn write_permutation(path: &Path, p: &Permutation) -> Result<()> {
    write_json(path, p.as_slice())
}

pub fn read_permutation(path: &Path) -> Result<Permutation> {
    Ok(Permutation::new(read_json::<Vec<usize>>(path)?)?)
}

/// The header is written even when `rows` is empty.
pub fn write_csv<S: Serialize>(path: &Path, header: &[&str], rows: &[S]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| invalid(e.to_string()))?;
    write_atomic(path, &bytes)
}

/// For tables whose header is only known at run time.
pub fn write_csv_records(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| invalid(e.to_string()))?;
    write_atomic(path, &bytes)
}
