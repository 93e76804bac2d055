//! File helpers: format detection by extension and atomic writes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use svp_core::forgetting::TrainLog;
use svp_core::tensor_io::{read_matrix_csv, read_tensor, read_train_log, read_train_log_csv};
use svp_core::Matrix;

fn has_ext(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

pub fn is_tensor(path: &Path) -> bool {
    has_ext(path, "svpt")
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so a failed command leaves no partial output behind.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    write_atomic(path, |w| Ok(w.write_all(bytes)?))
}

/// SVPT by extension, numeric CSV otherwise.
pub fn read_matrix(path: &Path) -> Result<Matrix<f64>> {
    read_matrix_inner(path).with_context(|| format!("reading {}", path.display()))
}

fn read_matrix_inner(path: &Path) -> Result<Matrix<f64>> {
    let m =
        if is_tensor(path) { read_tensor(path)?.cast() } else { read_matrix_csv(BufReader::new(File::open(path)?))? };
    Ok(m)
}

/// A score vector: the last column of a matrix file (so both a bare column
/// and `example_id,score` files work).
pub fn read_scores(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix(path)?;
    let last = m.cols() - 1;
    Ok(m.iter_rows().map(|r| r[last]).collect())
}

/// A list of example ids: the `example_id` column when a header names one,
/// the first column otherwise.
pub fn read_ids(path: &Path) -> Result<Vec<usize>> {
    read_ids_inner(path).with_context(|| format!("reading {}", path.display()))
}

fn read_ids_inner(path: &Path) -> Result<Vec<usize>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(BufReader::new(File::open(path)?));
    let mut column = 0;
    let mut ids = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if line == 0 {
            if let Some(k) = rec.iter().position(|f| f == "example_id") {
                column = k;
                continue;
            }
        }
        let field = rec.get(column).unwrap_or("");
        match field.parse::<usize>() {
            Ok(id) => ids.push(id),
            Err(_) if line == 0 => continue,
            Err(_) => bail!("record {}: bad example id {field:?}", line + 1),
        }
    }
    Ok(ids)
}

/// SVPL binary log, or CSV `example_id,epoch,correct` for `.csv` files.
pub fn read_log(path: &Path) -> Result<TrainLog> {
    let log = if has_ext(path, "csv") {
        File::open(path).map_err(Into::into).and_then(|f| read_train_log_csv(BufReader::new(f)))
    } else {
        read_train_log(path)
    };
    log.with_context(|| format!("reading {}", path.display()))
}
