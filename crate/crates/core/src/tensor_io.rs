//! SVPT tensor files and SVPL training-log files.
//!
//! Both formats share a 24-byte little-endian header:
//!
//! ```text
//! SVPT: "SVPT" | version u16 = 1 | dtype u8 = 0 (f32) | reserved u8 = 0 | rows u64 | cols u64
//! SVPL: "SVPL" | version u16 = 1 | reserved u16 = 0              | n u64    | steps u64
//! ```
//!
//! followed by `rows * cols` f32 values (row-major) or `n * steps` bytes
//! each 0 or 1 (example-major). Trailing bytes after the payload are an error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::forgetting::TrainLog;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub const TENSOR_MAGIC: [u8; 4] = *b"SVPT";
pub const LOG_MAGIC: [u8; 4] = *b"SVPL";
pub const FORMAT_VERSION: u16 = 1;
pub const DTYPE_F32: u8 = 0;
pub const HEADER_LEN: usize = 24;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic {found:?}, expected {expected:?}")]
    BadMagic { found: [u8; 4], expected: [u8; 4] },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("unsupported dtype {0}")]
    UnsupportedDtype(u8),
    #[error("reserved header bytes must be zero")]
    Reserved,
    #[error("header too short: {0} bytes")]
    TruncatedHeader(usize),
    #[error("payload truncated: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: u64, found: u64 },
    #[error("{0} unexpected bytes after payload")]
    TrailingBytes(u64),
    #[error("zero dimension in header ({rows}x{cols})")]
    EmptyDims { rows: u64, cols: u64 },
    #[error("non-finite value at flat offset {0}")]
    NonFinite(u64),
    #[error("log byte at offset {offset} is {value}, expected 0 or 1")]
    NonBoolean { offset: u64, value: u8 },
    #[error("dimensions {rows}x{cols} overflow")]
    Overflow { rows: u64, cols: u64 },
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

type FResult<T> = Result<T, FormatError>;

struct Header {
    rows: u64,
    cols: u64,
}

fn encode_header(magic: [u8; 4], byte6: u8, rows: u64, cols: u64) -> [u8; HEADER_LEN] {
    let mut h = [0u8; HEADER_LEN];
    h[0..4].copy_from_slice(&magic);
    h[4..6].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
    h[6] = byte6;
    h[8..16].copy_from_slice(&rows.to_le_bytes());
    h[16..24].copy_from_slice(&cols.to_le_bytes());
    h
}

fn decode_header(bytes: &[u8], magic: [u8; 4], tensor: bool) -> FResult<Header> {
    if bytes.len() < HEADER_LEN {
        // A short file with the wrong magic is reported as bad magic first.
        if bytes.len() >= 4 && bytes[0..4] != magic {
            return Err(FormatError::BadMagic { found: bytes[0..4].try_into().unwrap(), expected: magic });
        }
        return Err(FormatError::TruncatedHeader(bytes.len()));
    }
    let found: [u8; 4] = bytes[0..4].try_into().unwrap();
    if found != magic {
        return Err(FormatError::BadMagic { found, expected: magic });
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    if tensor {
        if bytes[6] != DTYPE_F32 {
            return Err(FormatError::UnsupportedDtype(bytes[6]));
        }
        if bytes[7] != 0 {
            return Err(FormatError::Reserved);
        }
    } else if bytes[6] != 0 || bytes[7] != 0 {
        return Err(FormatError::Reserved);
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    if rows == 0 || cols == 0 {
        return Err(FormatError::EmptyDims { rows, cols });
    }
    Ok(Header { rows, cols })
}

fn payload_len(h: &Header, elem: u64) -> FResult<usize> {
    h.rows
        .checked_mul(h.cols)
        .and_then(|c| c.checked_mul(elem))
        .and_then(|b| usize::try_from(b).ok())
        .ok_or(FormatError::Overflow { rows: h.rows, cols: h.cols })
}

fn check_payload(actual: usize, expected: usize) -> FResult<()> {
    if actual < expected {
        return Err(FormatError::TruncatedPayload { expected: expected as u64, found: actual as u64 });
    }
    if actual > expected {
        return Err(FormatError::TrailingBytes((actual - expected) as u64));
    }
    Ok(())
}

/// Serializes a matrix to SVPT bytes. Values are narrowed to f32.
pub fn encode_tensor<T: Scalar>(m: &Matrix<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * m.data().len());
    out.extend_from_slice(&encode_header(TENSOR_MAGIC, DTYPE_F32, m.rows() as u64, m.cols() as u64));
    for v in m.data() {
        out.extend_from_slice(&v.as_f32().to_le_bytes());
    }
    out
}

pub fn decode_tensor(bytes: &[u8]) -> FResult<Matrix<f32>> {
    let h = decode_header(bytes, TENSOR_MAGIC, true)?;
    let expected = payload_len(&h, 4)?;
    let payload = &bytes[HEADER_LEN..];
    check_payload(payload.len(), expected)?;
    let mut data = Vec::with_capacity(expected / 4);
    for (k, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(FormatError::NonFinite(k as u64));
        }
        data.push(v);
    }
    Ok(Matrix::from_raw(h.rows as usize, h.cols as usize, data))
}

pub fn write_tensor<T: Scalar>(m: &Matrix<T>, path: impl AsRef<Path>) -> FResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_tensor(m))?;
    w.flush()?;
    Ok(())
}

pub fn read_tensor(path: impl AsRef<Path>) -> FResult<Matrix<f32>> {
    decode_tensor(&read_all(path)?)
}

pub fn encode_train_log(log: &TrainLog) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + log.examples() * log.steps());
    out.extend_from_slice(&encode_header(LOG_MAGIC, 0, log.examples() as u64, log.steps() as u64));
    out.extend(log.as_bytes());
    out
}

pub fn decode_train_log(bytes: &[u8]) -> FResult<TrainLog> {
    let h = decode_header(bytes, LOG_MAGIC, false)?;
    let expected = payload_len(&h, 1)?;
    let payload = &bytes[HEADER_LEN..];
    check_payload(payload.len(), expected)?;
    if let Some((offset, &value)) = payload.iter().enumerate().find(|(_, b)| **b > 1) {
        return Err(FormatError::NonBoolean { offset: offset as u64, value });
    }
    Ok(TrainLog::from_bits(h.rows as usize, h.cols as usize, payload.iter().map(|b| *b == 1).collect())
        .expect("dimensions checked above"))
}

pub fn write_train_log(log: &TrainLog, path: impl AsRef<Path>) -> FResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_train_log(log))?;
    w.flush()?;
    Ok(())
}

pub fn read_train_log(path: impl AsRef<Path>) -> FResult<TrainLog> {
    decode_train_log(&read_all(path)?)
}

/// Reads a training log from CSV with header `example_id,epoch,correct`.
///
/// Dimensions are inferred from the largest id and epoch. Every
/// `(example_id, epoch)` cell must appear exactly once.
pub fn read_train_log_csv<R: Read>(reader: R) -> FResult<TrainLog> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| FormatError::Csv(e.to_string()))?.clone();
    let expected = ["example_id", "epoch", "correct"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(FormatError::Csv(format!("expected header {}, got {:?}", expected.join(","), headers)));
    }
    let mut cells = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| FormatError::Csv(e.to_string()))?;
        let field = |k: usize| -> FResult<u64> {
            rec[k]
                .parse::<u64>()
                .map_err(|_| FormatError::Csv(format!("record {}: bad {} value {:?}", line + 1, expected[k], &rec[k])))
        };
        let (id, epoch, correct) = (field(0)?, field(1)?, field(2)?);
        if correct > 1 {
            return Err(FormatError::Csv(format!("record {}: correct must be 0 or 1, got {correct}", line + 1)));
        }
        cells.push((id as usize, epoch as usize, correct == 1));
    }
    if cells.is_empty() {
        return Err(FormatError::Csv("no records".into()));
    }
    let n = cells.iter().map(|c| c.0).max().unwrap() + 1;
    let steps = cells.iter().map(|c| c.1).max().unwrap() + 1;
    let mut seen = vec![false; n * steps];
    let mut bits = vec![false; n * steps];
    for (id, epoch, correct) in cells {
        let k = id * steps + epoch;
        if seen[k] {
            return Err(FormatError::Csv(format!("duplicate cell example_id={id} epoch={epoch}")));
        }
        seen[k] = true;
        bits[k] = correct;
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(FormatError::Csv(format!("missing cell example_id={} epoch={}", k / steps, k % steps)));
    }
    Ok(TrainLog::from_bits(n, steps, bits).expect("non-empty"))
}

/// Writes labels as CSV `example_id,label`.
pub fn write_labels_csv<W: Write>(labels: &[usize], writer: W) -> FResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| FormatError::Csv(e.to_string());
    w.write_record(["example_id", "label"]).map_err(csv_err)?;
    for (i, l) in labels.iter().enumerate() {
        w.write_record([i.to_string(), l.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads CSV `example_id,label`. Ids must cover `0..n` exactly once, in any order.
pub fn read_labels_csv<R: Read>(reader: R) -> FResult<Vec<usize>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| FormatError::Csv(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "example_id" || &headers[1] != "label" {
        return Err(FormatError::Csv(format!("expected header example_id,label, got {headers:?}")));
    }
    let mut pairs = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| FormatError::Csv(e.to_string()))?;
        let parse = |k: usize| {
            rec[k]
                .parse::<usize>()
                .map_err(|_| FormatError::Csv(format!("record {}: bad value {:?}", line + 1, &rec[k])))
        };
        pairs.push((parse(0)?, parse(1)?));
    }
    let mut labels = vec![None; pairs.len()];
    for (id, label) in pairs {
        match labels.get_mut(id) {
            Some(slot @ None) => *slot = Some(label),
            Some(Some(_)) => return Err(FormatError::Csv(format!("duplicate example_id {id}"))),
            None => return Err(FormatError::Csv(format!("example_id {id} out of range"))),
        }
    }
    if labels.is_empty() {
        return Err(FormatError::Csv("no records".into()));
    }
    Ok(labels.into_iter().map(|l| l.expect("ids cover 0..n")).collect())
}

/// Reads a numeric CSV matrix. A first record that does not parse as
/// numbers is taken as a header and skipped.
pub fn read_matrix_csv<R: Read>(reader: R) -> FResult<Matrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| FormatError::Csv(e.to_string()))?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(_) => return Err(FormatError::Csv(format!("record {}: non-numeric field", line + 1))),
        }
    }
    if rows.is_empty() {
        return Err(FormatError::Csv("no records".into()));
    }
    Matrix::from_rows(&rows).map_err(|e| FormatError::Csv(e.to_string()))
}

/// Writes a matrix as CSV with header `c0,c1,...`.
pub fn write_matrix_csv<T: Scalar, W: Write>(m: &Matrix<T>, writer: W) -> FResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| FormatError::Csv(e.to_string());
    w.write_record((0..m.cols()).map(|j| format!("c{j}"))).map_err(csv_err)?;
    for row in m.iter_rows() {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn read_all(path: impl AsRef<Path>) -> FResult<Vec<u8>> {
    let mut buf = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut buf)?;
    Ok(buf)
}
