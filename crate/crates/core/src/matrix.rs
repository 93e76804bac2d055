//! Dense row-major matrices and the validated probability matrix.

use thiserror::Error;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Maximum allowed deviation of a probability row sum from 1.
pub const PROB_ROW_TOLERANCE: f64 = 1e-5;

/// Dense `rows x cols` matrix stored row-major. Always non-empty and finite.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{rows}x{cols} matrix needs {} values, got {}", rows * cols, data.len())));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / cols, col: pos % cols });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!("row {i} has {} columns, expected {cols}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![T::zero(); rows * cols])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.cols)
    }

    /// Copies the given rows, in the given order, into a new matrix.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange { index: i, n: self.rows });
            }
            data.extend_from_slice(self.row(i));
        }
        Self::new(indices.len(), self.cols, data)
    }

    pub fn cast<U: Scalar>(&self) -> Matrix<U> {
        Matrix::from_raw(self.rows, self.cols, self.data.iter().map(|v| U::of(v.as_f64())).collect())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.rows, self.cols, self.data.iter().map(|&v| f(v)).collect())
    }
}

/// Why a matrix failed probability validation. Always names the first bad row.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbError {
    #[error("probability matrix needs at least 2 columns, got {0}")]
    TooFewClasses(usize),
    #[error("row {row}: entry {col} = {value} outside [0, 1] (row sum {sum})")]
    EntryOutOfRange { row: usize, col: usize, value: f64, sum: f64 },
    #[error("row {row}: sum {sum} differs from 1 by more than {PROB_ROW_TOLERANCE}")]
    RowSum { row: usize, sum: f64 },
}

/// A matrix whose rows are categorical distributions over `cols` classes.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbMatrix<T> {
    inner: Matrix<T>,
}

impl<T: Scalar> ProbMatrix<T> {
    /// Accepts `m` iff it has at least two columns, every entry lies in
    /// [0, 1], and every row sums to 1 within [`PROB_ROW_TOLERANCE`].
    pub fn validate(m: Matrix<T>) -> Result<Self, ProbError> {
        if m.cols() < 2 {
            return Err(ProbError::TooFewClasses(m.cols()));
        }
        for (row, r) in m.iter_rows().enumerate() {
            let sum: f64 = r.iter().map(|v| v.as_f64()).sum();
            if let Some((col, v)) = r.iter().enumerate().find(|(_, v)| **v < T::zero() || **v > T::one()) {
                return Err(ProbError::EntryOutOfRange { row, col, value: v.as_f64(), sum });
            }
            if (sum - 1.0).abs() > PROB_ROW_TOLERANCE {
                return Err(ProbError::RowSum { row, sum });
            }
        }
        Ok(Self { inner: m })
    }

    /// Wraps rows that are softmax outputs by construction.
    pub(crate) fn from_softmax(m: Matrix<T>) -> Self {
        debug_assert!(Self::validate(m.clone()).is_ok());
        Self { inner: m }
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        Ok(Self::validate(Matrix::from_rows(rows)?)?)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[inline]
    pub fn classes(&self) -> usize {
        self.inner.cols()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        self.inner.row(i)
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        self.inner.iter_rows()
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.inner
    }
}
