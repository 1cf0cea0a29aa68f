//! Row-major feature matrix with named columns.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("row {row} has {found} values, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{names} column names for {columns} columns")]
    NameCountMismatch { names: usize, columns: usize },
    #[error("matrix has no columns")]
    NoColumns,
}

/// Dense row-major matrix of feature values plus column names.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<S> {
    values: Vec<S>,
    n_rows: usize,
    n_cols: usize,
    feature_names: Vec<String>,
}

impl<S: Scalar> FeatureMatrix<S> {
    pub fn from_rows<R: AsRef<[S]>>(
        rows: &[R],
        feature_names: Vec<String>,
    ) -> Result<Self, MatrixError> {
        let n_cols = feature_names.len();
        if n_cols == 0 {
            return Err(MatrixError::NoColumns);
        }
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (index, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(MatrixError::RaggedRow {
                    row: index,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            values,
            n_rows: rows.len(),
            n_cols,
            feature_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn value(&self, row: usize, column: usize) -> S {
        self.values[row * self.n_cols + column]
    }

    pub fn row(&self, row: usize) -> &[S] {
        &self.values[row * self.n_cols..(row + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.values.chunks(self.n_cols)
    }

    /// Index of the first non-finite value as `(row, column)`, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.values
            .iter()
            .position(|v| !v.is_finite())
            .map(|i| (i / self.n_cols, i % self.n_cols))
    }
}
