//! Dissimilarity tables and labelled training sets.
//!
//! Objects are never stored directly: everything downstream sees only the
//! values `D(x, y)`. Symmetry is not required anywhere.

use std::fmt;

use crate::error::{Error, Result};

/// Row-major table of dissimilarities `D(row, col)`.
///
/// A *training* matrix is square and its rows and columns index the same
/// objects. A test matrix is rectangular: rows are test objects, columns
/// are training objects.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
    square_training: bool,
}

impl DissimilarityMatrix {
    /// Rectangular matrix (test objects × training objects).
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(Error::Shape(format!(
                "{} values for a {n_rows}x{n_cols} matrix",
                values.len()
            )));
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
            square_training: false,
        })
    }

    /// Square matrix whose rows and columns index the same objects.
    pub fn square(n: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(n, n, values)?.into_training()
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n_cols) {
            return Err(Error::Shape(format!(
                "row {i} has {} of {n_cols} values",
                r.len()
            )));
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    /// Marks the matrix as a square training matrix.
    pub fn into_training(mut self) -> Result<Self> {
        if self.n_rows != self.n_cols {
            return Err(Error::Shape(format!(
                "training matrix must be square, got {}x{}",
                self.n_rows, self.n_cols
            )));
        }
        self.square_training = true;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square_training(&self) -> bool {
        self.square_training
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.n_cols..(row + 1) * self.n_cols]
    }

    /// `min(D(i, j), D(j, i))`, the "reachable in either direction" value
    /// used for connectivity and covering.
    #[inline]
    pub fn sym_min(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).min(self.get(j, i))
    }

    /// Sub-matrix keeping every row and only the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.n_cols) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.n_cols,
            });
        }
        let mut values = Vec::with_capacity(self.n_rows * cols.len());
        for r in 0..self.n_rows {
            let row = self.row(r);
            values.extend(cols.iter().map(|&c| row[c]));
        }
        Self::new(self.n_rows, cols.len(), values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Zero rows or zero columns.
    Empty,
    /// NaN or infinite value.
    NonFinite,
    Negative,
    /// Training-matrix diagonal entry that is not exactly zero.
    NonzeroDiagonal,
}

/// One failed check, located at `(row, col)` when it concerns an entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (r, c, v) = (self.row, self.col, self.value);
        match self.kind {
            ViolationKind::Empty => write!(f, "empty matrix ({r}x{c})"),
            ViolationKind::NonFinite => write!(
                f,
                "non-finite value {v} at ({r},{c}): dissimilarities must be real with 0 <= D < inf"
            ),
            ViolationKind::Negative => write!(
                f,
                "negative value {v} at ({r},{c}): dissimilarities must satisfy 0 <= D < inf"
            ),
            ViolationKind::NonzeroDiagonal => write!(
                f,
                "nonzero diagonal {v} at ({r},{c}): D(x,x) must be exactly 0"
            ),
        }
    }
}

fn check_value(row: usize, col: usize, value: f64) -> Option<Violation> {
    let kind = if !value.is_finite() {
        ViolationKind::NonFinite
    } else if value < 0.0 {
        ViolationKind::Negative
    } else {
        return None;
    };
    Some(Violation {
        kind,
        row,
        col,
        value,
    })
}

/// Checks every entry; an empty list means the matrix is usable.
///
/// Entries must be finite and non-negative. Training matrices additionally
/// need an exactly-zero diagonal. Empty matrices are rejected.
pub fn validate_matrix(m: &DissimilarityMatrix) -> Vec<Violation> {
    if m.n_rows == 0 || m.n_cols == 0 {
        return vec![Violation {
            kind: ViolationKind::Empty,
            row: m.n_rows,
            col: m.n_cols,
            value: 0.0,
        }];
    }
    let mut out = Vec::new();
    for r in 0..m.n_rows {
        for (c, &v) in m.row(r).iter().enumerate() {
            if let Some(viol) = check_value(r, c, v) {
                out.push(viol);
            } else if m.square_training && r == c && v != 0.0 {
                out.push(Violation {
                    kind: ViolationKind::NonzeroDiagonal,
                    row: r,
                    col: c,
                    value: v,
                });
            }
        }
    }
    out
}

/// Validates only the listed columns of every row.
pub(crate) fn validate_columns(m: &DissimilarityMatrix, cols: &[usize]) -> Vec<Violation> {
    let mut out = Vec::new();
    for r in 0..m.n_rows {
        let row = m.row(r);
        out.extend(cols.iter().filter_map(|&c| check_value(r, c, row[c])));
    }
    out
}

pub(crate) fn ensure_valid(m: &DissimilarityMatrix) -> Result<()> {
    match validate_matrix(m).first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidMatrix(v.to_string())),
    }
}

/// One of the two classes of a [`LabeledDataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    A,
    B,
}

impl Class {
    pub fn other(self) -> Class {
        match self {
            Class::A => Class::B,
            Class::B => Class::A,
        }
    }
}

/// Square training matrix with one of exactly two label tokens per row.
///
/// Class A is the token that occurs first.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    matrix: DissimilarityMatrix,
    labels: Vec<String>,
    classes: Vec<Class>,
    label_a: String,
    label_b: String,
}

impl LabeledDataset {
    pub fn new<S: AsRef<str>>(matrix: DissimilarityMatrix, labels: &[S]) -> Result<Self> {
        let matrix = if matrix.is_square_training() {
            matrix
        } else {
            matrix.into_training()?
        };
        if labels.len() != matrix.n_rows() {
            return Err(Error::Shape(format!(
                "{} labels for {} objects",
                labels.len(),
                matrix.n_rows()
            )));
        }
        ensure_valid(&matrix)?;

        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_owned()).collect();
        let mut distinct: Vec<&str> = Vec::new();
        for l in &labels {
            if !distinct.contains(&l.as_str()) {
                distinct.push(l);
            }
        }
        if distinct.len() != 2 {
            return Err(match distinct.len() {
                0 | 1 => Error::NeedTwoClasses,
                n => Error::InvalidMatrix(format!("expected two class labels, found {n}")),
            });
        }
        let (label_a, label_b) = (distinct[0].to_owned(), distinct[1].to_owned());
        let classes = labels
            .iter()
            .map(|l| if *l == label_a { Class::A } else { Class::B })
            .collect();
        Ok(Self {
            matrix,
            labels,
            classes,
            label_a,
            label_b,
        })
    }

    pub fn matrix(&self) -> &DissimilarityMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label_a(&self) -> &str {
        &self.label_a
    }

    pub fn label_b(&self) -> &str {
        &self.label_b
    }

    pub fn label(&self, class: Class) -> &str {
        match class {
            Class::A => &self.label_a,
            Class::B => &self.label_b,
        }
    }

    pub fn class_of(&self, i: usize) -> Class {
        self.classes[i]
    }

    pub fn classes(&self) -> &[Class] {
        &self.classes
    }

    /// Resolves a label token to its class.
    pub fn class_for(&self, token: &str) -> Result<Class> {
        if token == self.label_a {
            Ok(Class::A)
        } else if token == self.label_b {
            Ok(Class::B)
        } else {
            Err(Error::UnknownClass(token.to_owned()))
        }
    }

    /// Row indices of one class, ascending.
    pub fn members(&self, class: Class) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.classes[i] == class)
            .collect()
    }
}
