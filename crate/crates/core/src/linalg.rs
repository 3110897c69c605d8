//! Exact rational vectors and matrices.
//!
//! Small dense types sized for program dimensions in the single digits.
//! Everything is computed over `Scalar`, so equality tests mean what they
//! say and Gaussian elimination never pivots for numerical stability,
//! only for nonzero pivots.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// A column vector of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactVector(pub Vec<Scalar>);

impl ExactVector {
    pub fn zeros(n: usize) -> Self {
        ExactVector(vec![Scalar::zero(); n])
    }

    pub fn ones(n: usize) -> Self {
        ExactVector(vec![Scalar::one(); n])
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        ExactVector(entries.iter().map(|&e| Scalar::from_int(e)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scalar> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, rhs: &ExactVector) -> ExactVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        ExactVector(self.iter().zip(rhs.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, rhs: &ExactVector) -> ExactVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        ExactVector(self.iter().zip(rhs.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Scalar) -> ExactVector {
        ExactVector(self.iter().map(|a| a * c).collect())
    }

    pub fn dot(&self, rhs: &ExactVector) -> Scalar {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        let mut acc = Scalar::zero();
        for (a, b) in self.iter().zip(rhs.iter()) {
            acc += a * b;
        }
        acc
    }
}

impl Index<usize> for ExactVector {
    type Output = Scalar;
    fn index(&self, i: usize) -> &Scalar {
        &self.0[i]
    }
}

impl IndexMut<usize> for ExactVector {
    fn index_mut(&mut self, i: usize) -> &mut Scalar {
        &mut self.0[i]
    }
}

impl fmt::Debug for ExactVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// A dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        for row in &rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
        }
        ExactMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&e| Scalar::from_int(e)).collect())
                .collect(),
        )
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[ExactVector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, ExactVector::dim);
        for col in cols {
            assert_eq!(col.dim(), r, "ragged matrix columns");
        }
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..r {
                m[(i, j)] = col[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn row(&self, i: usize) -> ExactVector {
        assert!(i < self.rows);
        ExactVector(self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn add(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn matmul(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix dimension mismatch");
        let mut out = ExactMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let term = a * &rhs[(k, j)];
                    out[(i, j)] += term;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &ExactVector) -> ExactVector {
        assert_eq!(self.cols, v.dim(), "matrix dimension mismatch");
        let mut out = ExactVector::zeros(self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let term = &self[(i, j)] * &v[j];
                out[i] += term;
            }
        }
        out
    }

    /// Computes `vᵀ · self`, returned as a vector of length `cols`.
    pub fn vecmat(&self, v: &ExactVector) -> ExactVector {
        assert_eq!(self.rows, v.dim(), "matrix dimension mismatch");
        let mut out = ExactVector::zeros(self.cols);
        for i in 0..self.rows {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let term = &v[i] * &self[(i, j)];
                out[j] += term;
            }
        }
        out
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn trace(&self) -> Scalar {
        assert!(self.is_square(), "trace of a non-square matrix");
        let mut acc = Scalar::zero();
        for i in 0..self.rows {
            acc += self[(i, i)].clone();
        }
        acc
    }

    pub fn pow(&self, exp: u32) -> ExactMatrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut acc = ExactMatrix::identity(self.rows);
        for _ in 0..exp {
            acc = acc.matmul(self);
        }
        acc
    }

    /// Solves `self · x = b` when the solution exists and is unique.
    /// Returns None for singular or inconsistent systems.
    pub fn solve(&self, b: &ExactVector) -> Option<ExactVector> {
        assert_eq!(self.rows, b.dim(), "matrix dimension mismatch");
        let n = self.cols;
        let mut aug = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row: Vec<Scalar> = self.entries[i * n..(i + 1) * n].to_vec();
            row.push(b[i].clone());
            aug.push(row);
        }
        let rank = rref(&mut aug, n);
        // Inconsistent when a zero coefficient row keeps a nonzero constant.
        for row in aug.iter().skip(rank) {
            if !row[n].is_zero() {
                return None;
            }
        }
        if rank < n {
            return None;
        }
        let mut x = ExactVector::zeros(n);
        for row in aug.iter().take(rank) {
            let lead = (0..n).find(|&j| !row[j].is_zero())?;
            x[lead] = row[n].clone();
        }
        Some(x)
    }
}

/// In-place reduced row echelon form over the first `cols` columns
/// (trailing columns ride along). Returns the rank.
pub(crate) fn rref(rows: &mut [Vec<Scalar>], cols: usize) -> usize {
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(src) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, src);
        let inv = rows[pivot_row][col].recip();
        for e in rows[pivot_row].iter_mut() {
            *e = &*e * &inv;
        }
        for r in 0..rows.len() {
            if r != pivot_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..rows[r].len() {
                    let delta = &factor * &rows[pivot_row][c];
                    rows[r][c] -= delta;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    pivot_row
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
