//! Exact dense linear algebra over a field: rank, kernel, affine solve.
//!
//! Elimination uses the leftmost-nonzero pivot rule, so every output
//! (echelon form, kernel basis, particular solutions) is deterministic and
//! reproducible across runs. No magnitude-based pivoting happens anywhere;
//! zero tests are exact.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Dense row-major matrix over a scalar field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    entries: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == ncols),
            "ragged rows: expected uniform length {ncols}"
        );
        Matrix {
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Convenience constructor from integer rows.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| S::from_int(n)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn row(&self, r: usize) -> Vec<S> {
        (0..self.cols).map(|c| self[(r, c)].clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() * s.clone()
        })
    }

    /// Matrix-vector product `M v`.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = S::zero();
                for c in 0..self.cols {
                    if !self[(r, c)].is_zero() && !v[c].is_zero() {
                        acc = acc + self[(r, c)].clone() * v[c].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "row count mismatch in hstack");
        Self::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                other[(r, c - self.cols)].clone()
            }
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols_of(dim: usize, cols: &[Vec<S>]) -> Self {
        for v in cols {
            assert_eq!(v.len(), dim, "column length mismatch");
        }
        Self::from_fn(dim, cols.len(), |r, c| cols[c][r].clone())
    }

    /// Reduced row echelon form with the leftmost-nonzero pivot rule.
    ///
    /// Returns the RREF together with the pivot column indices, one per
    /// pivot row in increasing order.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, pr);
            let inv = S::one() / m[(row, col)].clone();
            for c in col..m.cols {
                m[(row, c)] = m[(row, c)].clone() * inv.clone();
            }
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    for c in col..m.cols {
                        m[(r, c)] = m[(r, c)].clone() - factor.clone() * m[(row, c)].clone();
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Rank over the ground field, exact.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space `{v : M v = 0}`.
    ///
    /// One vector per free column, in increasing column order; the free
    /// coordinate is set to 1 and pivot coordinates are read off the RREF.
    pub fn kernel_basis(&self) -> Vec<Vec<S>> {
        let (rref, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![S::zero(); self.cols];
            v[free] = S::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -rref[(prow, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `M x = b`, or `None` when the system is inconsistent.
    ///
    /// Free variables are set to zero, so the output is deterministic under
    /// the leftmost-pivot rule.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let rhs = Self::from_cols_of(self.rows, &[b.to_vec()]);
        let (rref, pivots) = self.hstack(&rhs).rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![S::zero(); self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = rref[(prow, self.cols)].clone();
        }
        Some(x)
    }

    /// Exact inverse, or `None` when the matrix is singular or non-square.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let (rref, pivots) = self.hstack(&Self::identity(self.rows)).rref();
        if pivots.len() != self.rows || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(Self::from_fn(self.rows, self.cols, |r, c| {
            rref[(r, self.cols + c)].clone()
        }))
    }

    /// Greedy extension: indices of `candidates` whose columns enlarge the
    /// span of `seed`, scanned left to right.
    ///
    /// Used to pick deterministic complement bases (e.g. cocycles modulo
    /// coboundaries).
    pub fn extend_span(dim: usize, seed: &[Vec<S>], candidates: &[Vec<S>]) -> Vec<usize> {
        let mut cols: Vec<Vec<S>> = seed.to_vec();
        let mut rank = Self::from_cols_of(dim, &cols).rank();
        let mut chosen = Vec::new();
        for (i, cand) in candidates.iter().enumerate() {
            cols.push(cand.clone());
            let r = Self::from_cols_of(dim, &cols).rank();
            if r > rank {
                rank = r;
                chosen.push(i);
            } else {
                cols.pop();
            }
        }
        chosen
    }

    /// Whether `v` lies in the column span of `self`.
    pub fn in_column_span(&self, v: &[S]) -> bool {
        self.solve(v).is_some()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        debug_assert!(r < self.rows && c < self.cols);
        &self.entries[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.entries[r * self.cols + c]
    }
}

impl<S: Scalar> Add for &Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() + other[(r, c)].clone()
        })
    }
}

impl<S: Scalar> Sub for &Matrix<S> {
    type Output = Matrix<S>;
    fn sub(self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() - other[(r, c)].clone()
        })
    }
}

impl<S: Scalar> Neg for &Matrix<S> {
    type Output = Matrix<S>;
    fn neg(self) -> Matrix<S> {
        Matrix::from_fn(self.rows, self.cols, |r, c| -self[(r, c)].clone())
    }
}

impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        Matrix::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                if !self[(r, k)].is_zero() && !other[(k, c)].is_zero() {
                    acc = acc + self[(r, k)].clone() * other[(k, c)].clone();
                }
            }
            acc
        })
    }
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| format!("{:?}", self[(r, c)]))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `a + b` componentwise.
pub fn vec_add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() + y.clone())
        .collect()
}

/// `a - b` componentwise.
pub fn vec_sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() - y.clone())
        .collect()
}

/// `c * a` componentwise.
pub fn vec_scale<S: Scalar>(c: &S, a: &[S]) -> Vec<S> {
    a.iter().map(|x| c.clone() * x.clone()).collect()
}

pub fn vec_neg<S: Scalar>(a: &[S]) -> Vec<S> {
    a.iter().map(|x| -x.clone()).collect()
}

pub fn vec_is_zero<S: Scalar>(a: &[S]) -> bool {
    a.iter().all(|x| x.is_zero())
}
