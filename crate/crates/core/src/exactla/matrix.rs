use std::fmt;

use num_traits::Zero;

use super::Scalar;
use crate::error::{Error, Result};

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq)]
pub struct ScalarMatrix<K> {
    rows: usize,
    cols: usize,
    entries: Vec<K>,
}

impl<K: Scalar> ScalarMatrix<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ScalarMatrix { rows, cols, entries: vec![K::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, K::one());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, entries: Vec<K>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(ScalarMatrix { rows, cols, entries })
    }

    /// Builds a matrix from equal-length rows. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            entries.extend(row);
        }
        ScalarMatrix { rows: n, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &K {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of {}x{}", self.rows, self.cols);
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: K) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of {}x{}", self.rows, self.cols);
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[K] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<K> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Nonzero entries as `(row, col, value)`, row-major.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, &K)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(k, v)| (k / self.cols, k % self.cols, v))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.nonzero_entries() {
            t.set(c, r, v.clone());
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.entries[idx] = out.entries[idx].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    /// The submatrix on the given row and column index lists, in that order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    /// Block-diagonal sum.
    pub fn block_diagonal(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for (r, c, v) in self.nonzero_entries() {
            out.set(r, c, v.clone());
        }
        for (r, c, v) in other.nonzero_entries() {
            out.set(self.rows + r, self.cols + c, v.clone());
        }
        out
    }

    /// Two-sided inverse of a square matrix.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for (r, c, v) in self.nonzero_entries() {
            aug.set(r, c, v.clone());
        }
        for i in 0..n {
            aug.set(i, n + i, K::one());
        }
        let pivots = aug.eliminate(true, n);
        if pivots.len() < n {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Some(aug.select(&rows, &cols))
    }

    /// Gaussian elimination in place over the first `limit` columns.
    /// Returns pivot columns in row order; with `reduced` the result is in
    /// reduced row echelon form with unit pivots.
    fn eliminate(&mut self, reduced: bool, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..limit.min(self.cols) {
            if prow == self.rows {
                break;
            }
            let Some(found) = (prow..self.rows).find(|&r| !self.get(r, c).is_zero()) else {
                continue;
            };
            self.swap_rows(prow, found);
            let inv = self.get(prow, c).inverse().expect("nonzero field element is invertible");
            if reduced {
                for j in c..self.cols {
                    let idx = prow * self.cols + j;
                    if !self.entries[idx].is_zero() {
                        self.entries[idx] = self.entries[idx].clone() * inv.clone();
                    }
                }
            }
            let support: Vec<(usize, K)> = (c..self.cols)
                .filter_map(|j| {
                    let v = self.get(prow, j);
                    (!v.is_zero()).then(|| (j, v.clone()))
                })
                .collect();
            let targets: Box<dyn Iterator<Item = usize>> = if reduced {
                Box::new((0..self.rows).filter(|&r| r != prow))
            } else {
                Box::new(prow + 1..self.rows)
            };
            for r in targets {
                let lead = self.get(r, c).clone();
                if lead.is_zero() {
                    continue;
                }
                let factor = if reduced { lead } else { lead * inv.clone() };
                for (j, v) in &support {
                    let idx = r * self.cols + j;
                    self.entries[idx] = self.entries[idx].clone() - factor.clone() * v.clone();
                }
            }
            pivots.push(c);
            prow += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<K: fmt::Debug> fmt::Debug for ScalarMatrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ScalarMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> =
                self.entries[r * self.cols..(r + 1) * self.cols].iter().map(|v| format!("{v:?}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Rank over the scalar field.
pub fn rank<K: Scalar>(m: &ScalarMatrix<K>) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let mut work = m.clone();
    work.eliminate(false, m.cols()).len()
}

/// A matrix whose columns form a basis of the kernel of `m`.
pub fn kernel_basis<K: Scalar>(m: &ScalarMatrix<K>) -> ScalarMatrix<K> {
    let n = m.cols();
    let mut work = m.clone();
    let pivots = work.eliminate(true, n);
    let is_pivot = {
        let mut v = vec![false; n];
        for &p in &pivots {
            v[p] = true;
        }
        v
    };
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut basis = ScalarMatrix::zeros(n, free.len());
    for (k, &f) in free.iter().enumerate() {
        basis.set(f, k, K::one());
        for (row, &p) in pivots.iter().enumerate() {
            let v = work.get(row, f);
            if !v.is_zero() {
                basis.set(p, k, -v.clone());
            }
        }
    }
    basis
}

/// Dimension of `ker B / im A` for a composable pair `A: U -> V`, `B: V -> W`.
pub fn homology_dim<K: Scalar>(a: &ScalarMatrix<K>, b: &ScalarMatrix<K>) -> Result<usize> {
    if a.rows() != b.cols() {
        return Err(Error::Shape(format!(
            "incoming map has {} rows but outgoing map has {} columns",
            a.rows(),
            b.cols()
        )));
    }
    if !b.mul(a)?.is_zero() {
        return Err(Error::NotAComplex("outgoing map composed with incoming map is nonzero".into()));
    }
    let middle = a.rows();
    Ok(middle - rank(b) - rank(a))
}
