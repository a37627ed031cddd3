//! Compressed sparse row storage for the assembled symmetric systems.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Square matrix from `(row, col, value)` triplets. Duplicates are summed
    /// in input order, so the result does not depend on how the triplets of
    /// one entry were produced, only on their sequence.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; n + 1];
        for &(r, c, _) in triplets {
            if r >= n || c >= n {
                return Err(Error::DimensionMismatch { expected: n, got: r.max(c) + 1 });
            }
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        // counting sort by row keeps the input order within each row
        let mut fill = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(r, c, v) in triplets {
            let k = fill[r];
            cols[k] = c;
            vals[k] = v;
            fill[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for r in 0..n {
            scratch.clear();
            scratch.extend((counts[r]..counts[r + 1]).map(|k| (cols[k], vals[k])));
            scratch.sort_by_key(|e| e.0);
            for &(c, v) in &scratch {
                if col_idx.len() > row_ptr[r] && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix { n, row_ptr, col_idx, values })
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix { n, row_ptr: (0..=n).collect(), col_idx: (0..n).collect(), values: vec![1.0; n] }
    }

    /// Dense row-major matrix, keeping only nonzero entries.
    pub fn from_dense(n: usize, a: &[f64]) -> Self {
        let t: Vec<_> = (0..n * n).filter(|&k| a[k] != 0.0).map(|k| (k / n, k % n, a[k])).collect();
        CsrMatrix::from_triplets(n, &t).expect("indices are in range")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// Index of entry `(i, j)` in the value array, if stored.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].binary_search(&j).ok().map(|k| r.start + k)
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &CsrMatrix, b: f64) -> Result<CsrMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        if self.row_ptr == other.row_ptr && self.col_idx == other.col_idx {
            let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
            return Ok(CsrMatrix { values, ..self.clone() });
        }
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            t.extend(self.row(i).map(|(j, v)| (i, j, a * v)));
            t.extend(other.row(i).map(|(j, v)| (i, j, b * v)));
        }
        CsrMatrix::from_triplets(self.n, &t)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[i * self.n + j] = v;
            }
        }
        d
    }

    /// Largest `|a_ij − a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    /// Symmetric elimination of prescribed values (the diagonal of every
    /// prescribed row must be stored): `rhs` picks up the known
    /// columns, prescribed rows and columns become unit rows and columns and
    /// `rhs[i] = value`. `fixed[i]` is `Some(value)` for prescribed entries.
    pub fn eliminate(&self, rhs: &mut [f64], fixed: &[Option<f64>]) -> CsrMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            if fixed[i].is_some() {
                continue;
            }
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if let Some(g) = fixed[self.col_idx[k]] {
                    rhs[i] -= self.values[k] * g;
                    out.values[k] = 0.0;
                }
            }
        }
        for i in 0..self.n {
            if let Some(g) = fixed[i] {
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    out.values[k] = if self.col_idx[k] == i { 1.0 } else { 0.0 };
                }
                rhs[i] = g;
            }
        }
        out
    }

    /// Submatrix on the rows and columns listed in `keep` (ascending).
    pub fn restrict(&self, keep: &[usize]) -> CsrMatrix {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for &i in keep {
            for (j, v) in self.row(i) {
                if map[j] != usize::MAX {
                    col_idx.push(map[j]);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { n: keep.len(), row_ptr, col_idx, values }
    }
}
