//! Symmetric sparse matrices in compressed row storage.

use std::io::Write;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Accumulates `(row, col, value)` contributions; duplicates are summed.
#[derive(Debug, Clone)]
pub struct TripletBuilder<T> {
    dim: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> TripletBuilder<T> {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn with_capacity(dim: usize, capacity: usize) -> Self {
        Self { dim, entries: Vec::with_capacity(capacity) }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.dim && col < self.dim);
        self.entries.push((row, col, value));
    }

    /// Adds a dense symmetric element block scattered to `dofs`.
    pub fn add_block<const N: usize>(&mut self, dofs: &[usize; N], block: &[[T; N]; N]) {
        for (a, &i) in dofs.iter().enumerate() {
            for (b, &j) in dofs.iter().enumerate() {
                self.add(i, j, block[a][b]);
            }
        }
    }

    /// Builds the matrix. The caller is responsible for adding symmetric contributions.
    pub fn build(mut self) -> SparseSymmetric<T> {
        self.entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.entries.len());
        let mut values: Vec<T> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                cols.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSymmetric { dim: self.dim, row_ptr, cols, values, constrained: false }
    }
}

/// Symmetric matrix with both triangles stored in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<T>,
    constrained: bool,
}

impl<T: Real> SparseSymmetric<T> {
    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![T::one(); dim])
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let mut b = TripletBuilder::new(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            b.add(i, i, d);
        }
        b.build()
    }

    /// Symmetric tridiagonal matrix from its diagonal and off-diagonal.
    pub fn tridiagonal(diag: &[T], off: &[T]) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        let mut b = TripletBuilder::new(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            b.add(i, i, d);
        }
        for (i, &o) in off.iter().enumerate() {
            b.add(i, i + 1, o);
            b.add(i + 1, i, o);
        }
        b.build()
    }

    /// Dense symmetric input; exact zeros are not stored.
    pub fn from_dense(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut b = TripletBuilder::new(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != T::zero() {
                    b.add(i, j, v);
                }
            }
        }
        b.build()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// True once essential constraints have been eliminated.
    pub fn is_constrained(&self) -> bool {
        self.constrained
    }

    pub(crate) fn mark_constrained(mut self) -> Self {
        self.constrained = true;
        self
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => T::zero(),
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `|A| |x|`, the entrywise-absolute product used for rounding-error bounds.
    pub fn abs_mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.dim).map(|i| self.row(i).map(|(j, v)| v.abs() * x[j].abs()).sum()).collect()
    }

    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        (0..self.dim).map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<T>()).sum()
    }

    pub fn quadratic_form(&self, x: &[T]) -> T {
        self.bilinear(x, x)
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn total_sum(&self) -> T {
        self.values.iter().copied().sum()
    }

    pub fn diagonal_entries(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Largest `|A_ij − A_ji|` over stored entries.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `a·self + b·other` on the union sparsity pattern.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Config(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        let mut t = TripletBuilder::with_capacity(self.dim, self.nnz() + other.nnz());
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                t.add(i, j, a * v);
            }
            for (j, v) in other.row(i) {
                t.add(i, j, b * v);
            }
        }
        let mut m = t.build();
        m.constrained = self.constrained || other.constrained;
        Ok(m)
    }

    /// Principal submatrix on the ordered index set `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.dim];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut t = TripletBuilder::new(keep.len());
        for (new_i, &old_i) in keep.iter().enumerate() {
            for (j, v) in self.row(old_i) {
                if map[j] != usize::MAX {
                    t.add(new_i, map[j], v);
                }
            }
        }
        let mut m = t.build();
        m.constrained = self.constrained;
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.dim]; self.dim];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    /// Upper-triangle entries `(row, col, value)` with `row ≤ col`.
    pub fn upper_triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).filter(move |&(j, _)| j >= i).map(move |(j, v)| (i, j, v)))
    }

    /// Coordinate text export of the upper triangle: `row col value` per line, 0-based.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "% symmetric {} {} {}", self.dim, self.dim, self.upper_triplets().count())?;
        for (i, j, v) in self.upper_triplets() {
            writeln!(out, "{i} {j} {:.17e}", v.to_f64_lossy())?;
        }
        Ok(())
    }
}

/// Euclidean norm.
pub(crate) fn norm2<T: Real>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).sum::<T>().sqrt()
}
