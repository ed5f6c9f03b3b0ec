//! Sparse Cholesky factorization `P A Pᵀ = L Lᵀ` with a minimum-degree ordering.
//!
//! The ordering eliminates vertices of the explicit elimination graph by
//! smallest current degree (ties by index, so it is deterministic). The
//! numeric phase is the up-looking algorithm: row `k` of `L` is the
//! elimination-tree reach of the nonzeros in column `k` of the permuted
//! upper triangle.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::SparseSymmetric;

/// Elimination order: `perm[k]` is the original index eliminated at step `k`.
pub fn minimum_degree_order<T: Real>(a: &SparseSymmetric<T>) -> Vec<usize> {
    let n = a.dim();
    let mut adj: Vec<Vec<usize>> = (0..n)
        .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
        .collect();
    let mut alive = vec![true; n];
    let mut marker = vec![usize::MAX; n];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        adj.iter().enumerate().map(|(i, nb)| Reverse((nb.len(), i))).collect();
    let mut perm = Vec::with_capacity(n);

    while let Some(Reverse((deg, v))) = heap.pop() {
        if !alive[v] || deg != adj[v].len() {
            continue;
        }
        alive[v] = false;
        perm.push(v);
        let nbrs = std::mem::take(&mut adj[v]);
        for &u in &nbrs {
            // rebuild adj[u] = (adj[u] ∪ nbrs) \ {u, v}
            let stamp = u;
            marker[u] = stamp;
            marker[v] = stamp;
            let mut merged = Vec::with_capacity(adj[u].len() + nbrs.len());
            for &w in adj[u].iter().chain(nbrs.iter()) {
                if marker[w] != stamp {
                    marker[w] = stamp;
                    merged.push(w);
                }
            }
            // marker values are reused across u; reset the ones set for this u
            for &w in &merged {
                marker[w] = usize::MAX;
            }
            marker[u] = usize::MAX;
            marker[v] = usize::MAX;
            adj[u] = merged;
            heap.push(Reverse((adj[u].len(), u)));
        }
    }
    debug_assert_eq!(perm.len(), n);
    perm
}

/// Lower-triangular factor stored by columns with the diagonal first.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> Cholesky<T> {
    /// Factors a symmetric positive definite matrix.
    pub fn factor(a: &SparseSymmetric<T>) -> Result<Self> {
        let perm = minimum_degree_order(a);
        Self::factor_with_order(a, perm)
    }

    pub fn factor_with_order(a: &SparseSymmetric<T>, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        let mut pinv = vec![0usize; n];
        for (k, &old) in perm.iter().enumerate() {
            pinv[old] = k;
        }
        // upper triangle of the permuted matrix, by columns
        let mut upper: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for old_i in 0..n {
            let i = pinv[old_i];
            for (old_j, v) in a.row(old_i) {
                let j = pinv[old_j];
                if i <= j {
                    upper[j].push((i, v));
                }
            }
        }

        let parent = elimination_tree(&upper);
        let mut stamp = vec![usize::MAX; n];
        let mut reach = Vec::new();

        // symbolic pass: column counts of L
        let mut counts = vec![1usize; n];
        for k in 0..n {
            ereach(&upper[k], k, &parent, &mut stamp, &mut reach);
            for &i in &reach {
                counts[i] += 1;
            }
        }
        let mut col_ptr = vec![0usize; n + 1];
        for k in 0..n {
            col_ptr[k + 1] = col_ptr[k] + counts[k];
        }
        let nnz = col_ptr[n];
        let mut rows = vec![0usize; nnz];
        let mut values = vec![T::zero(); nnz];
        let mut next = col_ptr[..n].to_vec();
        let mut x = vec![T::zero(); n];
        stamp.iter_mut().for_each(|s| *s = usize::MAX);

        for k in 0..n {
            ereach(&upper[k], k, &parent, &mut stamp, &mut reach);
            for &(i, v) in &upper[k] {
                x[i] += v;
            }
            let mut d = x[k];
            x[k] = T::zero();
            for &i in &reach {
                let lki = x[i] / values[col_ptr[i]];
                x[i] = T::zero();
                for p in col_ptr[i] + 1..next[i] {
                    x[rows[p]] -= values[p] * lki;
                }
                d -= lki * lki;
                let p = next[i];
                next[i] += 1;
                rows[p] = k;
                values[p] = lki;
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::Factorization { pivot: k, value: d.to_f64_lossy() });
            }
            let p = next[k];
            next[k] += 1;
            rows[p] = k;
            values[p] = d.sqrt();
        }
        Ok(Self { n, perm, col_ptr, rows, values })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries of `L`.
    pub fn factor_nnz(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        self.solve_permuted_in_place(&mut x);
        let mut out = vec![T::zero(); self.n];
        for (k, &old) in self.perm.iter().enumerate() {
            out[old] = x[k];
        }
        out
    }

    fn solve_permuted_in_place(&self, x: &mut [T]) {
        for j in 0..self.n {
            let start = self.col_ptr[j];
            x[j] /= self.values[start];
            let xj = x[j];
            for p in start + 1..self.col_ptr[j + 1] {
                x[self.rows[p]] -= self.values[p] * xj;
            }
        }
        for j in (0..self.n).rev() {
            let start = self.col_ptr[j];
            let mut s = x[j];
            for p in start + 1..self.col_ptr[j + 1] {
                s -= self.values[p] * x[self.rows[p]];
            }
            x[j] = s / self.values[start];
        }
    }
}

fn elimination_tree<T>(upper: &[Vec<(usize, T)>]) -> Vec<usize> {
    let n = upper.len();
    let mut parent = vec![usize::MAX; n];
    let mut ancestor = vec![usize::MAX; n];
    for k in 0..n {
        for &(i0, _) in &upper[k] {
            let mut i = i0;
            while i != usize::MAX && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == usize::MAX {
                    parent[i] = k;
                    break;
                }
                i = next;
            }
        }
    }
    parent
}

/// Nonzero pattern of row `k` of `L` (excluding the diagonal), ascending.
fn ereach<T>(
    column: &[(usize, T)],
    k: usize,
    parent: &[usize],
    stamp: &mut [usize],
    out: &mut Vec<usize>,
) {
    out.clear();
    stamp[k] = k;
    for &(i0, _) in column {
        let mut i = i0;
        while i < k && stamp[i] != k {
            stamp[i] = k;
            out.push(i);
            i = parent[i];
        }
    }
    // parents carry larger indices, so ascending order is topological
    out.sort_unstable();
}
