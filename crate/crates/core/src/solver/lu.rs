//! Left-looking sparse LU with threshold partial pivoting.
//!
//! Column `k` of `P A Q = L U` is computed by a sparse triangular solve with
//! the columns of `L` found so far; the nonzero pattern of that solve is the
//! reach of the column's pattern in the graph of `L`, obtained by depth-first
//! search. Rows are chosen by partial pivoting with a preference for the
//! diagonal entry when it is within `threshold` of the column maximum.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    /// Unit lower factor by columns; the unit diagonal is stored first.
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    /// Upper factor by columns; the diagonal is stored last.
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
    /// Original row → pivot position.
    pinv: Vec<usize>,
    /// Pivot position → original column.
    q: Vec<usize>,
}

struct Csc<'a> {
    ptr: &'a [usize],
    idx: &'a [usize],
    val: &'a [f64],
}

impl SparseLu {
    /// Factors `a` eliminating columns in the order `q`.
    pub fn factor(a: &CsrMatrix, q: &[usize], threshold: f64) -> Result<Self> {
        let n = a.nrows;
        if a.ncols != n || q.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix and a full column order ({}x{}, order {})",
                a.nrows,
                a.ncols,
                q.len()
            )));
        }
        // column access through the transpose's row storage
        let at = a.transpose();
        let col = Csc { ptr: &at.indptr, idx: &at.indices, val: &at.values };
        let anorm = a.max_abs();

        let mut lu = Self {
            n,
            l_ptr: Vec::with_capacity(n + 1),
            l_idx: Vec::with_capacity(4 * a.nnz()),
            l_val: Vec::with_capacity(4 * a.nnz()),
            u_ptr: Vec::with_capacity(n + 1),
            u_idx: Vec::with_capacity(4 * a.nnz()),
            u_val: Vec::with_capacity(4 * a.nnz()),
            pinv: vec![NONE; n],
            q: q.to_vec(),
        };
        let mut x = vec![0.0f64; n];
        let mut mark = vec![NONE; n];
        let mut reach: Vec<usize> = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = Vec::new();

        for (k, &c) in q.iter().enumerate() {
            lu.l_ptr.push(lu.l_idx.len());
            lu.u_ptr.push(lu.u_idx.len());

            // symbolic: reach of A(:, c) in the graph of L, in postorder
            reach.clear();
            for &r in &col.idx[col.ptr[c]..col.ptr[c + 1]] {
                if mark[r] != k {
                    lu.dfs(r, k, &mut mark, &mut stack, &mut reach);
                }
            }
            for &i in &reach {
                x[i] = 0.0;
            }
            for p in col.ptr[c]..col.ptr[c + 1] {
                x[col.idx[p]] += col.val[p];
            }
            // numeric: reverse postorder is a topological order
            for &j in reach.iter().rev() {
                let jj = lu.pinv[j];
                if jj == NONE {
                    continue;
                }
                let xj = x[j];
                if xj != 0.0 {
                    for p in lu.l_ptr[jj] + 1..lu.l_ptr[jj + 1] {
                        x[lu.l_idx[p]] -= lu.l_val[p] * xj;
                    }
                }
            }

            let mut pivot_row = NONE;
            let mut largest = -1.0f64;
            for &i in reach.iter().rev() {
                if lu.pinv[i] == NONE {
                    let v = x[i].abs();
                    if v > largest {
                        largest = v;
                        pivot_row = i;
                    }
                } else {
                    lu.u_idx.push(lu.pinv[i]);
                    lu.u_val.push(x[i]);
                }
            }
            if pivot_row == NONE || !largest.is_finite() || largest <= 1e-14 * anorm {
                return Err(Error::SingularPivot { column: k, magnitude: largest.max(0.0) });
            }
            if lu.pinv[c] == NONE && mark[c] == k && x[c].abs() >= threshold * largest {
                pivot_row = c;
            }
            let pivot = x[pivot_row];
            lu.u_idx.push(k);
            lu.u_val.push(pivot);
            lu.pinv[pivot_row] = k;
            lu.l_idx.push(pivot_row);
            lu.l_val.push(1.0);
            for &i in &reach {
                if lu.pinv[i] == NONE {
                    lu.l_idx.push(i);
                    lu.l_val.push(x[i] / pivot);
                }
                x[i] = 0.0;
            }
        }
        lu.l_ptr.push(lu.l_idx.len());
        lu.u_ptr.push(lu.u_idx.len());
        for i in lu.l_idx.iter_mut() {
            *i = lu.pinv[*i];
        }
        Ok(lu)
    }

    /// Iterative depth-first search from row `start` through columns of `L`.
    fn dfs(
        &self,
        start: usize,
        stamp: usize,
        mark: &mut [usize],
        stack: &mut Vec<(usize, usize)>,
        reach: &mut Vec<usize>,
    ) {
        let first = |j: usize| {
            let jj = self.pinv[j];
            if jj == NONE { (0, 0) } else { (self.l_ptr[jj] + 1, self.l_ptr[jj + 1]) }
        };
        mark[start] = stamp;
        stack.push((start, first(start).0));
        while let Some(&mut (j, ref mut p)) = stack.last_mut() {
            let end = first(j).1;
            let mut descended = None;
            while *p < end {
                let i = self.l_idx[*p];
                *p += 1;
                if mark[i] != stamp {
                    descended = Some(i);
                    break;
                }
            }
            match descended {
                Some(i) => {
                    mark[i] = stamp;
                    stack.push((i, first(i).0));
                }
                None => {
                    stack.pop();
                    reach.push(j);
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` and `U` (both diagonals included).
    pub fn nnz(&self) -> usize {
        self.l_val.len() + self.u_val.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut x = vec![0.0; self.n];
        for (i, &bi) in b.iter().enumerate() {
            x[self.pinv[i]] = bi;
        }
        for j in 0..self.n {
            let xj = x[j];
            if xj != 0.0 {
                for p in self.l_ptr[j] + 1..self.l_ptr[j + 1] {
                    x[self.l_idx[p]] -= self.l_val[p] * xj;
                }
            }
        }
        for j in (0..self.n).rev() {
            let last = self.u_ptr[j + 1] - 1;
            x[j] /= self.u_val[last];
            let xj = x[j];
            if xj != 0.0 {
                for p in self.u_ptr[j]..last {
                    x[self.u_idx[p]] -= self.u_val[p] * xj;
                }
            }
        }
        let mut out = vec![0.0; self.n];
        for (k, &c) in self.q.iter().enumerate() {
            out[c] = x[k];
        }
        out
    }
}
