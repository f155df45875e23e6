//! Typed neighborhood systems: per-view families of sparse adjacency
//! matrices `{W^c}` that feed the context regularizer.
//!
//! Two kinds are provided: an isotropic k-nearest-neighbor graph (one type)
//! and the eight-typed neighborhood of a regular grid, where each relative
//! position (top-left, left, ... anticlockwise) gets its own matrix.

use nalgebra::DMatrix;

use crate::error::{AaccaError, Result};

/// One sparse nonnegative adjacency matrix, stored as per-row lists of
/// `(column, weight)` with an all-zero diagonal.
#[derive(Debug, Clone)]
pub struct SparseAdjacency {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseAdjacency {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                m[(i, j)] = w;
            }
        }
        m
    }

    /// `X * W` for `X` of shape `d x n`.
    pub fn left_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let (d, n) = (x.nrows(), x.ncols());
        let mut out = DMatrix::zeros(d, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                for a in 0..d {
                    out[(a, j)] += w * x[(a, i)];
                }
            }
        }
        out
    }

    /// `X * W'` for `X` of shape `d x n`.
    pub fn left_mul_transpose(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let (d, n) = (x.nrows(), x.ncols());
        let mut out = DMatrix::zeros(d, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                for a in 0..d {
                    out[(a, i)] += w * x[(a, j)];
                }
            }
        }
        out
    }
}

/// How a context system was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextKind {
    IsotropicKnn,
    GridTyped8,
}

/// A family of `C >= 1` typed adjacency matrices over `n` samples.
#[derive(Debug, Clone)]
pub struct ContextSystem {
    w_list: Vec<SparseAdjacency>,
    kind: ContextKind,
}

impl ContextSystem {
    pub fn c_count(&self) -> usize {
        self.w_list.len()
    }

    pub fn n(&self) -> usize {
        self.w_list[0].n()
    }

    pub fn kind(&self) -> ContextKind {
        self.kind
    }

    pub fn matrix(&self, c: usize) -> &SparseAdjacency {
        &self.w_list[c]
    }

    pub fn matrices(&self) -> &[SparseAdjacency] {
        &self.w_list
    }

    /// An empty system (no neighborhoods, regularizer contributes nothing).
    pub fn empty(n: usize) -> ContextSystem {
        ContextSystem {
            w_list: vec![SparseAdjacency {
                rows: vec![Vec::new(); n],
            }],
            kind: ContextKind::IsotropicKnn,
        }
    }

    /// Restricts every matrix to the given sample subset, renumbering indices
    /// to subset positions. Weights are kept as stored; rows that lose
    /// neighbors simply become sparser.
    pub fn restrict(&self, indices: &[usize]) -> ContextSystem {
        let mut pos = vec![usize::MAX; self.n()];
        for (p, &i) in indices.iter().enumerate() {
            pos[i] = p;
        }
        let w_list = self
            .w_list
            .iter()
            .map(|w| {
                let rows = indices
                    .iter()
                    .map(|&i| {
                        w.row(i)
                            .iter()
                            .filter_map(|&(j, wt)| {
                                (pos[j] != usize::MAX).then_some((pos[j], wt))
                            })
                            .collect()
                    })
                    .collect();
                SparseAdjacency { rows }
            })
            .collect();
        ContextSystem {
            w_list,
            kind: self.kind,
        }
    }
}

/// Isotropic k-nearest-neighbor system (`C = 1`): `W_ij = 1/k` when `j` is
/// among the `k` Euclidean-nearest neighbors of `i`, distance ties broken by
/// lowest index. `coords` is `2 x n`.
pub fn build_isotropic_knn(coords: &DMatrix<f64>, k: usize) -> Result<ContextSystem> {
    let n = coords.ncols();
    if coords.nrows() != 2 {
        return Err(AaccaError::shape("2 x n coordinates", format!("{} rows", coords.nrows())));
    }
    if k < 1 || n <= k {
        return Err(AaccaError::InsufficientPoints { n, k });
    }
    let weight = 1.0 / k as f64;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let ci = coords.column(i);
        let mut dists: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| ((coords.column(j) - ci).norm_squared(), j))
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let mut row: Vec<(usize, f64)> = dists.iter().take(k).map(|&(_, j)| (j, weight)).collect();
        row.sort_by_key(|&(j, _)| j);
        rows.push(row);
    }
    Ok(ContextSystem {
        w_list: vec![SparseAdjacency { rows }],
        kind: ContextKind::IsotropicKnn,
    })
}

/// Relative offsets of the eight grid neighbor types, anticlockwise from
/// top-left: top-left, left, bottom-left, bottom, bottom-right, right,
/// top-right, top. Row index grows downward.
const GRID_OFFSETS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
];

/// Eight-typed neighborhood of a `rows x cols` grid in row-major order:
/// `W^c_ij = 1` iff cell `j` sits at the type-`c` offset from cell `i`.
/// Border cells simply lack some neighbors.
pub fn build_grid_typed_8(rows: usize, cols: usize) -> Result<ContextSystem> {
    if rows < 2 || cols < 2 {
        return Err(AaccaError::DegenerateGrid { rows, cols });
    }
    let n = rows * cols;
    let mut w_list = Vec::with_capacity(8);
    for &(dr, dc) in GRID_OFFSETS.iter() {
        let mut adj_rows = vec![Vec::new(); n];
        for r in 0..rows {
            for c in 0..cols {
                let nr = r as isize + dr;
                let nc = c as isize + dc;
                if nr < 0 || nc < 0 || nr >= rows as isize || nc >= cols as isize {
                    continue;
                }
                let i = r * cols + c;
                let j = nr as usize * cols + nc as usize;
                adj_rows[i].push((j, 1.0));
            }
        }
        w_list.push(SparseAdjacency { rows: adj_rows });
    }
    Ok(ContextSystem {
        w_list,
        kind: ContextKind::GridTyped8,
    })
}
