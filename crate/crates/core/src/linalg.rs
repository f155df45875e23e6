//! Dense linear-algebra kernels shared by the solver modules: column
//! centering, covariance products, ridge regularization and the
//! symmetric-definite generalized eigensolver.
//!
//! Conventions: data matrices are `dim x count` (one sample per column),
//! covariances are `1/n`-scaled, and all kernels are pure functions.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{AaccaError, Result};

/// Column-centered view data together with the removed per-row means.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: DMatrix<f64>,
    col_means: DVector<f64>,
}

impl FeatureMatrix {
    /// Feature dimension (rows).
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Sample count (columns).
    pub fn count(&self) -> usize {
        self.data.ncols()
    }

    /// Centered data, `dim x count`.
    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Per-row means removed from the raw input.
    pub fn col_means(&self) -> &DVector<f64> {
        &self.col_means
    }

    /// Wraps data that is already centered (or whose means are fixed and
    /// known, e.g. zero). Unlike [`center_columns`] this accepts a single
    /// sample, since no means have to be estimated.
    pub fn from_centered(data: DMatrix<f64>) -> Result<FeatureMatrix> {
        if data.nrows() < 1 || data.ncols() < 1 {
            return Err(AaccaError::DegenerateInput("empty matrix".into()));
        }
        let col_means = DVector::zeros(data.nrows());
        Ok(FeatureMatrix { data, col_means })
    }

    /// Centers a raw vector the same way the training data was centered.
    pub fn center_vector(&self, raw: &DVector<f64>) -> Result<DVector<f64>> {
        if raw.len() != self.dim() {
            return Err(AaccaError::shape(
                format!("vector of length {}", self.dim()),
                format!("length {}", raw.len()),
            ));
        }
        Ok(raw - &self.col_means)
    }
}

/// Removes the per-row mean from `raw` (`dim x count`), keeping the means so
/// that held-out data can be centered identically.
pub fn center_columns(raw: &DMatrix<f64>) -> Result<FeatureMatrix> {
    if raw.ncols() < 2 {
        return Err(AaccaError::DegenerateInput(format!(
            "need at least 2 samples to center, got {}",
            raw.ncols()
        )));
    }
    if raw.nrows() < 1 {
        return Err(AaccaError::DegenerateInput("empty feature dimension".into()));
    }
    let n = raw.ncols() as f64;
    let mut means = DVector::zeros(raw.nrows());
    for (i, row) in raw.row_iter().enumerate() {
        means[i] = row.sum() / n;
    }
    let mut data = raw.clone();
    for mut col in data.column_iter_mut() {
        col -= &means;
    }
    Ok(FeatureMatrix {
        data,
        col_means: means,
    })
}

/// Cross-covariance `(1/n) X Y'` of two centered views with matched sample
/// counts.
pub fn cross_covariance(x: &FeatureMatrix, y: &FeatureMatrix) -> Result<DMatrix<f64>> {
    if x.count() != y.count() {
        return Err(AaccaError::shape(
            format!("{} paired samples", x.count()),
            format!("{} samples", y.count()),
        ));
    }
    let n = x.count() as f64;
    Ok(x.data() * y.data().transpose() / n)
}

/// Covariance `(1/n) X X'`, symmetrized so it equals its transpose exactly.
pub fn auto_covariance(x: &FeatureMatrix) -> DMatrix<f64> {
    let n = x.count() as f64;
    let c = x.data() * x.data().transpose() / n;
    symmetrize(&c)
}

/// Exact symmetrization `(M + M') / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Adds `eps = eps_rel * trace(C) / dim` to the diagonal. Returns the shifted
/// matrix together with the ridge actually added.
pub fn ridge_regularize(c: &DMatrix<f64>, eps_rel: f64) -> (DMatrix<f64>, f64) {
    let dim = c.nrows().max(1) as f64;
    let ridge = eps_rel * c.trace() / dim;
    let mut out = c.clone();
    for i in 0..c.nrows() {
        out[(i, i)] += ridge;
    }
    (out, ridge)
}

/// Ridged intra-view covariances of the two views. Each matrix carries its
/// own trace-relative ridge so that rescaling one view rescales its ridge
/// consistently and leaves the fitted latent codes unchanged.
#[derive(Debug, Clone)]
pub struct CovarianceBundle {
    pub c_rr: DMatrix<f64>,
    pub c_tt: DMatrix<f64>,
    /// Ridge added to the reference-view diagonal.
    pub ridge_r: f64,
    /// Ridge added to the test-view diagonal.
    pub ridge_t: f64,
}

impl CovarianceBundle {
    pub fn new(u: &FeatureMatrix, v: &FeatureMatrix, eps_rel: f64) -> Self {
        let (c_rr, ridge_r) = ridge_regularize(&auto_covariance(u), eps_rel);
        let (c_tt, ridge_t) = ridge_regularize(&auto_covariance(v), eps_rel);
        CovarianceBundle {
            c_rr,
            c_tt,
            ridge_r,
            ridge_t,
        }
    }

    /// The larger of the two ridges, recorded on fitted models.
    pub fn ridge_used(&self) -> f64 {
        self.ridge_r.max(self.ridge_t)
    }
}

/// Top eigenpairs of `A v = lambda B v` for symmetric PSD `A` and SPD `B`.
///
/// Eigenvalues are sorted descending and clamped at zero; eigenvectors are
/// B-orthonormal with a deterministic sign (largest-magnitude coordinate
/// positive, ties broken by lowest index).
#[derive(Debug, Clone)]
pub struct GeneralizedEigSolution {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

/// Relative asymmetry tolerance accepted by the generalized eigensolver.
const SYMMETRY_TOL: f64 = 1e-8;

/// Solves the symmetric-definite pencil via `B = L L'`: the standard problem
/// `(L^-1 A L^-T) w = lambda w` is solved and vectors are mapped back as
/// `v = L^-T w`, which makes `V' B V = I` hold by construction.
pub fn solve_gen_sym_eig(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    k: usize,
) -> Result<GeneralizedEigSolution> {
    let d = a.nrows();
    if a.ncols() != d || b.nrows() != d || b.ncols() != d {
        return Err(AaccaError::shape(
            format!("square {d}x{d} pencil"),
            format!("A {}x{}, B {}x{}", a.nrows(), a.ncols(), b.nrows(), b.ncols()),
        ));
    }
    if k == 0 || k > d {
        return Err(AaccaError::Config(format!(
            "requested {k} eigenpairs from a {d}-dimensional pencil"
        )));
    }
    let scale = a.amax().max(1.0);
    let asym = (a - a.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(AaccaError::DegenerateInput(format!(
            "matrix A is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let a_sym = symmetrize(a);

    let chol = Cholesky::new(b.clone()).ok_or(AaccaError::NotPositiveDefinite)?;
    let l = chol.l();
    // M = L^-1 A L^-T, computed with two triangular solves.
    let y = l
        .solve_lower_triangular(&a_sym)
        .ok_or(AaccaError::NotPositiveDefinite)?;
    let m = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(AaccaError::NotPositiveDefinite)?
        .transpose();
    let m = symmetrize(&m);

    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .expect("eigenvalues are finite")
    });

    let lt = l.transpose();
    let mut values = DVector::zeros(k);
    let mut vectors = DMatrix::zeros(d, k);
    for (out_idx, &src_idx) in order.iter().take(k).enumerate() {
        values[out_idx] = eig.eigenvalues[src_idx].max(0.0);
        let w = eig.eigenvectors.column(src_idx).into_owned();
        let v = lt
            .solve_upper_triangular(&w)
            .ok_or(AaccaError::NotPositiveDefinite)?;
        vectors.set_column(out_idx, &v);
    }
    fix_signs(&mut vectors);
    Ok(GeneralizedEigSolution {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

/// Makes the largest-magnitude coordinate of each column positive; ties are
/// broken by the lowest index.
pub fn fix_signs(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let mut lead = 0;
        let mut best = f64::NEG_INFINITY;
        for (i, &x) in col.iter().enumerate() {
            if x.abs() > best {
                best = x.abs();
                lead = i;
            }
        }
        if col[lead] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Sum of absolute values of all entries.
pub fn entrywise_l1(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x.abs()).sum()
}

/// Cached Cholesky factor of an SPD matrix, reused for repeated solves.
pub struct SpdSolver {
    chol: Cholesky<f64, Dyn>,
}

impl SpdSolver {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        Cholesky::new(m.clone())
            .map(|chol| SpdSolver { chol })
            .ok_or(AaccaError::NotPositiveDefinite)
    }

    /// Solves `M X = rhs`.
    pub fn solve(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(rhs)
    }

    pub fn solve_vector(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(rhs)
    }
}
