//! Cross-affinity matrix construction: the matrix `D` whose entry `(i, j)`
//! scores how likely reference sample `i` aligns with test sample `j`.
//!
//! Convention: rows of `D` index reference samples (`u`), columns index test
//! samples (`v`). Every builder produces entries in `[-1, 1]`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{AaccaError, Result};
use crate::linalg::FeatureMatrix;

/// Class of a ground-truth pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    NoChange,
    Change,
}

/// Per-index label used by the strict diagonal construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleLabel {
    NoChange,
    Change,
    Unlabeled,
}

/// RBF similarity `exp(-||u - v||^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfKernel {
    sigma: f64,
}

impl RbfKernel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(AaccaError::Config(format!(
                "RBF scale must be positive and finite, got {sigma}"
            )));
        }
        Ok(RbfKernel { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Similarity of two equal-length vectors, in `(0, 1]`.
pub fn rbf(u: &DVector<f64>, v: &DVector<f64>, kernel: &RbfKernel) -> Result<f64> {
    if u.len() != v.len() {
        return Err(AaccaError::shape(
            format!("vectors of equal length {}", u.len()),
            format!("length {}", v.len()),
        ));
    }
    let d2 = (u - v).norm_squared();
    Ok((-d2 / (2.0 * kernel.sigma * kernel.sigma)).exp())
}

fn quantile_linear(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

fn column_distance(x: &FeatureMatrix, i: usize, y: &FeatureMatrix, j: usize) -> f64 {
    let a = x.data().column(i);
    let b = y.data().column(j);
    (a - b).norm()
}

/// Sets the kernel scale to the `q`-quantile of cross-pair Euclidean
/// distances. Exhaustive when the pair count fits in `max_pairs`, otherwise a
/// seeded subsample of `max_pairs` pairs (drawn with replacement). When `x`
/// and `y` are the same collection the exact-zero self pairs `(i, i)` are
/// excluded from the pool.
pub fn rbf_scale_from_quantile(
    x: &FeatureMatrix,
    y: &FeatureMatrix,
    q: f64,
    max_pairs: usize,
    seed: u64,
) -> Result<RbfKernel> {
    if !(q > 0.0 && q < 1.0) {
        return Err(AaccaError::Config(format!("quantile must be in (0,1), got {q}")));
    }
    if max_pairs == 0 {
        return Err(AaccaError::Config("max_pairs must be positive".into()));
    }
    let (n_x, n_y) = (x.count(), y.count());
    if n_x == 0 || n_y == 0 {
        return Err(AaccaError::DegenerateInput("empty sample set".into()));
    }
    let same = std::ptr::eq(x, y) || (x.dim() == y.dim() && x.data() == y.data());
    if same && n_x < 2 {
        return Err(AaccaError::DegenerateInput(
            "a single self-paired sample has no usable distances".into(),
        ));
    }

    let total = n_x * n_y - if same { n_x } else { 0 };
    let mut dists = Vec::new();
    if total <= max_pairs {
        dists.reserve(total);
        for i in 0..n_x {
            for j in 0..n_y {
                if same && i == j {
                    continue;
                }
                dists.push(column_distance(x, i, y, j));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        dists.reserve(max_pairs);
        while dists.len() < max_pairs {
            let i = rng.random_range(0..n_x);
            let j = rng.random_range(0..n_y);
            if same && i == j {
                continue;
            }
            dists.push(column_distance(x, i, y, j));
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sigma = quantile_linear(&dists, q);
    if sigma <= 0.0 {
        return Err(AaccaError::DegenerateScale);
    }
    RbfKernel::new(sigma)
}

/// Pairing configuration family the matrix was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingMode {
    Strict,
    Relaxed,
    DenseCrossSim,
}

#[derive(Debug, Clone)]
enum Storage {
    Dense(DMatrix<f64>),
    /// Entries sorted by (row, col).
    Sparse(Vec<(usize, usize, f64)>),
}

/// Cross-affinity matrix, `n_r x n_t`, entries in `[-1, 1]`. Stored sparse
/// when fewer than 10% of entries are nonzero.
#[derive(Debug, Clone)]
pub struct PairingMatrix {
    storage: Storage,
    n_r: usize,
    n_t: usize,
    mode: PairingMode,
    includes_unlabeled: bool,
}

impl PairingMatrix {
    fn from_entries(
        n_r: usize,
        n_t: usize,
        entries: Vec<(usize, usize, f64)>,
        mode: PairingMode,
        includes_unlabeled: bool,
    ) -> Self {
        let dense_cutoff = (n_r * n_t) as f64 * 0.1;
        let storage = if (entries.len() as f64) < dense_cutoff {
            Storage::Sparse(entries)
        } else {
            let mut m = DMatrix::zeros(n_r, n_t);
            for &(i, j, v) in &entries {
                m[(i, j)] = v;
            }
            Storage::Dense(m)
        };
        PairingMatrix {
            storage,
            n_r,
            n_t,
            mode,
            includes_unlabeled,
        }
    }

    /// Wraps an externally assembled affinity matrix. Entries must lie in
    /// `[-1, 1]`.
    pub fn from_dense(m: DMatrix<f64>, mode: PairingMode, includes_unlabeled: bool) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(AaccaError::DegenerateInput("empty pairing matrix".into()));
        }
        for &v in m.iter() {
            if !(-1.0..=1.0).contains(&v) {
                return Err(AaccaError::Config(format!(
                    "pairing entries must lie in [-1, 1], found {v}"
                )));
            }
        }
        let (n_r, n_t) = m.shape();
        Ok(PairingMatrix {
            storage: Storage::Dense(m),
            n_r,
            n_t,
            mode,
            includes_unlabeled,
        })
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn mode(&self) -> PairingMode {
        self.mode
    }

    pub fn includes_unlabeled(&self) -> bool {
        self.includes_unlabeled
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m[(i, j)],
            Storage::Sparse(e) => e
                .binary_search_by(|probe| (probe.0, probe.1).cmp(&(i, j)))
                .map(|idx| e[idx].2)
                .unwrap_or(0.0),
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.iter().filter(|&&v| v != 0.0).count(),
            Storage::Sparse(e) => e.len(),
        }
    }

    /// Applies `f(i, j, value)` to every stored nonzero.
    pub fn for_each_nonzero(&self, mut f: impl FnMut(usize, usize, f64)) {
        match &self.storage {
            Storage::Dense(m) => {
                for j in 0..self.n_t {
                    for i in 0..self.n_r {
                        let v = m[(i, j)];
                        if v != 0.0 {
                            f(i, j, v);
                        }
                    }
                }
            }
            Storage::Sparse(e) => {
                for &(i, j, v) in e {
                    f(i, j, v);
                }
            }
        }
    }

    /// Computes `sum_{i,j} D_ij * v_j * u_i'` (a `d_v x d_u` matrix), the
    /// affinity-weighted cross product of the two views.
    pub fn cross_outer_sum(&self, u_data: &DMatrix<f64>, v_data: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if u_data.ncols() != self.n_r || v_data.ncols() != self.n_t {
            return Err(AaccaError::shape(
                format!("views with {} and {} samples", self.n_r, self.n_t),
                format!("{} and {} samples", u_data.ncols(), v_data.ncols()),
            ));
        }
        match &self.storage {
            Storage::Dense(d) => Ok(v_data * (d.transpose() * u_data.transpose())),
            Storage::Sparse(entries) => {
                // T = D' U' accumulated row-wise, then V T.
                let d_u = u_data.nrows();
                let mut t = DMatrix::zeros(self.n_t, d_u);
                for &(i, j, val) in entries {
                    for a in 0..d_u {
                        t[(j, a)] += val * u_data[(a, i)];
                    }
                }
                Ok(v_data * t)
            }
        }
    }

    /// Densifies, mainly for oracles and small-scale inspection.
    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(e) => {
                let mut m = DMatrix::zeros(self.n_r, self.n_t);
                for &(i, j, v) in e {
                    m[(i, j)] = v;
                }
                m
            }
        }
    }

    /// Restricts the matrix to the given reference/test index subsets,
    /// renumbering entries to the subset positions.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> PairingMatrix {
        let row_pos: BTreeMap<usize, usize> =
            rows.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let col_pos: BTreeMap<usize, usize> =
            cols.iter().enumerate().map(|(p, &j)| (j, p)).collect();
        let mut entries = Vec::new();
        self.for_each_nonzero(|i, j, v| {
            if let (Some(&pi), Some(&pj)) = (row_pos.get(&i), col_pos.get(&j)) {
                entries.push((pi, pj, v));
            }
        });
        entries.sort_by_key(|&(i, j, _)| (i, j));
        PairingMatrix::from_entries(rows.len(), cols.len(), entries, self.mode, self.includes_unlabeled)
    }
}

/// Strict diagonal pairing from per-index labels: `+1` no-change, `-1`
/// change, `0` unlabeled. Requires identity pairing (`n_r == n_t == n`).
pub fn build_strict_d(labels: &[SampleLabel], n: usize) -> Result<PairingMatrix> {
    if n == 0 {
        return Err(AaccaError::DegenerateInput("empty pairing".into()));
    }
    if labels.len() != n {
        return Err(AaccaError::shape(
            format!("{n} labels"),
            format!("{} labels", labels.len()),
        ));
    }
    let mut entries = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        let v = match label {
            SampleLabel::NoChange => 1.0,
            SampleLabel::Change => -1.0,
            SampleLabel::Unlabeled => continue,
        };
        entries.push((i, i, v));
    }
    Ok(PairingMatrix::from_entries(n, n, entries, PairingMode::Strict, false))
}

/// Relaxed RBF-weighted pairing. Labeled pairs get `kappa` (no-change) or
/// `kappa - 1` (change); with `semisup`, unlabeled pairs get `2 kappa - 1`.
/// Pair indices are `(reference, test)`.
pub fn build_relaxed_d(
    u: &FeatureMatrix,
    v: &FeatureMatrix,
    labeled_pairs: &[(usize, usize, PairClass)],
    kernel: &RbfKernel,
    semisup: bool,
    unlabeled_pairs: &[(usize, usize)],
) -> Result<PairingMatrix> {
    let (n_r, n_t) = (u.count(), v.count());
    #[derive(PartialEq, Clone, Copy)]
    enum Assigned {
        Labeled(PairClass),
        Unlabeled,
    }
    let mut seen: BTreeMap<(usize, usize), Assigned> = BTreeMap::new();
    let mut entries = Vec::new();

    let kappa = |i: usize, j: usize| -> Result<f64> {
        rbf(&u.data().column(i).into_owned(), &v.data().column(j).into_owned(), kernel)
    };

    for &(i, j, class) in labeled_pairs {
        if i >= n_r || j >= n_t {
            return Err(AaccaError::shape(
                format!("pair indices within {n_r}x{n_t}"),
                format!("({i}, {j})"),
            ));
        }
        match seen.insert((i, j), Assigned::Labeled(class)) {
            Some(prev) if prev != Assigned::Labeled(class) => {
                return Err(AaccaError::InconsistentLabel { i, j });
            }
            Some(_) => continue,
            None => {}
        }
        let k = kappa(i, j)?;
        let value = match class {
            PairClass::NoChange => k,
            PairClass::Change => k - 1.0,
        };
        entries.push((i, j, value));
    }

    let mut includes_unlabeled = false;
    if semisup {
        for &(i, j) in unlabeled_pairs {
            if i >= n_r || j >= n_t {
                return Err(AaccaError::shape(
                    format!("pair indices within {n_r}x{n_t}"),
                    format!("({i}, {j})"),
                ));
            }
            match seen.insert((i, j), Assigned::Unlabeled) {
                Some(prev) if prev != Assigned::Unlabeled => {
                    return Err(AaccaError::InconsistentLabel { i, j });
                }
                Some(_) => continue,
                None => {}
            }
            entries.push((i, j, 2.0 * kappa(i, j)? - 1.0));
            includes_unlabeled = true;
        }
    }

    entries.sort_by_key(|&(i, j, _)| (i, j));
    Ok(PairingMatrix::from_entries(
        n_r,
        n_t,
        entries,
        PairingMode::Relaxed,
        includes_unlabeled,
    ))
}

/// Fully dense cross-similarity pairing `D_ij = kappa(u_i, v_j)`.
pub fn build_dense_crosssim_d(
    u: &FeatureMatrix,
    v: &FeatureMatrix,
    kernel: &RbfKernel,
) -> Result<PairingMatrix> {
    let (n_r, n_t) = (u.count(), v.count());
    let mut m = DMatrix::zeros(n_r, n_t);
    for i in 0..n_r {
        let ui = u.data().column(i).into_owned();
        for j in 0..n_t {
            m[(i, j)] = rbf(&ui, &v.data().column(j).into_owned(), kernel)?;
        }
    }
    Ok(PairingMatrix {
        storage: Storage::Dense(m),
        n_r,
        n_t,
        mode: PairingMode::DenseCrossSim,
        includes_unlabeled: true,
    })
}

/// Overlays strict labeled entries with semi-supervised co-located entries
/// `2 kappa(u_i, v_i) - 1` on the listed unlabeled indices.
pub fn extend_strict_semisup(
    base: &PairingMatrix,
    u: &FeatureMatrix,
    v: &FeatureMatrix,
    unlabeled_indices: &[usize],
    kernel: &RbfKernel,
) -> Result<PairingMatrix> {
    if base.n_r != base.n_t {
        return Err(AaccaError::shape(
            "square strict pairing",
            format!("{}x{}", base.n_r, base.n_t),
        ));
    }
    if u.count() != base.n_r || v.count() != base.n_t {
        return Err(AaccaError::shape(
            format!("views with {} samples", base.n_r),
            format!("{} and {}", u.count(), v.count()),
        ));
    }
    let mut entries = Vec::new();
    base.for_each_nonzero(|i, j, val| entries.push((i, j, val)));
    for &i in unlabeled_indices {
        if i >= base.n_r {
            return Err(AaccaError::shape(
                format!("index within {}", base.n_r),
                format!("{i}"),
            ));
        }
        if base.get(i, i) != 0.0 {
            return Err(AaccaError::InconsistentLabel { i, j: i });
        }
        let k = rbf(
            &u.data().column(i).into_owned(),
            &v.data().column(i).into_owned(),
            kernel,
        )?;
        entries.push((i, i, 2.0 * k - 1.0));
    }
    entries.sort_by_key(|&(i, j, _)| (i, j));
    Ok(PairingMatrix::from_entries(
        base.n_r,
        base.n_t,
        entries,
        PairingMode::Strict,
        true,
    ))
}

/// Seeded sample of `count` distinct cross pairs drawn from
/// `rows x cols`, used for semi-supervised relaxed pairings.
pub fn sample_cross_pairs(
    rows: &[usize],
    cols: &[usize],
    count: usize,
    seed: u64,
) -> Vec<(usize, usize)> {
    let total = rows.len() * cols.len();
    if total == 0 {
        return Vec::new();
    }
    if count >= total {
        let mut all = Vec::with_capacity(total);
        for &i in rows {
            for &j in cols {
                all.push((i, j));
            }
        }
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = std::collections::BTreeSet::new();
    while picked.len() < count {
        let flat = rng.random_range(0..total);
        picked.insert(flat);
    }
    picked
        .into_iter()
        .map(|flat| (rows[flat / cols.len()], cols[flat % cols.len()]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::center_columns;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn feature(data: DMatrix<f64>) -> FeatureMatrix {
        center_columns(&data).unwrap()
    }

    fn from_centered(data: DMatrix<f64>) -> FeatureMatrix {
        FeatureMatrix::from_centered(data).unwrap()
    }

    fn random_features(dim: usize, n: usize, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        feature(DMatrix::from_fn(dim, n, |_, _| StandardNormal.sample(&mut rng)))
    }

    #[test]
    fn quantile_of_singleton_pair_is_the_distance() {
        let x = from_centered(DMatrix::from_column_slice(2, 1, &[0.0, 0.0]));
        let y = from_centered(DMatrix::from_column_slice(2, 1, &[3.0, 0.0]));
        for q in [0.1, 0.5, 0.9] {
            let k = rbf_scale_from_quantile(&x, &y, q, 1000, 0).unwrap();
            assert_abs_diff_eq!(k.sigma(), 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn quantile_matches_full_sort_oracle() {
        let x = random_features(3, 10, 5);
        let y = random_features(3, 10, 6);
        let k = rbf_scale_from_quantile(&x, &y, 0.1, 1_000_000, 0).unwrap();

        let mut dists = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                dists.push((x.data().column(i) - y.data().column(j)).norm());
            }
        }
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let h = 0.1 * (dists.len() - 1) as f64;
        let lo = h.floor() as usize;
        let expected = dists[lo] + (h - lo as f64) * (dists[lo + 1] - dists[lo]);
        assert_abs_diff_eq!(k.sigma(), expected, epsilon = 1e-12);
    }

    #[test]
    fn quantile_on_identical_sets_excludes_self_pairs() {
        let x = random_features(2, 8, 9);
        let y = x.clone();
        let k = rbf_scale_from_quantile(&x, &y, 0.5, 1_000_000, 0).unwrap();

        let mut dists = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                if i == j {
                    continue;
                }
                dists.push((x.data().column(i) - x.data().column(j)).norm());
            }
        }
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let h = 0.5 * (dists.len() - 1) as f64;
        let lo = h.floor() as usize;
        let expected = dists[lo] + (h - lo as f64) * (dists[lo + 1] - dists[lo]);
        assert_abs_diff_eq!(k.sigma(), expected, epsilon = 1e-12);
        assert!(k.sigma() > 0.0);
    }

    #[test]
    fn quantile_rejects_all_zero_distances() {
        let x = from_centered(DMatrix::zeros(2, 3));
        let y = from_centered(DMatrix::zeros(2, 4));
        assert!(matches!(
            rbf_scale_from_quantile(&x, &y, 0.5, 100, 0),
            Err(AaccaError::DegenerateScale)
        ));
    }

    #[test]
    fn rbf_analytic_values() {
        let k = RbfKernel::new(2.0).unwrap();
        let u = DVector::from_vec(vec![1.0, 1.0]);
        assert_abs_diff_eq!(rbf(&u, &u, &k).unwrap(), 1.0, epsilon = 1e-15);

        // ||u - v|| = sigma * sqrt(2) => exp(-1).
        let v = DVector::from_vec(vec![1.0 + 2.0 * 2.0_f64.sqrt(), 1.0]);
        assert_abs_diff_eq!(rbf(&u, &v, &k).unwrap(), (-1.0_f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn rbf_matches_direct_formula_and_is_symmetric() {
        let k = RbfKernel::new(0.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u: DVector<f64> = DVector::from_fn(4, |_, _| StandardNormal.sample(&mut rng));
            let v: DVector<f64> = DVector::from_fn(4, |_, _| StandardNormal.sample(&mut rng));
            let expected = (-(&u - &v).norm_squared() / (2.0 * 0.7 * 0.7)).exp();
            assert_abs_diff_eq!(rbf(&u, &v, &k).unwrap(), expected, epsilon = 1e-15);
            assert_abs_diff_eq!(
                rbf(&u, &v, &k).unwrap(),
                rbf(&v, &u, &k).unwrap(),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn rbf_strictly_decreasing_in_distance() {
        let k = RbfKernel::new(1.0).unwrap();
        let u = DVector::zeros(2);
        let mut prev = 2.0;
        for step in 1..20 {
            let v = DVector::from_vec(vec![0.1 * step as f64, 0.0]);
            let s = rbf(&u, &v, &k).unwrap();
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn rbf_dimension_mismatch_errors() {
        let k = RbfKernel::new(1.0).unwrap();
        let u = DVector::zeros(2);
        let v = DVector::zeros(3);
        assert!(matches!(rbf(&u, &v, &k), Err(AaccaError::ShapeMismatch { .. })));
    }

    #[test]
    fn strict_d_from_labels() {
        let d = build_strict_d(
            &[SampleLabel::NoChange, SampleLabel::Change, SampleLabel::Unlabeled],
            3,
        )
        .unwrap();
        let m = d.to_dense();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 0.0]));
        assert_eq!(m, expected);
        assert_eq!(d.mode(), PairingMode::Strict);
    }

    #[test]
    fn strict_d_all_unlabeled_is_zero() {
        let d = build_strict_d(&[SampleLabel::Unlabeled; 5], 5).unwrap();
        assert_eq!(d.nnz(), 0);
        assert!(d.to_dense().amax() == 0.0);
    }

    #[test]
    fn strict_d_all_no_change_is_identity() {
        let d = build_strict_d(&[SampleLabel::NoChange; 4], 4).unwrap();
        assert_eq!(d.to_dense(), DMatrix::identity(4, 4));
    }

    #[test]
    fn strict_d_has_at_most_one_nonzero_per_row_and_column() {
        let d = build_strict_d(
            &[SampleLabel::NoChange, SampleLabel::Change, SampleLabel::NoChange],
            3,
        )
        .unwrap();
        let m = d.to_dense();
        for i in 0..3 {
            assert!(m.row(i).iter().filter(|&&v| v != 0.0).count() <= 1);
            assert!(m.column(i).iter().filter(|&&v| v != 0.0).count() <= 1);
        }
    }

    #[test]
    fn relaxed_d_values() {
        // Two identical points in both views so kappa(0, 0) = 1 exactly.
        let u = from_centered(DMatrix::from_column_slice(2, 2, &[1.0, 0.0, -1.0, 0.0]));
        let v = from_centered(DMatrix::from_column_slice(2, 2, &[1.0, 0.0, -1.0, 0.0]));
        let k = RbfKernel::new(1.0).unwrap();

        let d = build_relaxed_d(&u, &v, &[(0, 0, PairClass::NoChange)], &k, false, &[]).unwrap();
        assert_abs_diff_eq!(d.get(0, 0), 1.0, epsilon = 1e-15);

        let d = build_relaxed_d(&u, &v, &[(0, 0, PairClass::Change)], &k, false, &[]).unwrap();
        assert_abs_diff_eq!(d.get(0, 0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn relaxed_semisup_value_at_sigma_sqrt2() {
        let sigma = 0.5;
        let k = RbfKernel::new(sigma).unwrap();
        let gap = sigma * 2.0_f64.sqrt();
        let u = from_centered(DMatrix::from_column_slice(1, 2, &[gap / 2.0, -gap / 2.0]));
        let v = from_centered(DMatrix::from_column_slice(1, 2, &[-gap / 2.0, gap / 2.0]));
        let d = build_relaxed_d(&u, &v, &[], &k, true, &[(0, 0)]).unwrap();
        assert_abs_diff_eq!(d.get(0, 0), 2.0 * (-1.0_f64).exp() - 1.0, epsilon = 1e-12);
        assert!(d.includes_unlabeled());
    }

    #[test]
    fn relaxed_conflicting_duplicate_errors() {
        let u = random_features(2, 3, 1);
        let v = random_features(2, 3, 2);
        let k = RbfKernel::new(1.0).unwrap();
        let res = build_relaxed_d(
            &u,
            &v,
            &[(0, 1, PairClass::NoChange), (0, 1, PairClass::Change)],
            &k,
            false,
            &[],
        );
        assert!(matches!(res, Err(AaccaError::InconsistentLabel { i: 0, j: 1 })));
    }

    #[test]
    fn dense_crosssim_identical_points_all_ones() {
        let u = from_centered(DMatrix::from_column_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]));
        let k = RbfKernel::new(1.0).unwrap();
        let d = build_dense_crosssim_d(&u, &u, &k).unwrap();
        for v in d.to_dense().iter() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn dense_crosssim_far_clusters_near_block_diagonal() {
        // Cluster A near origin, cluster B far away, in both views.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut cols = Vec::new();
        for c in 0..6 {
            let base = if c < 3 { 0.0 } else { 100.0 };
            cols.push(base + 0.01 * rng.random::<f64>());
            cols.push(base + 0.01 * rng.random::<f64>());
        }
        let raw = DMatrix::from_column_slice(2, 6, &cols);
        let u = from_centered(raw.clone());
        let v = from_centered(raw);
        let k = RbfKernel::new(1.0).unwrap();
        let d = build_dense_crosssim_d(&u, &v, &k).unwrap();
        for i in 0..3 {
            for j in 3..6 {
                assert!(d.get(i, j) < 1e-6);
                assert!(d.get(j, i) < 1e-6);
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!(d.get(i, j) > 0.9);
            }
        }
    }

    #[test]
    fn all_builders_stay_in_unit_interval() {
        let u = random_features(3, 12, 7);
        let v = random_features(3, 12, 8);
        let k = rbf_scale_from_quantile(&u, &v, 0.1, 10_000, 0).unwrap();

        let labeled: Vec<(usize, usize, PairClass)> = (0..12)
            .map(|i| {
                let class = if i % 2 == 0 { PairClass::NoChange } else { PairClass::Change };
                (i, (i + 1) % 12, class)
            })
            .collect();
        let unlabeled: Vec<(usize, usize)> = (0..12).map(|i| (i, (i + 5) % 12)).collect();

        for d in [
            build_strict_d(&[SampleLabel::Change; 12], 12).unwrap(),
            build_relaxed_d(&u, &v, &labeled, &k, true, &unlabeled).unwrap(),
            build_dense_crosssim_d(&u, &v, &k).unwrap(),
        ] {
            d.for_each_nonzero(|_, _, val| {
                assert!((-1.0..=1.0).contains(&val), "entry {val} out of range");
            });
        }
    }

    #[test]
    fn cross_outer_sum_matches_dense_product() {
        let u = random_features(3, 10, 11);
        let v = random_features(3, 9, 12);
        let k = RbfKernel::new(1.0).unwrap();
        let labeled: Vec<(usize, usize, PairClass)> =
            vec![(0, 3, PairClass::NoChange), (5, 1, PairClass::Change), (9, 8, PairClass::NoChange)];
        let d = build_relaxed_d(&u, &v, &labeled, &k, false, &[]).unwrap();
        assert!(d.is_sparse());

        let fast = d.cross_outer_sum(u.data(), v.data()).unwrap();
        let dense = v.data() * d.to_dense().transpose() * u.data().transpose();
        assert_abs_diff_eq!(fast, dense, epsilon = 1e-12);
    }

    #[test]
    fn extend_strict_semisup_overlays_diagonal() {
        let u = random_features(2, 4, 20);
        let v = random_features(2, 4, 21);
        let k = RbfKernel::new(1.0).unwrap();
        let base = build_strict_d(
            &[
                SampleLabel::NoChange,
                SampleLabel::Unlabeled,
                SampleLabel::Change,
                SampleLabel::Unlabeled,
            ],
            4,
        )
        .unwrap();
        let d = extend_strict_semisup(&base, &u, &v, &[1, 3], &k).unwrap();
        assert_eq!(d.get(0, 0), 1.0);
        assert_eq!(d.get(2, 2), -1.0);
        for i in [1usize, 3] {
            let kp = rbf(
                &u.data().column(i).into_owned(),
                &v.data().column(i).into_owned(),
                &k,
            )
            .unwrap();
            assert_abs_diff_eq!(d.get(i, i), 2.0 * kp - 1.0, epsilon = 1e-14);
        }
        assert!(d.includes_unlabeled());
        // Overlaying an already-labeled index is a conflict.
        assert!(matches!(
            extend_strict_semisup(&base, &u, &v, &[0], &k),
            Err(AaccaError::InconsistentLabel { .. })
        ));
    }

    #[test]
    fn sampled_cross_pairs_are_deterministic_and_distinct() {
        let rows: Vec<usize> = (0..30).collect();
        let cols: Vec<usize> = (40..70).collect();
        let a = sample_cross_pairs(&rows, &cols, 50, 7);
        let b = sample_cross_pairs(&rows, &cols, 50, 7);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        let set: std::collections::BTreeSet<_> = a.iter().collect();
        assert_eq!(set.len(), 50);
        // Requesting more than available yields the full grid.
        let all = sample_cross_pairs(&[0, 1], &[0, 1], 100, 0);
        assert_eq!(all.len(), 4);
    }
}
