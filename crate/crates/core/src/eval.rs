//! Change-detection evaluation: equal error rate, a latent cosine score, a
//! closed-form ridge classifier on latent codes, and toy realignment
//! accuracy.
//!
//! Throughout, "no-change" is the positive class: higher scores mean more
//! confidence in no-change, FNR counts missed no-change samples and FPR
//! counts change samples passed as no-change.

use nalgebra::{DMatrix, DVector};

use crate::cca::{CcaModel, Side};
use crate::datasets::{ArcToy, CellLabel};
use crate::error::{AaccaError, Result};
use crate::linalg::SpdSolver;

/// Scores paired with their ground-truth labels.
#[derive(Debug, Clone)]
pub struct ScoredSet {
    scores: Vec<f64>,
    labels: Vec<CellLabel>,
}

impl ScoredSet {
    /// Both classes must be present.
    pub fn new(scores: Vec<f64>, labels: Vec<CellLabel>) -> Result<ScoredSet> {
        if scores.len() != labels.len() {
            return Err(AaccaError::shape(
                format!("{} labels", scores.len()),
                format!("{}", labels.len()),
            ));
        }
        let pos = labels.iter().filter(|&&l| l == CellLabel::NoChange).count();
        if pos == 0 || pos == labels.len() {
            return Err(AaccaError::DegenerateLabels(
                "both change and no-change samples are required".into(),
            ));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(AaccaError::DegenerateInput("non-finite score".into()));
        }
        Ok(ScoredSet { scores, labels })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[CellLabel] {
        &self.labels
    }
}

/// Cosine similarity of the two latent codes; zero-norm codes score 0.
pub fn change_score(model: &CcaModel, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    let zu = model.transform_vector(u, Side::Reference)?;
    let zv = model.transform_vector(v, Side::Test)?;
    let nu = zu.norm();
    let nv = zv.norm();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok(zu.dot(&zv) / (nu * nv))
}

/// Closed-form ridge classifier on latent codes `z` (`k x n`) with labels
/// `y` in `{-1, +1}`: regularized least squares with an unpenalized
/// intercept. Returns `(w, b)` scoring samples as `w'z + b`.
pub fn fit_ridge_classifier(z: &DMatrix<f64>, y: &[f64], lambda: f64) -> Result<(DVector<f64>, f64)> {
    let n = z.ncols();
    if y.len() != n {
        return Err(AaccaError::shape(format!("{n} labels"), format!("{}", y.len())));
    }
    if !(lambda > 0.0) {
        return Err(AaccaError::Config(format!("lambda must be > 0, got {lambda}")));
    }
    let has_pos = y.iter().any(|&v| v > 0.0);
    let has_neg = y.iter().any(|&v| v < 0.0);
    if !has_pos || !has_neg {
        return Err(AaccaError::DegenerateLabels(
            "ridge classifier needs both classes".into(),
        ));
    }
    let k = z.nrows();
    let z_mean = DVector::from_fn(k, |i, _| z.row(i).sum() / n as f64);
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let mut zc = z.clone();
    for mut col in zc.column_iter_mut() {
        col -= &z_mean;
    }
    let yc = DVector::from_fn(n, |i, _| y[i] - y_mean);

    let mut gram = &zc * zc.transpose();
    for i in 0..k {
        gram[(i, i)] += lambda;
    }
    let w = SpdSolver::new(&gram)?.solve_vector(&(&zc * yc));
    let b = y_mean - w.dot(&z_mean);
    Ok((w, b))
}

/// Threshold ladder: ascending distinct scores plus one sentinel above the
/// maximum, so the error-rate difference always changes sign on the grid.
fn threshold_ladder(scores: &[f64]) -> Vec<f64> {
    let mut t: Vec<f64> = scores.to_vec();
    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    t.dedup();
    let last = *t.last().unwrap();
    t.push(last + 1.0);
    t
}

/// Error rates when classifying "no-change" for scores `>= t`.
fn rates_at(scores: &[f64], labels: &[CellLabel], t: f64) -> (f64, f64) {
    let mut pos = 0usize;
    let mut neg = 0usize;
    let mut fn_count = 0usize;
    let mut fp_count = 0usize;
    for (s, l) in scores.iter().zip(labels) {
        match l {
            CellLabel::NoChange => {
                pos += 1;
                if *s < t {
                    fn_count += 1;
                }
            }
            CellLabel::Change => {
                neg += 1;
                if *s >= t {
                    fp_count += 1;
                }
            }
        }
    }
    (fn_count as f64 / pos as f64, fp_count as f64 / neg as f64)
}

/// Equal error rate: sweeps the threshold ladder and linearly interpolates
/// the crossing of FNR and FPR between the two adjacent thresholds where
/// their difference changes sign. Returns `(eer, threshold)`.
pub fn compute_eer(set: &ScoredSet) -> Result<(f64, f64)> {
    let ladder = threshold_ladder(set.scores());
    // Counts per threshold via one sorted pass.
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&a, &b| set.scores()[a].partial_cmp(&set.scores()[b]).unwrap());
    let total_pos = set
        .labels()
        .iter()
        .filter(|&&l| l == CellLabel::NoChange)
        .count();
    let total_neg = set.len() - total_pos;

    let mut fnr = Vec::with_capacity(ladder.len());
    let mut fpr = Vec::with_capacity(ladder.len());
    let mut below = 0usize; // samples strictly below the current threshold
    let mut pos_below = 0usize;
    for &t in &ladder {
        while below < set.len() && set.scores()[order[below]] < t {
            if set.labels()[order[below]] == CellLabel::NoChange {
                pos_below += 1;
            }
            below += 1;
        }
        let neg_below = below - pos_below;
        fnr.push(pos_below as f64 / total_pos as f64);
        fpr.push((total_neg - neg_below) as f64 / total_neg as f64);
    }

    for i in 1..ladder.len() {
        let d_prev = fnr[i - 1] - fpr[i - 1];
        let d_cur = fnr[i] - fpr[i];
        if d_cur >= 0.0 {
            if d_prev >= 0.0 {
                // Crossing already at the previous point (first threshold).
                return Ok((fnr[i - 1].max(fpr[i - 1]), ladder[i - 1]));
            }
            let alpha = -d_prev / (d_cur - d_prev);
            let eer = fnr[i - 1] + alpha * (fnr[i] - fnr[i - 1]);
            let threshold = ladder[i - 1] + alpha * (ladder[i] - ladder[i - 1]);
            return Ok((eer, threshold));
        }
    }
    unreachable!("sentinel threshold guarantees a sign change");
}

/// For each reference sample (column of `x_r`), the test sample with the
/// highest normalized latent correlation (cosine of the latent codes); ties
/// break toward the lowest index. Normalization matters: matched samples
/// obtain near-equal codes, which maximizes the angle criterion, while the
/// raw inner product drifts toward large-norm codes along the latent curve.
pub fn predicted_matches(
    model: &CcaModel,
    x_r: &nalgebra::DMatrix<f64>,
    x_t: &nalgebra::DMatrix<f64>,
) -> Result<Vec<usize>> {
    let z_r = model.transform(x_r, Side::Reference)?;
    let z_t = model.transform(x_t, Side::Test)?;
    let mut gram = z_r.transpose() * &z_t;
    for i in 0..gram.nrows() {
        let nr = z_r.column(i).norm();
        for j in 0..gram.ncols() {
            let nt = z_t.column(j).norm();
            let denom = nr * nt;
            gram[(i, j)] = if denom == 0.0 { 0.0 } else { gram[(i, j)] / denom };
        }
    }
    let mut matches = Vec::with_capacity(gram.nrows());
    for i in 0..gram.nrows() {
        let mut best = 0usize;
        let mut best_val = f64::NEG_INFINITY;
        for j in 0..gram.ncols() {
            let v = gram[(i, j)];
            if v > best_val {
                best_val = v;
                best = j;
            }
        }
        matches.push(best);
    }
    Ok(matches)
}

/// Fraction of reference samples whose highest-correlation test partner is
/// the ground-truth partner. The model must have been fitted on the toy's
/// stacked views.
pub fn realignment_accuracy(model: &CcaModel, toy: &ArcToy) -> Result<f64> {
    let (x_r, x_t) = toy.stacked_views();
    let matches = predicted_matches(model, &x_r, &x_t)?;
    let hits = matches
        .iter()
        .zip(&toy.truth_pairing)
        .filter(|(a, b)| a == b)
        .count();
    Ok(hits as f64 / matches.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cca::{fit_standard_cca, CcaModel};
    use crate::datasets::generate_arc_toy;
    use crate::linalg::center_columns;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn randn(rng: &mut ChaCha8Rng) -> f64 {
        StandardNormal.sample(rng)
    }

    fn labels_of(bits: &[bool]) -> Vec<CellLabel> {
        bits.iter()
            .map(|&b| if b { CellLabel::NoChange } else { CellLabel::Change })
            .collect()
    }

    /// Independent EER oracle: recomputes both error rates from scratch at
    /// every ladder threshold and interpolates the first sign change.
    fn eer_brute_force(scores: &[f64], labels: &[CellLabel]) -> (f64, f64) {
        let ladder = threshold_ladder(scores);
        let mut prev: Option<(f64, f64, f64)> = None;
        for &t in &ladder {
            let (fnr, fpr) = rates_at(scores, labels, t);
            let d = fnr - fpr;
            if let Some((pt, pfnr, pd)) = prev {
                if d >= 0.0 {
                    if pd >= 0.0 {
                        return (pfnr.max(pfnr - pd), pt);
                    }
                    let alpha = -pd / (d - pd);
                    return (pfnr + alpha * (fnr - pfnr), pt + alpha * (t - pt));
                }
            } else if d >= 0.0 {
                return (fnr.max(fpr), t);
            }
            prev = Some((t, fnr, d));
        }
        unreachable!()
    }

    #[test]
    fn eer_zero_for_separated_scores() {
        let set = ScoredSet::new(
            vec![0.9, 0.8, 0.7, 0.2, 0.1],
            labels_of(&[true, true, true, false, false]),
        )
        .unwrap();
        let (eer, _) = compute_eer(&set).unwrap();
        assert_abs_diff_eq!(eer, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn eer_four_point_case_is_half() {
        let set = ScoredSet::new(
            vec![0.9, 0.8, 0.2, 0.1],
            labels_of(&[true, false, true, false]),
        )
        .unwrap();
        let (eer, threshold) = compute_eer(&set).unwrap();
        assert_abs_diff_eq!(eer, 0.5, epsilon = 1e-12);
        let (fnr, fpr) = rates_at(set.scores(), set.labels(), threshold);
        assert_abs_diff_eq!(fnr, fpr, epsilon = 1e-12);
    }

    #[test]
    fn eer_near_half_for_random_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 1000;
        let scores: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let labels: Vec<CellLabel> = (0..n)
            .map(|i| if i % 2 == 0 { CellLabel::NoChange } else { CellLabel::Change })
            .collect();
        let set = ScoredSet::new(scores, labels).unwrap();
        let (eer, _) = compute_eer(&set).unwrap();
        assert!((eer - 0.5).abs() < 0.05, "eer = {eer}");
    }

    #[test]
    fn eer_matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..60 {
            let n = rng.random_range(4..200);
            let scores: Vec<f64> = (0..n)
                .map(|_| {
                    // Mix of ties and distinct values.
                    if rng.random::<f64>() < 0.3 {
                        (rng.random_range(0..6) as f64) / 6.0
                    } else {
                        rng.random()
                    }
                })
                .collect();
            let mut labels: Vec<CellLabel> = (0..n)
                .map(|_| {
                    if rng.random::<f64>() < 0.5 {
                        CellLabel::NoChange
                    } else {
                        CellLabel::Change
                    }
                })
                .collect();
            labels[0] = CellLabel::NoChange;
            labels[1] = CellLabel::Change;
            let set = ScoredSet::new(scores.clone(), labels.clone()).unwrap();
            let (eer, threshold) = compute_eer(&set).unwrap();
            let (eer_bf, threshold_bf) = eer_brute_force(&scores, &labels);
            assert!(
                (eer - eer_bf).abs() < 1e-9,
                "trial {trial}: {eer} vs {eer_bf}"
            );
            assert!((threshold - threshold_bf).abs() < 1e-9);
        }
    }

    #[test]
    fn eer_invariant_under_increasing_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 150;
        let scores: Vec<f64> = (0..n).map(|_| randn(&mut rng)).collect();
        let labels: Vec<CellLabel> = (0..n)
            .map(|i| if (i * 7) % 3 == 0 { CellLabel::NoChange } else { CellLabel::Change })
            .collect();
        let base = compute_eer(&ScoredSet::new(scores.clone(), labels.clone()).unwrap())
            .unwrap()
            .0;
        for f in [
            (|x: f64| x.exp()) as fn(f64) -> f64,
            |x| 2.0 * x + 1.0,
            |x| x.powi(3),
        ] {
            let mapped: Vec<f64> = scores.iter().map(|&s| f(s)).collect();
            let eer = compute_eer(&ScoredSet::new(mapped, labels.clone()).unwrap())
                .unwrap()
                .0;
            assert_abs_diff_eq!(eer, base, epsilon = 1e-12);
        }
    }

    #[test]
    fn scored_set_rejects_single_class() {
        assert!(matches!(
            ScoredSet::new(vec![0.1, 0.2], labels_of(&[true, true])),
            Err(AaccaError::DegenerateLabels(_))
        ));
    }

    #[test]
    fn change_score_endpoints_and_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let raw_u = DMatrix::from_fn(3, 60, |_, _| randn(&mut rng));
        let mix = DMatrix::from_fn(3, 3, |_, _| randn(&mut rng));
        let raw_v = &mix * &raw_u + DMatrix::from_fn(3, 60, |_, _| 0.2 * randn(&mut rng));
        let u = center_columns(&raw_u).unwrap();
        let v = center_columns(&raw_v).unwrap();
        let model = fit_standard_cca(&u, &v, 2).unwrap();

        for i in 0..10 {
            let a = raw_u.column(i).into_owned();
            let b = raw_v.column(i).into_owned();
            let s = change_score(&model, &a, &b).unwrap();
            let za = model.transform_vector(&a, Side::Reference).unwrap();
            let zb = model.transform_vector(&b, Side::Test).unwrap();
            let expected = za.dot(&zb) / (za.norm() * zb.norm());
            assert_abs_diff_eq!(s, expected, epsilon = 1e-12);
            assert!((-1.0..=1.0).contains(&s));
        }

        // Same latent code: score 1; negated: score -1; zero code: 0.
        let a = raw_u.column(0).into_owned();
        let za = model.transform_vector(&a, Side::Reference).unwrap();
        // Build v inputs that land exactly on za and -za using the pseudoinverse.
        let pt = model.p_t();
        let pinv = (pt.transpose() * pt).try_inverse().unwrap() * pt.transpose();
        let v_plus = pinv.transpose() * &za + model.col_means_t();
        let v_minus = pinv.transpose() * (-&za) + model.col_means_t();
        assert_abs_diff_eq!(change_score(&model, &a, &v_plus).unwrap(), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(change_score(&model, &a, &v_minus).unwrap(), -1.0, epsilon = 1e-8);
        let at_mean = model.col_means_t().clone();
        assert_eq!(change_score(&model, &a, &at_mean).unwrap(), 0.0);
    }

    #[test]
    fn ridge_classifier_separates_clusters() {
        let z = DMatrix::from_row_slice(1, 6, &[-1.1, -0.9, -1.0, 0.9, 1.1, 1.0]);
        let y = [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0];
        let (w, b) = fit_ridge_classifier(&z, &y, 1e-9).unwrap();
        for (j, &label) in y.iter().enumerate() {
            let score = w[0] * z[(0, j)] + b;
            assert_eq!(score.signum(), label.signum());
        }
    }

    #[test]
    fn ridge_classifier_large_lambda_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let z = DMatrix::from_fn(3, 20, |_, _| randn(&mut rng));
        let y: Vec<f64> = (0..20).map(|i| if i < 13 { 1.0 } else { -1.0 }).collect();
        let (w, b) = fit_ridge_classifier(&z, &y, 1e12).unwrap();
        assert!(w.norm() < 1e-6);
        let y_mean = y.iter().sum::<f64>() / 20.0;
        assert_abs_diff_eq!(b, y_mean, epsilon = 1e-6);
    }

    #[test]
    fn ridge_classifier_matches_augmented_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let k = 4;
        let n = 30;
        let z = DMatrix::from_fn(k, n, |_, _| randn(&mut rng));
        let y: Vec<f64> = (0..n).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
        let lambda = 0.37;
        let (w, b) = fit_ridge_classifier(&z, &y, lambda).unwrap();

        // Oracle: solve [Z; 1] normal equations with the intercept
        // unpenalized, explicitly.
        let mut zx = DMatrix::zeros(k + 1, n);
        zx.view_mut((0, 0), (k, n)).copy_from(&z);
        for j in 0..n {
            zx[(k, j)] = 1.0;
        }
        let yv = DVector::from_column_slice(&y);
        let mut lhs = &zx * zx.transpose();
        for i in 0..k {
            lhs[(i, i)] += lambda;
        }
        let rhs = &zx * yv;
        let sol = lhs.lu().solve(&rhs).unwrap();
        for i in 0..k {
            assert_abs_diff_eq!(w[i], sol[i], epsilon = 1e-8);
        }
        assert_abs_diff_eq!(b, sol[k], epsilon = 1e-8);
    }

    #[test]
    fn ridge_classifier_rejects_single_class() {
        let z = DMatrix::zeros(2, 4);
        assert!(matches!(
            fit_ridge_classifier(&z, &[1.0; 4], 0.1),
            Err(AaccaError::DegenerateLabels(_))
        ));
    }

    #[test]
    fn zero_projection_model_gets_tiebreak_accuracy() {
        let toy = generate_arc_toy(25, 180.0, 0.02, 0.02, 6).unwrap();
        let zero_model = CcaModel::from_parts(
            DMatrix::zeros(5, 2),
            DMatrix::zeros(5, 2),
            DVector::from_vec(vec![1.0, 0.5]),
            DVector::zeros(5),
            DVector::zeros(5),
            0.0,
            0.0,
        );
        let acc = realignment_accuracy(&zero_model, &toy).unwrap();
        // All correlations are zero, so every row picks index 0; exactly one
        // reference sample has its partner stored there.
        assert_abs_diff_eq!(acc, 1.0 / 25.0, epsilon = 1e-12);
    }
}
