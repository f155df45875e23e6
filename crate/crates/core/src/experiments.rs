//! Reproducible experiment runners tying generators, pairing construction,
//! the solver and evaluation together: the arc-toy realignment comparison
//! and the eight-configuration change-detection protocol on patch scenes.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cca::{fit_aa_cca, fit_standard_cca_with, AaCcaConfig, CcaModel, FitTrace, Side};
use crate::context::{build_grid_typed_8, build_isotropic_knn, ContextSystem};
use crate::datasets::{generate_arc_toy, generate_patch_scene, ArcToy, CellLabel, PatchScene};
use crate::error::{AaccaError, Result};
use crate::eval::{
    change_score, compute_eer, fit_ridge_classifier, predicted_matches, realignment_accuracy,
    ScoredSet,
};
use crate::linalg::{center_columns, FeatureMatrix};
use crate::pairing::{
    build_dense_crosssim_d, build_relaxed_d, build_strict_d, extend_strict_semisup,
    rbf_scale_from_quantile, sample_cross_pairs, PairClass, PairingMatrix, RbfKernel, SampleLabel,
};

/// The eight pairing/learning configurations of the change-detection
/// comparison: strict vs relaxed pairing, supervised vs semi-supervised
/// learning, with or without context regularization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Table1Config {
    Standard,
    SupCa,
    SemiSup,
    SemiSupCa,
    Res,
    ResSupCa,
    ResSemiSup,
    ResSemiSupCa,
}

pub const ALL_CONFIGS: [Table1Config; 8] = [
    Table1Config::Standard,
    Table1Config::SupCa,
    Table1Config::SemiSup,
    Table1Config::SemiSupCa,
    Table1Config::Res,
    Table1Config::ResSupCa,
    Table1Config::ResSemiSup,
    Table1Config::ResSemiSupCa,
];

impl Table1Config {
    pub fn name(&self) -> &'static str {
        match self {
            Table1Config::Standard => "standard",
            Table1Config::SupCa => "sup+ca",
            Table1Config::SemiSup => "semisup",
            Table1Config::SemiSupCa => "semisup+ca",
            Table1Config::Res => "res",
            Table1Config::ResSupCa => "res+sup+ca",
            Table1Config::ResSemiSup => "res+semisup",
            Table1Config::ResSemiSupCa => "res+semisup+ca",
        }
    }

    pub fn parse(name: &str) -> Result<Table1Config> {
        ALL_CONFIGS
            .iter()
            .find(|c| c.name() == name)
            .copied()
            .ok_or_else(|| {
                let valid: Vec<&str> = ALL_CONFIGS.iter().map(|c| c.name()).collect();
                AaccaError::Config(format!(
                    "unknown configuration {name:?}; valid names: {}",
                    valid.join(", ")
                ))
            })
    }

    /// Relaxed (RBF-weighted, non-diagonal) pairing.
    pub fn is_relaxed(&self) -> bool {
        matches!(
            self,
            Table1Config::Res
                | Table1Config::ResSupCa
                | Table1Config::ResSemiSup
                | Table1Config::ResSemiSupCa
        )
    }

    /// Unlabeled samples participate in learning.
    pub fn is_semisup(&self) -> bool {
        matches!(
            self,
            Table1Config::SemiSup
                | Table1Config::SemiSupCa
                | Table1Config::ResSemiSup
                | Table1Config::ResSemiSupCa
        )
    }

    /// Context regularization active (beta > 0).
    pub fn uses_context(&self) -> bool {
        matches!(
            self,
            Table1Config::SupCa
                | Table1Config::SemiSupCa
                | Table1Config::ResSupCa
                | Table1Config::ResSemiSupCa
        )
    }
}

/// How co-located pairs are scored for change detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scorer {
    /// Latent cosine similarity, parameter-free.
    Cosine,
    /// Ridge classifier trained on elementwise products of latent codes.
    Ridge,
}

/// Shift regime mirroring the two misalignment protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Residual,
    Strong,
}

impl Regime {
    pub fn parse(name: &str) -> Result<Regime> {
        match name {
            "residual" => Ok(Regime::Residual),
            "strong" => Ok(Regime::Strong),
            other => Err(AaccaError::Config(format!(
                "unknown regime {other:?}; valid: residual, strong"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Residual => "residual",
            Regime::Strong => "strong",
        }
    }

    /// Shift magnitude bounds in cell units.
    pub fn shift_bounds(&self) -> (f64, f64) {
        match self {
            Regime::Residual => (0.0, 0.15),
            Regime::Strong => (0.5, 1.0),
        }
    }
}

/// Cell index sets of the three evaluation splits.
#[derive(Debug, Clone)]
pub struct SceneSplits {
    pub train: Vec<usize>,
    pub dev: Vec<usize>,
    pub unlabeled: Vec<usize>,
}

/// Partitions the grid into contiguous blobs per split (annotated regions
/// rather than scattered cells), seeded and exact in size.
pub fn make_splits(
    rows: usize,
    cols: usize,
    train_frac: f64,
    dev_frac: f64,
    seed: u64,
) -> Result<SceneSplits> {
    if !(train_frac > 0.0 && dev_frac > 0.0 && train_frac + dev_frac < 1.0) {
        return Err(AaccaError::Config(format!(
            "need positive split fractions with train + dev < 1, got {train_frac} + {dev_frac}"
        )));
    }
    let n = rows * cols;
    let n_train = (train_frac * n as f64).round() as usize;
    let n_dev = (dev_frac * n as f64).round() as usize;
    if n_train == 0 || n_dev == 0 || n_train + n_dev >= n {
        return Err(AaccaError::Config("degenerate split sizes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0001);
    let mut assigned: Vec<Option<u8>> = vec![None; n];

    // Grow region 0 (train) then region 1 (dev) from a few seeds each.
    for (region, target) in [(0u8, n_train), (1u8, n_dev)] {
        let mut marked = 0usize;
        let mut frontier: Vec<usize> = Vec::new();
        let seeds = 3.min(target);
        let mut placed_seeds = 0usize;
        while marked < target {
            let cell = if frontier.is_empty() || placed_seeds < seeds {
                placed_seeds += 1;
                loop {
                    let c = rng.random_range(0..n);
                    if assigned[c].is_none() {
                        break c;
                    }
                }
            } else {
                frontier.swap_remove(rng.random_range(0..frontier.len()))
            };
            if assigned[cell].is_some() {
                continue;
            }
            assigned[cell] = Some(region);
            marked += 1;
            let (r, c) = (cell / cols, cell % cols);
            for (dr, dc) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                if nr >= 0 && nc >= 0 && (nr as usize) < rows && (nc as usize) < cols {
                    let ni = nr as usize * cols + nc as usize;
                    if assigned[ni].is_none() {
                        frontier.push(ni);
                    }
                }
            }
        }
    }

    let mut splits = SceneSplits {
        train: Vec::new(),
        dev: Vec::new(),
        unlabeled: Vec::new(),
    };
    for (cell, region) in assigned.iter().enumerate() {
        match region {
            Some(0) => splits.train.push(cell),
            Some(1) => splits.dev.push(cell),
            _ => splits.unlabeled.push(cell),
        }
    }
    Ok(splits)
}

/// Knobs of a change-detection run, shared by all configurations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthParams {
    pub rows: usize,
    pub cols: usize,
    pub d: usize,
    pub change_rate: f64,
    pub noise: f64,
    pub shift_lo: f64,
    pub shift_hi: f64,
    pub train_frac: f64,
    pub dev_frac: f64,
    pub beta: f64,
    pub k: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    pub eps_rel: f64,
    pub gamma_floor: f64,
    /// Quantile for the RBF scale.
    pub quantile: f64,
    /// Subsample cap for the quantile estimate.
    pub max_pairs: usize,
    /// Cap on sampled unlabeled cross pairs in relaxed semi-supervised runs.
    pub unlabeled_pair_cap: usize,
    pub scorer: Scorer,
    pub ridge_lambda: f64,
    pub seed: u64,
}

impl SynthParams {
    pub fn for_regime(regime: Regime, seed: u64) -> SynthParams {
        let (shift_lo, shift_hi) = regime.shift_bounds();
        SynthParams {
            rows: 20,
            cols: 20,
            d: 64,
            change_rate: 0.3,
            noise: 0.05,
            shift_lo,
            shift_hi,
            train_frac: 0.3,
            dev_frac: 0.2,
            beta: crate::cca::DEFAULT_BETA,
            k: Some(16),
            tol: crate::cca::DEFAULT_TOL,
            max_iter: crate::cca::DEFAULT_MAX_ITER,
            eps_rel: crate::cca::DEFAULT_EPS_REL,
            gamma_floor: crate::cca::DEFAULT_GAMMA_FLOOR,
            quantile: 0.1,
            max_pairs: 100_000,
            unlabeled_pair_cap: 25_000,
            scorer: Scorer::Cosine,
            ridge_lambda: 1e-3,
            seed,
        }
    }

    fn solver_config(&self, beta: f64) -> AaCcaConfig {
        AaCcaConfig {
            beta,
            k: self.k,
            tol: self.tol,
            max_iter: self.max_iter,
            eps_rel: self.eps_rel,
            gamma_floor: self.gamma_floor,
        }
    }
}

/// Outcome of one configuration on one scene.
#[derive(Debug, Clone)]
pub struct ConfigRun {
    pub config: Table1Config,
    /// EER on (train, dev, unlabeled) splits.
    pub eer: [f64; 3],
    pub thresholds: [f64; 3],
    pub trace: FitTrace,
    pub model: CcaModel,
    pub n_train: usize,
    pub n_dev: usize,
    pub n_unlabeled: usize,
}

fn select_columns(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), idx.len());
    for (pos, &j) in idx.iter().enumerate() {
        out.set_column(pos, &m.column(j));
    }
    out
}

fn restrict_features(x: &FeatureMatrix, positions: &[usize]) -> FeatureMatrix {
    FeatureMatrix::from_centered(select_columns(x.data(), positions))
        .expect("non-empty restriction")
}

/// Spatial radius (cell units) within which relaxed cross pairs are
/// considered: misalignment displaces content by at most about one cell, so
/// candidate alignments beyond this window carry no information.
pub const RELAXED_PAIR_RADIUS: f64 = 2.0;

fn grid_distance(cols: usize, a: usize, b: usize) -> f64 {
    let (ra, ca) = ((a / cols) as f64, (a % cols) as f64);
    let (rb, cb) = ((b / cols) as f64, (b % cols) as f64);
    ((ra - rb).powi(2) + (ca - cb).powi(2)).sqrt()
}

/// Pair class for a relaxed pair of labeled cells. No-change pairs spread
/// positive affinity over the misalignment window around each location; the
/// change class only makes sense co-located, where the two contents are
/// known to differ.
fn cross_pair_class(
    cols: usize,
    i: usize,
    j: usize,
    a: CellLabel,
    b: CellLabel,
) -> Option<PairClass> {
    match (a, b) {
        (CellLabel::NoChange, CellLabel::NoChange)
            if grid_distance(cols, i, j) <= RELAXED_PAIR_RADIUS =>
        {
            Some(PairClass::NoChange)
        }
        (CellLabel::Change, CellLabel::Change) if i == j => Some(PairClass::Change),
        _ => None,
    }
}

/// Runs one configuration: assembles the active sample set, the affinity
/// matrix and the contexts, fits, and reports per-split equal error rates on
/// co-located pairs.
pub fn run_scene_config(
    scene: &PatchScene,
    splits: &SceneSplits,
    config: Table1Config,
    params: &SynthParams,
) -> Result<ConfigRun> {
    let n = scene.n_cells();
    // Active samples: labeled training cells only for supervised learning,
    // the whole scene when unlabeled data participates.
    let active: Vec<usize> = if config.is_semisup() {
        (0..n).collect()
    } else {
        splits.train.clone()
    };
    let mut active_pos = vec![usize::MAX; n];
    for (pos, &cell) in active.iter().enumerate() {
        active_pos[cell] = pos;
    }

    let u = center_columns(&select_columns(&scene.features_r, &active))?;
    let v = center_columns(&select_columns(&scene.features_t, &active))?;

    // RBF scale from labeled-train cross distances, on the same centered
    // features the affinity entries will see.
    let train_positions: Vec<usize> = splits.train.iter().map(|&c| active_pos[c]).collect();
    let u_train = restrict_features(&u, &train_positions);
    let v_train = restrict_features(&v, &train_positions);
    let kernel = rbf_scale_from_quantile(
        &u_train,
        &v_train,
        params.quantile,
        params.max_pairs,
        params.seed ^ 0x5eed_0002,
    )?;

    let d = build_config_pairing(scene, splits, config, params, &u, &v, &active_pos, &kernel)?;

    let beta = if config.uses_context() { params.beta } else { 0.0 };
    let ctx = if beta > 0.0 {
        build_grid_typed_8(scene.rows, scene.cols)?.restrict(&active)
    } else {
        ContextSystem::empty(active.len())
    };

    let (model, trace) = fit_aa_cca(&u, &v, &d, &ctx, &ctx, &params.solver_config(beta))?;

    let scorer = build_scorer(scene, splits, model.clone(), params)?;
    let mut eer = [0.0; 3];
    let mut thresholds = [0.0; 3];
    for (slot, cells) in [&splits.train, &splits.dev, &splits.unlabeled]
        .into_iter()
        .enumerate()
    {
        let scores: Vec<f64> = cells.iter().map(|&c| scorer(c)).collect();
        let labels: Vec<CellLabel> = cells.iter().map(|&c| scene.labels[c]).collect();
        let set = ScoredSet::new(scores, labels)?;
        let (e, t) = compute_eer(&set)?;
        eer[slot] = e;
        thresholds[slot] = t;
    }

    Ok(ConfigRun {
        config,
        eer,
        thresholds,
        trace,
        model,
        n_train: splits.train.len(),
        n_dev: splits.dev.len(),
        n_unlabeled: splits.unlabeled.len(),
    })
}

/// Builds the per-cell change score function for a fitted model.
fn build_scorer<'a>(
    scene: &'a PatchScene,
    splits: &SceneSplits,
    model: CcaModel,
    params: &SynthParams,
) -> Result<Box<dyn Fn(usize) -> f64 + 'a>> {
    match params.scorer {
        Scorer::Cosine => {
            Ok(Box::new(move |cell: usize| {
                let uvec = scene.features_r.column(cell).into_owned();
                let vvec = scene.features_t.column(cell).into_owned();
                change_score(&model, &uvec, &vvec).expect("dims fixed by scene")
            }))
        }
        Scorer::Ridge => {
            // Train on elementwise products of latent codes over train cells.
            let z_r = model.transform(&select_columns(&scene.features_r, &splits.train), Side::Reference)?;
            let z_t = model.transform(&select_columns(&scene.features_t, &splits.train), Side::Test)?;
            let feats = z_r.component_mul(&z_t);
            let y: Vec<f64> = splits
                .train
                .iter()
                .map(|&c| match scene.labels[c] {
                    CellLabel::NoChange => 1.0,
                    CellLabel::Change => -1.0,
                })
                .collect();
            let (w, b) = fit_ridge_classifier(&feats, &y, params.ridge_lambda)?;
            Ok(Box::new(move |cell: usize| {
                let zu = model
                    .transform_vector(&scene.features_r.column(cell).into_owned(), Side::Reference)
                    .expect("dims fixed");
                let zv = model
                    .transform_vector(&scene.features_t.column(cell).into_owned(), Side::Test)
                    .expect("dims fixed");
                w.dot(&zu.component_mul(&zv)) + b
            }))
        }
    }
}

/// Assembles the affinity matrix for one configuration over the active
/// sample set (positions, not cell ids).
#[allow(clippy::too_many_arguments)]
fn build_config_pairing(
    scene: &PatchScene,
    splits: &SceneSplits,
    config: Table1Config,
    params: &SynthParams,
    u: &FeatureMatrix,
    v: &FeatureMatrix,
    active_pos: &[usize],
    kernel: &RbfKernel,
) -> Result<PairingMatrix> {
    let n_active = u.count();
    if !config.is_relaxed() {
        // Strict diagonal: +-1 on labeled training cells.
        let mut labels = vec![SampleLabel::Unlabeled; n_active];
        for &cell in &splits.train {
            labels[active_pos[cell]] = match scene.labels[cell] {
                CellLabel::NoChange => SampleLabel::NoChange,
                CellLabel::Change => SampleLabel::Change,
            };
        }
        let strict = build_strict_d(&labels, n_active)?;
        if config.is_semisup() {
            let unl_positions: Vec<usize> =
                splits.unlabeled.iter().map(|&c| active_pos[c]).collect();
            extend_strict_semisup(&strict, u, v, &unl_positions, kernel)
        } else {
            Ok(strict)
        }
    } else {
        // Relaxed: every labeled-train cross pair with agreeing labels.
        let mut labeled_pairs = Vec::new();
        for &ci in &splits.train {
            for &cj in &splits.train {
                if let Some(class) =
                    cross_pair_class(scene.cols, ci, cj, scene.labels[ci], scene.labels[cj])
                {
                    labeled_pairs.push((active_pos[ci], active_pos[cj], class));
                }
            }
        }
        let unlabeled_pairs = if config.is_semisup() {
            // Windowed cross pairs among unlabeled cells, subsampled under
            // the cap.
            let mut candidates = Vec::new();
            for &ci in &splits.unlabeled {
                for &cj in &splits.unlabeled {
                    if grid_distance(scene.cols, ci, cj) <= RELAXED_PAIR_RADIUS {
                        candidates.push((active_pos[ci], active_pos[cj]));
                    }
                }
            }
            if candidates.len() > params.unlabeled_pair_cap {
                let keep: Vec<usize> = (0..candidates.len()).collect();
                let picked = sample_cross_pairs(
                    &keep,
                    &[0],
                    params.unlabeled_pair_cap,
                    params.seed ^ 0x5eed_0003,
                );
                candidates = picked.into_iter().map(|(i, _)| candidates[i]).collect();
            }
            candidates
        } else {
            Vec::new()
        };
        build_relaxed_d(u, v, &labeled_pairs, kernel, config.is_semisup(), &unlabeled_pairs)
    }
}

/// Generates the scene and splits described by `params` and runs the
/// requested configurations.
pub fn run_synth(
    configs: &[Table1Config],
    params: &SynthParams,
) -> Result<(PatchScene, SceneSplits, Vec<ConfigRun>)> {
    let scene = generate_patch_scene(
        params.rows,
        params.cols,
        params.d,
        params.change_rate,
        params.shift_lo,
        params.shift_hi,
        params.noise,
        params.seed,
    )?;
    let splits = make_splits(
        params.rows,
        params.cols,
        params.train_frac,
        params.dev_frac,
        params.seed,
    )?;
    let runs: Result<Vec<ConfigRun>> = configs
        .iter()
        .map(|&c| run_scene_config(&scene, &splits, c, params))
        .collect();
    Ok((scene, splits, runs?))
}

/// Knobs of the arc-toy comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToyParams {
    pub n: usize,
    pub rotation_deg: f64,
    pub coord_noise: f64,
    pub color_noise: f64,
    /// Spatial neighbors per sample in the isotropic context.
    pub knn: usize,
    pub beta: f64,
    pub k: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    pub eps_rel: f64,
    pub gamma_floor: f64,
    pub quantile: f64,
    pub max_pairs: usize,
    pub seed: u64,
}

impl Default for ToyParams {
    fn default() -> Self {
        ToyParams {
            n: 100,
            rotation_deg: 180.0,
            coord_noise: 0.15,
            color_noise: 0.15,
            knn: 10,
            beta: crate::cca::DEFAULT_BETA,
            k: None,
            tol: crate::cca::DEFAULT_TOL,
            max_iter: crate::cca::DEFAULT_MAX_ITER,
            eps_rel: crate::cca::DEFAULT_EPS_REL,
            gamma_floor: crate::cca::DEFAULT_GAMMA_FLOOR,
            quantile: 0.1,
            max_pairs: 100_000,
            seed: 0,
        }
    }
}

/// Outcome of the toy comparison: the alignment-agnostic fit with a dense
/// cross-similarity affinity versus standard CCA on nearest-color pairs.
#[derive(Debug)]
pub struct ToyRun {
    pub toy: ArcToy,
    pub aa_model: CcaModel,
    pub baseline_model: CcaModel,
    pub trace: FitTrace,
    pub aa_accuracy: f64,
    pub baseline_accuracy: f64,
    pub aa_matches: Vec<usize>,
    pub baseline_matches: Vec<usize>,
}

/// Nearest neighbor of every reference color among the test colors.
fn nearest_color_pairing(toy: &ArcToy) -> Vec<usize> {
    let n = toy.colors_r.ncols();
    (0..n)
        .map(|i| {
            let ci = toy.colors_r.column(i);
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for j in 0..n {
                let d = (toy.colors_t.column(j) - ci).norm_squared();
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Runs the toy comparison for one seed. Views are the stacked
/// position-plus-color samples; the affinity is the color cross-similarity
/// (positions are unaligned across views, colors are the shared content).
pub fn run_toy(params: &ToyParams) -> Result<ToyRun> {
    let toy = generate_arc_toy(
        params.n,
        params.rotation_deg,
        params.coord_noise,
        params.color_noise,
        params.seed,
    )?;
    let (x_r, x_t) = toy.stacked_views();
    let u = center_columns(&x_r)?;
    let v = center_columns(&x_t)?;
    let k = params.k.unwrap_or(x_r.nrows());

    // Baseline: strict pairing by nearest color descriptor.
    let nn = nearest_color_pairing(&toy);
    let v_paired = center_columns(&select_columns(&x_t, &nn))?;
    let baseline_model =
        fit_standard_cca_with(&u, &v_paired, k, params.eps_rel, params.gamma_floor)?;

    // Alignment-agnostic: dense color cross-similarity affinity plus
    // isotropic spatial contexts.
    let colors_u = center_columns(&toy.colors_r)?;
    let colors_v = center_columns(&toy.colors_t)?;
    let kernel = rbf_scale_from_quantile(
        &colors_u,
        &colors_v,
        params.quantile,
        params.max_pairs,
        params.seed ^ 0x5eed_0004,
    )?;
    let d = build_dense_crosssim_d(&colors_u, &colors_v, &kernel)?;
    let ctx_u = build_isotropic_knn(&toy.coords_r, params.knn)?;
    let ctx_v = build_isotropic_knn(&toy.coords_t, params.knn)?;
    let config = AaCcaConfig {
        beta: params.beta,
        k: Some(k),
        tol: params.tol,
        max_iter: params.max_iter,
        eps_rel: params.eps_rel,
        gamma_floor: params.gamma_floor,
    };
    let (aa_model, trace) = fit_aa_cca(&u, &v, &d, &ctx_u, &ctx_v, &config)?;

    let aa_accuracy = realignment_accuracy(&aa_model, &toy)?;
    let baseline_accuracy = realignment_accuracy(&baseline_model, &toy)?;
    let aa_matches = predicted_matches(&aa_model, &x_r, &x_t)?;
    let baseline_matches = predicted_matches(&baseline_model, &x_r, &x_t)?;
    Ok(ToyRun {
        toy,
        aa_model,
        baseline_model,
        trace,
        aa_accuracy,
        baseline_accuracy,
        aa_matches,
        baseline_matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_names_roundtrip() {
        for c in ALL_CONFIGS {
            assert_eq!(Table1Config::parse(c.name()).unwrap(), c);
        }
        let err = Table1Config::parse("bogus").unwrap_err();
        let msg = err.to_string();
        for c in ALL_CONFIGS {
            assert!(msg.contains(c.name()), "error message misses {}", c.name());
        }
    }

    #[test]
    fn splits_are_exact_and_disjoint() {
        let s = make_splits(20, 20, 0.3, 0.2, 7).unwrap();
        assert_eq!(s.train.len(), 120);
        assert_eq!(s.dev.len(), 80);
        assert_eq!(s.unlabeled.len(), 200);
        let mut all: Vec<usize> = s
            .train
            .iter()
            .chain(&s.dev)
            .chain(&s.unlabeled)
            .copied()
            .collect();
        all.sort();
        assert_eq!(all, (0..400).collect::<Vec<_>>());
    }

    #[test]
    fn splits_are_deterministic() {
        let a = make_splits(10, 12, 0.25, 0.25, 3).unwrap();
        let b = make_splits(10, 12, 0.25, 0.25, 3).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.dev, b.dev);
    }

    #[test]
    fn noiseless_toy_realignment_is_perfect() {
        let params = ToyParams {
            coord_noise: 0.0,
            color_noise: 0.0,
            seed: 1,
            ..Default::default()
        };
        let run = run_toy(&params).unwrap();
        assert_eq!(run.aa_accuracy, 1.0, "aa accuracy {}", run.aa_accuracy);
        assert!(run.trace.converged);
    }

    #[test]
    fn noisy_toy_aa_beats_nearest_color_baseline() {
        let params = ToyParams {
            seed: 0,
            ..Default::default()
        };
        let run = run_toy(&params).unwrap();
        assert!(
            run.aa_accuracy >= run.baseline_accuracy,
            "aa {} vs baseline {}",
            run.aa_accuracy,
            run.baseline_accuracy
        );
    }

    #[test]
    fn single_scene_config_runs_end_to_end() {
        let params = SynthParams {
            rows: 8,
            cols: 8,
            d: 16,
            k: Some(6),
            ..SynthParams::for_regime(Regime::Residual, 5)
        };
        let splits = make_splits(8, 8, 0.3, 0.2, 5).unwrap();
        let scene = generate_patch_scene(8, 8, 16, 0.3, 0.0, 0.15, 0.05, 5).unwrap();
        for config in [Table1Config::Standard, Table1Config::Res, Table1Config::SemiSupCa] {
            let run = run_scene_config(&scene, &splits, config, &params).unwrap();
            for e in run.eer {
                assert!((0.0..=1.0).contains(&e));
            }
            if !config.uses_context() {
                assert_eq!(run.trace.iterations, 1);
            }
        }
    }
}
