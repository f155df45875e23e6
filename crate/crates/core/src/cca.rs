//! The solver: standard CCA, the alignment-agnostic fixed-point iteration
//! over a context-regularized generalized eigenproblem, the contraction
//! bound that guards the regularization weight, and latent-space transforms.
//!
//! Scaling convention: every data product is `1/n`-scaled (covariances as
//! `U U' / n_r`, the affinity term as `V D' U' / sqrt(n_r n_t)`, context
//! products as `V W V' / n_t`). Canonical correlations then land in `[0, 1]`
//! and are invariant to sample count, and the cancellation that makes the
//! contraction constant scale-free is preserved.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::context::ContextSystem;
use crate::error::{AaccaError, Result};
use crate::linalg::{
    entrywise_l1, CovarianceBundle, FeatureMatrix, SpdSolver, solve_gen_sym_eig, symmetrize,
};
use crate::pairing::PairingMatrix;

pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 50;
pub const DEFAULT_EPS_REL: f64 = 1e-6;
pub const DEFAULT_GAMMA_FLOOR: f64 = 1e-8;

/// Floor for the relative-residual denominator.
const RESIDUAL_DENOM_FLOOR: f64 = 1e-30;

/// Which view a raw sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Reference,
    Test,
}

/// Solver knobs for the alignment-agnostic fit.
#[derive(Debug, Clone)]
pub struct AaCcaConfig {
    /// Context regularization weight.
    pub beta: f64,
    /// Retained components; `None` means `min(d_u, d_v)`.
    pub k: Option<usize>,
    /// Relative fixed-point tolerance on the affinity kernel.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative ridge added to both intra-view covariances.
    pub eps_rel: f64,
    /// Components with a canonical correlation below this are dropped.
    pub gamma_floor: f64,
}

impl Default for AaCcaConfig {
    fn default() -> Self {
        AaCcaConfig {
            beta: DEFAULT_BETA,
            k: None,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            eps_rel: DEFAULT_EPS_REL,
            gamma_floor: DEFAULT_GAMMA_FLOOR,
        }
    }
}

impl AaCcaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) {
            return Err(AaccaError::Config(format!("beta must be >= 0, got {}", self.beta)));
        }
        if !(self.tol > 0.0) {
            return Err(AaccaError::Config(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter < 1 {
            return Err(AaccaError::Config("max_iter must be >= 1".into()));
        }
        if !(self.eps_rel >= 0.0) {
            return Err(AaccaError::Config(format!(
                "eps_rel must be >= 0, got {}",
                self.eps_rel
            )));
        }
        if !(self.gamma_floor > 0.0) {
            return Err(AaccaError::Config(format!(
                "gamma_floor must be > 0, got {}",
                self.gamma_floor
            )));
        }
        if let Some(k) = self.k {
            if k < 1 {
                return Err(AaccaError::Config("k must be >= 1".into()));
            }
        }
        Ok(())
    }
}

/// Fitted projection pair with its canonical correlations and the centering
/// vectors needed to map raw samples into the latent space.
#[derive(Debug, Clone)]
pub struct CcaModel {
    p_r: DMatrix<f64>,
    p_t: DMatrix<f64>,
    gammas: DVector<f64>,
    col_means_r: DVector<f64>,
    col_means_t: DVector<f64>,
    beta: f64,
    ridge_used: f64,
}

impl CcaModel {
    pub(crate) fn from_parts(
        p_r: DMatrix<f64>,
        p_t: DMatrix<f64>,
        gammas: DVector<f64>,
        col_means_r: DVector<f64>,
        col_means_t: DVector<f64>,
        beta: f64,
        ridge_used: f64,
    ) -> CcaModel {
        CcaModel {
            p_r,
            p_t,
            gammas,
            col_means_r,
            col_means_t,
            beta,
            ridge_used,
        }
    }

    /// Reference-view projection, `d_u x k`.
    pub fn p_r(&self) -> &DMatrix<f64> {
        &self.p_r
    }

    /// Test-view projection, `d_v x k`.
    pub fn p_t(&self) -> &DMatrix<f64> {
        &self.p_t
    }

    /// Canonical correlations, descending and strictly positive.
    pub fn gammas(&self) -> &DVector<f64> {
        &self.gammas
    }

    pub fn col_means_r(&self) -> &DVector<f64> {
        &self.col_means_r
    }

    pub fn col_means_t(&self) -> &DVector<f64> {
        &self.col_means_t
    }

    pub fn k(&self) -> usize {
        self.gammas.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn ridge_used(&self) -> f64 {
        self.ridge_used
    }

    pub fn dim(&self, side: Side) -> usize {
        match side {
            Side::Reference => self.p_r.nrows(),
            Side::Test => self.p_t.nrows(),
        }
    }

    fn projection(&self, side: Side) -> (&DMatrix<f64>, &DVector<f64>) {
        match side {
            Side::Reference => (&self.p_r, &self.col_means_r),
            Side::Test => (&self.p_t, &self.col_means_t),
        }
    }

    /// Centers raw samples (`dim x n`) with the stored means and projects
    /// them, returning latent codes `k x n`.
    pub fn transform(&self, x_raw: &DMatrix<f64>, side: Side) -> Result<DMatrix<f64>> {
        let (p, means) = self.projection(side);
        if x_raw.nrows() != p.nrows() {
            return Err(AaccaError::shape(
                format!("{} rows", p.nrows()),
                format!("{} rows", x_raw.nrows()),
            ));
        }
        let mut centered = x_raw.clone();
        for mut col in centered.column_iter_mut() {
            col -= means;
        }
        Ok(p.transpose() * centered)
    }

    /// Latent code of a single raw sample.
    pub fn transform_vector(&self, x: &DVector<f64>, side: Side) -> Result<DVector<f64>> {
        let (p, means) = self.projection(side);
        if x.len() != p.nrows() {
            return Err(AaccaError::shape(
                format!("vector of length {}", p.nrows()),
                format!("length {}", x.len()),
            ));
        }
        Ok(p.transpose() * (x - means))
    }

    /// Inner product of the latent codes of one raw sample per view.
    pub fn latent_correlation(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        let zu = self.transform_vector(u, Side::Reference)?;
        let zv = self.transform_vector(v, Side::Test)?;
        Ok(zu.dot(&zv))
    }
}

/// One record per fixed-point pass.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    /// `||K_new - K_prev||_1`.
    pub k_residual_l1: f64,
    /// Smallest retained canonical correlation at this pass.
    pub gamma_min: f64,
    /// Residual ratio against the previous pass (second pass onwards).
    pub contraction_ratio: Option<f64>,
}

/// Convergence history of an alignment-agnostic fit.
#[derive(Debug, Clone)]
pub struct FitTrace {
    pub records: Vec<IterationRecord>,
    pub iterations: usize,
    pub converged: bool,
    /// Contraction constant `beta * S / gamma_min` at the final pass.
    pub lipschitz_l: Option<f64>,
    /// Largest admissible beta; `f64::INFINITY` when the contexts are empty.
    pub beta_max: f64,
    /// The context sum `S` entering the bound.
    pub context_l1_sum: f64,
    /// True when beta met or exceeded `beta_max` at some pass. The bound is
    /// loose, so this is a warning rather than an error.
    pub bound_violated: bool,
}

fn validate_counts(u: &FeatureMatrix, v: &FeatureMatrix, d: &PairingMatrix) -> Result<()> {
    if d.n_r() != u.count() || d.n_t() != v.count() {
        return Err(AaccaError::shape(
            format!("pairing over {}x{} samples", u.count(), v.count()),
            format!("{}x{}", d.n_r(), d.n_t()),
        ));
    }
    Ok(())
}

/// Affinity term `V D' U' / sqrt(n_r n_t)`.
fn pairing_term(u: &FeatureMatrix, v: &FeatureMatrix, d: &PairingMatrix) -> Result<DMatrix<f64>> {
    let scale = 1.0 / ((u.count() as f64) * (v.count() as f64)).sqrt();
    Ok(d.cross_outer_sum(u.data(), v.data())? * scale)
}

/// The per-type products `X W^c X' / n` for every context type.
fn context_covariances(x: &FeatureMatrix, ctx: &ContextSystem) -> Vec<DMatrix<f64>> {
    let n = x.count() as f64;
    ctx.matrices()
        .iter()
        .map(|w| (w.left_mul(x.data()) * x.data().transpose()) / n)
        .collect()
}

/// `sum_c Ov_c Pi Ou_c' + sum_c Ov_c' Pi Ou_c` for `Pi = P_t P_r'`.
fn context_terms(
    omega_v: &[DMatrix<f64>],
    omega_u: &[DMatrix<f64>],
    pi: &DMatrix<f64>,
) -> DMatrix<f64> {
    let (d_v, d_u) = pi.shape();
    let mut acc = DMatrix::zeros(d_v, d_u);
    for (ov, ou) in omega_v.iter().zip(omega_u) {
        acc += ov * pi * ou.transpose();
        acc += ov.transpose() * pi * ou;
    }
    acc
}

/// Assembles the regularized affinity kernel `K_tr` (`d_v x d_u`): the
/// affinity-weighted cross product plus the beta-weighted typed-context
/// terms evaluated at the current projections.
pub fn compute_k_tr(
    u: &FeatureMatrix,
    v: &FeatureMatrix,
    d: &PairingMatrix,
    ctx_u: &ContextSystem,
    ctx_v: &ContextSystem,
    p_r: &DMatrix<f64>,
    p_t: &DMatrix<f64>,
    beta: f64,
) -> Result<DMatrix<f64>> {
    validate_counts(u, v, d)?;
    if ctx_u.c_count() != ctx_v.c_count() {
        return Err(AaccaError::shape(
            format!("{} context types in both views", ctx_u.c_count()),
            format!("{}", ctx_v.c_count()),
        ));
    }
    if ctx_u.n() != u.count() || ctx_v.n() != v.count() {
        return Err(AaccaError::shape(
            format!("contexts over {} / {} samples", u.count(), v.count()),
            format!("{} / {}", ctx_u.n(), ctx_v.n()),
        ));
    }
    if p_r.nrows() != u.dim() || p_t.nrows() != v.dim() || p_r.ncols() != p_t.ncols() {
        return Err(AaccaError::shape(
            format!("projections {}xk and {}xk", u.dim(), v.dim()),
            format!("{}x{} and {}x{}", p_r.nrows(), p_r.ncols(), p_t.nrows(), p_t.ncols()),
        ));
    }
    let term1 = pairing_term(u, v, d)?;
    if beta == 0.0 {
        return Ok(term1);
    }
    let omega_v = context_covariances(v, ctx_v);
    let omega_u = context_covariances(u, ctx_u);
    let pi = p_t * p_r.transpose();
    Ok(term1 + context_terms(&omega_v, &omega_u, &pi) * beta)
}

struct SolveOutcome {
    p_r: DMatrix<f64>,
    p_t: DMatrix<f64>,
    gammas: DVector<f64>,
}

/// Solves `K_rt C_tt^-1 K_tr p = gamma^2 C_rr p` for the top-k pairs and
/// derives the test-view columns as `(1/gamma_i) C_tt^-1 K_tr p_i`, dropping
/// components whose correlation falls below the floor.
fn solve_projections(
    k_tr: &DMatrix<f64>,
    c_rr: &DMatrix<f64>,
    c_tt_solver: &SpdSolver,
    k: usize,
    gamma_floor: f64,
) -> Result<SolveOutcome> {
    let ctt_inv_ktr = c_tt_solver.solve(k_tr);
    let a = symmetrize(&(k_tr.transpose() * &ctt_inv_ktr));
    let sol = solve_gen_sym_eig(&a, c_rr, k)?;

    let retained: Vec<usize> = (0..k)
        .filter(|&i| sol.eigenvalues[i].sqrt() >= gamma_floor)
        .collect();
    if retained.is_empty() {
        return Err(AaccaError::NoCorrelation { floor: gamma_floor });
    }
    let kk = retained.len();
    let mut gammas = DVector::zeros(kk);
    let mut p_r = DMatrix::zeros(k_tr.ncols(), kk);
    for (out, &i) in retained.iter().enumerate() {
        gammas[out] = sol.eigenvalues[i].sqrt();
        p_r.set_column(out, &sol.eigenvectors.column(i));
    }
    let mut p_t = &ctt_inv_ktr * &p_r;
    for (i, mut col) in p_t.column_iter_mut().enumerate() {
        col /= gammas[i];
    }
    Ok(SolveOutcome { p_r, p_t, gammas })
}

/// Standard CCA on strictly paired views: the affinity kernel is the plain
/// cross-covariance and no iteration is needed.
pub fn fit_standard_cca(u: &FeatureMatrix, v: &FeatureMatrix, k: usize) -> Result<CcaModel> {
    fit_standard_cca_with(u, v, k, DEFAULT_EPS_REL, DEFAULT_GAMMA_FLOOR)
}

pub fn fit_standard_cca_with(
    u: &FeatureMatrix,
    v: &FeatureMatrix,
    k: usize,
    eps_rel: f64,
    gamma_floor: f64,
) -> Result<CcaModel> {
    if u.count() != v.count() {
        return Err(AaccaError::shape(
            format!("{} paired samples", u.count()),
            format!("{} samples", v.count()),
        ));
    }
    let k = check_k(k, u.dim())?;
    let bundle = CovarianceBundle::new(u, v, eps_rel);
    let c_tt_solver = SpdSolver::new(&bundle.c_tt)?;
    // C_tr = V U' / n.
    let c_tr = v.data() * u.data().transpose() / u.count() as f64;
    let out = solve_projections(&c_tr, &bundle.c_rr, &c_tt_solver, k, gamma_floor)?;
    Ok(CcaModel {
        p_r: out.p_r,
        p_t: out.p_t,
        gammas: out.gammas,
        col_means_r: u.col_means().clone(),
        col_means_t: v.col_means().clone(),
        beta: 0.0,
        ridge_used: bundle.ridge_used(),
    })
}

fn check_k(k: usize, d_u: usize) -> Result<usize> {
    if k < 1 || k > d_u {
        return Err(AaccaError::Config(format!(
            "k must be between 1 and the reference dimension {d_u}, got {k}"
        )));
    }
    Ok(k)
}

/// Contraction bound of the fixed-point map: `L(beta) = beta * S / gamma_min`
/// with `S` the summed L1 norms of the rank-structured context products.
#[derive(Debug, Clone, Copy)]
pub struct LipschitzBound {
    pub context_l1_sum: f64,
    pub gamma_min: f64,
}

impl LipschitzBound {
    /// Largest beta with a guaranteed unique fixed point; infinite when the
    /// contexts are empty.
    pub fn beta_max(&self) -> f64 {
        if self.context_l1_sum == 0.0 {
            f64::INFINITY
        } else {
            self.gamma_min / self.context_l1_sum
        }
    }

    /// Contraction constant for a given beta.
    pub fn l_for(&self, beta: f64) -> f64 {
        if self.context_l1_sum == 0.0 {
            0.0
        } else {
            beta * self.context_l1_sum / self.gamma_min
        }
    }
}

/// `S = sum_c ||E_c 1 F_c'||_1 + sum_c ||G_c 1 H_c'||_1` without
/// materializing the rank-one products: `E_c 1_vu F_c' = (E_c 1)(F_c 1)'`, so
/// each L1 norm is the product of two vector L1 norms.
fn context_l1_sum(
    omega_v: &[DMatrix<f64>],
    omega_u: &[DMatrix<f64>],
    c_tt_solver: &SpdSolver,
    c_rr_solver: &SpdSolver,
) -> f64 {
    let d_v = omega_v.first().map_or(0, |m| m.nrows());
    let d_u = omega_u.first().map_or(0, |m| m.nrows());
    let ctt_inv_ones = c_tt_solver.solve_vector(&DVector::from_element(d_v, 1.0));
    let crr_inv_ones = c_rr_solver.solve_vector(&DVector::from_element(d_u, 1.0));
    let mut sum = 0.0;
    for (ov, ou) in omega_v.iter().zip(omega_u) {
        let e1 = ov * &ctt_inv_ones;
        let f1 = ou * &crr_inv_ones;
        let g1 = ov.transpose() * &ctt_inv_ones;
        let h1 = ou.transpose() * &crr_inv_ones;
        sum += e1.lp_norm(1) * f1.lp_norm(1);
        sum += g1.lp_norm(1) * h1.lp_norm(1);
    }
    sum
}

/// Computes the contraction bound for given views, contexts and (ridged)
/// covariances. `gamma_min` must be a positive lower bound on the retained
/// canonical correlations.
pub fn lipschitz_bound(
    u: &FeatureMatrix,
    v: &FeatureMatrix,
    ctx_u: &ContextSystem,
    ctx_v: &ContextSystem,
    c_rr: &DMatrix<f64>,
    c_tt: &DMatrix<f64>,
    gamma_min: f64,
) -> Result<LipschitzBound> {
    if !(gamma_min > 0.0) {
        return Err(AaccaError::Config(format!(
            "gamma_min must be > 0, got {gamma_min}"
        )));
    }
    let c_rr_solver = SpdSolver::new(c_rr)?;
    let c_tt_solver = SpdSolver::new(c_tt)?;
    let omega_v = context_covariances(v, ctx_v);
    let omega_u = context_covariances(u, ctx_u);
    let s = context_l1_sum(&omega_v, &omega_u, &c_tt_solver, &c_rr_solver);
    Ok(LipschitzBound {
        context_l1_sum: s,
        gamma_min,
    })
}

/// Alignment-agnostic CCA: starting from the unregularized solution, the
/// affinity kernel and the projections are updated in alternation until the
/// kernel stops moving (relative L1 change below `tol`).
///
/// Non-convergence at `max_iter` is reported through the trace, not as an
/// error.
pub fn fit_aa_cca(
    u: &FeatureMatrix,
    v: &FeatureMatrix,
    d: &PairingMatrix,
    ctx_u: &ContextSystem,
    ctx_v: &ContextSystem,
    config: &AaCcaConfig,
) -> Result<(CcaModel, FitTrace)> {
    config.validate()?;
    validate_counts(u, v, d)?;
    if ctx_u.c_count() != ctx_v.c_count() {
        return Err(AaccaError::shape(
            format!("{} context types in both views", ctx_u.c_count()),
            format!("{}", ctx_v.c_count()),
        ));
    }
    if ctx_u.n() != u.count() || ctx_v.n() != v.count() {
        return Err(AaccaError::shape(
            format!("contexts over {} / {} samples", u.count(), v.count()),
            format!("{} / {}", ctx_u.n(), ctx_v.n()),
        ));
    }
    let k = check_k(config.k.unwrap_or_else(|| u.dim().min(v.dim())), u.dim())?;

    let bundle = CovarianceBundle::new(u, v, config.eps_rel);
    let c_rr_solver = SpdSolver::new(&bundle.c_rr)?;
    let c_tt_solver = SpdSolver::new(&bundle.c_tt)?;

    let term1 = pairing_term(u, v, d)?;
    let omega_v = context_covariances(v, ctx_v);
    let omega_u = context_covariances(u, ctx_u);
    let s = context_l1_sum(&omega_v, &omega_u, &c_tt_solver, &c_rr_solver);

    // Initialization: the beta = 0 solution of the same eigenproblem, which
    // coincides with standard CCA whenever the pairing is a perfect matching.
    let mut k_prev = term1.clone();
    let mut state = solve_projections(&k_prev, &bundle.c_rr, &c_tt_solver, k, config.gamma_floor)?;

    let mut records: Vec<IterationRecord> = Vec::new();
    let mut converged = false;
    let mut bound_violated = false;
    let mut prev_residual: Option<f64> = None;

    for _ in 1..=config.max_iter {
        let gamma_min = state.gammas[state.gammas.len() - 1];
        let bound = LipschitzBound {
            context_l1_sum: s,
            gamma_min,
        };
        if config.beta >= bound.beta_max() {
            bound_violated = true;
        }

        let k_cur = if config.beta == 0.0 {
            term1.clone()
        } else {
            let pi = &state.p_t * state.p_r.transpose();
            &term1 + context_terms(&omega_v, &omega_u, &pi) * config.beta
        };
        let residual = entrywise_l1(&(&k_cur - &k_prev));
        let ratio = prev_residual.map(|p| if p > 0.0 { residual / p } else { 0.0 });
        records.push(IterationRecord {
            k_residual_l1: residual,
            gamma_min,
            contraction_ratio: ratio,
        });

        let denom = entrywise_l1(&k_prev).max(RESIDUAL_DENOM_FLOOR);
        k_prev = k_cur;
        if residual / denom < config.tol {
            converged = true;
            break;
        }
        state = solve_projections(&k_prev, &bundle.c_rr, &c_tt_solver, k, config.gamma_floor)?;
        prev_residual = Some(residual);
    }

    let gamma_min_final = state.gammas[state.gammas.len() - 1];
    let final_bound = LipschitzBound {
        context_l1_sum: s,
        gamma_min: gamma_min_final,
    };
    let trace = FitTrace {
        iterations: records.len(),
        records,
        converged,
        lipschitz_l: Some(final_bound.l_for(config.beta)),
        beta_max: final_bound.beta_max(),
        context_l1_sum: s,
        bound_violated,
    };
    let model = CcaModel {
        p_r: state.p_r,
        p_t: state.p_t,
        gammas: state.gammas,
        col_means_r: u.col_means().clone(),
        col_means_t: v.col_means().clone(),
        beta: config.beta,
        ridge_used: bundle.ridge_used(),
    };
    Ok((model, trace))
}

// --- serialization ---------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixPayload {
    rows: usize,
    cols: usize,
    /// Little-endian f64 values, column-major, base64.
    data: String,
}

fn encode_matrix(m: &DMatrix<f64>) -> MatrixPayload {
    let mut bytes = Vec::with_capacity(m.len() * 8);
    for v in m.as_slice() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    MatrixPayload {
        rows: m.nrows(),
        cols: m.ncols(),
        data: BASE64.encode(bytes),
    }
}

fn decode_matrix(p: &MatrixPayload, name: &str) -> Result<DMatrix<f64>> {
    let bytes = BASE64
        .decode(&p.data)
        .map_err(|e| AaccaError::ModelFormat(format!("{name}: bad base64: {e}")))?;
    if bytes.len() != p.rows * p.cols * 8 {
        return Err(AaccaError::ModelFormat(format!(
            "{name}: payload holds {} bytes, expected {} for {}x{}",
            bytes.len(),
            p.rows * p.cols * 8,
            p.rows,
            p.cols
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DMatrix::from_column_slice(p.rows, p.cols, &values))
}

fn encode_vector(v: &DVector<f64>) -> MatrixPayload {
    encode_matrix(&DMatrix::from_column_slice(v.len(), 1, v.as_slice()))
}

fn decode_vector(p: &MatrixPayload, name: &str) -> Result<DVector<f64>> {
    if p.cols != 1 {
        return Err(AaccaError::ModelFormat(format!(
            "{name}: expected a column vector, got {}x{}",
            p.rows, p.cols
        )));
    }
    Ok(DVector::from_column_slice(decode_matrix(p, name)?.as_slice()))
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    k: usize,
    beta: f64,
    ridge_used: f64,
    gammas: MatrixPayload,
    p_r: MatrixPayload,
    p_t: MatrixPayload,
    col_means_r: MatrixPayload,
    col_means_t: MatrixPayload,
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

impl CcaModel {
    pub fn to_json(&self) -> String {
        let doc = ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            k: self.k(),
            beta: self.beta,
            ridge_used: self.ridge_used,
            gammas: encode_vector(&self.gammas),
            p_r: encode_matrix(&self.p_r),
            p_t: encode_matrix(&self.p_t),
            col_means_r: encode_vector(&self.col_means_r),
            col_means_t: encode_vector(&self.col_means_t),
        };
        serde_json::to_string_pretty(&doc).expect("model document serializes")
    }

    pub fn from_json(text: &str) -> Result<CcaModel> {
        let doc: ModelDocument = serde_json::from_str(text)
            .map_err(|e| AaccaError::ModelFormat(format!("bad model JSON: {e}")))?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(AaccaError::ModelFormat(format!(
                "unsupported format_version {}, expected {MODEL_FORMAT_VERSION}",
                doc.format_version
            )));
        }
        let p_r = decode_matrix(&doc.p_r, "p_r")?;
        let p_t = decode_matrix(&doc.p_t, "p_t")?;
        let gammas = decode_vector(&doc.gammas, "gammas")?;
        let col_means_r = decode_vector(&doc.col_means_r, "col_means_r")?;
        let col_means_t = decode_vector(&doc.col_means_t, "col_means_t")?;
        if p_r.ncols() != doc.k || p_t.ncols() != doc.k || gammas.len() != doc.k {
            return Err(AaccaError::ModelFormat(format!(
                "k = {} does not match payload shapes ({} / {} / {})",
                doc.k,
                p_r.ncols(),
                p_t.ncols(),
                gammas.len()
            )));
        }
        if col_means_r.len() != p_r.nrows() || col_means_t.len() != p_t.nrows() {
            return Err(AaccaError::ModelFormat(
                "centering vectors do not match projection dimensions".into(),
            ));
        }
        Ok(CcaModel {
            p_r,
            p_t,
            gammas,
            col_means_r,
            col_means_t,
            beta: doc.beta,
            ridge_used: doc.ridge_used,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| AaccaError::io(path, e))
    }

    pub fn load(path: &std::path::Path) -> Result<CcaModel> {
        let text = std::fs::read_to_string(path).map_err(|e| AaccaError::io(path, e))?;
        CcaModel::from_json(&text)
    }
}
