//! Seeded synthetic data: a 2D "arc" toy for realignment experiments and a
//! grid patch scene that mimics the structure of bi-temporal imagery
//! (spatially smooth features, contiguous changed regions, controllable
//! per-cell misalignment). Plus feature-matrix CSV I/O.
//!
//! All generators are bit-reproducible functions of their arguments.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use nalgebra::{DMatrix, Rotation2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{AaccaError, Result};

fn randn(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Per-cell ground truth of a patch scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellLabel {
    NoChange,
    Change,
}

/// Two noisy copies of points on a semicircular arc, the second rotated and
/// stored in shuffled order. Colors are a hue ramp over the curvilinear
/// coordinate, so they identify arc positions.
#[derive(Debug, Clone)]
pub struct ArcToy {
    /// Reference positions, `2 x n`.
    pub coords_r: DMatrix<f64>,
    /// Test positions, `2 x n`, in shuffled storage order.
    pub coords_t: DMatrix<f64>,
    /// Reference RGB features in `[0, 1]`, `3 x n`.
    pub colors_r: DMatrix<f64>,
    /// Test RGB features, `3 x n`, clipped to `[0, 1]` after noise.
    pub colors_t: DMatrix<f64>,
    /// `truth_pairing[i]` is the test column holding reference `i`'s partner.
    pub truth_pairing: Vec<usize>,
    /// Number of clipped color channels per test sample.
    pub color_clip_counts: Vec<u32>,
    pub seed: u64,
}

/// Smooth hue ramp: three phase-shifted cosines tracing the full color
/// wheel, a circle in RGB space. The arc parameter lives in `[0, 1)`, so
/// sampled colors stay distinct; colors near the wheel seam are close while
/// their arc positions are far apart, which is what makes nearest-color
/// pairing fragile and spatial context informative.
fn hue_ramp(s: f64) -> [f64; 3] {
    let phi = std::f64::consts::TAU * s;
    let third = std::f64::consts::TAU / 3.0;
    [
        0.5 + 0.5 * phi.cos(),
        0.5 + 0.5 * (phi - third).cos(),
        0.5 + 0.5 * (phi + third).cos(),
    ]
}

/// Smooth 1-D random perturbation field over the arc parameter: a few random
/// harmonics, normalized to unit standard deviation under a uniform
/// parameter.
struct PerturbationField {
    // (amplitude, harmonic, phase)
    waves: Vec<(f64, f64, f64)>,
}

const PERTURBATION_HARMONICS: usize = 1;

impl PerturbationField {
    fn sample(rng: &mut ChaCha8Rng) -> PerturbationField {
        let mut waves: Vec<(f64, f64, f64)> = (1..=PERTURBATION_HARMONICS)
            .map(|m| {
                (
                    randn(rng),
                    m as f64,
                    rng.random_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        let var: f64 = waves.iter().map(|&(a, _, _)| a * a / 2.0).sum();
        let scale = 1.0 / var.sqrt().max(1e-12);
        for w in &mut waves {
            w.0 *= scale;
        }
        PerturbationField { waves }
    }

    fn eval(&self, theta: f64) -> f64 {
        self.waves
            .iter()
            .map(|&(a, m, phi)| a * (m * theta + phi).cos())
            .sum()
    }
}

/// Samples `n` points along a unit-radius semicircular arc, duplicates them
/// through a rotation about the arc centroid, perturbs coordinates and
/// colors with a seeded smooth random field (entrywise standard deviation
/// `coord_noise` / `color_noise`), and shuffles the second set's storage
/// order.
pub fn generate_arc_toy(
    n: usize,
    rotation_deg: f64,
    coord_noise: f64,
    color_noise: f64,
    seed: u64,
) -> Result<ArcToy> {
    if n < 10 {
        return Err(AaccaError::DegenerateInput(format!(
            "arc toy needs at least 10 points, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let thetas: Vec<f64> = (0..n)
        .map(|_| rng.random_range(0.0..std::f64::consts::PI))
        .collect();
    let coords_r = DMatrix::from_fn(2, n, |r, i| {
        if r == 0 {
            thetas[i].cos()
        } else {
            thetas[i].sin()
        }
    });
    let colors_r = DMatrix::from_fn(3, n, |r, i| hue_ramp(thetas[i] / std::f64::consts::PI)[r]);

    // One smooth perturbation field per coordinate/color channel.
    let coord_fields: Vec<PerturbationField> =
        (0..2).map(|_| PerturbationField::sample(&mut rng)).collect();
    let color_fields: Vec<PerturbationField> =
        (0..3).map(|_| PerturbationField::sample(&mut rng)).collect();

    // Rotate about the sampled centroid, then perturb.
    let centroid = Vector2::new(coords_r.row(0).sum() / n as f64, coords_r.row(1).sum() / n as f64);
    let rot = Rotation2::new(rotation_deg.to_radians());
    let mut coords_t_pre = DMatrix::zeros(2, n);
    for i in 0..n {
        let p = Vector2::new(coords_r[(0, i)], coords_r[(1, i)]);
        let q = rot * (p - centroid) + centroid;
        coords_t_pre[(0, i)] = q.x + coord_noise * coord_fields[0].eval(thetas[i]);
        coords_t_pre[(1, i)] = q.y + coord_noise * coord_fields[1].eval(thetas[i]);
    }
    let mut colors_t_pre = DMatrix::zeros(3, n);
    let mut clip_pre = vec![0u32; n];
    for i in 0..n {
        for r in 0..3 {
            let noisy = colors_r[(r, i)] + color_noise * color_fields[r].eval(thetas[i]);
            let clipped = noisy.clamp(0.0, 1.0);
            if clipped != noisy {
                clip_pre[i] += 1;
            }
            colors_t_pre[(r, i)] = clipped;
        }
    }

    // Shuffled storage order for the second set.
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut coords_t = DMatrix::zeros(2, n);
    let mut colors_t = DMatrix::zeros(3, n);
    let mut color_clip_counts = vec![0u32; n];
    let mut truth_pairing = vec![0usize; n];
    for (pos, &old) in order.iter().enumerate() {
        coords_t.set_column(pos, &coords_t_pre.column(old));
        colors_t.set_column(pos, &colors_t_pre.column(old));
        color_clip_counts[pos] = clip_pre[old];
        truth_pairing[old] = pos;
    }

    Ok(ArcToy {
        coords_r,
        coords_t,
        colors_r,
        colors_t,
        truth_pairing,
        color_clip_counts,
        seed,
    })
}

/// A grid scene: smooth reference features, test features sampled at
/// misaligned positions, contiguous changed regions drawn from an
/// independent field.
#[derive(Debug, Clone)]
pub struct PatchScene {
    pub rows: usize,
    pub cols: usize,
    /// `d x (rows * cols)`, cells in row-major order.
    pub features_r: DMatrix<f64>,
    pub features_t: DMatrix<f64>,
    pub labels: Vec<CellLabel>,
    /// Per-cell `(row, col)` shift in cell units applied to the test view.
    pub misalignment: Vec<(f64, f64)>,
    pub change_rate: f64,
    pub seed: u64,
}

impl PatchScene {
    pub fn n_cells(&self) -> usize {
        self.rows * self.cols
    }

    pub fn cell_index(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }
}

/// Number of cosine components per band per feature dimension.
const FIELD_WAVES: usize = 16;
/// Frequency cap of the smooth band (radians per cell); keeps neighboring
/// cells correlated.
const FIELD_SMOOTH_FREQ: f64 = 1.0;
/// Frequency range of the fine band; gives sub-cell shifts a measurable
/// feature cost, the way imagery texture does.
const FIELD_FINE_FREQ: (f64, f64) = (2.5, 5.0);
/// Amplitude split between the bands (standard deviations).
const FIELD_SMOOTH_STD: f64 = 0.8;
const FIELD_FINE_STD: f64 = 0.6;

/// Two-band random field: per feature dimension, a smooth mixture of random
/// plane waves plus a fine-texture mixture.
struct WaveField {
    // (amplitude, freq_r, freq_c, phase) per wave per dim
    waves: Vec<[f64; 4]>,
    d: usize,
}

impl WaveField {
    fn sample(rng: &mut ChaCha8Rng, d: usize) -> WaveField {
        let per_band = 1.0 / (FIELD_WAVES as f64 / 2.0).sqrt();
        let mut waves = Vec::with_capacity(d * 2 * FIELD_WAVES);
        for dim in 0..d {
            // Decaying amplitude spectrum across feature dimensions, so
            // pairwise distances do not concentrate the way equal-variance
            // high-dimensional noise would.
            let dim_scale = (1.0 + dim as f64).powf(-0.6);
            for _ in 0..FIELD_WAVES {
                waves.push([
                    dim_scale * FIELD_SMOOTH_STD * per_band * randn(rng),
                    rng.random_range(-FIELD_SMOOTH_FREQ..FIELD_SMOOTH_FREQ),
                    rng.random_range(-FIELD_SMOOTH_FREQ..FIELD_SMOOTH_FREQ),
                    rng.random_range(0.0..std::f64::consts::TAU),
                ]);
            }
            for _ in 0..FIELD_WAVES {
                let mag = rng.random_range(FIELD_FINE_FREQ.0..FIELD_FINE_FREQ.1);
                let angle = rng.random_range(0.0..std::f64::consts::TAU);
                waves.push([
                    dim_scale * FIELD_FINE_STD * per_band * randn(rng),
                    mag * angle.sin(),
                    mag * angle.cos(),
                    rng.random_range(0.0..std::f64::consts::TAU),
                ]);
            }
        }
        WaveField { waves, d }
    }

    fn eval(&self, dim: usize, r: f64, c: f64) -> f64 {
        let per_dim = 2 * FIELD_WAVES;
        self.waves[dim * per_dim..(dim + 1) * per_dim]
            .iter()
            .map(|w| w[0] * (w[1] * r + w[2] * c + w[3]).cos())
            .sum()
    }

    /// Evaluates every dimension on the integer grid.
    fn grid(&self, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.d, rows * cols, |dim, cell| {
            self.eval(dim, (cell / cols) as f64, (cell % cols) as f64)
        })
    }
}

/// Rectifying nonlinearity applied to sampled field values: per-dimension
/// thresholded activations give the features the sparse, heavy-tailed
/// distance geometry of deep-network patch descriptors.
fn featurize(value: f64, dim: usize) -> f64 {
    let dim_scale = (1.0 + dim as f64).powf(-0.6);
    (value - 0.35 * dim_scale).max(0.0)
}

/// Bilinear interpolation of a gridded field (`d x (rows*cols)`, row-major
/// cells) at a continuous position, clamped to the grid.
fn bilinear(grid: &DMatrix<f64>, rows: usize, cols: usize, dim: usize, r: f64, c: f64) -> f64 {
    let r = r.clamp(0.0, (rows - 1) as f64);
    let c = c.clamp(0.0, (cols - 1) as f64);
    let r0 = r.floor() as usize;
    let c0 = c.floor() as usize;
    let r1 = (r0 + 1).min(rows - 1);
    let c1 = (c0 + 1).min(cols - 1);
    let wr = r - r0 as f64;
    let wc = c - c0 as f64;
    let f00 = grid[(dim, r0 * cols + c0)];
    let f01 = grid[(dim, r0 * cols + c1)];
    let f10 = grid[(dim, r1 * cols + c0)];
    let f11 = grid[(dim, r1 * cols + c1)];
    (1.0 - wr) * ((1.0 - wc) * f00 + wc * f01) + wr * ((1.0 - wc) * f10 + wc * f11)
}

/// Grows scattered contiguous blobs until exactly `target` cells are marked
/// changed. Each blob gets a size cap and a content-mix coefficient (how
/// much of the cell's content the change replaces), so changes vary from
/// subtle to total the way real damage does.
fn grow_change_blobs(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    target: usize,
) -> (Vec<CellLabel>, Vec<f64>) {
    let n = rows * cols;
    let mut labels = vec![CellLabel::NoChange; n];
    let mut mix = vec![0.0_f64; n];
    let mut marked = 0usize;
    let mut frontier: Vec<usize> = Vec::new();
    let mut blob_left = 0usize;
    let mut blob_mix = 0.0;
    while marked < target {
        if blob_left == 0 {
            frontier.clear();
            blob_left = rng.random_range(4..=16);
            blob_mix = rng.random_range(0.5..0.95);
        }
        let cell = if frontier.is_empty() {
            loop {
                let c = rng.random_range(0..n);
                if labels[c] == CellLabel::NoChange {
                    break c;
                }
            }
        } else {
            frontier.swap_remove(rng.random_range(0..frontier.len()))
        };
        if labels[cell] == CellLabel::Change {
            continue;
        }
        labels[cell] = CellLabel::Change;
        mix[cell] = blob_mix;
        marked += 1;
        blob_left -= 1;
        let (r, c) = (cell / cols, cell % cols);
        for (dr, dc) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
            let (nr, nc) = (r as i64 + dr, c as i64 + dc);
            if nr >= 0 && nc >= 0 && (nr as usize) < rows && (nc as usize) < cols {
                let ni = nr as usize * cols + nc as usize;
                if labels[ni] == CellLabel::NoChange {
                    frontier.push(ni);
                }
            }
        }
    }
    (labels, mix)
}

/// Generates a patch scene. The test view samples the reference field at
/// per-cell displaced positions (magnitude uniform in `[shift_lo, shift_hi]`
/// cell units, bilinear interpolation); changed cells draw from an
/// independent field instead; Gaussian noise is added on top.
pub fn generate_patch_scene(
    rows: usize,
    cols: usize,
    d: usize,
    change_rate: f64,
    shift_lo: f64,
    shift_hi: f64,
    noise: f64,
    seed: u64,
) -> Result<PatchScene> {
    if rows * cols < 25 {
        return Err(AaccaError::Config(format!(
            "scene needs at least 25 cells, got {rows}x{cols}"
        )));
    }
    if !(0.0..=1.0).contains(&change_rate) {
        return Err(AaccaError::Config(format!(
            "change_rate must be in [0, 1], got {change_rate}"
        )));
    }
    if !(shift_lo >= 0.0 && shift_hi >= shift_lo) {
        return Err(AaccaError::Config(format!(
            "need 0 <= shift_lo <= shift_hi, got {shift_lo}..{shift_hi}"
        )));
    }
    if !(noise >= 0.0) || d < 1 {
        return Err(AaccaError::Config("noise must be >= 0 and d >= 1".into()));
    }
    let n = rows * cols;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let field_main = WaveField::sample(&mut rng, d);
    let field_alt = WaveField::sample(&mut rng, d);
    let grid_main = field_main.grid(rows, cols);
    let grid_alt = field_alt.grid(rows, cols);
    let features_of = |raw: f64, dim: usize| featurize(raw, dim);

    let target = (change_rate * n as f64).round() as usize;
    let (labels, change_mix) = grow_change_blobs(&mut rng, rows, cols, target);

    let misalignment: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let mag = rng.random_range(shift_lo..=shift_hi);
            (mag * angle.sin(), mag * angle.cos())
        })
        .collect();

    let features_r = DMatrix::from_fn(d, n, |dim, cell| features_of(grid_main[(dim, cell)], dim));
    let mut features_t = DMatrix::zeros(d, n);
    for cell in 0..n {
        let (r, c) = ((cell / cols) as f64, (cell % cols) as f64);
        let (dr, dc) = misalignment[cell];
        // Changed cells replace a blob-specific fraction of their content
        // with the independent field; unchanged cells keep the original.
        let alpha = change_mix[cell];
        let keep = (1.0 - alpha).sqrt();
        let swap = alpha.sqrt();
        for dim in 0..d {
            let original = bilinear(&grid_main, rows, cols, dim, r + dr, c + dc);
            let value = match labels[cell] {
                CellLabel::NoChange => original,
                CellLabel::Change => {
                    keep * original + swap * bilinear(&grid_alt, rows, cols, dim, r + dr, c + dc)
                }
            };
            // Noise scales with the per-dimension signal amplitude.
            let dim_scale = (1.0 + dim as f64).powf(-0.6);
            features_t[(dim, cell)] = features_of(value, dim) + noise * dim_scale * randn(&mut rng);
        }
    }

    Ok(PatchScene {
        rows,
        cols,
        features_r,
        features_t,
        labels,
        misalignment,
        change_rate,
        seed,
    })
}

// --- CSV and bundle I/O -----------------------------------------------------

/// Writes a `dim x count` feature matrix as CSV, one sample per row with a
/// `f0,f1,...` header. Values carry 17 significant digits so reloading is
/// exact.
pub fn save_feature_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    let header: Vec<String> = (0..m.nrows()).map(|i| format!("f{i}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:.16e}", m[(i, j)]));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| AaccaError::io(path, e))
}

/// Loads a feature CSV written by [`save_feature_csv`] (or any numeric CSV
/// with one sample per row) back into a `dim x count` matrix. Parse failures
/// report 1-based row and column.
pub fn load_feature_csv(path: &Path) -> Result<DMatrix<f64>> {
    let file = fs::File::open(path).map_err(|e| AaccaError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let header = match lines.next() {
        Some((_, line)) => line.map_err(|e| AaccaError::io(path, e))?,
        None => {
            return Err(AaccaError::Parse {
                row: 1,
                col: 1,
                msg: "empty file".into(),
            })
        }
    };
    let dim = header.split(',').count();
    if header.trim().is_empty() {
        return Err(AaccaError::Parse {
            row: 1,
            col: 1,
            msg: "empty header".into(),
        });
    }

    let mut values: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for (idx, line) in lines {
        let line = line.map_err(|e| AaccaError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != dim {
            return Err(AaccaError::Parse {
                row: idx + 1,
                col: cells.len(),
                msg: format!("expected {dim} columns, found {}", cells.len()),
            });
        }
        for (col, cell) in cells.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| AaccaError::Parse {
                row: idx + 1,
                col: col + 1,
                msg: format!("not a number: {:?}", cell.trim()),
            })?;
            values.push(v);
        }
        count += 1;
    }
    if count == 0 {
        return Err(AaccaError::Parse {
            row: 2,
            col: 1,
            msg: "no data rows".into(),
        });
    }
    // Values were read row-major (sample-major); store samples as columns.
    let mut m = DMatrix::zeros(dim, count);
    for j in 0..count {
        for i in 0..dim {
            m[(i, j)] = values[j * dim + i];
        }
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct ArcToyMeta {
    kind: String,
    n: usize,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct PatchSceneMeta {
    kind: String,
    rows: usize,
    cols: usize,
    d: usize,
    change_rate: f64,
    seed: u64,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| AaccaError::io(path, e))
}

impl ArcToy {
    /// The full per-sample views used for fitting: positions stacked on top
    /// of colors, `5 x n` per view.
    pub fn stacked_views(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.coords_r.ncols();
        let stack = |coords: &DMatrix<f64>, colors: &DMatrix<f64>| {
            DMatrix::from_fn(5, n, |r, i| {
                if r < 2 {
                    coords[(r, i)]
                } else {
                    colors[(r - 2, i)]
                }
            })
        };
        (
            stack(&self.coords_r, &self.colors_r),
            stack(&self.coords_t, &self.colors_t),
        )
    }

    /// Saves the toy as a directory bundle: color features per view, the
    /// ground-truth pairing as labels, both coordinate sets, and metadata.
    pub fn save_bundle(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| AaccaError::io(dir, e))?;
        save_feature_csv(&dir.join("features_r.csv"), &self.colors_r)?;
        save_feature_csv(&dir.join("features_t.csv"), &self.colors_t)?;

        let mut labels = String::from("truth_pairing\n");
        for &j in &self.truth_pairing {
            labels.push_str(&format!("{j}\n"));
        }
        write_text(&dir.join("labels.csv"), &labels)?;

        let mut coords = String::from("x_r,y_r,x_t,y_t\n");
        for i in 0..self.coords_r.ncols() {
            coords.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.coords_r[(0, i)],
                self.coords_r[(1, i)],
                self.coords_t[(0, i)],
                self.coords_t[(1, i)]
            ));
        }
        write_text(&dir.join("coords.csv"), &coords)?;

        let meta = ArcToyMeta {
            kind: "arc_toy".into(),
            n: self.coords_r.ncols(),
            seed: self.seed,
        };
        write_text(
            &dir.join("meta.json"),
            &serde_json::to_string_pretty(&meta).expect("meta serializes"),
        )
    }
}

impl PatchScene {
    /// Saves the scene as a directory bundle: per-view features, cell labels,
    /// cell coordinates with their applied shifts, and metadata.
    pub fn save_bundle(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| AaccaError::io(dir, e))?;
        save_feature_csv(&dir.join("features_r.csv"), &self.features_r)?;
        save_feature_csv(&dir.join("features_t.csv"), &self.features_t)?;

        let mut labels = String::from("label\n");
        for l in &self.labels {
            labels.push_str(match l {
                CellLabel::NoChange => "no-change\n",
                CellLabel::Change => "change\n",
            });
        }
        write_text(&dir.join("labels.csv"), &labels)?;

        let mut coords = String::from("row,col,shift_r,shift_c\n");
        for cell in 0..self.n_cells() {
            let (dr, dc) = self.misalignment[cell];
            coords.push_str(&format!(
                "{},{},{:.16e},{:.16e}\n",
                cell / self.cols,
                cell % self.cols,
                dr,
                dc
            ));
        }
        write_text(&dir.join("coords.csv"), &coords)?;

        let meta = PatchSceneMeta {
            kind: "patch_scene".into(),
            rows: self.rows,
            cols: self.cols,
            d: self.features_r.nrows(),
            change_rate: self.change_rate,
            seed: self.seed,
        };
        write_text(
            &dir.join("meta.json"),
            &serde_json::to_string_pretty(&meta).expect("meta serializes"),
        )
    }
}

/// Parses a labels.csv written by [`PatchScene::save_bundle`].
pub fn load_labels_csv(path: &Path) -> Result<Vec<CellLabel>> {
    let text = fs::read_to_string(path).map_err(|e| AaccaError::io(path, e))?;
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 || line.trim().is_empty() {
            continue;
        }
        labels.push(match line.trim() {
            "no-change" => CellLabel::NoChange,
            "change" => CellLabel::Change,
            other => {
                return Err(AaccaError::Parse {
                    row: idx + 1,
                    col: 1,
                    msg: format!("unknown label {other:?}"),
                })
            }
        });
    }
    Ok(labels)
}
