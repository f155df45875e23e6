use aacca::datasets::generate_patch_scene;
use aacca::experiments::*;
use aacca::linalg::{center_columns, FeatureMatrix};
use aacca::pairing::rbf_scale_from_quantile;
use nalgebra::DMatrix;

fn select(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), idx.len());
    for (p, &j) in idx.iter().enumerate() {
        out.set_column(p, &m.column(j));
    }
    out
}

fn main() {
    let seed = 0u64;
    let p = SynthParams::for_regime(Regime::Residual, seed);
    let scene = generate_patch_scene(p.rows, p.cols, p.d, p.change_rate, p.shift_lo, p.shift_hi, p.noise, seed).unwrap();
    let splits = make_splits(p.rows, p.cols, p.train_frac, p.dev_frac, seed).unwrap();
    let u = center_columns(&select(&scene.features_r, &splits.train)).unwrap();
    let v = center_columns(&select(&scene.features_t, &splits.train)).unwrap();
    let kernel = rbf_scale_from_quantile(&u, &v, 0.1, 100_000, seed ^ 0x5eed_0002).unwrap();
    println!("sigma = {:.4}", kernel.sigma());

    // distance stats
    let mut dists = Vec::new();
    for i in 0..u.count() {
        for j in 0..v.count() {
            dists.push((u.data().column(i) - v.data().column(j)).norm());
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |f: f64| dists[(f * (dists.len() - 1) as f64) as usize];
    println!("dist quantiles: 1%={:.3} 10%={:.3} 50%={:.3}", q(0.01), q(0.1), q(0.5));

    // kappa stats over no-change cross pairs
    let mut big = 0usize;
    let mut total = 0usize;
    let mut mass = 0.0;
    for (pi, &ci) in splits.train.iter().enumerate() {
        for (pj, &cj) in splits.train.iter().enumerate() {
            use aacca::datasets::CellLabel::*;
            if scene.labels[ci] == NoChange && scene.labels[cj] == NoChange && pi != pj {
                let d2 = (u.data().column(pi) - v.data().column(pj)).norm_squared();
                let k = (-d2 / (2.0 * kernel.sigma() * kernel.sigma())).exp();
                total += 1;
                mass += k;
                if k > 0.1 { big += 1; }
            }
        }
    }
    println!("offdiag no-change pairs: {total}, kappa>0.1: {big}, total mass {mass:.1}");
    let _ = FeatureMatrix::from_centered(DMatrix::zeros(1, 1));
}
