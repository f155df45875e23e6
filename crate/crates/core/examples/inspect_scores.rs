use aacca::datasets::{generate_patch_scene, CellLabel};
use aacca::experiments::*;

fn main() {
    let seed = 0u64;
    let mut p = SynthParams::for_regime(Regime::Residual, seed);
    for arg in std::env::args().skip(1) {
        let (key, val) = arg.split_once('=').expect("key=val");
        match key {
            "noise" => p.noise = val.parse().unwrap(),
            "k" => p.k = Some(val.parse().unwrap()),
            "quantile" => p.quantile = val.parse().unwrap(),
            "shift" => { p.shift_hi = val.parse().unwrap(); }
            _ => panic!("unknown {key}"),
        }
    }
    let scene = generate_patch_scene(p.rows, p.cols, p.d, p.change_rate, p.shift_lo, p.shift_hi, p.noise, seed).unwrap();
    let splits = make_splits(p.rows, p.cols, p.train_frac, p.dev_frac, seed).unwrap();

    for config in [Table1Config::Standard, Table1Config::Res] {
        let run = run_scene_config(&scene, &splits, config, &p).unwrap();
        // recompute scores on unlabeled split via cosine
        let mut nc = Vec::new();
        let mut ch = Vec::new();
        for &cell in &splits.unlabeled {
            let u = scene.features_r.column(cell).into_owned();
            let v = scene.features_t.column(cell).into_owned();
            let s = aacca::eval::change_score(&run.model, &u, &v).unwrap();
            match scene.labels[cell] {
                CellLabel::NoChange => nc.push(s),
                CellLabel::Change => ch.push(s),
            }
        }
        let stat = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
            (m, s)
        };
        let (m0, s0) = stat(&nc);
        let (m1, s1) = stat(&ch);
        println!(
            "{:>10} unl: no-change {:.2}±{:.2}  change {:.2}±{:.2}  eer_unl={:.3} gammas[0]={:.3} k={}",
            config.name(), m0, s0, m1, s1, run.eer[2],
            run.model.gammas()[0], run.model.k()
        );
    }
}
