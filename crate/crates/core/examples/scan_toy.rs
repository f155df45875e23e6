use aacca::experiments::{run_toy, ToyParams};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let beta: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.01);
    let knn: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(10);
    let k: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(3);
    let cnoise: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0.05);
    let pnoise: f64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(0.05);
    let quantile: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(0.1);
    let nseeds: u64 = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(20);
    let mut wins = 0;
    for seed in 0..nseeds {
        let params = ToyParams {
            beta, knn, k: Some(k), color_noise: cnoise, coord_noise: pnoise, quantile, seed,
            ..Default::default()
        };
        let run = run_toy(&params).unwrap();
        let mark = if run.aa_accuracy > run.baseline_accuracy { wins += 1; "WIN " } else { "LOSS" };
        println!("seed {seed}: {mark} aa={:.3} base={:.3}", run.aa_accuracy, run.baseline_accuracy);
    }
    println!("wins={wins}/{nseeds}");
}
