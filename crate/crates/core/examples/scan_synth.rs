use aacca::experiments::*;

fn params_from_args(regime: Regime, seed: u64) -> SynthParams {
    let mut p = SynthParams::for_regime(regime, seed);
    for arg in std::env::args().skip(2) {
        let (key, val) = arg.split_once('=').expect("key=val");
        match key {
            "noise" => p.noise = val.parse().unwrap(),
            "train" => p.train_frac = val.parse().unwrap(),
            "dev" => p.dev_frac = val.parse().unwrap(),
            "k" => p.k = Some(val.parse().unwrap()),
            "beta" => p.beta = val.parse().unwrap(),
            "change" => p.change_rate = val.parse().unwrap(),
            "quantile" => p.quantile = val.parse().unwrap(),
            _ => panic!("unknown key {key}"),
        }
    }
    p
}

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_else(|| "trend".into());
    match mode.as_str() {
        "trend" => trend(),
        "sweep" => sweep(),
        "all8" => all8(),
        _ => eprintln!("unknown mode"),
    }
}

fn trend() {
    for seed in 0..5u64 {
        for regime in [Regime::Residual, Regime::Strong] {
            let params = params_from_args(regime, seed);
            let configs = [Table1Config::Standard, Table1Config::Res];
            match run_synth(&configs, &params) {
                Ok((_, _, runs)) => println!(
                    "seed {seed} {:>8}: std=[{:.3} {:.3} {:.3}] res=[{:.3} {:.3} {:.3}] ratio_unl={:.2}",
                    regime.name(),
                    runs[0].eer[0], runs[0].eer[1], runs[0].eer[2],
                    runs[1].eer[0], runs[1].eer[1], runs[1].eer[2],
                    runs[1].eer[2] / runs[0].eer[2].max(1e-9),
                ),
                Err(e) => println!("seed {seed} {}: ERROR {e}", regime.name()),
            }
        }
    }
}

fn all8() {
    for seed in 0..5u64 {
        for regime in [Regime::Residual, Regime::Strong] {
            let params = params_from_args(regime, seed);
            match run_synth(&ALL_CONFIGS, &params) {
                Ok((_, _, runs)) => {
                    let line: Vec<String> = runs
                        .iter()
                        .map(|r| format!("{}={:.3}", r.config.name(), r.eer[2]))
                        .collect();
                    println!("seed {seed} {:>8}: {}", regime.name(), line.join(" "));
                }
                Err(e) => println!("seed {seed} {}: ERROR {e}", regime.name()),
            }
        }
    }
}

fn sweep() {
    for seed in 0..5u64 {
        let mut line = format!("seed {seed} dev-EER:");
        for beta in [0.0, 1e-3, 1e-2, 1e-1, 1.0] {
            let mut params = params_from_args(Regime::Strong, seed);
            params.beta = beta;
            match run_synth(&[Table1Config::SupCa], &params) {
                Ok((_, _, runs)) => line.push_str(&format!(" {:.3}", runs[0].eer[1])),
                Err(e) => line.push_str(&format!(" ERR({e})")),
            }
        }
        println!("{line}");
    }
}
