use sfp_core::synth::{gen_synthetic, SyntheticKind};
use sfp_core::table::fit_preprocess;
use sfp_core::train::{fit, FitConfig};
use sfp_core::loss::LossKind;
use sfp_core::Hyperparams;
use std::time::Instant;

fn main() {
    let data = gen_synthetic(SyntheticKind::TwoCircle, 1000, 12).unwrap();
    // standardize through a quick table round-trip
    let header: Vec<String> = vec!["x1".into(), "x2".into(), "y".into()];
    let rows: Vec<Vec<String>> = (0..data.len()).map(|i| vec![
        data.features().get(i,0).to_string(),
        data.features().get(i,1).to_string(),
        data.labels()[i].to_string()]).collect();
    let table = sfp_core::table::RawTable::from_rows(&header, &rows, Some("y"), &[]).unwrap();
    let (ds, _) = fit_preprocess(&table, LossKind::Logloss).unwrap();
    for k in [801usize, 401, 201] {
        let hyper = Hyperparams::new(k, 1.67, 0.333, 19.0).unwrap();
        let cfg = FitConfig { max_iters: 10, center_tol: 1e-3, seed: 5, record_trace: false };
        let t = Instant::now();
        let mut iters = 0;
        for s in 0..3 {
            let mut c = cfg; c.seed = s;
            let r = fit(&ds, &hyper, LossKind::Logloss, &c).unwrap();
            iters += r.iterations;
        }
        println!("k={k}: {:.3}s for 3 fits (iters {iters})", t.elapsed().as_secs_f64());
    }
}
