use sfp_core::synth::{gen_synthetic, SyntheticKind};
use sfp_core::table::fit_preprocess;
use sfp_core::train::{initialize, update_centers, update_memberships, update_prototypes, update_weights};
use sfp_core::model::distance_matrix;
use sfp_core::loss::LossKind;
use std::time::Instant;

fn main() {
    let data = gen_synthetic(SyntheticKind::TwoCircle, 1000, 12).unwrap();
    let header: Vec<String> = vec!["x1".into(), "x2".into(), "y".into()];
    let rows: Vec<Vec<String>> = (0..data.len()).map(|i| vec![
        data.features().get(i,0).to_string(),
        data.features().get(i,1).to_string(),
        data.labels()[i].to_string()]).collect();
    let table = sfp_core::table::RawTable::from_rows(&header, &rows, Some("y"), &[]).unwrap();
    let (ds, _) = fit_preprocess(&table, LossKind::Logloss).unwrap();
    let k = 801;
    let params = initialize(&ds, k, LossKind::Logloss, 3).unwrap();
    let reps = 30;

    let t = Instant::now();
    let mut d = None;
    for _ in 0..reps { d = Some(distance_matrix(&ds, &params, 1.67).unwrap()); }
    println!("distance:    {:6.1} ms/iter", t.elapsed().as_secs_f64()*1000.0/reps as f64);
    let d = d.unwrap();

    let t = Instant::now();
    let mut u = None;
    for _ in 0..reps { u = Some(update_memberships(&d, 0.333).unwrap()); }
    println!("memberships: {:6.1} ms/iter", t.elapsed().as_secs_f64()*1000.0/reps as f64);
    let u = u.unwrap();

    let t = Instant::now();
    for _ in 0..reps { update_centers(&ds, &u).unwrap(); }
    println!("centers:     {:6.1} ms/iter", t.elapsed().as_secs_f64()*1000.0/reps as f64);

    let t = Instant::now();
    for _ in 0..reps { update_prototypes(&ds, &u, LossKind::Logloss).unwrap(); }
    println!("prototypes:  {:6.1} ms/iter", t.elapsed().as_secs_f64()*1000.0/reps as f64);

    let t = Instant::now();
    for _ in 0..reps { update_weights(&ds, &u, &params.centers, 19.0).unwrap(); }
    println!("weights:     {:6.1} ms/iter", t.elapsed().as_secs_f64()*1000.0/reps as f64);
}
