//! End-to-end tests of the `sfp` binary: pipeline plumbing, file formats,
//! exit codes, and flag/config handling.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sfp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sfp"))
}

fn run(args: &[&str]) -> Output {
    sfp().args(args).output().expect("binary runs")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn path_str(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn gen_train_predict_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let data = path_str(dir.path(), "data.csv");
    let model = path_str(dir.path(), "m.json");
    let preds = path_str(dir.path(), "preds.csv");

    assert_exit(
        &run(&["gen", "--kind", "mixture3", "--n", "300", "--seed", "1", "--out", &data]),
        0,
    );
    assert_exit(
        &run(&[
            "train", "--data", &data, "--label", "y", "--k", "4", "--alpha", "1", "--gamma",
            "0.05", "--lambda", "25", "--seed", "7", "--model", &model,
        ]),
        0,
    );
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(doc["version"], "sfp-model/1");
    assert_eq!(doc["k"], 4);
    assert_eq!(doc["M"], 3);
    assert_eq!(doc["centers"].as_array().unwrap().len(), 4);
    assert!(doc["preprocess_stats"].is_object());

    assert_exit(&run(&["predict", "--model", &model, "--data", &data, "--out", &preds]), 0);
    let mut reader = csv::Reader::from_path(&preds).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        vec![
            "id",
            "predicted_label",
            "score_class_1",
            "score_class_2",
            "score_class_3",
            "membership_1",
            "membership_2",
            "membership_3",
            "membership_4",
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 300);
    // Scores are a probability vector; predictions recover most training
    // labels on this easy mixture.
    let mut correct = 0;
    let truth = csv::Reader::from_path(&data)
        .unwrap()
        .records()
        .map(|r| r.unwrap().get(2).unwrap().to_string())
        .collect::<Vec<_>>();
    for (row, want) in rows.iter().zip(&truth) {
        let scores: f64 = (2..5).map(|c| row[c].parse::<f64>().unwrap()).sum();
        assert!((scores - 1.0).abs() < 1e-9);
        if &row[1] == want.as_str() {
            correct += 1;
        }
    }
    assert!(correct >= 270, "only {correct}/300 training points recovered");
}

#[test]
fn predict_works_without_a_label_column() {
    let dir = tempfile::tempdir().unwrap();
    let data = path_str(dir.path(), "data.csv");
    let unlabeled = path_str(dir.path(), "unlabeled.csv");
    let model = path_str(dir.path(), "m.json");
    let preds = path_str(dir.path(), "preds.csv");

    run(&["gen", "--kind", "xor", "--n", "120", "--seed", "2", "--out", &data]);
    assert_exit(
        &run(&[
            "train", "--data", &data, "--label", "y", "--k", "8", "--alpha", "1", "--gamma",
            "0.1", "--lambda", "5", "--seed", "3", "--model", &model,
        ]),
        0,
    );
    // Strip the label column.
    let mut reader = csv::Reader::from_path(&data).unwrap();
    let mut writer = csv::Writer::from_path(&unlabeled).unwrap();
    writer.write_record(["x1", "x2"]).unwrap();
    for record in reader.records() {
        let r = record.unwrap();
        writer.write_record([&r[0], &r[1]]).unwrap();
    }
    writer.flush().unwrap();
    assert_exit(&run(&["predict", "--model", &model, "--data", &unlabeled, "--out", &preds]), 0);
}

#[test]
fn generated_datasets_roundtrip_through_csv() {
    use sfp_core::synth::{gen_synthetic, SyntheticKind};
    let dir = tempfile::tempdir().unwrap();
    for kind in [
        SyntheticKind::Spiral,
        SyntheticKind::TwoCircle,
        SyntheticKind::Xor,
        SyntheticKind::Mixture3,
    ] {
        let data = gen_synthetic(kind, 200, 31).unwrap();
        let path = dir.path().join("round.csv");
        sfp::csv_io::write_dataset_csv(&path, &data, "y").unwrap();
        let back = sfp::csv_io::reload_dataset_csv(&path, "y", true).unwrap();
        assert_eq!(back, data, "{kind:?} did not roundtrip");
    }
}

#[test]
fn cv_command_reports_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let data = path_str(dir.path(), "data.csv");
    run(&["gen", "--kind", "two_circle", "--n", "200", "--seed", "4", "--out", &data]);
    let out = run(&[
        "cv", "--data", &data, "--label", "y", "--k", "12", "--alpha", "1", "--gamma", "0.1",
        "--lambda", "5", "--seed", "9", "--folds", "5", "--repeats", "2", "--threads", "2",
    ]);
    assert_exit(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("accuracy:"), "{text}");
    assert!(text.contains("auc:"), "{text}");
}

#[test]
fn gme_check_certifies_tight_gaps() {
    let out = run(&["gme-check", "--n", "30", "--k", "2", "--iters", "10", "--seed", "3"]);
    assert_exit(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(doc["max_U_gap"].as_f64().unwrap() < 1e-8);
    assert!(doc["max_param_gap"].as_f64().unwrap() < 1e-8);
    assert_eq!(doc["loglik_trace"].as_array().unwrap().len(), 11);
    assert!(doc["J_trace"].is_array());
}

#[test]
fn decision_grid_covers_both_classes_densely() {
    let dir = tempfile::tempdir().unwrap();
    let data = path_str(dir.path(), "data.csv");
    let model = path_str(dir.path(), "m.json");
    let grid = path_str(dir.path(), "grid.csv");
    run(&["gen", "--kind", "xor", "--n", "400", "--seed", "6", "--out", &data]);
    run(&[
        "train", "--data", &data, "--label", "y", "--k", "12", "--alpha", "2", "--gamma",
        "0.05", "--lambda", "5", "--seed", "8", "--model", &model,
    ]);
    assert_exit(
        &run(&[
            "decision-grid", "--model", &model, "--out", &grid, "--x-min", "-1", "--x-max",
            "1", "--y-min", "-1", "--y-max", "1",
        ]),
        0,
    );
    let mut reader = csv::Reader::from_path(&grid).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 200 * 200);
    let ones = rows.iter().filter(|r| &r[2] == "1").count();
    assert!(ones > 10_000 && ones < 30_000, "{ones} cells for class 1");
    // Deep quadrant interiors carry the XOR pattern.
    for row in &rows {
        let x: f64 = row[0].parse().unwrap();
        let y: f64 = row[1].parse().unwrap();
        if x.abs() > 0.55 && y.abs() > 0.55 {
            let want = if x * y > 0.0 { "1" } else { "2" };
            assert_eq!(&row[2], want, "at ({x}, {y})");
        }
    }
}

#[test]
fn config_file_supplies_flags_and_argv_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out_a = path_str(dir.path(), "a.csv");
    let out_b = path_str(dir.path(), "b.csv");
    std::fs::write(
        &cfg,
        format!(r#"{{"kind": "xor", "n": 60, "seed": 5, "out": "{out_a}"}}"#),
    )
    .unwrap();
    assert_exit(&run(&["gen", "--config", cfg.to_str().unwrap()]), 0);
    assert!(PathBuf::from(&out_a).exists());
    // Command line overrides the config file.
    assert_exit(
        &run(&["gen", "--config", cfg.to_str().unwrap(), "--out", &out_b, "--n", "70"]),
        0,
    );
    let rows = csv::Reader::from_path(&out_b).unwrap().records().count();
    assert_eq!(rows, 70);
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let data = path_str(dir.path(), "data.csv");
    run(&["gen", "--kind", "xor", "--n", "20", "--seed", "1", "--out", &data]);

    // 2: usage errors (unknown flag, missing seed, out-of-range value).
    assert_exit(&run(&["gen", "--kind", "xor", "--n", "20", "--bogus", "1"]), 2);
    assert_exit(&run(&["gen", "--kind", "xor", "--n", "20", "--out", "x.csv"]), 2);
    assert_exit(
        &run(&[
            "train", "--data", &data, "--label", "y", "--k", "2", "--alpha", "1", "--gamma",
            "-3", "--lambda", "1", "--seed", "1", "--model", "m.json",
        ]),
        2,
    );

    // 3: data/schema errors (missing file, unknown label column).
    assert_exit(
        &run(&[
            "train", "--data", "nope.csv", "--label", "y", "--k", "2", "--alpha", "1",
            "--gamma", "1", "--lambda", "1", "--seed", "1", "--model", "m.json",
        ]),
        3,
    );
    assert_exit(
        &run(&[
            "train", "--data", &data, "--label", "zz", "--k", "2", "--alpha", "1", "--gamma",
            "1", "--lambda", "1", "--seed", "1", "--model", "m.json",
        ]),
        3,
    );

    // 4: numeric failures (k exceeding the data size).
    let model = path_str(dir.path(), "m.json");
    assert_exit(
        &run(&[
            "train", "--data", &data, "--label", "y", "--k", "50", "--alpha", "1", "--gamma",
            "1", "--lambda", "1", "--seed", "1", "--model", &model,
        ]),
        4,
    );
}

#[test]
fn primed_flags_win_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let data = path_str(dir.path(), "data.csv");
    let model = path_str(dir.path(), "m.json");
    run(&["gen", "--kind", "xor", "--n", "80", "--seed", "1", "--out", &data]);
    let out = run(&[
        "train", "--data", &data, "--label", "y", "--k", "4", "--alpha", "99", "--gamma",
        "99", "--lambda", "99", "--alpha-prime", "0.5", "--gamma-prime", "0.8",
        "--lambda-prime", "0.5", "--seed", "1", "--model", &model,
    ]);
    assert_exit(&out, 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("primed values win"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    // gamma' = 0.8 maps to gamma = 0.25.
    assert!((doc["hyperparams"]["gamma"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn select_features_reports_names_and_indices() {
    let dir = tempfile::tempdir().unwrap();
    let data = path_str(dir.path(), "data.csv");
    let model = path_str(dir.path(), "m.json");
    run(&["gen", "--kind", "mixture3", "--n", "300", "--seed", "2", "--out", &data]);
    run(&[
        "train", "--data", &data, "--label", "y", "--k", "4", "--alpha", "1", "--gamma",
        "0.05", "--lambda", "25", "--seed", "3", "--model", &model,
    ]);
    let out = run(&["select-features", "--model", &model, "--threshold", "0.9"]);
    assert_exit(&out, 0);
    let doc: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(doc["threshold"], 0.9);
    assert_eq!(doc["per_cluster"].as_array().unwrap().len(), 4);
    assert_eq!(doc["feature_names"], serde_json::json!(["x1", "x2"]));
}

#[test]
fn tune_writes_the_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let data = path_str(dir.path(), "data.csv");
    let report = path_str(dir.path(), "report.csv");
    run(&["gen", "--kind", "xor", "--n", "60", "--seed", "3", "--out", &data]);
    let out = run(&[
        "tune", "--data", &data, "--label", "y", "--seed", "11", "--threads", "2",
        "--max-iters", "5", "--out", &report,
    ]);
    assert_exit(&out, 0);
    let mut reader = csv::Reader::from_path(&report).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        vec![
            "k",
            "alpha_prime",
            "gamma_prime",
            "lambda_prime",
            "mean_accuracy",
            "std_accuracy",
            "runtime_seconds"
        ]
    );
    assert_eq!(reader.records().count(), 250);
    assert!(String::from_utf8_lossy(&out.stdout).contains("best point"));
}
