//! CSV ingestion and export (RFC-4180-style, UTF-8, header row required).

use std::path::Path;

use sfp_core::eval::{MetricReport, ReparamPoint};
use sfp_core::table::{ColumnType, RawTable};
use sfp_core::{Dataset, Mat};

use crate::error::CliError;

/// Reads a CSV file into a typed table. `label_column`, when given, must
/// name a header column; missing cells are the tokens "", "?", and "NA".
pub fn load_csv(
    path: &Path,
    label_column: Option<&str>,
    schema_hints: &[(String, ColumnType)],
) -> Result<RawTable, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        rows.push(record.iter().map(str::to_string).collect::<Vec<String>>());
    }
    Ok(RawTable::from_rows(
        &header,
        &rows,
        label_column,
        schema_hints,
    )?)
}

/// Does the CSV header of `path` contain `column`?
pub fn header_contains(path: &Path, column: &str) -> Result<bool, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok(reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .iter()
        .any(|h| h == column))
}

/// Writes a dataset as `x1..xp` feature columns plus a label column. Floats
/// print in shortest round-trip form, so reloading reproduces them exactly.
pub fn write_dataset_csv(path: &Path, data: &Dataset, label_name: &str) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)?;
    let p = data.feature_count();
    let mut header: Vec<String> = (1..=p).map(|i| format!("x{i}")).collect();
    header.push(label_name.to_string());
    writer.write_record(&header)?;
    for i in 0..data.len() {
        let mut row: Vec<String> = data.features().row(i).iter().map(f64::to_string).collect();
        row.push(data.labels()[i].to_string());
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// One prediction row for the batch-prediction export.
pub struct PredictionRow {
    pub id: usize,
    pub label: String,
    pub class_scores: Vec<f64>,
    pub memberships: Vec<f64>,
}

/// Writes predictions as `id, predicted_label, score_class_1..M,
/// membership_1..k`.
pub fn write_predictions_csv(path: &Path, rows: &[PredictionRow]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)?;
    let m = rows.first().map_or(0, |r| r.class_scores.len());
    let k = rows.first().map_or(0, |r| r.memberships.len());
    let mut header = vec!["id".to_string(), "predicted_label".to_string()];
    header.extend((1..=m).map(|i| format!("score_class_{i}")));
    header.extend((1..=k).map(|j| format!("membership_{j}")));
    writer.write_record(&header)?;
    for row in rows {
        let mut record = vec![row.id.to_string(), row.label.clone()];
        record.extend(row.class_scores.iter().map(f64::to_string));
        record.extend(row.memberships.iter().map(f64::to_string));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the tuning report: one row per grid point.
pub fn write_tuning_report_csv(
    path: &Path,
    rows: &[(ReparamPoint, MetricReport, f64)],
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record([
        "k",
        "alpha_prime",
        "gamma_prime",
        "lambda_prime",
        "mean_accuracy",
        "std_accuracy",
        "runtime_seconds",
    ])?;
    for (point, report, runtime) in rows {
        writer.write_record([
            point.k.to_string(),
            point.alpha_prime.to_string(),
            point.gamma_prime.to_string(),
            point.lambda_prime.to_string(),
            report.accuracy.mean.to_string(),
            report.accuracy.std.to_string(),
            runtime.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes a dense decision grid as `(x1, x2, predicted_label)` triples.
pub fn write_decision_grid_csv(
    path: &Path,
    rows: &[(f64, f64, String)],
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["x1", "x2", "predicted_label"])?;
    for (x1, x2, label) in rows {
        writer.write_record([x1.to_string(), x2.to_string(), label.clone()])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes per-fold CV scores.
pub fn write_fold_scores_csv(path: &Path, report: &MetricReport) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["fold", "accuracy", "sensitivity", "specificity", "auc"])?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for (i, fold) in report.per_fold.iter().enumerate() {
        writer.write_record([
            (i + 1).to_string(),
            fold.accuracy.to_string(),
            opt(fold.sensitivity),
            opt(fold.specificity),
            opt(fold.auc),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Round-trip helper for tests and the `gen` command: a freshly generated
/// numeric dataset written by [`write_dataset_csv`] reloads identically.
pub fn reload_dataset_csv(
    path: &Path,
    label_name: &str,
    classification: bool,
) -> Result<Dataset, CliError> {
    let table = load_csv(path, Some(label_name), &[])?;
    Ok(table.to_dataset_raw(classification)?)
}

/// Assembles an in-memory `RawTable` from a numeric matrix (used by the
/// decision-grid exporter to reuse stored preprocessing statistics).
pub fn table_from_matrix(names: &[String], features: &Mat) -> Result<RawTable, CliError> {
    let header: Vec<String> = names.to_vec();
    let rows: Vec<Vec<String>> = (0..features.rows())
        .map(|i| features.row(i).iter().map(f64::to_string).collect())
        .collect();
    Ok(RawTable::from_rows(&header, &rows, None, &[])?)
}
