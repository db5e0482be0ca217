//! Typed tabular data and the train/transform preprocessing pipeline:
//! median/mode imputation, full one-hot encoding of categoricals, and
//! z-scoring of every resulting column.
//!
//! Fitting statistics and applying them are separate steps so test folds are
//! always transformed with training-fold statistics and never their own.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::math;
use crate::model::Dataset;
use crate::Mat;

/// Tokens treated as missing cells.
pub const MISSING_TOKENS: [&str; 3] = ["", "?", "NA"];

/// Column type, either inferred or forced through a schema hint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq)]
enum Column {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

/// A typed, rectangular table with an optional label column.
///
/// A column is numeric when every non-missing cell parses as a float; any
/// other token makes the whole column categorical.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    feature_names: Vec<String>,
    features: Vec<Column>,
    label_name: Option<String>,
    labels: Option<Vec<String>>,
    n_rows: usize,
}

fn is_missing(token: &str) -> bool {
    MISSING_TOKENS.contains(&token)
}

fn parse_numeric(token: &str) -> Option<f64> {
    token.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

impl RawTable {
    /// Types a header-plus-rows block into a table. `label_column` names the
    /// label; schema hints force a column type where inference is not wanted.
    pub fn from_rows(
        header: &[String],
        rows: &[Vec<String>],
        label_column: Option<&str>,
        schema_hints: &[(String, ColumnType)],
    ) -> Result<RawTable> {
        if header.is_empty() {
            return Err(Error::schema("empty header"));
        }
        if rows.is_empty() {
            return Err(Error::schema("no data rows"));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != header.len() {
                return Err(Error::schema(format!(
                    "row {} has {} cells, header has {}",
                    r + 1,
                    row.len(),
                    header.len()
                )));
            }
        }
        let label_idx = match label_column {
            Some(name) => Some(
                header
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::schema(format!("unknown label column '{name}'")))?,
            ),
            None => None,
        };
        if label_idx.is_some() && header.len() == 1 {
            return Err(Error::schema("table has no feature columns"));
        }

        let mut labels = None;
        if let Some(li) = label_idx {
            let mut values = Vec::with_capacity(rows.len());
            for (r, row) in rows.iter().enumerate() {
                let cell = row[li].trim();
                if is_missing(cell) {
                    return Err(Error::schema(format!(
                        "missing label in row {} (column '{}')",
                        r + 1,
                        header[li]
                    )));
                }
                values.push(cell.to_string());
            }
            labels = Some(values);
        }

        let mut feature_names = Vec::new();
        let mut features = Vec::new();
        for (c, name) in header.iter().enumerate() {
            if Some(c) == label_idx {
                continue;
            }
            let hint = schema_hints
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, t)| *t);
            let cells: Vec<&str> = rows.iter().map(|row| row[c].trim()).collect();
            let inferred = if cells
                .iter()
                .all(|t| is_missing(t) || parse_numeric(t).is_some())
            {
                ColumnType::Numeric
            } else {
                ColumnType::Categorical
            };
            let ty = hint.unwrap_or(inferred);
            let column = match ty {
                ColumnType::Numeric => {
                    let mut vals = Vec::with_capacity(cells.len());
                    for (r, t) in cells.iter().enumerate() {
                        if is_missing(t) {
                            vals.push(None);
                        } else {
                            let v = parse_numeric(t).ok_or_else(|| {
                                Error::schema(format!(
                                    "row {}, column '{}': '{}' is not numeric",
                                    r + 1,
                                    name,
                                    t
                                ))
                            })?;
                            vals.push(Some(v));
                        }
                    }
                    Column::Numeric(vals)
                }
                ColumnType::Categorical => Column::Categorical(
                    cells
                        .iter()
                        .map(|t| {
                            if is_missing(t) {
                                None
                            } else {
                                Some(t.to_string())
                            }
                        })
                        .collect(),
                ),
            };
            feature_names.push(name.clone());
            features.push(column);
        }
        if features.is_empty() {
            return Err(Error::schema("table has no feature columns"));
        }
        Ok(RawTable {
            feature_names,
            features,
            label_name: label_column.map(ToString::to_string),
            labels,
            n_rows: rows.len(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn label_name(&self) -> Option<&str> {
        self.label_name.as_deref()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Number of missing feature cells.
    pub fn missing_cells(&self) -> usize {
        self.features
            .iter()
            .map(|c| match c {
                Column::Numeric(v) => v.iter().filter(|x| x.is_none()).count(),
                Column::Categorical(v) => v.iter().filter(|x| x.is_none()).count(),
            })
            .sum()
    }

    /// Row subset, preserving order.
    pub fn subset(&self, rows: &[usize]) -> RawTable {
        let pick_num = |v: &Vec<Option<f64>>| rows.iter().map(|&i| v[i]).collect();
        let pick_cat =
            |v: &Vec<Option<String>>| rows.iter().map(|&i| v[i].clone()).collect();
        RawTable {
            feature_names: self.feature_names.clone(),
            features: self
                .features
                .iter()
                .map(|c| match c {
                    Column::Numeric(v) => Column::Numeric(pick_num(v)),
                    Column::Categorical(v) => Column::Categorical(pick_cat(v)),
                })
                .collect(),
            label_name: self.label_name.clone(),
            labels: self
                .labels
                .as_ref()
                .map(|l| rows.iter().map(|&i| l[i].clone()).collect()),
            n_rows: rows.len(),
        }
    }

    /// The raw numeric feature matrix of a fully numeric, complete table.
    /// Labels, if any, are ignored.
    pub fn to_feature_matrix(&self) -> Result<Mat> {
        let p = self.features.len();
        let mut data = vec![0.0; self.n_rows * p];
        for (c, col) in self.features.iter().enumerate() {
            let vals = match col {
                Column::Numeric(v) => v,
                Column::Categorical(_) => {
                    return Err(Error::schema(format!(
                        "column '{}' is categorical; preprocess the table instead",
                        self.feature_names[c]
                    )))
                }
            };
            for (r, v) in vals.iter().enumerate() {
                data[r * p + c] = (*v).ok_or_else(|| {
                    Error::schema(format!(
                        "missing cell in row {}, column '{}'",
                        r + 1,
                        self.feature_names[c]
                    ))
                })?;
            }
        }
        Ok(Mat::from_vec(self.n_rows, p, data))
    }

    /// Direct, untransformed conversion for fully numeric, complete tables
    /// (synthetic data round-trips). When `classification` is set the labels
    /// must be integers from 1 and the class count becomes their maximum.
    pub fn to_dataset_raw(&self, classification: bool) -> Result<Dataset> {
        let labels_raw = self
            .labels
            .as_ref()
            .ok_or_else(|| Error::schema("table has no label column"))?;
        let features = self.to_feature_matrix()?;
        let mut labels = Vec::with_capacity(self.n_rows);
        for (r, token) in labels_raw.iter().enumerate() {
            let v = parse_numeric(token).ok_or_else(|| {
                Error::schema(format!("row {}: label '{}' is not numeric", r + 1, token))
            })?;
            labels.push(v);
        }
        let class_count = if classification {
            let mut max = 0.0f64;
            for &y in &labels {
                if y != math::floor(y) || y < 1.0 {
                    return Err(Error::schema("classification labels must be integers from 1"));
                }
                max = max.max(y);
            }
            Some(max as usize)
        } else {
            None
        };
        Dataset::new(features, labels, class_count)
    }
}

/// Per-column transform parameters learned from a training table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ColumnStats {
    Numeric {
        median: f64,
        mean: f64,
        std: f64,
        /// Cleared for constant columns, which are dropped.
        keep: bool,
    },
    Categorical {
        mode: String,
        levels: Vec<String>,
        /// Per-level indicator means and standard deviations.
        means: Vec<f64>,
        stds: Vec<f64>,
        /// Constant indicators are dropped.
        keep: Vec<bool>,
    },
}

/// How label tokens map into the loss domain.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LabelEncoding {
    /// Sorted distinct tokens; token at position `i` becomes class `i + 1`.
    Classes { levels: Vec<String> },
    /// Two sorted tokens mapping to −1 and +1.
    Binary { levels: Vec<String> },
    /// Labels parse directly as reals.
    Numeric,
}

impl LabelEncoding {
    /// Maps a predicted label value back to its original token.
    pub fn decode(&self, value: f64) -> String {
        match self {
            LabelEncoding::Classes { levels } => {
                let idx = (value as usize).saturating_sub(1);
                levels
                    .get(idx)
                    .cloned()
                    .unwrap_or_else(|| value.to_string())
            }
            LabelEncoding::Binary { levels } => {
                let idx = usize::from(value > 0.0);
                levels
                    .get(idx)
                    .cloned()
                    .unwrap_or_else(|| value.to_string())
            }
            LabelEncoding::Numeric => value.to_string(),
        }
    }

    pub fn class_count(&self) -> Option<usize> {
        match self {
            LabelEncoding::Classes { levels } => Some(levels.len()),
            _ => None,
        }
    }
}

/// Everything needed to reproduce a training-table transform on new data.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PreprocessStats {
    pub feature_names: Vec<String>,
    pub columns: Vec<ColumnStats>,
    pub label: LabelEncoding,
}

impl PreprocessStats {
    /// Names of feature columns (or indicator levels) that were dropped as
    /// constant.
    pub fn dropped(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, col) in self.feature_names.iter().zip(&self.columns) {
            match col {
                ColumnStats::Numeric { keep: false, .. } => out.push(name.clone()),
                ColumnStats::Categorical { levels, keep, .. } => {
                    for (level, &k) in levels.iter().zip(keep) {
                        if !k {
                            out.push(format!("{name}={level}"));
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// Names of the transformed feature columns, in output order: numeric
    /// columns keep their name, categorical indicators become
    /// `column=level`.
    pub fn output_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, col) in self.feature_names.iter().zip(&self.columns) {
            match col {
                ColumnStats::Numeric { keep: true, .. } => out.push(name.clone()),
                ColumnStats::Numeric { keep: false, .. } => {}
                ColumnStats::Categorical { levels, keep, .. } => {
                    for (level, &k) in levels.iter().zip(keep) {
                        if k {
                            out.push(format!("{name}={level}"));
                        }
                    }
                }
            }
        }
        out
    }

    /// Width of the transformed feature matrix.
    pub fn output_width(&self) -> usize {
        self.columns
            .iter()
            .map(|c| match c {
                ColumnStats::Numeric { keep, .. } => usize::from(*keep),
                ColumnStats::Categorical { keep, .. } => keep.iter().filter(|&&k| k).count(),
            })
            .sum()
    }
}

fn median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Sample mean and standard deviation (n − 1 denominator).
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, math::sqrt(ss / (n - 1.0)))
}

fn encode_labels(tokens: &[String], loss: LossKind) -> Result<LabelEncoding> {
    match loss {
        LossKind::Logloss | LossKind::Logistic => {
            let mut levels: Vec<String> = tokens.to_vec();
            levels.sort();
            levels.dedup();
            if levels.len() < 2 {
                return Err(Error::schema("label column has fewer than two classes"));
            }
            if loss == LossKind::Logistic {
                if levels.len() != 2 {
                    return Err(Error::schema(format!(
                        "logistic loss needs exactly two classes, found {}",
                        levels.len()
                    )));
                }
                Ok(LabelEncoding::Binary { levels })
            } else {
                Ok(LabelEncoding::Classes { levels })
            }
        }
        LossKind::SquaredError => {
            for (r, t) in tokens.iter().enumerate() {
                if parse_numeric(t).is_none() {
                    return Err(Error::schema(format!(
                        "row {}: label '{}' is not numeric",
                        r + 1,
                        t
                    )));
                }
            }
            Ok(LabelEncoding::Numeric)
        }
    }
}

fn apply_label_encoding(tokens: &[String], encoding: &LabelEncoding) -> Result<Vec<f64>> {
    let lookup = |levels: &Vec<String>, t: &String| {
        levels
            .iter()
            .position(|l| l == t)
            .ok_or_else(|| Error::schema(format!("label '{t}' was not seen during training")))
    };
    match encoding {
        LabelEncoding::Classes { levels } => tokens
            .iter()
            .map(|t| lookup(levels, t).map(|i| (i + 1) as f64))
            .collect(),
        LabelEncoding::Binary { levels } => tokens
            .iter()
            .map(|t| lookup(levels, t).map(|i| if i == 0 { -1.0 } else { 1.0 }))
            .collect(),
        LabelEncoding::Numeric => tokens
            .iter()
            .map(|t| {
                parse_numeric(t)
                    .ok_or_else(|| Error::schema(format!("label '{t}' is not numeric")))
            })
            .collect(),
    }
}

/// Learns imputation values, level dictionaries, and standardization
/// statistics from a training table, returning the transformed dataset and
/// the statistics for reuse on held-out data.
pub fn fit_preprocess(table: &RawTable, loss: LossKind) -> Result<(Dataset, PreprocessStats)> {
    let labels_raw = table
        .labels
        .as_ref()
        .ok_or_else(|| Error::schema("training table has no label column"))?;
    let label = encode_labels(labels_raw, loss)?;

    let mut columns = Vec::with_capacity(table.features.len());
    for col in &table.features {
        let stats = match col {
            Column::Numeric(vals) => {
                let mut present: Vec<f64> = vals.iter().flatten().copied().collect();
                if present.is_empty() {
                    ColumnStats::Numeric {
                        median: 0.0,
                        mean: 0.0,
                        std: 0.0,
                        keep: false,
                    }
                } else {
                    let med = median(&mut present);
                    let imputed: Vec<f64> =
                        vals.iter().map(|v| v.unwrap_or(med)).collect();
                    let (mean, std) = mean_std(&imputed);
                    ColumnStats::Numeric {
                        median: med,
                        mean,
                        std,
                        keep: std > 0.0,
                    }
                }
            }
            Column::Categorical(vals) => {
                let mut levels: Vec<String> = vals.iter().flatten().cloned().collect();
                levels.sort();
                levels.dedup();
                if levels.is_empty() {
                    return Err(Error::schema("categorical column is entirely missing"));
                }
                // Mode; ties break to the lexicographically smallest level.
                let mode = levels
                    .iter()
                    .map(|l| (vals.iter().flatten().filter(|v| *v == l).count(), l))
                    .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(a.1)))
                    .map(|(_, l)| l.clone())
                    .unwrap();
                let mut means = Vec::with_capacity(levels.len());
                let mut stds = Vec::with_capacity(levels.len());
                let mut keep = Vec::with_capacity(levels.len());
                for level in &levels {
                    let indicator: Vec<f64> = vals
                        .iter()
                        .map(|v| {
                            let value = v.as_ref().unwrap_or(&mode);
                            f64::from(value == level)
                        })
                        .collect();
                    let (mean, std) = mean_std(&indicator);
                    means.push(mean);
                    stds.push(std);
                    keep.push(std > 0.0);
                }
                ColumnStats::Categorical {
                    mode,
                    levels,
                    means,
                    stds,
                    keep,
                }
            }
        };
        columns.push(stats);
    }
    let stats = PreprocessStats {
        feature_names: table.feature_names.clone(),
        columns,
        label,
    };
    if stats.output_width() == 0 {
        return Err(Error::schema("no usable feature columns after dropping constants"));
    }
    let dataset = apply_preprocess(table, &stats)?;
    Ok((dataset, stats))
}

/// Transforms feature columns with previously learned statistics. Unseen
/// categorical levels map to all-zero indicators before standardization.
pub fn transform_features(table: &RawTable, stats: &PreprocessStats) -> Result<Mat> {
    if table.feature_names != stats.feature_names {
        return Err(Error::schema(
            "table columns do not match the preprocessing statistics",
        ));
    }
    let n = table.n_rows;
    let width = stats.output_width();
    let mut out = Mat::zeros(n, width);
    let mut offset = 0;
    for (col, cs) in table.features.iter().zip(&stats.columns) {
        match (col, cs) {
            (
                Column::Numeric(vals),
                ColumnStats::Numeric {
                    median,
                    mean,
                    std,
                    keep,
                },
            ) => {
                if !keep {
                    continue;
                }
                for (r, v) in vals.iter().enumerate() {
                    let raw = v.unwrap_or(*median);
                    out.set(r, offset, (raw - mean) / std);
                }
                offset += 1;
            }
            (
                Column::Categorical(vals),
                ColumnStats::Categorical {
                    mode,
                    levels,
                    means,
                    stds,
                    keep,
                },
            ) => {
                for (r, v) in vals.iter().enumerate() {
                    let token = v.as_ref().unwrap_or(mode);
                    let mut slot = offset;
                    for (((level, mean), std), &k) in
                        levels.iter().zip(means).zip(stds).zip(keep)
                    {
                        if !k {
                            continue;
                        }
                        let raw = f64::from(token == level);
                        out.set(r, slot, (raw - mean) / std);
                        slot += 1;
                    }
                }
                offset += keep.iter().filter(|&&k| k).count();
            }
            _ => {
                return Err(Error::schema(
                    "column type does not match the preprocessing statistics",
                ))
            }
        }
    }
    Ok(out)
}

/// Transforms a labeled table with stored statistics (the held-out path of
/// cross-validation: statistics always come from the training fold).
pub fn apply_preprocess(table: &RawTable, stats: &PreprocessStats) -> Result<Dataset> {
    let tokens = table
        .labels
        .as_ref()
        .ok_or_else(|| Error::schema("table has no label column"))?;
    let features = transform_features(table, stats)?;
    let labels = apply_label_encoding(tokens, &stats.label)?;
    Dataset::new(features, labels, stats.label.class_count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(rows: &[&[&str]]) -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect()
    }

    fn header(cols: &[&str]) -> Vec<String> {
        cols.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn missing_tokens_are_flagged() {
        let t = RawTable::from_rows(
            &header(&["a", "y"]),
            &strings(&[&["1", "x"], &["?", "x"], &["3", "z"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        assert_eq!(t.missing_cells(), 1);
    }

    #[test]
    fn header_only_is_a_schema_error() {
        let err = RawTable::from_rows(&header(&["a", "y"]), &[], Some("y"), &[]).unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
        assert!(err.to_string().contains("no data rows"));
    }

    #[test]
    fn ragged_rows_are_located() {
        let err = RawTable::from_rows(
            &header(&["a", "y"]),
            &strings(&[&["1", "x"], &["2"]]),
            Some("y"),
            &[],
        )
        .unwrap_err();
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn unknown_label_column_is_rejected() {
        let err = RawTable::from_rows(
            &header(&["a", "b"]),
            &strings(&[&["1", "2"]]),
            Some("y"),
            &[],
        )
        .unwrap_err();
        assert!(err.to_string().contains("unknown label column"));
    }

    #[test]
    fn mixed_tokens_force_categorical() {
        let t = RawTable::from_rows(
            &header(&["a", "y"]),
            &strings(&[&["1", "u"], &["oops", "v"], &["3", "u"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        assert!(matches!(&t.features[0], Column::Categorical(_)));
    }

    #[test]
    fn schema_hint_overrides_inference() {
        let t = RawTable::from_rows(
            &header(&["a", "y"]),
            &strings(&[&["1", "u"], &["2", "v"]]),
            Some("y"),
            &[("a".to_string(), ColumnType::Categorical)],
        )
        .unwrap();
        assert!(matches!(&t.features[0], Column::Categorical(_)));
    }

    #[test]
    fn numeric_imputation_and_standardization() {
        let t = RawTable::from_rows(
            &header(&["a", "y"]),
            &strings(&[&["1", "u"], &["2", "v"], &["NA", "u"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        let (ds, stats) = fit_preprocess(&t, LossKind::Logloss).unwrap();
        match &stats.columns[0] {
            ColumnStats::Numeric { median, .. } => assert_eq!(*median, 1.5),
            _ => panic!("expected numeric"),
        }
        // Standardized column has mean 0 and sample std 1.
        let vals: Vec<f64> = (0..3).map(|i| ds.features().get(i, 0)).collect();
        let (mean, std) = mean_std(&vals);
        assert!(mean.abs() < 1e-12);
        assert!((std - 1.0).abs() < 1e-12);
    }

    #[test]
    fn categorical_one_hot_with_mode_imputation() {
        let t = RawTable::from_rows(
            &header(&["c", "y"]),
            &strings(&[&["a", "u"], &["a", "v"], &["b", "u"], &["", "v"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        let (ds, stats) = fit_preprocess(&t, LossKind::Logloss).unwrap();
        match &stats.columns[0] {
            ColumnStats::Categorical { mode, levels, .. } => {
                assert_eq!(mode, "a");
                assert_eq!(levels, &vec!["a".to_string(), "b".to_string()]);
            }
            _ => panic!("expected categorical"),
        }
        // Two indicator columns, both kept.
        assert_eq!(ds.feature_count(), 2);
        // The missing cell imputed to "a": rows 0, 1, 3 share identical
        // transformed values.
        assert_eq!(ds.features().row(0), ds.features().row(3));
        assert_ne!(ds.features().row(0), ds.features().row(2));
    }

    #[test]
    fn constant_columns_are_dropped() {
        let t = RawTable::from_rows(
            &header(&["a", "b", "y"]),
            &strings(&[&["5", "1", "u"], &["5", "2", "v"], &["5", "3", "u"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        let (ds, stats) = fit_preprocess(&t, LossKind::Logloss).unwrap();
        assert_eq!(ds.feature_count(), 1);
        assert_eq!(stats.dropped(), vec!["a".to_string()]);
    }

    #[test]
    fn transform_is_idempotent_on_the_training_table() {
        let t = RawTable::from_rows(
            &header(&["a", "c", "y"]),
            &strings(&[
                &["1.5", "x", "u"],
                &["?", "y", "v"],
                &["2.5", "x", "u"],
                &["4.0", "z", "v"],
            ]),
            Some("y"),
            &[],
        )
        .unwrap();
        let (ds, stats) = fit_preprocess(&t, LossKind::Logloss).unwrap();
        let again = apply_preprocess(&t, &stats).unwrap();
        assert_eq!(ds, again);
    }

    #[test]
    fn test_fold_never_uses_its_own_statistics() {
        let train = RawTable::from_rows(
            &header(&["a", "y"]),
            &strings(&[&["0", "u"], &["1", "v"], &["2", "u"], &["3", "v"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        // Wildly different test-fold distribution.
        let test = RawTable::from_rows(
            &header(&["a", "y"]),
            &strings(&[&["1000", "u"], &["2000", "v"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        let (_, stats) = fit_preprocess(&train, LossKind::Logloss).unwrap();
        let transformed = apply_preprocess(&test, &stats).unwrap();
        // Hand-computed with the training stats: mean 1.5, std of
        // {0,1,2,3} with n-1 denominator.
        let (mean, std) = mean_std(&[0.0, 1.0, 2.0, 3.0]);
        assert!((transformed.features().get(0, 0) - (1000.0 - mean) / std).abs() < 1e-9);
        assert!((transformed.features().get(1, 0) - (2000.0 - mean) / std).abs() < 1e-9);
    }

    #[test]
    fn unseen_level_maps_to_zero_indicators() {
        let train = RawTable::from_rows(
            &header(&["c", "y"]),
            &strings(&[&["a", "u"], &["b", "v"], &["a", "u"], &["b", "v"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        let (_, stats) = fit_preprocess(&train, LossKind::Logloss).unwrap();
        let test = RawTable::from_rows(
            &header(&["c", "y"]),
            &strings(&[&["zz", "u"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        let got = transform_features(&test, &stats).unwrap();
        // Raw indicators are all zero; standardization then shifts them.
        match &stats.columns[0] {
            ColumnStats::Categorical { means, stds, .. } => {
                assert!((got.get(0, 0) - (0.0 - means[0]) / stds[0]).abs() < 1e-12);
                assert!((got.get(0, 1) - (0.0 - means[1]) / stds[1]).abs() < 1e-12);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn unseen_label_level_is_an_error() {
        let train = RawTable::from_rows(
            &header(&["a", "y"]),
            &strings(&[&["1", "u"], &["2", "v"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        let (_, stats) = fit_preprocess(&train, LossKind::Logloss).unwrap();
        let test = RawTable::from_rows(
            &header(&["a", "y"]),
            &strings(&[&["1", "w"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        assert!(apply_preprocess(&test, &stats).is_err());
    }

    #[test]
    fn logistic_labels_map_to_sorted_sign_pair() {
        let t = RawTable::from_rows(
            &header(&["a", "y"]),
            &strings(&[&["0", "neg"], &["1", "pos"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        let (ds, stats) = fit_preprocess(&t, LossKind::Logistic).unwrap();
        assert_eq!(ds.labels(), &[-1.0, 1.0]);
        assert_eq!(stats.label.decode(-1.0), "neg");
        assert_eq!(stats.label.decode(1.0), "pos");
    }

    #[test]
    fn raw_dataset_round_trip_for_numeric_tables() {
        let t = RawTable::from_rows(
            &header(&["x1", "x2", "y"]),
            &strings(&[&["0.5", "-1", "1"], &["1.5", "2", "2"], &["0", "0", "3"]]),
            Some("y"),
            &[],
        )
        .unwrap();
        let ds = t.to_dataset_raw(true).unwrap();
        assert_eq!(ds.class_count(), Some(3));
        assert_eq!(ds.features().get(0, 1), -1.0);
        assert_eq!(ds.labels(), &[1.0, 2.0, 3.0]);
    }
}
