//! The on-disk model document: a single JSON file with row-major matrices.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sfp_core::loss::{LabelPrototype, LossKind};
use sfp_core::table::PreprocessStats;
use sfp_core::{Hyperparams, Mat, ModelParams};

use crate::error::CliError;

pub const MODEL_VERSION: &str = "sfp-model/1";

/// A trained model plus everything needed to apply it to raw tables.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub params: ModelParams,
    pub hyper: Hyperparams,
    pub class_count: Option<usize>,
    /// Present when the training pipeline preprocessed a raw table; absent
    /// for models trained directly on numeric matrices.
    pub stats: Option<PreprocessStats>,
    /// Label column name of the training table, if any.
    pub label_column: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: String,
    loss_kind: LossKind,
    k: usize,
    p: usize,
    #[serde(rename = "M")]
    class_count: Option<usize>,
    centers: Vec<Vec<f64>>,
    weights: Vec<Vec<f64>>,
    prototypes: Vec<LabelPrototype>,
    hyperparams: Hyperparams,
    preprocess_stats: Option<PreprocessStats>,
    label_column: Option<String>,
}

/// Serializes a model to pretty-printed JSON.
pub fn save_model(path: &Path, model: &SavedModel) -> Result<(), CliError> {
    let file = ModelFile {
        version: MODEL_VERSION.to_string(),
        loss_kind: model.params.loss,
        k: model.params.cluster_count(),
        p: model.params.feature_count(),
        class_count: model.class_count,
        centers: model.params.centers.to_nested(),
        weights: model.params.weights.to_nested(),
        prototypes: model.params.prototypes.clone(),
        hyperparams: model.hyper,
        preprocess_stats: model.stats.clone(),
        label_column: model.label_column.clone(),
    };
    let json = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

fn nested_to_mat(rows: &[Vec<f64>], what: &str, k: usize, p: usize) -> Result<Mat, CliError> {
    if rows.len() != k || rows.iter().any(|r| r.len() != p) {
        return Err(CliError::data(format!("model file: {what} is not {k}x{p}")));
    }
    Ok(Mat::from_rows(rows))
}

/// Loads and validates a model document.
pub fn load_model(path: &Path) -> Result<SavedModel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if file.version != MODEL_VERSION {
        return Err(CliError::data(format!(
            "unsupported model version '{}' (expected {MODEL_VERSION})",
            file.version
        )));
    }
    if file.prototypes.len() != file.k {
        return Err(CliError::data("model file: prototype count disagrees with k"));
    }
    let params = ModelParams {
        loss: file.loss_kind,
        centers: nested_to_mat(&file.centers, "centers", file.k, file.p)?,
        weights: nested_to_mat(&file.weights, "weights", file.k, file.p)?,
        prototypes: file.prototypes,
    };
    params.validate()?;
    file.hyperparams.validate()?;
    Ok(SavedModel {
        params,
        hyper: file.hyperparams,
        class_count: file.class_count,
        stats: file.preprocess_stats,
        label_column: file.label_column,
    })
}
