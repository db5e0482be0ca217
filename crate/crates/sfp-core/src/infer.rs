//! Prediction for unseen points and weight-based feature selection.
//!
//! A new point receives a membership vector by the same entropic simplex
//! solve used in training, over the weighted distances to the centers alone
//! (its label is unknown, so no loss term enters). The label estimate then
//! minimizes the loss against the membership-weighted mixture of the label
//! prototypes, which for logloss means taking the class with the largest
//! mixed probability.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::loss::{LabelPrototype, LossKind};
use crate::model::{distance_matrix, weighted_sq_dist, Dataset, Hyperparams, ModelParams};
use crate::simplex::{solve_entropic_linear_min, SimplexVector};
use crate::Mat;

/// A single prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Predicted label in the loss kind's domain: a class index for logloss,
    /// `±1` for logistic, a real value for squared error.
    pub label: f64,
    /// Membership vector over the k clusters.
    pub memberships: SimplexVector,
    /// Mixed class probabilities (classification only). For logistic models
    /// this is the two-class sigmoid split of the mixed score.
    pub class_scores: Option<Vec<f64>>,
}

/// Per-cluster and pooled feature selections.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSelection {
    /// For each cluster, the selected feature indices in descending weight
    /// order: the shortest prefix whose weights sum to at least the
    /// threshold.
    pub per_cluster: Vec<Vec<usize>>,
    /// Sorted union of the per-cluster selections.
    pub union: Vec<usize>,
    pub mass_threshold: f64,
}

/// Membership vector of an out-of-sample point: proportional to
/// `exp(−‖x − v_j‖²_{w_j} / γ)`.
pub fn membership_of(x: &[f64], params: &ModelParams, gamma: f64) -> Result<SimplexVector> {
    if x.len() != params.feature_count() {
        return Err(Error::domain(format!(
            "point has {} features, model expects {}",
            x.len(),
            params.feature_count()
        )));
    }
    let k = params.cluster_count();
    let mut costs = Vec::with_capacity(k);
    for j in 0..k {
        costs.push(weighted_sq_dist(
            x,
            params.centers.row(j),
            params.weights.row(j),
        ));
    }
    solve_entropic_linear_min(&costs, gamma)
}

fn argmax_lowest_index(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Predicts the label of a point from the fitted parameters.
pub fn predict(x: &[f64], params: &ModelParams, hyper: &Hyperparams) -> Result<Prediction> {
    let memberships = membership_of(x, params, hyper.gamma)?;
    let u = memberships.as_slice();
    match params.loss {
        LossKind::Logloss => {
            let m = match &params.prototypes[0] {
                LabelPrototype::Probs(p) => p.len(),
                LabelPrototype::Scalar(_) => {
                    return Err(Error::domain("logloss model carries scalar prototypes"))
                }
            };
            let mut scores = alloc::vec![0.0; m];
            for (j, proto) in params.prototypes.iter().enumerate() {
                let probs = proto
                    .as_probs()
                    .ok_or_else(|| Error::domain("mixed prototype payloads"))?;
                for (s, &z) in scores.iter_mut().zip(probs) {
                    *s += u[j] * z;
                }
            }
            // argmax of the mixture realizes argmin over classes of
            // −ln(Σ_j u_j z_j)_y; ties break to the lowest class index.
            let label = (argmax_lowest_index(&scores) + 1) as f64;
            Ok(Prediction {
                label,
                memberships,
                class_scores: Some(scores),
            })
        }
        LossKind::Logistic => {
            let mixed: f64 = params
                .prototypes
                .iter()
                .zip(u)
                .map(|(z, &uj)| {
                    z.as_scalar()
                        .map(|s| uj * s)
                        .ok_or_else(|| Error::domain("logistic model carries simplex prototypes"))
                })
                .sum::<Result<f64>>()?;
            let label = if mixed >= 0.0 { 1.0 } else { -1.0 };
            let pos = crate::math::sigmoid(mixed);
            Ok(Prediction {
                label,
                memberships,
                class_scores: Some(alloc::vec![1.0 - pos, pos]),
            })
        }
        LossKind::SquaredError => {
            let mixed: f64 = params
                .prototypes
                .iter()
                .zip(u)
                .map(|(z, &uj)| {
                    z.as_scalar()
                        .map(|s| uj * s)
                        .ok_or_else(|| Error::domain("regression model carries simplex prototypes"))
                })
                .sum::<Result<f64>>()?;
            Ok(Prediction {
                label: mixed,
                memberships,
                class_scores: None,
            })
        }
    }
}

/// The labeled distance-feature representation: each row is the augmented
/// distance of a training point to every cluster. With k below p this acts
/// as a supervised dimensionality reduction of the data.
pub fn distance_features(data: &Dataset, params: &ModelParams, alpha: f64) -> Result<Mat> {
    distance_matrix(data, params, alpha)
}

/// Selects, per cluster, the minimal set of heaviest features whose weights
/// sum to at least `threshold`, and pools them across clusters.
pub fn select_features(params: &ModelParams, threshold: f64) -> Result<FeatureSelection> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::domain("threshold must lie in (0, 1]"));
    }
    let p = params.feature_count();
    let mut per_cluster = Vec::with_capacity(params.cluster_count());
    let mut in_union = alloc::vec![false; p];
    for j in 0..params.cluster_count() {
        let row = params.weights.row(j);
        let mut order: Vec<usize> = (0..p).collect();
        // Descending by weight, stable in the original index for ties.
        order.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).unwrap().then(a.cmp(&b)));
        let mut cum = 0.0;
        let mut selected = Vec::new();
        for &l in &order {
            cum += row[l];
            selected.push(l);
            in_union[l] = true;
            // Tolerant comparison: exact prefix sums like 9 × 0.1 may land
            // one ulp under the threshold.
            if cum >= threshold - 1e-12 {
                break;
            }
        }
        per_cluster.push(selected);
    }
    let union = (0..p).filter(|&l| in_union[l]).collect();
    Ok(FeatureSelection {
        per_cluster,
        union,
        mass_threshold: threshold,
    })
}
