//! Classification metrics: accuracy, sensitivity, specificity, and rank-based
//! AUC with half credit for tied scores.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Mean and sample standard deviation of a metric over folds and repeats.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

/// Metrics of a single evaluation fold. The binary-only metrics are `None`
/// for multiclass tasks.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldScores {
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub auc: Option<f64>,
}

/// Aggregated evaluation over all folds and repeats.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricReport {
    pub accuracy: Summary,
    pub sensitivity: Option<Summary>,
    pub specificity: Option<Summary>,
    pub auc: Option<Summary>,
    pub per_fold: Vec<FoldScores>,
}

fn summarize(values: &[f64]) -> Summary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        math::sqrt(
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0),
        )
    };
    Summary { mean, std }
}

impl MetricReport {
    pub fn from_folds(per_fold: Vec<FoldScores>) -> Result<Self> {
        if per_fold.is_empty() {
            return Err(Error::domain("metric report needs at least one fold"));
        }
        let accuracy = summarize(&per_fold.iter().map(|f| f.accuracy).collect::<Vec<_>>());
        let collect = |pick: fn(&FoldScores) -> Option<f64>| {
            let vals: Vec<f64> = per_fold.iter().filter_map(pick).collect();
            if vals.len() == per_fold.len() {
                Some(summarize(&vals))
            } else {
                None
            }
        };
        Ok(MetricReport {
            accuracy,
            sensitivity: collect(|f| f.sensitivity),
            specificity: collect(|f| f.specificity),
            auc: collect(|f| f.auc),
            per_fold,
        })
    }
}

/// Mann–Whitney AUC: average ranks over the pooled scores, ties sharing
/// their midrank (equivalent to counting correctly ordered positive-negative
/// pairs with 0.5 credit for ties).
fn rank_auc(y_true: &[f64], scores: &[f64], positive: f64) -> Result<f64> {
    let n = y_true.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut ranks = alloc::vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = midrank;
        }
        i = j + 1;
    }
    let pos_count = y_true.iter().filter(|&&y| y == positive).count();
    let neg_count = n - pos_count;
    if pos_count == 0 || neg_count == 0 {
        return Err(Error::domain(
            "AUC is undefined when only one class is present",
        ));
    }
    let rank_sum: f64 = y_true
        .iter()
        .zip(&ranks)
        .filter(|(&y, _)| y == positive)
        .map(|(_, &r)| r)
        .sum();
    let p = pos_count as f64;
    let q = neg_count as f64;
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * q))
}

/// Scores one batch of predictions.
///
/// `positive_class` selects the positive label for the binary metrics; pass
/// `None` for multiclass tasks (accuracy only). When it is given, `scores`
/// must hold positive-class probabilities and the task must actually contain
/// both classes, otherwise the AUC is undefined and an error is returned.
pub fn compute_metrics(
    y_true: &[f64],
    scores: Option<&[f64]>,
    labels_pred: &[f64],
    positive_class: Option<f64>,
) -> Result<FoldScores> {
    if y_true.is_empty() || y_true.len() != labels_pred.len() {
        return Err(Error::domain("prediction and truth lengths disagree"));
    }
    let correct = y_true
        .iter()
        .zip(labels_pred)
        .filter(|(t, p)| t == p)
        .count();
    let accuracy = correct as f64 / y_true.len() as f64;

    let Some(positive) = positive_class else {
        return Ok(FoldScores {
            accuracy,
            sensitivity: None,
            specificity: None,
            auc: None,
        });
    };

    let (mut tp, mut fn_, mut tn, mut fp) = (0usize, 0usize, 0usize, 0usize);
    for (&t, &p) in y_true.iter().zip(labels_pred) {
        match (t == positive, p == positive) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            f64::NAN
        } else {
            num as f64 / den as f64
        }
    };
    let sensitivity = ratio(tp, tp + fn_);
    let specificity = ratio(tn, tn + fp);
    let auc = match scores {
        Some(s) => {
            if s.len() != y_true.len() {
                return Err(Error::domain("score and truth lengths disagree"));
            }
            Some(rank_auc(y_true, s, positive)?)
        }
        None => None,
    };
    Ok(FoldScores {
        accuracy,
        sensitivity: Some(sensitivity),
        specificity: Some(specificity),
        auc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn perfect_ranking_gives_unit_auc() {
        let f = compute_metrics(
            &[1.0, 1.0, -1.0, -1.0],
            Some(&[0.9, 0.8, 0.4, 0.1]),
            &[1.0, 1.0, -1.0, -1.0],
            Some(1.0),
        )
        .unwrap();
        assert_eq!(f.auc.unwrap(), 1.0);
        assert_eq!(f.accuracy, 1.0);
        assert_eq!(f.sensitivity.unwrap(), 1.0);
        assert_eq!(f.specificity.unwrap(), 1.0);
    }

    #[test]
    fn one_swapped_pair_gives_three_quarters() {
        let f = compute_metrics(
            &[1.0, 1.0, -1.0, -1.0],
            Some(&[0.9, 0.3, 0.4, 0.1]),
            &[1.0, -1.0, -1.0, -1.0],
            Some(1.0),
        )
        .unwrap();
        assert_eq!(f.auc.unwrap(), 0.75);
    }

    #[test]
    fn constant_scores_give_half_auc() {
        let f = compute_metrics(
            &[1.0, 1.0, -1.0, -1.0],
            Some(&[0.5, 0.5, 0.5, 0.5]),
            &[1.0, 1.0, 1.0, 1.0],
            Some(1.0),
        )
        .unwrap();
        assert_eq!(f.auc.unwrap(), 0.5);
        assert_eq!(f.accuracy, 0.5);
    }

    #[test]
    fn single_class_truth_is_an_error() {
        assert!(compute_metrics(
            &[1.0, 1.0],
            Some(&[0.5, 0.6]),
            &[1.0, 1.0],
            Some(1.0)
        )
        .is_err());
    }

    #[test]
    fn auc_invariant_under_monotone_transform() {
        let y = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0];
        let s = [0.9, 0.8, 0.7, 0.3, 0.65, 0.2, 0.65];
        let labels = [1.0; 7];
        let base = compute_metrics(&y, Some(&s), &labels, Some(1.0))
            .unwrap()
            .auc
            .unwrap();
        let squashed: Vec<f64> = s.iter().map(|&v| 1.0 / (1.0 + math::exp(-7.0 * v))).collect();
        let moved = compute_metrics(&y, Some(&squashed), &labels, Some(1.0))
            .unwrap()
            .auc
            .unwrap();
        assert!((base - moved).abs() < 1e-12);
    }

    #[test]
    fn multiclass_reports_accuracy_only() {
        let f = compute_metrics(&[1.0, 2.0, 3.0], None, &[1.0, 2.0, 2.0], None).unwrap();
        assert!((f.accuracy - 2.0 / 3.0).abs() < 1e-12);
        assert!(f.sensitivity.is_none());
        assert!(f.auc.is_none());
    }

    #[test]
    fn report_aggregates_mean_and_std() {
        let report = MetricReport::from_folds(vec![
            FoldScores {
                accuracy: 0.8,
                sensitivity: None,
                specificity: None,
                auc: None,
            },
            FoldScores {
                accuracy: 1.0,
                sensitivity: None,
                specificity: None,
                auc: None,
            },
        ])
        .unwrap();
        assert!((report.accuracy.mean - 0.9).abs() < 1e-12);
        assert!((report.accuracy.std - math::sqrt(0.02)).abs() < 1e-12);
        assert!(report.auc.is_none());
    }
}
