//! Repeated stratified cross-validation and grid search.
//!
//! Every fold re-learns its preprocessing (imputation values, level
//! dictionaries, standardization) from the training side alone; the held-out
//! side is only ever transformed with those statistics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::eval::folds::stratified_folds;
use crate::eval::grid::{grid_point_seed, select_hyperparams, ReparamPoint, SelectionStrategy};
use crate::eval::metrics::{compute_metrics, FoldScores, MetricReport};
use crate::infer::predict;
use crate::loss::LossKind;
use crate::model::Hyperparams;
use crate::rng::mix_seed;
use crate::table::{apply_preprocess, fit_preprocess, LabelEncoding, RawTable};
use crate::train::{fit, FitConfig};

/// Cross-validation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvOptions {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    /// Iteration cap per fit; BCD rarely needs more than 15.
    pub max_iters: usize,
    pub center_tol: f64,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            folds: 5,
            repeats: 1,
            seed: 0,
            max_iters: 25,
            center_tol: 1e-6,
        }
    }
}

/// Positive-class index (1-based) for binary reports: the last level.
fn positive_class(encoding: &LabelEncoding) -> Option<f64> {
    match encoding {
        LabelEncoding::Classes { levels } if levels.len() == 2 => Some(2.0),
        LabelEncoding::Binary { .. } => Some(1.0),
        _ => None,
    }
}

/// Positive-class probability extracted from a prediction's class scores.
fn positive_score(scores: &[f64], positive: f64, encoding: &LabelEncoding) -> f64 {
    match encoding {
        LabelEncoding::Binary { .. } => scores[1],
        _ => scores[positive as usize - 1],
    }
}

/// One train/evaluate unit of a cross-validation run.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    pub repeat: usize,
    pub fold: usize,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub fit_seed: u64,
}

/// Lays out every (repeat, fold) unit of a CV run. The plan is a pure
/// function of the labels and options, so units can be executed in any
/// order — or concurrently — without changing any result.
pub fn cv_fold_plan(table: &RawTable, opts: &CvOptions) -> Result<Vec<FoldPlan>> {
    if opts.repeats == 0 {
        return Err(Error::domain("repeats must be at least 1"));
    }
    let labels = table
        .labels()
        .ok_or_else(|| Error::schema("cross-validation needs a label column"))?;
    let mut plan = Vec::with_capacity(opts.folds * opts.repeats);
    for repeat in 0..opts.repeats {
        let fold_seed = mix_seed(&[opts.seed, 0xF01D, repeat as u64]);
        let assignment = stratified_folds(labels, opts.folds, fold_seed)?;
        for (fold, test_rows) in assignment.into_iter().enumerate() {
            let train_rows: Vec<usize> = (0..table.n_rows())
                .filter(|i| !test_rows.contains(i))
                .collect();
            plan.push(FoldPlan {
                repeat,
                fold,
                train_rows,
                test_rows,
                fit_seed: mix_seed(&[opts.seed, 0xF17, repeat as u64, fold as u64]),
            });
        }
    }
    Ok(plan)
}

/// The smallest training-side size over every fold of the plan (used to cap
/// the `k` ladder of the tuning grid).
pub fn min_training_size(table: &RawTable, opts: &CvOptions) -> Result<usize> {
    let plan = cv_fold_plan(table, opts)?;
    Ok(plan.iter().map(|p| p.train_rows.len()).min().unwrap_or(0))
}

/// Repeated stratified k-fold cross-validation of one hyperparameter point.
pub fn kfold_cv(
    table: &RawTable,
    hyper: &Hyperparams,
    loss: LossKind,
    opts: &CvOptions,
) -> Result<MetricReport> {
    let plan = cv_fold_plan(table, opts)?;
    let mut per_fold = Vec::with_capacity(plan.len());
    for unit in &plan {
        per_fold.push(run_cv_fold(table, unit, hyper, loss, opts)?);
    }
    MetricReport::from_folds(per_fold)
}

/// Executes one unit of a CV plan.
pub fn run_cv_fold(
    table: &RawTable,
    unit: &FoldPlan,
    hyper: &Hyperparams,
    loss: LossKind,
    opts: &CvOptions,
) -> Result<FoldScores> {
    let train_rows = &unit.train_rows;
    let test_rows = &unit.test_rows;
    let fit_seed = unit.fit_seed;
    let train_table = table.subset(train_rows);
    let test_table = table.subset(test_rows);
    let (train_ds, stats) = fit_preprocess(&train_table, loss)?;
    let test_ds = apply_preprocess(&test_table, &stats)?;

    // A fold can be smaller than an ambitious k from the grid; cap it at the
    // fold's training size (sampling without replacement needs k <= n).
    let hyper_fold = Hyperparams {
        k: hyper.k.min(train_ds.len()),
        ..*hyper
    };
    let config = FitConfig {
        max_iters: opts.max_iters,
        center_tol: opts.center_tol,
        seed: fit_seed,
        record_trace: false,
    };
    let result = fit(&train_ds, &hyper_fold, loss, &config)?;

    let positive = positive_class(&stats.label);
    let mut y_pred = Vec::with_capacity(test_ds.len());
    let mut scores = Vec::with_capacity(test_ds.len());
    for i in 0..test_ds.len() {
        let pred = predict(test_ds.features().row(i), &result.params, &hyper_fold)?;
        y_pred.push(pred.label);
        if let (Some(pos), Some(class_scores)) = (positive, pred.class_scores.as_ref()) {
            scores.push(positive_score(class_scores, pos, &stats.label));
        }
    }
    compute_metrics(
        test_ds.labels(),
        if scores.is_empty() { None } else { Some(&scores) },
        &y_pred,
        positive,
    )
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub point: ReparamPoint,
    pub report: MetricReport,
}

/// Evaluates every grid point by cross-validation and picks the winner with
/// the given strategy. Each point draws its own seed from the master seed
/// and its coordinates, so evaluation order cannot change any result.
pub fn grid_search(
    table: &RawTable,
    grid: &[ReparamPoint],
    loss: LossKind,
    opts: &CvOptions,
    strategy: SelectionStrategy,
) -> Result<(Hyperparams, Vec<GridRow>)> {
    if grid.is_empty() {
        return Err(Error::domain("empty hyperparameter grid"));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for point in grid {
        let hyper = crate::eval::grid::reparam(point)?;
        let point_opts = CvOptions {
            seed: grid_point_seed(opts.seed, point),
            ..*opts
        };
        let report = kfold_cv(table, &hyper, loss, &point_opts)?;
        rows.push(GridRow {
            point: *point,
            report,
        });
    }
    let accuracies: Vec<f64> = rows.iter().map(|r| r.report.accuracy.mean).collect();
    let (_, best) = select_hyperparams(grid, &accuracies, strategy)?;
    Ok((best, rows))
}
