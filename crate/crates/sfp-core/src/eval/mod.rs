//! Model evaluation: classification metrics, stratified cross-validation,
//! the reparameterized hyperparameter grid, and LOESS-smoothed selection.

mod cv;
mod folds;
mod grid;
mod loess;
mod metrics;

pub use cv::{
    cv_fold_plan, grid_search, kfold_cv, min_training_size, run_cv_fold, CvOptions, FoldPlan,
    GridRow,
};
pub use folds::stratified_folds;
pub use grid::{
    default_grid, grid_point_seed, reparam, select_hyperparams, ReparamPoint, SelectionStrategy,
};
pub use loess::loess_smooth;
pub use metrics::{compute_metrics, FoldScores, MetricReport, Summary};
