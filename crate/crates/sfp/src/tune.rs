//! Timed, parallel grid evaluation on top of the core CV machinery.

use std::time::Instant;

use sfp_core::eval::{
    cv_fold_plan, grid_point_seed, run_cv_fold, select_hyperparams, CvOptions, MetricReport,
    ReparamPoint, SelectionStrategy,
};
use sfp_core::loss::LossKind;
use sfp_core::table::RawTable;
use sfp_core::{Error, Hyperparams};

use crate::parallel::parallel_map;

/// Outcome of a tuning run.
pub struct TuneOutcome {
    pub best_point: ReparamPoint,
    pub best: Hyperparams,
    /// Per grid point: its CV report and wall-clock seconds.
    pub rows: Vec<(ReparamPoint, MetricReport, f64)>,
}

/// Cross-validates every grid point (in parallel when `threads > 1`) and
/// selects the winner. Each point derives its own seed from the master seed
/// and its coordinates, so the schedule cannot change any result.
pub fn tune(
    table: &RawTable,
    grid: &[ReparamPoint],
    loss: LossKind,
    opts: &CvOptions,
    strategy: SelectionStrategy,
    threads: usize,
) -> Result<TuneOutcome, Error> {
    if grid.is_empty() {
        return Err(Error::Domain("empty hyperparameter grid".into()));
    }
    // Work is distributed over flat (point, fold) units: the expensive
    // large-k points would otherwise serialize at the tail of the grid.
    let mut units = Vec::new();
    let mut point_opts = Vec::with_capacity(grid.len());
    for (idx, point) in grid.iter().enumerate() {
        let hyper = sfp_core::eval::reparam(point)?;
        let opts_for_point = CvOptions {
            seed: grid_point_seed(opts.seed, point),
            ..*opts
        };
        for plan in cv_fold_plan(table, &opts_for_point)? {
            units.push((idx, plan));
        }
        point_opts.push((hyper, opts_for_point));
    }
    let results = parallel_map(&units, threads, |(idx, plan)| {
        let start = Instant::now();
        let (hyper, opts_for_point) = &point_opts[*idx];
        let scores = run_cv_fold(table, plan, hyper, loss, opts_for_point)?;
        Ok::<_, Error>((scores, start.elapsed().as_secs_f64()))
    });
    let mut fold_scores: Vec<Vec<sfp_core::eval::FoldScores>> =
        (0..grid.len()).map(|_| Vec::new()).collect();
    let mut fold_times = vec![0.0; grid.len()];
    for ((idx, _), result) in units.iter().zip(results) {
        let (scores, seconds) = result?;
        fold_scores[*idx].push(scores);
        fold_times[*idx] += seconds;
    }
    let mut rows = Vec::with_capacity(grid.len());
    for ((point, scores), time) in grid.iter().zip(fold_scores).zip(fold_times) {
        rows.push((*point, MetricReport::from_folds(scores)?, time));
    }
    let accuracies: Vec<f64> = rows.iter().map(|(_, r, _)| r.accuracy.mean).collect();
    let (best_point, best) = select_hyperparams(grid, &accuracies, strategy)?;
    Ok(TuneOutcome {
        best_point,
        best,
        rows,
    })
}
