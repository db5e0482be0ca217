//! The reparameterized hyperparameter search space and selection strategies.
//!
//! Tuning searches over primed coordinates in the unit interval; each maps
//! to its raw hyperparameter through `x = (1 − x′)/x′`, compressing the
//! unbounded raw ranges. The reduced grid ties `α′ = γ′/2` and restricts
//! `γ′` to the upper half of its range, cutting 5000 candidate points down
//! to 250.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::eval::loess_smooth;
use crate::math;
use crate::model::Hyperparams;
use crate::rng::mix_seed;

/// One grid point in primed coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReparamPoint {
    pub k: usize,
    pub alpha_prime: f64,
    pub gamma_prime: f64,
    pub lambda_prime: f64,
}

/// Maps primed coordinates back to raw hyperparameters.
pub fn reparam(point: &ReparamPoint) -> Result<Hyperparams> {
    if !(point.alpha_prime > 0.0 && point.alpha_prime <= 1.0) {
        return Err(Error::domain("alpha_prime must lie in (0, 1]"));
    }
    if !(point.gamma_prime > 0.0 && point.gamma_prime < 1.0) {
        return Err(Error::domain("gamma_prime must lie in (0, 1)"));
    }
    if !(point.lambda_prime > 0.0 && point.lambda_prime < 1.0) {
        return Err(Error::domain("lambda_prime must lie in (0, 1)"));
    }
    Hyperparams::new(
        point.k,
        (1.0 - point.alpha_prime) / point.alpha_prime,
        (1.0 - point.gamma_prime) / point.gamma_prime,
        (1.0 - point.lambda_prime) / point.lambda_prime,
    )
}

fn k_values(n_train: usize, class_count: usize) -> Vec<usize> {
    let m = class_count as f64;
    let step = (n_train as f64 - m) / 4.0;
    let mut ks: Vec<usize> = (0..=4)
        .map(|i| math::round(m + i as f64 * step) as usize)
        .collect();
    ks.dedup();
    ks
}

/// Builds the tuning grid. The reduced grid (default) couples `α′ = γ′/2`
/// and scans `k` over five values from the class count up to the training
/// size, `γ′` over {0.55..0.95}, and `λ′` over {0.05..0.95}; the full grid
/// frees all three primed axes over {0.05..0.95}.
pub fn default_grid(
    n_train: usize,
    class_count: usize,
    include_full: bool,
) -> Result<Vec<ReparamPoint>> {
    if class_count < 2 {
        return Err(Error::domain("need at least two classes"));
    }
    if n_train <= class_count {
        return Err(Error::domain("training size must exceed the class count"));
    }
    let tenths: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
    let mut grid = Vec::new();
    for k in k_values(n_train, class_count) {
        if include_full {
            for &alpha_prime in &tenths {
                for &gamma_prime in &tenths {
                    for &lambda_prime in &tenths {
                        grid.push(ReparamPoint {
                            k,
                            alpha_prime,
                            gamma_prime,
                            lambda_prime,
                        });
                    }
                }
            }
        } else {
            for i in 0..5 {
                let gamma_prime = 0.55 + 0.1 * i as f64;
                for &lambda_prime in &tenths {
                    grid.push(ReparamPoint {
                        k,
                        alpha_prime: gamma_prime / 2.0,
                        gamma_prime,
                        lambda_prime,
                    });
                }
            }
        }
    }
    Ok(grid)
}

/// Deterministic per-point seed derived from the master seed and the point's
/// coordinates, so grid evaluations can run in any order (or in parallel)
/// without changing results.
pub fn grid_point_seed(master: u64, point: &ReparamPoint) -> u64 {
    mix_seed(&[
        master,
        point.k as u64,
        point.alpha_prime.to_bits(),
        point.gamma_prime.to_bits(),
        point.lambda_prime.to_bits(),
    ])
}

/// How the winning grid point is chosen from per-point accuracies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionStrategy {
    /// The raw accuracy argmax; ties go to the lower grid index.
    RawArgmax,
    /// Per-hyperparameter mean over the points in the top `q_percent` of
    /// accuracies.
    TopQuantileMean { q_percent: f64 },
    /// Accuracy is LOESS-smoothed along each hyperparameter axis through the
    /// raw argmax before taking the argmax again (the default).
    LoessArgmax { span: f64 },
}

impl Default for SelectionStrategy {
    fn default() -> Self {
        SelectionStrategy::LoessArgmax { span: 0.75 }
    }
}

fn argmax_lowest_index(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Axis {
    K,
    AlphaPrime,
    GammaPrime,
    LambdaPrime,
}

fn coord(point: &ReparamPoint, axis: Axis) -> f64 {
    match axis {
        Axis::K => point.k as f64,
        Axis::AlphaPrime => point.alpha_prime,
        Axis::GammaPrime => point.gamma_prime,
        Axis::LambdaPrime => point.lambda_prime,
    }
}

/// Picks the winning hyperparameters from grid accuracies.
pub fn select_hyperparams(
    grid: &[ReparamPoint],
    accuracies: &[f64],
    strategy: SelectionStrategy,
) -> Result<(ReparamPoint, Hyperparams)> {
    if grid.is_empty() || grid.len() != accuracies.len() {
        return Err(Error::domain("grid and accuracies must align and be non-empty"));
    }
    let chosen = match strategy {
        SelectionStrategy::RawArgmax => grid[argmax_lowest_index(accuracies)],
        SelectionStrategy::TopQuantileMean { q_percent } => {
            if !(q_percent > 0.0 && q_percent <= 100.0) {
                return Err(Error::domain("q_percent must lie in (0, 100]"));
            }
            let take = ((q_percent / 100.0 * grid.len() as f64) as usize).max(1);
            let mut order: Vec<usize> = (0..grid.len()).collect();
            order.sort_by(|&a, &b| {
                accuracies[b]
                    .partial_cmp(&accuracies[a])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let top = &order[..take];
            let avg = |f: fn(&ReparamPoint) -> f64| {
                top.iter().map(|&i| f(&grid[i])).sum::<f64>() / take as f64
            };
            ReparamPoint {
                k: math::round(avg(|p| p.k as f64)) as usize,
                alpha_prime: avg(|p| p.alpha_prime),
                gamma_prime: avg(|p| p.gamma_prime),
                lambda_prime: avg(|p| p.lambda_prime),
            }
        }
        SelectionStrategy::LoessArgmax { span } => {
            let mut best = grid[argmax_lowest_index(accuracies)];
            // In the reduced grid alpha' is not a free axis.
            let alpha_tied = grid
                .iter()
                .all(|p| (p.alpha_prime - p.gamma_prime / 2.0).abs() < 1e-12);
            let mut axes = alloc::vec![Axis::K, Axis::GammaPrime, Axis::LambdaPrime];
            if !alpha_tied {
                axes.push(Axis::AlphaPrime);
            }
            for axis in axes {
                // The 1-D slice through the raw argmax along this axis.
                let slice: Vec<(f64, f64)> = grid
                    .iter()
                    .zip(accuracies)
                    .filter(|(p, _)| {
                        [Axis::K, Axis::AlphaPrime, Axis::GammaPrime, Axis::LambdaPrime]
                            .into_iter()
                            .filter(|&a| a != axis)
                            .filter(|&a| !(alpha_tied && a == Axis::AlphaPrime))
                            .all(|a| (coord(p, a) - coord(&best, a)).abs() < 1e-12)
                    })
                    .map(|(p, &acc)| (coord(p, axis), acc))
                    .collect();
                let mut slice = slice;
                slice.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                slice.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
                if slice.len() < 3 {
                    continue;
                }
                let xs: Vec<f64> = slice.iter().map(|(x, _)| *x).collect();
                let ys: Vec<f64> = slice.iter().map(|(_, y)| *y).collect();
                let smoothed = loess_smooth(&xs, &ys, span)?;
                let winner = xs[argmax_lowest_index(&smoothed)];
                match axis {
                    Axis::K => best.k = winner as usize,
                    Axis::AlphaPrime => best.alpha_prime = winner,
                    Axis::GammaPrime => {
                        best.gamma_prime = winner;
                        if alpha_tied {
                            best.alpha_prime = winner / 2.0;
                        }
                    }
                    Axis::LambdaPrime => best.lambda_prime = winner,
                }
            }
            best
        }
    };
    let hyper = reparam(&chosen)?;
    Ok((chosen, hyper))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reparam_examples() {
        let h = reparam(&ReparamPoint {
            k: 3,
            alpha_prime: 0.5,
            gamma_prime: 0.8,
            lambda_prime: 0.99,
        })
        .unwrap();
        assert!((h.alpha - 1.0).abs() < 1e-12);
        assert!((h.gamma - 0.25).abs() < 1e-12);
        assert!(h.lambda > 0.0 && h.lambda < 0.02);
    }

    #[test]
    fn reparam_rejects_out_of_range() {
        let base = ReparamPoint {
            k: 2,
            alpha_prime: 0.5,
            gamma_prime: 0.5,
            lambda_prime: 0.5,
        };
        assert!(reparam(&ReparamPoint { alpha_prime: 0.0, ..base }).is_err());
        assert!(reparam(&ReparamPoint { gamma_prime: 1.0, ..base }).is_err());
        assert!(reparam(&ReparamPoint { lambda_prime: -0.1, ..base }).is_err());
        assert!(reparam(&ReparamPoint { alpha_prime: 1.0, ..base }).is_ok());
    }

    #[test]
    fn k_ladder_matches_hand_example() {
        assert_eq!(k_values(83, 3), alloc::vec![3, 23, 43, 63, 83]);
    }

    #[test]
    fn reduced_grid_has_250_points_with_tied_alpha() {
        let grid = default_grid(83, 3, false).unwrap();
        assert_eq!(grid.len(), 250);
        for p in &grid {
            assert!((p.alpha_prime - p.gamma_prime / 2.0).abs() < 1e-12);
        }
        assert!(grid.iter().any(|p| {
            (p.gamma_prime - 0.75).abs() < 1e-12 && (p.alpha_prime - 0.375).abs() < 1e-12
        }));
    }

    #[test]
    fn full_grid_has_5000_points() {
        let grid = default_grid(83, 3, true).unwrap();
        assert_eq!(grid.len(), 5000);
    }

    #[test]
    fn degenerate_sizes_are_rejected() {
        assert!(default_grid(3, 3, false).is_err());
        assert!(default_grid(10, 1, false).is_err());
    }

    #[test]
    fn grid_point_seeds_are_stable_and_distinct() {
        let grid = default_grid(50, 2, false).unwrap();
        let a = grid_point_seed(7, &grid[0]);
        assert_eq!(a, grid_point_seed(7, &grid[0]));
        assert_ne!(a, grid_point_seed(7, &grid[1]));
        assert_ne!(a, grid_point_seed(8, &grid[0]));
    }

    #[test]
    fn raw_argmax_breaks_ties_to_lower_index() {
        let grid = default_grid(20, 2, false).unwrap();
        let mut acc = alloc::vec![0.5; grid.len()];
        acc[4] = 0.9;
        acc[10] = 0.9;
        let (chosen, _) =
            select_hyperparams(&grid, &acc, SelectionStrategy::RawArgmax).unwrap();
        assert_eq!(chosen, grid[4]);
    }

    #[test]
    fn single_point_grid_returns_that_point() {
        let grid = alloc::vec![ReparamPoint {
            k: 4,
            alpha_prime: 0.3,
            gamma_prime: 0.6,
            lambda_prime: 0.15,
        }];
        for strategy in [
            SelectionStrategy::RawArgmax,
            SelectionStrategy::TopQuantileMean { q_percent: 20.0 },
            SelectionStrategy::default(),
        ] {
            let (chosen, hyper) = select_hyperparams(&grid, &[0.8], strategy).unwrap();
            assert_eq!(chosen, grid[0]);
            assert_eq!(hyper.k, 4);
        }
    }

    #[test]
    fn loess_strategy_finds_the_smooth_peak() {
        // Accuracy depends smoothly on lambda' with a bump of noise at one
        // point; smoothing should ignore the spike.
        let grid = default_grid(40, 2, false).unwrap();
        let acc: Vec<f64> = grid
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let smooth = 0.9 - (p.lambda_prime - 0.55).abs();
                if i == 3 {
                    smooth + 0.07
                } else {
                    smooth
                }
            })
            .collect();
        let (chosen, _) =
            select_hyperparams(&grid, &acc, SelectionStrategy::default()).unwrap();
        assert!((chosen.lambda_prime - 0.55).abs() < 0.11);
    }

    #[test]
    fn top_quantile_mean_averages_coordinates() {
        let grid = alloc::vec![
            ReparamPoint { k: 2, alpha_prime: 0.2, gamma_prime: 0.6, lambda_prime: 0.1 },
            ReparamPoint { k: 4, alpha_prime: 0.4, gamma_prime: 0.8, lambda_prime: 0.3 },
            ReparamPoint { k: 9, alpha_prime: 0.9, gamma_prime: 0.9, lambda_prime: 0.9 },
        ];
        let (chosen, _) = select_hyperparams(
            &grid,
            &[0.9, 0.8, 0.1],
            SelectionStrategy::TopQuantileMean { q_percent: 67.0 },
        )
        .unwrap();
        assert_eq!(chosen.k, 3);
        assert!((chosen.alpha_prime - 0.3).abs() < 1e-12);
        assert!((chosen.gamma_prime - 0.7).abs() < 1e-12);
        assert!((chosen.lambda_prime - 0.2).abs() < 1e-12);
    }
}
