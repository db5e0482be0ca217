//! Block coordinate descent training.
//!
//! Each iteration updates the four parameter blocks in turn, every one an
//! exact minimizer of the objective with the other blocks held fixed:
//! memberships (entropic simplex solve per row of the distance matrix),
//! centers (membership-weighted means, independent of the feature weights),
//! label prototypes (per-cluster weighted loss minimizers, computable
//! alongside the centers), and feature weights (entropic simplex solve on
//! the per-cluster feature variances). The loop stops when no center moved
//! more than `center_tol` in the max norm.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::loss::{prototype_solve, LabelPrototype, LossKind};
use crate::model::{objective, Dataset, Hyperparams, MembershipMatrix, ModelParams};
use crate::rng::rng_from_seed;
use crate::simplex::solve_entropic_linear_min;
use crate::Mat;

/// Column masses below this are treated as a degenerate (empty) cluster.
const DEGENERATE_MASS: f64 = 1e-300;

/// Knobs for one training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Iteration cap. Convergence typically arrives far earlier.
    pub max_iters: usize,
    /// Stop once no center moves more than this (max norm) in one iteration.
    pub center_tol: f64,
    /// Seed for the initialization sampling.
    pub seed: u64,
    /// Record the objective value after every iteration.
    pub record_trace: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iters: 100,
            center_tol: 1e-6,
            seed: 0,
            record_trace: false,
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::domain("max_iters must be at least 1"));
        }
        if !(self.center_tol > 0.0) {
            return Err(Error::domain("center_tol must be strictly positive"));
        }
        Ok(())
    }
}

/// Output of [`fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: ModelParams,
    pub memberships: MembershipMatrix,
    /// One objective value per completed iteration (when requested).
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Random initialization: centers are `k` distinct sampled observations,
/// each prototype minimizes the loss for its sampled label, and feature
/// weights start uniform at `1/p`.
pub fn initialize(data: &Dataset, k: usize, loss: LossKind, seed: u64) -> Result<ModelParams> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if k > data.len() {
        return Err(Error::domain(format!(
            "k = {k} exceeds the {} available observations",
            data.len()
        )));
    }
    data.validate_labels(loss)?;
    let p = data.feature_count();
    let mut rng = rng_from_seed(seed);
    let picks = rand::seq::index::sample(&mut rng, data.len(), k);
    let mut centers = Vec::with_capacity(k * p);
    let mut prototypes = Vec::with_capacity(k);
    for i in picks {
        centers.extend_from_slice(data.features().row(i));
        prototypes.push(prototype_solve(
            loss,
            &[data.labels()[i]],
            &[1.0],
            data.class_count(),
        )?);
    }
    Ok(ModelParams {
        loss,
        centers: Mat::from_vec(k, p, centers),
        weights: Mat::filled(k, p, 1.0 / p as f64),
        prototypes,
    })
}

/// Membership update: one entropic simplex solve per distance-matrix row.
pub fn update_memberships(dist: &Mat, gamma: f64) -> Result<MembershipMatrix> {
    let mut out = Mat::zeros(dist.rows(), dist.cols());
    update_memberships_into(dist, gamma, &mut out)?;
    Ok(MembershipMatrix::new_unchecked(out))
}

fn update_memberships_into(dist: &Mat, gamma: f64, out: &mut Mat) -> Result<()> {
    for i in 0..dist.rows() {
        crate::simplex::solve_entropic_into(dist.row(i), gamma, out.row_mut(i))?;
    }
    Ok(())
}

/// Center update: membership-weighted means. Does not read the feature
/// weights.
pub fn update_centers(data: &Dataset, memberships: &MembershipMatrix) -> Result<Mat> {
    let n = data.len();
    let p = data.feature_count();
    let k = memberships.clusters();
    if memberships.rows() != n {
        return Err(Error::domain("membership rows disagree with data"));
    }
    let masses = memberships.column_masses();
    if let Some(j) = masses.iter().position(|&m| m < DEGENERATE_MASS) {
        return Err(Error::numeric(format!(
            "cluster {j} has numerically zero membership mass"
        )));
    }
    let mut centers = Mat::zeros(k, p);
    for i in 0..n {
        let xi = data.features().row(i);
        let rows = centers.as_mut_slice().chunks_exact_mut(p);
        for (&u, row) in memberships.as_mat().row(i).iter().zip(rows) {
            for (c, &x) in row.iter_mut().zip(xi) {
                *c += u * x;
            }
        }
    }
    for j in 0..k {
        let mass = masses[j];
        for c in centers.row_mut(j) {
            *c /= mass;
        }
    }
    Ok(centers)
}

/// Prototype update: per-cluster weighted loss minimizer with the cluster's
/// membership column as weights.
///
/// One row-major pass accumulates every cluster's sufficient statistics
/// (class masses, or weighted label sums); the per-cluster minimizers are
/// identical to [`prototype_solve`] on the membership columns.
pub fn update_prototypes(
    data: &Dataset,
    memberships: &MembershipMatrix,
    loss: LossKind,
) -> Result<Vec<LabelPrototype>> {
    let n = data.len();
    let k = memberships.clusters();
    let u = memberships.as_mat();
    data.validate_labels(loss)?;
    let masses = memberships.column_masses();
    if let Some(j) = masses.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::domain(format!(
            "cluster {j} has zero total membership weight"
        )));
    }
    match loss {
        LossKind::Logloss => {
            let m = data.class_count().expect("validated above");
            let mut freq = vec![0.0; k * m];
            for i in 0..n {
                let class = data.labels()[i] as usize - 1;
                for (j, &uij) in u.row(i).iter().enumerate() {
                    freq[j * m + class] += uij;
                }
            }
            Ok((0..k)
                .map(|j| {
                    crate::loss::logloss_from_masses(
                        freq[j * m..(j + 1) * m].to_vec(),
                        masses[j],
                    )
                })
                .collect())
        }
        LossKind::Logistic => {
            let mut pos = vec![0.0; k];
            for i in 0..n {
                if data.labels()[i] > 0.0 {
                    for (j, &uij) in u.row(i).iter().enumerate() {
                        pos[j] += uij;
                    }
                }
            }
            Ok((0..k)
                .map(|j| crate::loss::logistic_from_masses(pos[j], masses[j] - pos[j]))
                .collect())
        }
        LossKind::SquaredError => {
            let mut sums = vec![0.0; k];
            for i in 0..n {
                let y = data.labels()[i];
                for (j, &uij) in u.row(i).iter().enumerate() {
                    sums[j] += y * uij;
                }
            }
            Ok((0..k)
                .map(|j| LabelPrototype::Scalar(sums[j] / masses[j]))
                .collect())
        }
    }
}

/// Feature-weight update: entropic simplex solve per cluster on the
/// membership-weighted per-feature variances
/// `s_jl = Σᵢ u_ij (x_il − v_jl)²`.
pub fn update_weights(
    data: &Dataset,
    memberships: &MembershipMatrix,
    centers: &Mat,
    lambda: f64,
) -> Result<Mat> {
    let n = data.len();
    let p = data.feature_count();
    let k = memberships.clusters();
    // Row-major accumulation of all k variance rows in one pass.
    let mut s = Mat::zeros(k, p);
    let center_rows = centers.as_slice();
    for i in 0..n {
        let xi = data.features().row(i);
        let u_row = memberships.as_mat().row(i);
        for (j, &u) in u_row.iter().enumerate() {
            let vj = &center_rows[j * p..(j + 1) * p];
            let sj = s.row_mut(j);
            for l in 0..p {
                let d = xi[l] - vj[l];
                sj[l] += u * d * d;
            }
        }
    }
    let mut weights = Mat::zeros(k, p);
    for j in 0..k {
        let row = solve_entropic_linear_min(s.row(j), lambda)?;
        weights.row_mut(j).copy_from_slice(row.as_slice());
    }
    Ok(weights)
}

/// Empty-cluster repair: reseat each degenerate cluster's center at the
/// observation worst served by its current best cluster (the row with the
/// largest finite distance to its nearest cluster), reset the weight row to
/// uniform, and recompute the prototype from that observation alone.
fn repair_degenerate(
    data: &Dataset,
    row_min_dist: &[f64],
    masses: &[f64],
    params: &mut ModelParams,
) -> Result<()> {
    let p = data.feature_count();
    for (j, &mass) in masses.iter().enumerate() {
        if mass >= DEGENERATE_MASS {
            continue;
        }
        let mut worst_row = 0;
        let mut worst_gap = f64::NEG_INFINITY;
        for (i, &best) in row_min_dist.iter().enumerate() {
            if best > worst_gap {
                worst_gap = best;
                worst_row = i;
            }
        }
        params
            .centers
            .row_mut(j)
            .copy_from_slice(data.features().row(worst_row));
        params
            .weights
            .row_mut(j)
            .iter_mut()
            .for_each(|w| *w = 1.0 / p as f64);
        params.prototypes[j] = prototype_solve(
            params.loss,
            &[data.labels()[worst_row]],
            &[1.0],
            data.class_count(),
        )?;
    }
    Ok(())
}

/// Trains an SFP model by block coordinate descent.
pub fn fit(
    data: &Dataset,
    hyper: &Hyperparams,
    loss: LossKind,
    config: &FitConfig,
) -> Result<FitResult> {
    hyper.validate()?;
    config.validate()?;
    data.validate_labels(loss)?;
    let mut params = initialize(data, hyper.k, loss, config.seed)?;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let n = data.len();
    let mut u = MembershipMatrix::new_unchecked(Mat::zeros(n, hyper.k));
    let mut d_row = vec![0.0; hyper.k];

    // Distance rows are streamed straight into the membership solve; the
    // full n×k distance matrix is never materialized.
    let membership_pass =
        |params: &ModelParams, u: &mut MembershipMatrix, d_row: &mut [f64]| -> Result<()> {
            let rows = crate::model::DistanceRows::new(data, params, hyper.alpha)?;
            for i in 0..n {
                rows.fill_row(i, d_row)?;
                crate::simplex::solve_entropic_into(
                    d_row,
                    hyper.gamma,
                    u.as_mat_mut().row_mut(i),
                )?;
            }
            Ok(())
        };

    for _ in 0..config.max_iters {
        membership_pass(&params, &mut u, &mut d_row)?;
        let masses = u.column_masses();
        if masses.iter().any(|&m| m < DEGENERATE_MASS) {
            // Rare path: materialize the per-row best distances for repair.
            let rows = crate::model::DistanceRows::new(data, &params, hyper.alpha)?;
            let mut row_min = vec![f64::INFINITY; n];
            for (i, slot) in row_min.iter_mut().enumerate() {
                rows.fill_row(i, &mut d_row)?;
                *slot = d_row
                    .iter()
                    .copied()
                    .filter(|d| d.is_finite())
                    .fold(f64::INFINITY, f64::min);
            }
            repair_degenerate(data, &row_min, &masses, &mut params)?;
            membership_pass(&params, &mut u, &mut d_row)?;
        }

        let new_centers = update_centers(data, &u)?;
        let new_prototypes = update_prototypes(data, &u, loss)?;
        let shift = (0..hyper.k)
            .map(|j| {
                params
                    .centers
                    .row(j)
                    .iter()
                    .zip(new_centers.row(j))
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        params.centers = new_centers;
        params.prototypes = new_prototypes;
        params.weights = update_weights(data, &u, &params.centers, hyper.lambda)?;

        iterations += 1;
        if config.record_trace {
            trace.push(objective(data, &u, &params, hyper)?);
        }
        if shift < config.center_tol {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        params,
        memberships: u,
        objective_trace: trace,
        iterations,
        converged,
    })
}
