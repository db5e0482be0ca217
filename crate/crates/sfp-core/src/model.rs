//! Model state, the augmented distance matrix, and the training objective.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::loss::{loss_eval, validate_label, LabelPrototype, LossKind};
use crate::math;
use crate::Mat;

/// The four training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hyperparams {
    /// Cluster count, at least 2.
    pub k: usize,
    /// Strength of the label contribution, nonnegative.
    pub alpha: f64,
    /// Membership-entropy coefficient, strictly positive. Large values give
    /// uniform memberships, values near zero give a nearly crisp partition.
    pub gamma: f64,
    /// Feature-weight-entropy coefficient, strictly positive.
    pub lambda: f64,
}

impl Hyperparams {
    pub fn new(k: usize, alpha: f64, gamma: f64, lambda: f64) -> Result<Self> {
        let h = Hyperparams {
            k,
            alpha,
            gamma,
            lambda,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::domain("k must be at least 2"));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::domain("alpha must be nonnegative"));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::domain("gamma must be strictly positive"));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::domain("lambda must be strictly positive"));
        }
        Ok(())
    }
}

/// A labeled numeric dataset.
///
/// Labels live in the domain of whichever loss the model uses: class indices
/// `1..=M` for logloss, `±1` for logistic, reals for squared error.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Mat,
    labels: Vec<f64>,
    class_count: Option<usize>,
}

impl Dataset {
    pub fn new(features: Mat, labels: Vec<f64>, class_count: Option<usize>) -> Result<Self> {
        if features.rows() == 0 || features.cols() == 0 {
            return Err(Error::domain("dataset must have at least one row and column"));
        }
        if features.rows() != labels.len() {
            return Err(Error::domain(format!(
                "{} feature rows but {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if let Some(m) = class_count {
            if m < 2 {
                return Err(Error::domain("class count must be at least 2"));
            }
        }
        Ok(Dataset {
            features,
            labels,
            class_count,
        })
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.features.rows() == 0
    }

    pub fn feature_count(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Mat {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn class_count(&self) -> Option<usize> {
        self.class_count
    }

    /// Checks every label against the loss kind's domain.
    pub fn validate_labels(&self, kind: LossKind) -> Result<()> {
        if kind == LossKind::Logloss && self.class_count.is_none() {
            return Err(Error::domain("logloss dataset needs a class count"));
        }
        for &y in &self.labels {
            validate_label(kind, y, self.class_count)?;
        }
        Ok(())
    }

    /// Row subset, preserving order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let mut data = Vec::with_capacity(rows.len() * self.feature_count());
        let mut labels = Vec::with_capacity(rows.len());
        for &i in rows {
            data.extend_from_slice(self.features.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            features: Mat::from_vec(rows.len(), self.feature_count(), data),
            labels,
            class_count: self.class_count,
        }
    }
}

/// Trained model state: centers, per-cluster feature weights, and label
/// prototypes.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    pub loss: LossKind,
    /// k×p cluster centers.
    pub centers: Mat,
    /// k×p feature weights; every row lies on the simplex.
    pub weights: Mat,
    /// One prototype per cluster.
    pub prototypes: Vec<LabelPrototype>,
}

impl ModelParams {
    pub fn cluster_count(&self) -> usize {
        self.centers.rows()
    }

    pub fn feature_count(&self) -> usize {
        self.centers.cols()
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.rows() != self.centers.rows()
            || self.weights.cols() != self.centers.cols()
            || self.prototypes.len() != self.centers.rows()
        {
            return Err(Error::domain("model parameter shapes disagree"));
        }
        for j in 0..self.weights.rows() {
            let row = self.weights.row(j);
            if row.iter().any(|&w| !(w >= 0.0)) {
                return Err(Error::domain("weight rows must be nonnegative"));
            }
            if (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::domain("weight rows must sum to one"));
            }
        }
        Ok(())
    }
}

/// Membership matrix: each row is the simplex-valued membership vector of one
/// observation over the k clusters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MembershipMatrix(Mat);

impl MembershipMatrix {
    pub(crate) fn new_unchecked(values: Mat) -> Self {
        MembershipMatrix(values)
    }

    pub fn try_from_mat(values: Mat) -> Result<Self> {
        for i in 0..values.rows() {
            let row = values.row(i);
            if row.iter().any(|&u| !(u >= 0.0)) {
                return Err(Error::domain("membership entries must be nonnegative"));
            }
            if (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::domain(format!("membership row {i} does not sum to one")));
            }
        }
        Ok(MembershipMatrix(values))
    }

    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    /// Trusted in-place access for the training loop, which re-establishes
    /// the row invariant on every write.
    pub(crate) fn as_mat_mut(&mut self) -> &mut Mat {
        &mut self.0
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn clusters(&self) -> usize {
        self.0.cols()
    }

    /// Mass of each cluster: per-column sums.
    pub fn column_masses(&self) -> Vec<f64> {
        let mut mass = alloc::vec![0.0; self.0.cols()];
        for i in 0..self.0.rows() {
            for (m, &u) in mass.iter_mut().zip(self.0.row(i)) {
                *m += u;
            }
        }
        mass
    }
}

/// Weighted squared Euclidean distance `Σ_l w_l (a_l − b_l)²`.
#[inline]
pub(crate) fn weighted_sq_dist(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(w)
        .map(|((&x, &v), &wl)| {
            let d = x - v;
            wl * d * d
        })
        .sum()
}

/// The augmented point-to-cluster distance matrix:
/// `d_ij = ‖x_i − v_j‖²_{w_j} + α ℓ(y_i, z_j)`.
///
/// Entries may be `+∞` when the loss diverges. With `alpha == 0` the loss
/// term is skipped entirely, so an infinite loss cannot contaminate the
/// unsupervised distances. For the classification losses the per-cluster
/// loss depends on the label alone, so it is tabulated once per cluster and
/// class rather than evaluated per observation.
pub fn distance_matrix(data: &Dataset, params: &ModelParams, alpha: f64) -> Result<Mat> {
    let mut out = Mat::zeros(data.len(), params.cluster_count());
    distance_matrix_into(data, params, alpha, &mut out)?;
    Ok(out)
}

/// Row filler for the augmented distance matrix, usable streaming (one row
/// at a time) or materialized. Classification losses are tabulated per
/// (cluster, class) up front.
pub(crate) struct DistanceRows<'a> {
    data: &'a Dataset,
    params: &'a ModelParams,
    alpha: f64,
    /// (cluster-major loss table, per-row class index) for tabulated losses.
    table: Option<(Vec<f64>, Vec<usize>)>,
    class_width: usize,
}

impl<'a> DistanceRows<'a> {
    pub(crate) fn new(data: &'a Dataset, params: &'a ModelParams, alpha: f64) -> Result<Self> {
        if params.feature_count() != data.feature_count() {
            return Err(Error::domain(format!(
                "model has {} features but data has {}",
                params.feature_count(),
                data.feature_count()
            )));
        }
        if !(alpha >= 0.0) {
            return Err(Error::domain("alpha must be nonnegative"));
        }
        let table: Option<(Vec<f64>, Vec<usize>)> = if alpha > 0.0 {
            match params.loss {
                LossKind::Logloss => {
                    data.validate_labels(params.loss)?;
                    let m = data
                        .class_count()
                        .ok_or_else(|| Error::domain("logloss dataset needs a class count"))?;
                    let mut losses = Vec::with_capacity(params.cluster_count() * m);
                    for proto in &params.prototypes {
                        for class in 1..=m {
                            losses.push(loss_eval(params.loss, class as f64, proto)?);
                        }
                    }
                    let classes = data.labels().iter().map(|&y| y as usize - 1).collect();
                    Some((losses, classes))
                }
                LossKind::Logistic => {
                    data.validate_labels(params.loss)?;
                    let mut losses = Vec::with_capacity(params.cluster_count() * 2);
                    for proto in &params.prototypes {
                        for y in [-1.0, 1.0] {
                            losses.push(loss_eval(params.loss, y, proto)?);
                        }
                    }
                    let classes =
                        data.labels().iter().map(|&y| usize::from(y > 0.0)).collect();
                    Some((losses, classes))
                }
                LossKind::SquaredError => None,
            }
        } else {
            None
        };
        let class_width = match params.loss {
            LossKind::Logloss => data.class_count().unwrap_or(0),
            LossKind::Logistic => 2,
            LossKind::SquaredError => 0,
        };
        Ok(DistanceRows {
            data,
            params,
            alpha,
            table,
            class_width,
        })
    }

    /// Writes row `i` of the distance matrix into `out` (length k).
    pub(crate) fn fill_row(&self, i: usize, out: &mut [f64]) -> Result<()> {
        let p = self.data.feature_count();
        let xi = self.data.features().row(i);
        let centers = self.params.centers.as_slice().chunks_exact(p);
        let weights = self.params.weights.as_slice().chunks_exact(p);
        for (j, ((slot, vj), wj)) in out.iter_mut().zip(centers).zip(weights).enumerate() {
            let mut d = weighted_sq_dist(xi, vj, wj);
            if self.alpha > 0.0 {
                d += self.alpha
                    * match &self.table {
                        Some((losses, classes)) => losses[j * self.class_width + classes[i]],
                        None => loss_eval(
                            self.params.loss,
                            self.data.labels()[i],
                            &self.params.prototypes[j],
                        )?,
                    };
            }
            *slot = d;
        }
        Ok(())
    }
}

/// Allocation-free form of [`distance_matrix`].
pub(crate) fn distance_matrix_into(
    data: &Dataset,
    params: &ModelParams,
    alpha: f64,
    dist: &mut Mat,
) -> Result<()> {
    assert!(dist.rows() == data.len() && dist.cols() == params.cluster_count());
    let rows = DistanceRows::new(data, params, alpha)?;
    for i in 0..data.len() {
        rows.fill_row(i, dist.row_mut(i))?;
    }
    Ok(())
}

/// The training objective: membership-weighted distances, the weighted loss
/// surrogate, and the two negative-entropy regularizers.
///
/// Conventions: `0 ln 0 = 0`, and a zero membership contributes nothing even
/// against an infinite distance (`0 · ∞ = 0`), matching the block minimizers
/// that produce such pairs.
pub fn objective(
    data: &Dataset,
    memberships: &MembershipMatrix,
    params: &ModelParams,
    hyper: &Hyperparams,
) -> Result<f64> {
    hyper.validate()?;
    let dist = distance_matrix(data, params, hyper.alpha)?;
    let u = memberships.as_mat();
    if u.rows() != data.len() || u.cols() != params.cluster_count() {
        return Err(Error::domain("membership matrix shape disagrees"));
    }
    let mut total = 0.0;
    for i in 0..u.rows() {
        for (&uij, &dij) in u.row(i).iter().zip(dist.row(i)) {
            if uij > 0.0 {
                total += uij * dij + hyper.gamma * uij * math::ln(uij);
            }
        }
    }
    for j in 0..params.weights.rows() {
        for &w in params.weights.row(j) {
            total += hyper.lambda * math::xlnx(w);
        }
    }
    Ok(total)
}
