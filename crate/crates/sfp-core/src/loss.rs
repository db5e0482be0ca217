//! Convex loss functions and their weighted-prototype minimizers.
//!
//! Each loss kind pairs a pointwise evaluation `ℓ(y, z)` with the closed-form
//! minimizer of `Σᵢ uᵢ ℓ(yᵢ, z)` over the prototype space. Losses whose
//! prototype has no closed form (hinge, 0–1) are not offered; the enum admits
//! future kinds without touching callers.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Saturation floor for prototypes. Logloss prototype entries are floored at
/// this value (then renormalized) so a cluster can never become permanently
/// unreachable for a class after one bad iteration; the logistic prototype is
/// clamped to `±ln(1/EPS_PROTO)` when one class has zero weighted mass.
pub const EPS_PROTO: f64 = 1e-12;

/// The supported loss functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LossKind {
    /// Multiclass cross-entropy. Labels in `{1..M}`, prototypes on the
    /// M-simplex.
    Logloss,
    /// Binary logistic loss. Labels in `{-1, +1}`, real scalar prototypes.
    Logistic,
    /// Squared error. Real labels, real scalar prototypes.
    SquaredError,
}

/// A cluster's label summary: the minimizer of the membership-weighted loss.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LabelPrototype {
    /// Class-probability vector on the M-simplex (logloss).
    Probs(Vec<f64>),
    /// Real scalar (logistic, squared error).
    Scalar(f64),
}

impl LabelPrototype {
    pub fn as_probs(&self) -> Option<&[f64]> {
        match self {
            LabelPrototype::Probs(p) => Some(p),
            LabelPrototype::Scalar(_) => None,
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            LabelPrototype::Probs(_) => None,
            LabelPrototype::Scalar(s) => Some(*s),
        }
    }
}

/// Checks that a label lies in the loss kind's domain.
pub fn validate_label(kind: LossKind, y: f64, class_count: Option<usize>) -> Result<()> {
    match kind {
        LossKind::Logloss => {
            let m = class_count
                .ok_or_else(|| Error::domain("logloss requires a class count"))?;
            if y != math::floor(y) || y < 1.0 || y > m as f64 {
                return Err(Error::domain(format!(
                    "logloss label {y} outside {{1..{m}}}"
                )));
            }
        }
        LossKind::Logistic => {
            if y != 1.0 && y != -1.0 {
                return Err(Error::domain(format!("logistic label {y} not in {{-1,+1}}")));
            }
        }
        LossKind::SquaredError => {
            if !y.is_finite() {
                return Err(Error::domain("squared-error label must be finite"));
            }
        }
    }
    Ok(())
}

/// Stable `ln(1 + exp(t))`.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + math::ln_1p(math::exp(-t))
    } else {
        math::ln_1p(math::exp(t))
    }
}

/// Evaluates `ℓ(y, z)`. May return `+∞` (logloss with a zero probability on
/// the observed class); probabilities are never clamped here.
pub fn loss_eval(kind: LossKind, y: f64, z: &LabelPrototype) -> Result<f64> {
    match (kind, z) {
        (LossKind::Logloss, LabelPrototype::Probs(probs)) => {
            validate_label(kind, y, Some(probs.len()))?;
            let zy = probs[y as usize - 1];
            Ok(if zy > 0.0 { -math::ln(zy) } else { f64::INFINITY })
        }
        (LossKind::Logistic, LabelPrototype::Scalar(z)) => {
            validate_label(kind, y, None)?;
            Ok(softplus(-y * z))
        }
        (LossKind::SquaredError, LabelPrototype::Scalar(z)) => {
            validate_label(kind, y, None)?;
            Ok((y - z) * (y - z))
        }
        _ => Err(Error::domain("prototype payload does not match loss kind")),
    }
}

/// Minimizes `Σᵢ uᵢ ℓ(yᵢ, z)` over the prototype space.
///
/// Logloss returns the weighted class frequencies, floored at [`EPS_PROTO`]
/// per entry and renormalized (within 1e-12 of the exact closed form).
/// Logistic returns the weighted log-odds, saturating at `±ln(1/EPS_PROTO)`
/// when one class carries no mass. Squared error returns the weighted mean.
pub fn prototype_solve(
    kind: LossKind,
    labels: &[f64],
    weights: &[f64],
    class_count: Option<usize>,
) -> Result<LabelPrototype> {
    if labels.len() != weights.len() {
        return Err(Error::domain("labels and weights must have equal length"));
    }
    if weights.iter().any(|&u| !(u >= 0.0)) {
        return Err(Error::domain("membership weights must be nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::domain("total membership weight must be positive"));
    }
    for &y in labels {
        validate_label(kind, y, class_count)?;
    }
    match kind {
        LossKind::Logloss => {
            let m = class_count.unwrap();
            let mut freq = vec![0.0; m];
            for (&y, &u) in labels.iter().zip(weights) {
                freq[y as usize - 1] += u;
            }
            Ok(logloss_from_masses(freq, total))
        }
        LossKind::Logistic => {
            let pos: f64 = labels
                .iter()
                .zip(weights)
                .filter(|(&y, _)| y > 0.0)
                .map(|(_, &u)| u)
                .sum();
            Ok(logistic_from_masses(pos, total - pos))
        }
        LossKind::SquaredError => {
            let mean: f64 = labels
                .iter()
                .zip(weights)
                .map(|(&y, &u)| y * u)
                .sum::<f64>()
                / total;
            Ok(LabelPrototype::Scalar(mean))
        }
    }
}

/// Logloss prototype from accumulated per-class membership masses: the
/// weighted frequencies, floored at [`EPS_PROTO`] and renormalized.
pub(crate) fn logloss_from_masses(mut freq: Vec<f64>, total: f64) -> LabelPrototype {
    for f in &mut freq {
        *f = (*f / total).max(EPS_PROTO);
    }
    let sum: f64 = freq.iter().sum();
    for f in &mut freq {
        *f /= sum;
    }
    LabelPrototype::Probs(freq)
}

/// Logistic prototype (weighted log-odds) from the two class masses,
/// saturating when one side is empty.
pub(crate) fn logistic_from_masses(pos: f64, neg: f64) -> LabelPrototype {
    let cap = -math::ln(EPS_PROTO);
    let z = if pos <= 0.0 {
        -cap
    } else if neg <= 0.0 {
        cap
    } else {
        (math::ln(pos) - math::ln(neg)).clamp(-cap, cap)
    };
    LabelPrototype::Scalar(z)
}
