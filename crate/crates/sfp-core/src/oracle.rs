//! Independent brute-force solvers used by the test suites.
//!
//! Everything here deliberately avoids the closed-form code paths it is used
//! to check: the simplex oracle runs Euclidean projected gradient descent
//! (or a dense grid), prototype oracles scan grids, and the training
//! objective is re-assembled term by term with inline loss formulas.
//!
//! Enabled through the `oracle` feature; not intended for production use.

use alloc::vec;
use alloc::vec::Vec;

use crate::loss::LossKind;
use crate::math;
use crate::model::{Dataset, Hyperparams, ModelParams};
use crate::Mat;

/// The Theorem-1 objective `Σ aᵢθᵢ + γ Σ θᵢ ln θᵢ` (0 ln 0 = 0).
pub fn entropic_objective(costs: &[f64], gamma: f64, theta: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &t) in costs.iter().zip(theta) {
        if t > 0.0 {
            total += a * t + gamma * t * math::ln(t);
        }
    }
    total
}

/// Euclidean projection onto the probability simplex (Duchi et al. 2008).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut rho = 0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        if ui - (cumsum - 1.0) / (i as f64 + 1.0) > 0.0 {
            rho = i + 1;
        }
    }
    let top: f64 = u.iter().take(rho).sum();
    let tau = (top - 1.0) / rho as f64;
    v.iter().map(|&vi| (vi - tau).max(0.0)).collect()
}

/// Projected gradient descent on the Theorem-1 objective. Finite costs only.
///
/// Backtracking line search with step memory (the accepted step carries over
/// and is allowed to grow), which copes with the badly conditioned curvature
/// near the simplex boundary. Entries are clamped away from zero inside the
/// gradient so the entropy term stays defined on the boundary.
pub fn entropic_pgd(costs: &[f64], gamma: f64, max_iters: usize) -> Vec<f64> {
    assert!(costs.iter().all(|c| c.is_finite()));
    let m = costs.len();
    let mut theta = vec![1.0 / m as f64; m];
    let mut obj = entropic_objective(costs, gamma, &theta);
    let mut step = 1.0 / gamma.max(1.0);
    for _ in 0..max_iters {
        let grad: Vec<f64> = costs
            .iter()
            .zip(&theta)
            .map(|(&a, &t)| a + gamma * (1.0 + math::ln(t.max(1e-300))))
            .collect();
        step *= 1.6;
        let mut moved = false;
        while step > 1e-18 {
            let cand: Vec<f64> = theta
                .iter()
                .zip(&grad)
                .map(|(&t, &g)| t - step * g)
                .collect();
            let cand = project_simplex(&cand);
            let cand_obj = entropic_objective(costs, gamma, &cand);
            if cand_obj < obj {
                let delta = cand
                    .iter()
                    .zip(&theta)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                theta = cand;
                obj = cand_obj;
                moved = delta > 1e-14;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    newton_polish(costs, gamma, &mut theta);
    theta
}

/// Newton refinement in reduced coordinates (the last coordinate is
/// eliminated through the sum constraint). The entropy barrier keeps the
/// true optimum strictly interior, so zeroed coordinates are re-floored
/// before polishing. The Hessian is diagonal-plus-rank-one and inverted
/// by Sherman–Morrison; backtracking preserves positivity and descent.
fn newton_polish(costs: &[f64], gamma: f64, theta: &mut [f64]) {
    let m = theta.len();
    if m < 2 {
        return;
    }
    for t in theta.iter_mut() {
        *t = t.max(1e-16);
    }
    let total: f64 = theta.iter().sum();
    for t in theta.iter_mut() {
        *t /= total;
    }
    let mut obj = entropic_objective(costs, gamma, theta);
    for _ in 0..100 {
        let last = theta[m - 1];
        // Reduced gradient: dF/dθ_i = (a_i + γ ln θ_i) − (a_m + γ ln θ_m).
        let anchor = costs[m - 1] + gamma * math::ln(last);
        let grad: Vec<f64> = (0..m - 1)
            .map(|i| costs[i] + gamma * math::ln(theta[i]) - anchor)
            .collect();
        // Newton direction d = −H⁻¹ grad with
        // H = γ (diag(1/θ_i) + (1/θ_m) 11ᵀ).
        let su: f64 = grad.iter().zip(theta.iter()).map(|(g, t)| g * t).sum();
        let st: f64 = theta[..m - 1].iter().sum();
        let c = 1.0 / last;
        let factor = c * su / (1.0 + c * st);
        let dir: Vec<f64> = (0..m - 1)
            .map(|i| -(theta[i] * grad[i] - factor * theta[i]) / gamma)
            .collect();
        let mut step = 1.0;
        let mut accepted = false;
        while step > 1e-20 {
            let mut cand = theta.to_vec();
            let mut ok = true;
            let mut moved_last = 0.0;
            for i in 0..m - 1 {
                cand[i] = theta[i] + step * dir[i];
                moved_last += step * dir[i];
                if cand[i] <= 0.0 {
                    ok = false;
                    break;
                }
            }
            if ok {
                cand[m - 1] = last - moved_last;
                ok = cand[m - 1] > 0.0;
            }
            if ok {
                let cand_obj = entropic_objective(costs, gamma, &cand);
                if cand_obj < obj {
                    theta.copy_from_slice(&cand);
                    obj = cand_obj;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        let newton_decrement: f64 = grad
            .iter()
            .zip(dir.iter())
            .map(|(g, d)| -g * d)
            .sum::<f64>();
        if newton_decrement.abs() < 1e-24 {
            break;
        }
    }
}

/// Dense grid search on the Theorem-1 objective for m ≤ 3.
pub fn entropic_grid(costs: &[f64], gamma: f64, resolution: f64) -> Vec<f64> {
    let m = costs.len();
    assert!((1..=3).contains(&m));
    let steps = (1.0 / resolution) as usize;
    let mut best = vec![1.0 / m as f64; m];
    let mut best_obj = entropic_objective(costs, gamma, &best);
    let mut consider = |theta: &[f64]| {
        let o = entropic_objective(costs, gamma, theta);
        if o < best_obj {
            best_obj = o;
            best = theta.to_vec();
        }
    };
    match m {
        1 => consider(&[1.0]),
        2 => {
            for i in 0..=steps {
                let t = i as f64 * resolution;
                consider(&[t, 1.0 - t]);
            }
        }
        _ => {
            for i in 0..=steps {
                let a = i as f64 * resolution;
                for j in 0..=(steps - i) {
                    let b = j as f64 * resolution;
                    consider(&[a, b, 1.0 - a - b]);
                }
            }
        }
    }
    best
}

fn loss_inline(kind: LossKind, y: f64, probs: Option<&[f64]>, scalar: f64) -> f64 {
    match kind {
        LossKind::Logloss => {
            let zy = probs.unwrap()[y as usize - 1];
            if zy > 0.0 {
                -math::ln(zy)
            } else {
                f64::INFINITY
            }
        }
        LossKind::Logistic => {
            let t = -y * scalar;
            if t > 0.0 {
                t + math::ln_1p(math::exp(-t))
            } else {
                math::ln_1p(math::exp(t))
            }
        }
        LossKind::SquaredError => (y - scalar) * (y - scalar),
    }
}

/// 1-D grid scan of `Σ uᵢ ℓ(yᵢ, z)` for scalar-prototype losses.
pub fn prototype_grid_scalar(
    kind: LossKind,
    labels: &[f64],
    weights: &[f64],
    lo: f64,
    hi: f64,
    steps: usize,
) -> (f64, f64) {
    let mut best_z = lo;
    let mut best_obj = f64::INFINITY;
    for i in 0..=steps {
        let z = lo + (hi - lo) * i as f64 / steps as f64;
        let obj: f64 = labels
            .iter()
            .zip(weights)
            .map(|(&y, &u)| u * loss_inline(kind, y, None, z))
            .sum();
        if obj < best_obj {
            best_obj = obj;
            best_z = z;
        }
    }
    (best_z, best_obj)
}

/// Simplex grid scan of `Σ uᵢ ℓ(yᵢ, z)` for the logloss prototype, M ≤ 3.
pub fn prototype_grid_simplex(
    labels: &[f64],
    weights: &[f64],
    class_count: usize,
    resolution: f64,
) -> (Vec<f64>, f64) {
    assert!((2..=3).contains(&class_count));
    let steps = (1.0 / resolution) as usize;
    let mut best = vec![1.0 / class_count as f64; class_count];
    let mut best_obj = f64::INFINITY;
    let mut consider = |z: &[f64]| {
        let obj: f64 = labels
            .iter()
            .zip(weights)
            .map(|(&y, &u)| u * loss_inline(LossKind::Logloss, y, Some(z), 0.0))
            .sum();
        if obj < best_obj {
            best_obj = obj;
            best = z.to_vec();
        }
    };
    if class_count == 2 {
        for i in 0..=steps {
            let t = i as f64 * resolution;
            consider(&[t, 1.0 - t]);
        }
    } else {
        for i in 0..=steps {
            let a = i as f64 * resolution;
            for j in 0..=(steps - i) {
                let b = j as f64 * resolution;
                consider(&[a, b, 1.0 - a - b]);
            }
        }
    }
    (best, best_obj)
}

/// Term-by-term re-assembly of the training objective, written directly from
/// its four-sum definition with inline loss formulas. Conventions:
/// `0 ln 0 = 0` and `0 · ∞ = 0` (a zero-membership cluster contributes
/// nothing regardless of its loss).
pub fn objective_reference(
    data: &Dataset,
    memberships: &Mat,
    params: &ModelParams,
    hyper: &Hyperparams,
) -> f64 {
    let n = data.len();
    let p = data.feature_count();
    let k = hyper.k;
    let x = data.features();
    let mut total = 0.0;
    for j in 0..k {
        for i in 0..n {
            let u = memberships.get(i, j);
            if u > 0.0 {
                let mut dist = 0.0;
                for l in 0..p {
                    let diff = x.get(i, l) - params.centers.get(j, l);
                    dist += params.weights.get(j, l) * diff * diff;
                }
                total += u * dist;
                if hyper.alpha > 0.0 {
                    let y = data.labels()[i];
                    let loss = match &params.prototypes[j] {
                        crate::loss::LabelPrototype::Probs(z) => {
                            loss_inline(LossKind::Logloss, y, Some(z), 0.0)
                        }
                        crate::loss::LabelPrototype::Scalar(z) => {
                            loss_inline(params.loss, y, None, *z)
                        }
                    };
                    total += hyper.alpha * u * loss;
                }
                total += hyper.gamma * u * math::ln(u);
            }
        }
    }
    for j in 0..k {
        for l in 0..p {
            total += hyper.lambda * math::xlnx(params.weights.get(j, l));
        }
    }
    total
}
