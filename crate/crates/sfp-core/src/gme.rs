//! Generative mixtures of experts with penalized EM, and the numerical
//! certifier for its equivalence with block coordinate descent.
//!
//! The model family is fixed to the instantiation that recovers the training
//! objective of this crate: uniform mixing proportions, diagonal Gaussian
//! gate densities whose covariances are parameterized by simplex weight rows
//! through `σ²_jl = (γ/2)/w_jl`, categorical experts, and the penalty
//! `P(ψ) = −(λ/γ) Σ w ln w` added to the log-likelihood.
//!
//! EM and BCD share one parameter-update routine; what the certifier
//! exercises is that the E-step posteriors coincide with the entropic
//! simplex solve on the cost rows `D + ℓ` (with unit entropy coefficient),
//! and that the two iterate chains stay together over many iterations.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::loss::{prototype_solve, LabelPrototype, LossKind};
use crate::math;
use crate::model::{objective, Dataset, Hyperparams, MembershipMatrix, ModelParams};
use crate::rng::rng_from_seed;
use crate::simplex::{solve_entropic_linear_min, SimplexVector};
use crate::train::update_centers;
use crate::Mat;

/// Variance floor keeping Gaussian densities finite.
const COV_FLOOR: f64 = 1e-8;

/// Parameters of the generative mixture of experts.
#[derive(Debug, Clone, PartialEq)]
pub struct GmeParams {
    /// Mixing proportions over the k components.
    pub mixing: SimplexVector,
    /// k×p component means.
    pub means: Mat,
    /// k×p diagonal covariances.
    pub covariances: Mat,
    /// k×M categorical expert distributions, one row per component.
    pub experts: Mat,
    /// Scale coupling covariances to weight rows (`σ² = (γ/2)/w`).
    pub gamma: f64,
    /// Weight-entropy penalty coefficient.
    pub lambda: f64,
    /// Hold the mixing proportions fixed at `1/k` instead of applying the
    /// closed-form update.
    pub fix_uniform_mixing: bool,
}

impl GmeParams {
    pub fn cluster_count(&self) -> usize {
        self.means.rows()
    }

    pub fn feature_count(&self) -> usize {
        self.means.cols()
    }

    pub fn class_count(&self) -> usize {
        self.experts.cols()
    }

    /// The weight row implied by a component's covariances.
    pub fn weight_row(&self, j: usize) -> Vec<f64> {
        self.covariances
            .row(j)
            .iter()
            .map(|&v| self.gamma / (2.0 * v))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !(self.lambda > 0.0) {
            return Err(Error::domain("gamma and lambda must be strictly positive"));
        }
        if self.mixing.len() != self.means.rows()
            || self.covariances.rows() != self.means.rows()
            || self.covariances.cols() != self.means.cols()
            || self.experts.rows() != self.means.rows()
        {
            return Err(Error::domain("mixture parameter shapes disagree"));
        }
        if self.covariances.as_slice().iter().any(|&v| !(v > 0.0)) {
            return Err(Error::domain("covariances must be strictly positive"));
        }
        for j in 0..self.experts.rows() {
            let row = self.experts.row(j);
            if row.iter().any(|&z| !(z >= 0.0)) {
                return Err(Error::domain("expert rows must be nonnegative"));
            }
            if (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::domain("expert rows must sum to one"));
            }
        }
        Ok(())
    }

    /// SFP view of the parameters: means as centers, implied weight rows,
    /// experts as logloss prototypes.
    pub fn as_model_params(&self) -> ModelParams {
        let k = self.cluster_count();
        let p = self.feature_count();
        let mut weights = Mat::zeros(k, p);
        for j in 0..k {
            let w = self.weight_row(j);
            let sum: f64 = w.iter().sum();
            for (l, v) in w.iter().enumerate() {
                weights.set(j, l, v / sum);
            }
        }
        ModelParams {
            loss: LossKind::Logloss,
            centers: self.means.clone(),
            weights,
            prototypes: (0..k)
                .map(|j| LabelPrototype::Probs(self.experts.row(j).to_vec()))
                .collect(),
        }
    }
}

/// Penalized log-likelihood value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loglik {
    pub value: f64,
    /// Points whose total mixture density was zero (each contributes −∞).
    pub degenerate_points: usize,
}

fn ln_gaussian_diag(x: &[f64], mean: &[f64], cov: &[f64]) -> f64 {
    let mut acc = -0.5 * x.len() as f64 * math::ln(2.0 * core::f64::consts::PI);
    for l in 0..x.len() {
        let v = cov[l].max(COV_FLOOR);
        let d = x[l] - mean[l];
        acc -= 0.5 * (math::ln(v) + d * d / v);
    }
    acc
}

fn ln_expert(params: &GmeParams, j: usize, y: f64) -> f64 {
    let z = params.experts.get(j, y as usize - 1);
    if z > 0.0 {
        math::ln(z)
    } else {
        f64::NEG_INFINITY
    }
}

/// The weight-entropy penalty `P(ψ) = −(λ/γ) Σ w ln w`.
fn penalty(params: &GmeParams) -> f64 {
    let mut acc = 0.0;
    for j in 0..params.cluster_count() {
        for w in params.weight_row(j) {
            acc += math::xlnx(w);
        }
    }
    -(params.lambda / params.gamma) * acc
}

/// Per-point component log-densities `ln π_j + ln q + ln f`.
fn log_joint_row(data: &Dataset, params: &GmeParams, i: usize, out: &mut [f64]) {
    let x = data.features().row(i);
    let y = data.labels()[i];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = math::ln(params.mixing.as_slice()[j])
            + ln_gaussian_diag(x, params.means.row(j), params.covariances.row(j))
            + ln_expert(params, j, y);
    }
}

/// The penalized log-likelihood of the data.
pub fn gme_loglik(data: &Dataset, params: &GmeParams) -> Result<Loglik> {
    params.validate()?;
    check_dims(data, params)?;
    let k = params.cluster_count();
    let mut row = vec![0.0; k];
    let mut total = penalty(params);
    let mut degenerate = 0;
    for i in 0..data.len() {
        log_joint_row(data, params, i, &mut row);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            degenerate += 1;
            total = f64::NEG_INFINITY;
            continue;
        }
        let sum: f64 = row.iter().map(|&v| math::exp(v - max)).sum();
        total += max + math::ln(sum);
    }
    Ok(Loglik {
        value: total,
        degenerate_points: degenerate,
    })
}

fn check_dims(data: &Dataset, params: &GmeParams) -> Result<()> {
    if data.feature_count() != params.feature_count() {
        return Err(Error::domain("feature dimensions disagree"));
    }
    match data.class_count() {
        Some(m) if m == params.class_count() => Ok(()),
        _ => Err(Error::domain("class counts disagree")),
    }
}

/// E-step: posterior membership probabilities (normalized joint densities).
pub fn e_step(data: &Dataset, params: &GmeParams) -> Result<MembershipMatrix> {
    params.validate()?;
    check_dims(data, params)?;
    let k = params.cluster_count();
    let mut row = vec![0.0; k];
    let mut out = Mat::zeros(data.len(), k);
    for i in 0..data.len() {
        log_joint_row(data, params, i, &mut row);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::numeric(alloc::format!(
                "point {i} has zero density under every component"
            )));
        }
        let mut sum = 0.0;
        for (slot, &v) in out.row_mut(i).iter_mut().zip(row.iter()) {
            *slot = math::exp(v - max);
            sum += *slot;
        }
        for slot in out.row_mut(i) {
            *slot /= sum;
        }
    }
    Ok(MembershipMatrix::new_unchecked(out))
}

/// BCD membership block: the entropic simplex solve (unit entropy
/// coefficient) on the cost rows `D + ℓ`, where `D = −ln π − ln q` and
/// `ℓ = −ln f`. By the equivalence theorem this coincides with the E-step;
/// the certifier measures how closely the two code paths agree.
pub fn bcd_memberships(data: &Dataset, params: &GmeParams) -> Result<MembershipMatrix> {
    params.validate()?;
    check_dims(data, params)?;
    let k = params.cluster_count();
    let mut costs = vec![0.0; k];
    let mut row = vec![0.0; k];
    let mut out = Mat::zeros(data.len(), k);
    for i in 0..data.len() {
        log_joint_row(data, params, i, &mut row);
        for (c, &lj) in costs.iter_mut().zip(row.iter()) {
            *c = -lj;
        }
        let solved = solve_entropic_linear_min(&costs, 1.0)?;
        out.row_mut(i).copy_from_slice(solved.as_slice());
    }
    Ok(MembershipMatrix::new_unchecked(out))
}

/// Exact minimizer of `Σ s_l w_l + λ Σ w_l ln w_l − c Σ ln w_l` over the
/// simplex (`c ≥ 0`). The barrier term keeps the solution strictly interior;
/// stationarity `λ ln w − c/w = t_l` is solved per coordinate by a damped
/// Newton iteration in `ln w`, and the simplex multiplier by bisection.
pub fn penalized_weight_solve(s: &[f64], lambda: f64, c: f64) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Err(Error::domain("empty variance vector"));
    }
    if !(lambda > 0.0) || !(c >= 0.0) {
        return Err(Error::domain("need lambda > 0 and c >= 0"));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("variances must be finite"));
    }
    let p = s.len();
    if c == 0.0 {
        // Barrier absent: plain entropic solve.
        return Ok(solve_entropic_linear_min(s, lambda)?.into_vec());
    }

    // phi(w) = lambda ln w - c / w is strictly increasing; invert by Newton
    // on u = ln w (h is concave and increasing, so Newton converges from
    // either side). The start is the larger of the linear-dominant and
    // barrier-dominant candidates, which keeps exp(-u) from overflowing.
    let invert = |t: f64| -> f64 {
        let mut u = if t < 0.0 {
            (t / lambda).max(-math::ln(-t / c))
        } else {
            t / lambda
        };
        u = u.clamp(-700.0, 700.0);
        for _ in 0..80 {
            let e = math::exp(-u);
            let h = lambda * u - c * e - t;
            let dh = lambda + c * e;
            let step = h / dh;
            u = (u - step).clamp(-700.0, 700.0);
            if step.abs() < 1e-15 * (1.0 + u.abs()) {
                break;
            }
        }
        math::exp(u)
    };

    let sum_for = |mu: f64| -> f64 { s.iter().map(|&sl| invert(-sl - lambda - mu)).sum() };

    // Bracket the multiplier, then bisect.
    let mut lo = -1.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        if sum_for(lo) >= 1.0 {
            break;
        }
        lo = lo * 2.0 - 1.0;
    }
    for _ in 0..200 {
        if sum_for(hi) <= 1.0 {
            break;
        }
        hi = hi * 2.0 + 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum_for(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * (1.0 + lo.abs()) {
            break;
        }
    }
    let mu = 0.5 * (lo + hi);
    let mut w: Vec<f64> = s.iter().map(|&sl| invert(-sl - lambda - mu)).collect();
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    debug_assert!(w.len() == p && w.iter().all(|&v| v > 0.0 && v <= 1.0));
    Ok(w)
}

/// M-step / BCD parameter block: exact maximizer of the penalized surrogate
/// for fixed memberships. Shared verbatim by the EM and BCD chains.
pub fn m_step(
    data: &Dataset,
    memberships: &MembershipMatrix,
    params: &GmeParams,
) -> Result<GmeParams> {
    let k = params.cluster_count();
    let p = params.feature_count();
    let n = data.len();
    let masses = memberships.column_masses();
    if masses.iter().any(|&m| m < 1e-300) {
        return Err(Error::numeric("degenerate posterior column"));
    }

    let mixing = if params.fix_uniform_mixing {
        SimplexVector::new_unchecked(vec![1.0 / k as f64; k])
    } else {
        SimplexVector::new_unchecked(masses.iter().map(|&m| m / n as f64).collect())
    };

    let means = update_centers(data, memberships)?;

    // Experts: per-cluster weighted class frequencies.
    let m_classes = params.class_count();
    let mut experts = Mat::zeros(k, m_classes);
    let mut column = vec![0.0; n];
    for j in 0..k {
        for (i, slot) in column.iter_mut().enumerate() {
            *slot = memberships.as_mat().get(i, j);
        }
        let proto = prototype_solve(LossKind::Logloss, data.labels(), &column, Some(m_classes))?;
        experts
            .row_mut(j)
            .copy_from_slice(proto.as_probs().expect("logloss prototype"));
    }

    // Covariances through the penalized simplex weight solve.
    let mut covariances = Mat::zeros(k, p);
    let mut s = vec![0.0; p];
    for j in 0..k {
        s.iter_mut().for_each(|v| *v = 0.0);
        let mj = means.row(j);
        for i in 0..n {
            let u = memberships.as_mat().get(i, j);
            let x = data.features().row(i);
            for l in 0..p {
                let d = x[l] - mj[l];
                s[l] += u * d * d;
            }
        }
        let w = penalized_weight_solve(&s, params.lambda, params.gamma * masses[j] / 2.0)?;
        for (l, &wl) in w.iter().enumerate() {
            covariances.set(j, l, params.gamma / (2.0 * wl));
        }
    }

    Ok(GmeParams {
        mixing,
        means,
        covariances,
        experts,
        gamma: params.gamma,
        lambda: params.lambda,
        fix_uniform_mixing: params.fix_uniform_mixing,
    })
}

/// One EM iteration: posteriors, then the shared parameter update.
pub fn em_step(data: &Dataset, params: &GmeParams) -> Result<(GmeParams, MembershipMatrix)> {
    let u = e_step(data, params)?;
    let next = m_step(data, &u, params)?;
    Ok((next, u))
}

/// The alternating-minimization objective
/// `J(U, ψ) = Σ u D + Σ u ℓ + Σ u ln u − P(ψ)` with `0·∞ = 0`.
pub fn j_function(data: &Dataset, memberships: &MembershipMatrix, params: &GmeParams) -> Result<f64> {
    params.validate()?;
    check_dims(data, params)?;
    let k = params.cluster_count();
    let mut row = vec![0.0; k];
    let mut total = -penalty(params);
    for i in 0..data.len() {
        log_joint_row(data, params, i, &mut row);
        for (j, &lj) in row.iter().enumerate() {
            let u = memberships.as_mat().get(i, j);
            if u > 0.0 {
                total += u * (-lj) + u * math::ln(u);
            }
        }
    }
    Ok(total)
}

/// The EM surrogate `Q(ψ, ψᵗ) = Σ uᵗ (ln π + ln q + ln f) + P(ψ)`, with the
/// posteriors `uᵗ` supplied by the caller.
pub fn q_surrogate(
    data: &Dataset,
    memberships: &MembershipMatrix,
    params: &GmeParams,
) -> Result<f64> {
    params.validate()?;
    check_dims(data, params)?;
    let k = params.cluster_count();
    let mut row = vec![0.0; k];
    let mut total = penalty(params);
    for i in 0..data.len() {
        log_joint_row(data, params, i, &mut row);
        for (j, &lj) in row.iter().enumerate() {
            let u = memberships.as_mat().get(i, j);
            if u > 0.0 {
                total += u * lj;
            }
        }
    }
    Ok(total)
}

/// EM run record.
#[derive(Debug, Clone, PartialEq)]
pub struct EmTrace {
    /// Penalized log-likelihood: initial value, then one entry per step.
    pub loglik: Vec<f64>,
    /// `J` evaluated on each step's posteriors and updated parameters.
    pub j_values: Vec<f64>,
    /// Posterior matrices per step.
    pub posteriors: Vec<MembershipMatrix>,
}

/// Runs `iters` EM iterations, recording the trace.
pub fn run_em(data: &Dataset, init: &GmeParams, iters: usize) -> Result<(GmeParams, EmTrace)> {
    let mut params = init.clone();
    let mut trace = EmTrace {
        loglik: vec![gme_loglik(data, &params)?.value],
        j_values: Vec::new(),
        posteriors: Vec::new(),
    };
    for _ in 0..iters {
        let (next, u) = em_step(data, &params)?;
        trace.loglik.push(gme_loglik(data, &next)?.value);
        trace.j_values.push(j_function(data, &u, &next)?);
        trace.posteriors.push(u);
        params = next;
    }
    Ok((params, trace))
}

/// Certification report for the EM ≡ BCD equivalence.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// Largest membership discrepancy between the two chains, any iteration.
    pub max_u_gap: f64,
    /// Largest parameter discrepancy between the two chains.
    pub max_param_gap: f64,
    /// Largest gap between the E-step posteriors and the entropic simplex
    /// solve evaluated on the same parameters.
    pub posterior_solver_gap: f64,
    /// Largest violation of the objective identity tying `γ·J` to the
    /// training objective (label coefficient set to `γ`) plus the
    /// `−(γ/2) Σ_j U_j Σ_l ln w_jl` correction.
    pub sfp_objective_gap: f64,
    /// Penalized log-likelihood along the EM chain (initial value first).
    pub loglik_trace: Vec<f64>,
    /// `J` along the BCD chain (initial value first).
    pub j_trace: Vec<f64>,
}

fn inf_norm_diff(a: &Mat, b: &Mat) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn param_gap(a: &GmeParams, b: &GmeParams) -> f64 {
    let mix = a
        .mixing
        .as_slice()
        .iter()
        .zip(b.mixing.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    inf_norm_diff(&a.means, &b.means)
        .max(inf_norm_diff(&a.covariances, &b.covariances))
        .max(inf_norm_diff(&a.experts, &b.experts))
        .max(mix)
}

/// Runs the EM chain and the BCD chain from the same initialization and
/// measures how far they drift apart, along with the per-iteration identity
/// checks backing the equivalence theorem.
pub fn certify_equivalence(
    data: &Dataset,
    init: &GmeParams,
    iters: usize,
) -> Result<EquivalenceReport> {
    init.validate()?;
    check_dims(data, init)?;
    let k = init.cluster_count();
    if !init.fix_uniform_mixing
        || init
            .mixing
            .as_slice()
            .iter()
            .any(|&pi| (pi - 1.0 / k as f64).abs() > 1e-12)
    {
        return Err(Error::domain(
            "certification runs on the uniform-mixing family",
        ));
    }

    let mut em = init.clone();
    let mut bcd = init.clone();
    let mut report = EquivalenceReport {
        max_u_gap: 0.0,
        max_param_gap: 0.0,
        posterior_solver_gap: 0.0,
        sfp_objective_gap: 0.0,
        loglik_trace: vec![gme_loglik(data, &em)?.value],
        j_trace: Vec::new(),
    };

    for step in 0..iters {
        let u_em = e_step(data, &em)?;
        let u_solver = bcd_memberships(data, &em)?;
        report.posterior_solver_gap = report
            .posterior_solver_gap
            .max(inf_norm_diff(u_em.as_mat(), u_solver.as_mat()));

        let u_bcd = bcd_memberships(data, &bcd)?;
        if step == 0 {
            report.j_trace.push(j_function(data, &u_bcd, &bcd)?);
        }
        report.sfp_objective_gap = report
            .sfp_objective_gap
            .max(objective_identity_gap(data, &u_bcd, &bcd)?);

        report.max_u_gap = report
            .max_u_gap
            .max(inf_norm_diff(u_em.as_mat(), u_bcd.as_mat()));

        em = m_step(data, &u_em, &em)?;
        bcd = m_step(data, &u_bcd, &bcd)?;
        report.max_param_gap = report.max_param_gap.max(param_gap(&em, &bcd));
        report.loglik_trace.push(gme_loglik(data, &em)?.value);
        report.j_trace.push(j_function(data, &u_bcd, &bcd)?);
    }
    Ok(report)
}

/// Checks `γ·J(U, ψ) = C + objective(U, ψ; α=γ) − (γ/2) Σ_j U_j Σ_l ln w_jl`
/// with `C = γ n ln k + γ n (p/2) ln(π γ)`, returning the absolute gap.
fn objective_identity_gap(
    data: &Dataset,
    memberships: &MembershipMatrix,
    params: &GmeParams,
) -> Result<f64> {
    let n = data.len() as f64;
    let p = params.feature_count() as f64;
    let k = params.cluster_count();
    let gamma = params.gamma;

    let j_value = gamma * j_function(data, memberships, params)?;
    let constant = gamma * n * math::ln(k as f64)
        + gamma * n * (p / 2.0) * math::ln(core::f64::consts::PI * gamma);

    let sfp_params = params.as_model_params();
    let hyper = Hyperparams::new(k.max(2), gamma, gamma, params.lambda)?;
    let sfp_objective = objective(data, memberships, &sfp_params, &hyper)?;
    let masses = memberships.column_masses();
    let mut correction = 0.0;
    for (j, &mass) in masses.iter().enumerate() {
        let log_w_sum: f64 = params.weight_row(j).iter().map(|&w| math::ln(w)).sum();
        correction -= gamma / 2.0 * mass * log_w_sum;
    }
    Ok((j_value - constant - (sfp_objective + correction)).abs())
}

/// Random desk-scale certification instance: blobby features, uniform random
/// labels, and a valid uniform-mixing initialization (means sampled from the
/// data, uniform weight rows, random expert rows).
pub fn gen_instance(
    n: usize,
    k: usize,
    p: usize,
    class_count: usize,
    seed: u64,
) -> Result<(Dataset, GmeParams)> {
    if n < k || k == 0 || p == 0 || class_count < 2 {
        return Err(Error::domain("invalid instance shape"));
    }
    let mut rng = rng_from_seed(seed);
    let blob_centers: Vec<f64> = (0..k * p).map(|_| rng.random_range(-3.0..3.0)).collect();
    let mut feats = Vec::with_capacity(n * p);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let b = i % k;
        for l in 0..p {
            feats.push(blob_centers[b * p + l] + rng.random_range(-1.0..1.0));
        }
        labels.push(rng.random_range(1..=class_count) as f64);
    }
    let data = Dataset::new(Mat::from_vec(n, p, feats), labels, Some(class_count))?;

    let gamma = 1.0;
    let picks = rand::seq::index::sample(&mut rng, n, k);
    let mut means = Vec::with_capacity(k * p);
    for i in picks {
        means.extend_from_slice(data.features().row(i));
    }
    // Uniform weight rows imply sigma^2 = gamma p / 2 everywhere.
    let covariances = Mat::filled(k, p, gamma * p as f64 / 2.0);
    let mut experts = Mat::zeros(k, class_count);
    for j in 0..k {
        let raw: Vec<f64> = (0..class_count)
            .map(|_| rng.random_range(0.05..1.0))
            .collect();
        let sum: f64 = raw.iter().sum();
        for (m, v) in raw.iter().enumerate() {
            experts.set(j, m, v / sum);
        }
    }
    let params = GmeParams {
        mixing: SimplexVector::new_unchecked(vec![1.0 / k as f64; k]),
        means: Mat::from_vec(k, p, means),
        covariances,
        experts,
        gamma,
        lambda: 1.0,
        fix_uniform_mixing: true,
    };
    params.validate()?;
    Ok((data, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglik_with_single_component_is_a_plain_sum() {
        let (data, mut params) = gen_instance(8, 1, 2, 2, 3).unwrap();
        params.fix_uniform_mixing = true;
        let got = gme_loglik(&data, &params).unwrap();
        assert_eq!(got.degenerate_points, 0);
        let mut expected = penalty(&params);
        for i in 0..data.len() {
            expected += ln_gaussian_diag(
                data.features().row(i),
                params.means.row(0),
                params.covariances.row(0),
            ) + ln_expert(&params, 0, data.labels()[i]);
        }
        assert!((got.value - expected).abs() < 1e-10);
    }

    #[test]
    fn loglik_matches_term_by_term_summation() {
        let (data, params) = gen_instance(4, 2, 2, 2, 9).unwrap();
        let got = gme_loglik(&data, &params).unwrap().value;
        // Direct densities without the log-sum-exp shift.
        let mut expected = penalty(&params);
        for i in 0..data.len() {
            let mut total = 0.0;
            for j in 0..2 {
                let q = math::exp(ln_gaussian_diag(
                    data.features().row(i),
                    params.means.row(j),
                    params.covariances.row(j),
                ));
                let f = params.experts.get(j, data.labels()[i] as usize - 1);
                total += params.mixing.as_slice()[j] * q * f;
            }
            expected += math::ln(total);
        }
        assert!((got - expected).abs() < 1e-10);
    }

    #[test]
    fn symmetric_midpoint_has_even_posterior() {
        let mut params = gen_instance(4, 2, 1, 2, 1).unwrap().1;
        params.means = Mat::from_vec(2, 1, vec![-1.0, 1.0]);
        params.covariances = Mat::filled(2, 1, 0.5);
        params.experts = Mat::from_vec(2, 2, vec![0.5, 0.5, 0.5, 0.5]);
        let data = Dataset::new(Mat::from_vec(1, 1, vec![0.0]), vec![1.0], Some(2)).unwrap();
        let u = e_step(&data, &params).unwrap();
        assert!((u.as_mat().get(0, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn em_is_monotone_on_random_instances() {
        for seed in 0..50 {
            let (data, params) = gen_instance(20, 2, 2, 2, seed).unwrap();
            let (_, trace) = run_em(&data, &params, 4).unwrap();
            for w in trace.loglik.windows(2) {
                assert!(
                    w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs()),
                    "loglik fell {} -> {} (seed {seed})",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn em_fixed_point_is_stationary() {
        let (data, params) = gen_instance(12, 2, 2, 2, 17).unwrap();
        let mut current = params;
        for _ in 0..400 {
            let (next, _) = em_step(&data, &current).unwrap();
            let moved = param_gap(&next, &current);
            current = next;
            if moved < 1e-14 {
                break;
            }
        }
        let (next, _) = em_step(&data, &current).unwrap();
        assert!(param_gap(&next, &current) < 1e-12);
    }

    #[test]
    fn q_equals_negative_j_plus_posterior_entropy() {
        for seed in 0..10 {
            let (data, params) = gen_instance(10, 2, 2, 2, seed).unwrap();
            let (other, u) = em_step(&data, &params).unwrap();
            // Identity holds for any parameter point, not just the update.
            for target in [&params, &other] {
                let q = q_surrogate(&data, &u, target).unwrap();
                let j = j_function(&data, &u, target).unwrap();
                let ent: f64 = u
                    .as_mat()
                    .as_slice()
                    .iter()
                    .map(|&v| math::xlnx(v))
                    .sum();
                assert!((q - (-j + ent)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn crisp_and_uniform_membership_entropy_terms() {
        let (data, params) = gen_instance(6, 2, 2, 2, 4).unwrap();
        let n = data.len();
        let crisp = MembershipMatrix::try_from_mat(Mat::from_vec(
            n,
            2,
            (0..n).flat_map(|i| if i % 2 == 0 { [1.0, 0.0] } else { [0.0, 1.0] }).collect(),
        ))
        .unwrap();
        let uniform = MembershipMatrix::try_from_mat(Mat::filled(n, 2, 0.5)).unwrap();
        let entropy_of = |u: &MembershipMatrix| -> f64 {
            u.as_mat().as_slice().iter().map(|&v| math::xlnx(v)).sum()
        };
        assert_eq!(entropy_of(&crisp), 0.0);
        let expected = -(n as f64) * math::ln(2.0);
        assert!((entropy_of(&uniform) - expected).abs() < 1e-12);
        // Both are valid membership matrices for J.
        j_function(&data, &crisp, &params).unwrap();
        j_function(&data, &uniform, &params).unwrap();
    }

    #[test]
    fn weight_solver_satisfies_kkt_and_beats_grid() {
        let cases: [(&[f64], f64, f64); 4] = [
            (&[1.0, 2.0], 1.0, 0.5),
            (&[0.0, 5.0], 2.0, 1.0),
            (&[3.0, 3.0], 0.7, 2.0),
            (&[0.2, 4.0, 9.0], 1.3, 0.25),
        ];
        for (s, lambda, c) in cases {
            let w = penalized_weight_solve(s, lambda, c).unwrap();
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let objective = |w: &[f64]| -> f64 {
                w.iter()
                    .zip(s)
                    .map(|(&wl, &sl)| sl * wl + lambda * math::xlnx(wl) - c * math::ln(wl))
                    .sum()
            };
            let mine = objective(&w);
            // Dense scan over the simplex (2-D and 3-D cases).
            let steps = 2000;
            let mut best = f64::INFINITY;
            if s.len() == 2 {
                for i in 1..steps {
                    let t = i as f64 / steps as f64;
                    best = best.min(objective(&[t, 1.0 - t]));
                }
            } else {
                for i in 1..200 {
                    for j in 1..(200 - i) {
                        let a = i as f64 / 200.0;
                        let b = j as f64 / 200.0;
                        best = best.min(objective(&[a, b, 1.0 - a - b]));
                    }
                }
            }
            assert!(mine <= best + 1e-6, "solver {mine} vs grid {best}");
        }
    }

    #[test]
    fn certify_zero_iterations_reports_zero_gaps() {
        let (data, params) = gen_instance(10, 2, 2, 2, 2).unwrap();
        let report = certify_equivalence(&data, &params, 0).unwrap();
        assert_eq!(report.max_u_gap, 0.0);
        assert_eq!(report.max_param_gap, 0.0);
        assert_eq!(report.loglik_trace.len(), 1);
    }

    #[test]
    fn certify_small_instances_stay_tight() {
        for seed in 0..5 {
            let (data, params) = gen_instance(30, 2, 2, 2, seed).unwrap();
            let report = certify_equivalence(&data, &params, 10).unwrap();
            assert!(report.max_u_gap < 1e-8, "u gap {}", report.max_u_gap);
            assert!(
                report.max_param_gap < 1e-8,
                "param gap {}",
                report.max_param_gap
            );
            assert!(report.posterior_solver_gap < 1e-12);
            assert!(report.sfp_objective_gap < 1e-9);
            for w in report.loglik_trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs()));
            }
            for w in report.j_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0].abs()));
            }
        }
    }

    #[test]
    fn certify_rejects_non_uniform_mixing() {
        let (data, mut params) = gen_instance(10, 2, 2, 2, 2).unwrap();
        params.fix_uniform_mixing = false;
        assert!(certify_equivalence(&data, &params, 1).is_err());
    }
}
