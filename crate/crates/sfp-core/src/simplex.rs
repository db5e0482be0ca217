//! Closed-form minimizer of linear-plus-negative-entropy functions over the
//! probability simplex.
//!
//! This single kernel backs the membership update, the feature-weight update,
//! and out-of-sample membership estimation: minimizing
//! `Σ aᵢ θᵢ + γ Σ θᵢ ln θᵢ` over the simplex has the unique solution
//! `θᵢ ∝ exp(−aᵢ/γ)`. Costs may be `+∞`; those coordinates receive exactly
//! zero mass. The exponent is shifted by the smallest finite cost before
//! exponentiation so the computation cannot overflow for any finite input.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// A nonnegative vector summing to one (within 1e-12).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    /// Validates the simplex constraints: entries nonnegative, sum within
    /// 1e-12 of one.
    pub fn try_from_vec(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("simplex vector must be non-empty"));
        }
        if values.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::domain("simplex vector has a negative or NaN entry"));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::domain("simplex vector entries do not sum to one"));
        }
        Ok(SimplexVector(values))
    }

    /// Construction path for values produced by the solver itself, where the
    /// constraints hold by algebra.
    pub(crate) fn new_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|&v| v >= 0.0));
        debug_assert!((values.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        SimplexVector(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Minimizes `Σ aᵢ θᵢ + γ Σ θᵢ ln θᵢ` over the standard simplex.
///
/// Costs may be `+∞` (the coordinate gets exactly zero mass), but at least
/// one entry must be finite and `gamma` must be strictly positive.
pub fn solve_entropic_linear_min(costs: &[f64], gamma: f64) -> Result<SimplexVector> {
    let mut out = alloc::vec![0.0; costs.len()];
    solve_entropic_into(costs, gamma, &mut out)?;
    Ok(SimplexVector::new_unchecked(out))
}

/// Allocation-free form of [`solve_entropic_linear_min`] for hot loops.
pub(crate) fn solve_entropic_into(costs: &[f64], gamma: f64, out: &mut [f64]) -> Result<()> {
    debug_assert_eq!(costs.len(), out.len());
    if !(gamma > 0.0) {
        return Err(Error::domain("gamma must be strictly positive"));
    }
    if costs.is_empty() {
        return Err(Error::domain("cost vector must be non-empty"));
    }
    let mut min_finite = f64::INFINITY;
    let mut saw_nan = false;
    for &v in costs {
        saw_nan |= v.is_nan();
        if v < min_finite {
            min_finite = v;
        }
    }
    if saw_nan {
        return Err(Error::domain("cost vector contains NaN"));
    }
    if !min_finite.is_finite() {
        return Err(Error::domain("cost vector has no finite entry"));
    }

    let inv_gamma = 1.0 / gamma;
    let mut sum = 0.0;
    for (slot, &a) in out.iter_mut().zip(costs) {
        // An infinite cost gives exponent -inf and exp(-inf) = +0 exactly.
        let t = math::exp((min_finite - a) * inv_gamma);
        sum += t;
        *slot = t;
    }
    // sum >= 1 because the shifted minimum contributes exp(0) = 1.
    let inv_sum = 1.0 / sum;
    for t in out {
        *t *= inv_sum;
    }
    Ok(())
}

/// Shannon entropy `−Σ uᵢ ln uᵢ` with the convention `0 ln 0 = 0`.
pub fn entropy(u: &SimplexVector) -> f64 {
    -u.as_slice().iter().copied().map(math::xlnx).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{x} vs {y} (tol {tol})");
        }
    }

    #[test]
    fn constant_costs_give_uniform() {
        for c in [-3.5, 0.0, 42.0] {
            let s = solve_entropic_linear_min(&[c, c, c], 1.0).unwrap();
            assert_close(s.as_slice(), &[1.0 / 3.0; 3], 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_softmax_of_negated_costs() {
        // exp(-1), exp(-2), exp(-3) normalized.
        let s = solve_entropic_linear_min(&[1.0, 2.0, 3.0], 1.0).unwrap();
        assert_close(s.as_slice(), &[0.66524, 0.24473, 0.09003], 1e-5);
    }

    #[test]
    fn tiny_gamma_approaches_vertex() {
        let s = solve_entropic_linear_min(&[0.0, 1.0, 2.0], 1e-6).unwrap();
        assert!((s.as_slice()[0] - 1.0).abs() < 1e-9);
        assert!(s.as_slice()[1] < 1e-9);
        assert!(s.as_slice()[2] < 1e-9);
    }

    #[test]
    fn tiny_gamma_splits_mass_equally_over_tied_minima() {
        let a = [5.0, 1.0, 1.0, 9.0];
        let spread = 8.0;
        let s = solve_entropic_linear_min(&a, 1e-6 * spread).unwrap();
        let v = s.as_slice();
        assert!(v[1] + v[2] >= 1.0 - 1e-6);
        assert!((v[1] - v[2]).abs() < 1e-12);
    }

    #[test]
    fn huge_gamma_approaches_uniform() {
        let a = [3.0, -1.0, 0.5];
        let max_abs = 3.0;
        let s = solve_entropic_linear_min(&a, 1e3 * max_abs).unwrap();
        for &v in s.as_slice() {
            assert!((v - 1.0 / 3.0).abs() < 1e-3);
        }
    }

    #[test]
    fn infinite_cost_gets_exact_zero() {
        let s = solve_entropic_linear_min(&[0.0, f64::INFINITY], 0.7).unwrap();
        assert_eq!(s.as_slice()[1], 0.0);
        assert_eq!(s.as_slice()[0], 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(solve_entropic_linear_min(&[1.0], 0.0).is_err());
        assert!(solve_entropic_linear_min(&[1.0], -1.0).is_err());
        assert!(solve_entropic_linear_min(&[f64::INFINITY; 2], 1.0).is_err());
        assert!(solve_entropic_linear_min(&[], 1.0).is_err());
        assert!(solve_entropic_linear_min(&[f64::NAN, 0.0], 1.0).is_err());
    }

    #[test]
    fn extreme_costs_do_not_overflow() {
        let s = solve_entropic_linear_min(&[-1e8, 1e8], 1e-3).unwrap();
        assert!(s.as_slice().iter().all(|v| v.is_finite()));
        assert!((s.as_slice()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let half = SimplexVector::try_from_vec(alloc::vec![0.5, 0.5]).unwrap();
        assert!((entropy(&half) - core::f64::consts::LN_2).abs() < 1e-12);
        let crisp = SimplexVector::try_from_vec(alloc::vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(entropy(&crisp), 0.0);
        let v = SimplexVector::try_from_vec(alloc::vec![0.5, 0.25, 0.25]).unwrap();
        assert!((entropy(&v) - 1.039721).abs() < 1e-6);
    }

    #[test]
    fn simplex_vector_rejects_invalid() {
        assert!(SimplexVector::try_from_vec(alloc::vec![0.5, 0.6]).is_err());
        assert!(SimplexVector::try_from_vec(alloc::vec![-0.1, 1.1]).is_err());
        assert!(SimplexVector::try_from_vec(alloc::vec![]).is_err());
    }

    #[test]
    fn closed_form_matches_projected_gradient_oracle() {
        use crate::oracle;
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(101);
        for _ in 0..50 {
            let m = rng.random_range(2..=5);
            let costs: alloc::vec::Vec<f64> =
                (0..m).map(|_| rng.random_range(-10.0..10.0)).collect();
            let gamma = math::exp(rng.random_range(math::ln(0.01)..math::ln(100.0)));
            let mine = solve_entropic_linear_min(&costs, gamma).unwrap();
            let pgd = oracle::entropic_pgd(&costs, gamma, 20_000);
            for (a, b) in mine.as_slice().iter().zip(&pgd) {
                assert!((a - b).abs() < 1e-4, "{a} vs {b} (gamma {gamma}, costs {costs:?})");
            }
        }
    }

    #[test]
    fn closed_form_matches_dense_grid_for_small_m() {
        use crate::oracle;
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(102);
        for _ in 0..10 {
            let m = rng.random_range(2..=3);
            let costs: alloc::vec::Vec<f64> =
                (0..m).map(|_| rng.random_range(-3.0..3.0)).collect();
            let gamma = rng.random_range(0.5..5.0);
            let mine = solve_entropic_linear_min(&costs, gamma).unwrap();
            let grid = oracle::entropic_grid(&costs, gamma, 1e-3);
            for (a, b) in mine.as_slice().iter().zip(&grid) {
                assert!((a - b).abs() < 2e-3, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn solution_beats_random_perturbations() {
        use crate::oracle;
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(103);
        for _ in 0..5 {
            let m = rng.random_range(2..=5);
            let costs: alloc::vec::Vec<f64> =
                (0..m).map(|_| rng.random_range(-5.0..5.0)).collect();
            let gamma = rng.random_range(0.05..20.0);
            let mine = solve_entropic_linear_min(&costs, gamma).unwrap();
            let best = oracle::entropic_objective(&costs, gamma, mine.as_slice());
            for _ in 0..1000 {
                let raw: alloc::vec::Vec<f64> =
                    (0..m).map(|_| rng.random_range(1e-6..1.0)).collect();
                let sum: f64 = raw.iter().sum();
                let theta: alloc::vec::Vec<f64> = raw.iter().map(|v| v / sum).collect();
                let other = oracle::entropic_objective(&costs, gamma, &theta);
                assert!(best <= other + 1e-10, "{best} vs {other}");
            }
        }
    }

    proptest! {
        #[test]
        fn solution_satisfies_simplex_constraints(
            costs in proptest::collection::vec(-50.0f64..50.0, 1..8),
            gamma in 1e-3f64..1e3,
        ) {
            let s = solve_entropic_linear_min(&costs, gamma).unwrap();
            prop_assert!(s.as_slice().iter().all(|&v| v >= 0.0));
            let sum: f64 = s.as_slice().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn shift_invariance(
            costs in proptest::collection::vec(-20.0f64..20.0, 2..6),
            shift in -100.0f64..100.0,
            gamma in 1e-2f64..1e2,
        ) {
            let base = solve_entropic_linear_min(&costs, gamma).unwrap();
            let shifted: alloc::vec::Vec<f64> = costs.iter().map(|c| c + shift).collect();
            let moved = solve_entropic_linear_min(&shifted, gamma).unwrap();
            for (a, b) in base.as_slice().iter().zip(moved.as_slice()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}
