//! Seeded synthetic dataset generators for the 2-D benchmark shapes and the
//! three-component subgroup mixture.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::math;
use crate::model::Dataset;
use crate::rng::rng_from_seed;
use crate::Mat;

const PI: f64 = core::f64::consts::PI;

/// The available generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Two interleaved Archimedean spiral arms (binary).
    Spiral,
    /// Two concentric noisy circles of radius 1 and 2 (binary).
    TwoCircle,
    /// Uniform square labeled by the sign of `x₁·x₂` (binary).
    Xor,
    /// Three-component Gaussian mixture with an axis-aligned subspace class
    /// and a two-subgroup class.
    Mixture3,
}

impl core::str::FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spiral" => Ok(SyntheticKind::Spiral),
            "two_circle" | "two-circle" => Ok(SyntheticKind::TwoCircle),
            "xor" => Ok(SyntheticKind::Xor),
            "mixture3" => Ok(SyntheticKind::Mixture3),
            other => Err(Error::domain(alloc::format!(
                "unknown synthetic kind '{other}' (expected spiral, two_circle, xor, mixture3)"
            ))),
        }
    }
}

/// Generates a 2-D labeled dataset of size `n` (at least 4), deterministic
/// in the seed.
pub fn gen_synthetic(kind: SyntheticKind, n: usize, seed: u64) -> Result<Dataset> {
    if n < 4 {
        return Err(Error::domain("synthetic datasets need n >= 4"));
    }
    let mut rng = rng_from_seed(seed);
    let mut feats = Vec::with_capacity(n * 2);
    let mut labels = Vec::with_capacity(n);
    let class_count;
    match kind {
        SyntheticKind::Spiral => {
            class_count = 2;
            let noise = Normal::new(0.0, 0.05).unwrap();
            let arm_sizes = [n / 2, n - n / 2];
            for (arm, &size) in arm_sizes.iter().enumerate() {
                let rot = arm as f64 * PI;
                for _ in 0..size {
                    let t: f64 = rng.random_range(0.5..3.0 * PI);
                    let r = t / (3.0 * PI) + noise.sample(&mut rng);
                    feats.push(r * math::cos(t + rot));
                    feats.push(r * math::sin(t + rot));
                    labels.push((arm + 1) as f64);
                }
            }
        }
        SyntheticKind::TwoCircle => {
            class_count = 2;
            let noise = Normal::new(0.0, 0.1).unwrap();
            let sizes = [n / 2, n - n / 2];
            for (class, &size) in sizes.iter().enumerate() {
                let radius = (class + 1) as f64;
                for _ in 0..size {
                    let phi: f64 = rng.random_range(0.0..2.0 * PI);
                    let r = radius + noise.sample(&mut rng);
                    feats.push(r * math::cos(phi));
                    feats.push(r * math::sin(phi));
                    labels.push((class + 1) as f64);
                }
            }
        }
        SyntheticKind::Xor => {
            class_count = 2;
            for _ in 0..n {
                // Resample points too close to the axes so the quadrant
                // pattern stays cleanly separable.
                let (x1, x2) = loop {
                    let a: f64 = rng.random_range(-1.0..1.0);
                    let b: f64 = rng.random_range(-1.0..1.0);
                    if (a * b).abs() >= 0.02 {
                        break (a, b);
                    }
                };
                feats.push(x1);
                feats.push(x2);
                labels.push(if x1 * x2 > 0.0 { 1.0 } else { 2.0 });
            }
        }
        SyntheticKind::Mixture3 => {
            class_count = 3;
            let unit = Normal::new(0.0, 1.0).unwrap();
            for _ in 0..n {
                let pick: f64 = rng.random_range(0.0..1.0);
                let (class, mean, stds): (usize, [f64; 2], [f64; 2]) = if pick < 0.25 {
                    (1, [0.0, 0.0], [math::sqrt(15.0), math::sqrt(0.05)])
                } else if pick < 0.5 {
                    (2, [-12.0, 0.0], [1.0, 1.0])
                } else if rng.random_range(0.0..1.0) < 2.0 / 3.0 {
                    (3, [0.0, 8.0], [2.0, 2.0])
                } else {
                    (3, [0.0, -4.0], [1.0, 1.0])
                };
                feats.push(mean[0] + stds[0] * unit.sample(&mut rng));
                feats.push(mean[1] + stds[1] * unit.sample(&mut rng));
                labels.push(class as f64);
            }
        }
    }
    Dataset::new(Mat::from_vec(n, 2, feats), labels, Some(class_count))
}

/// The true component means of the mixture3 generator, in generation order:
/// the subspace class, the offset class, and the two subgroups of class 3.
pub const MIXTURE3_COMPONENT_MEANS: [[f64; 2]; 4] =
    [[0.0, 0.0], [-12.0, 0.0], [0.0, 8.0], [0.0, -4.0]];
