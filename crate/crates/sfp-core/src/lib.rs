//! Supervised fuzzy partitioning (SFP).
//!
//! An entropy-regularized, feature-weighted, supervised variant of k-means.
//! Training minimizes, by block coordinate descent, an objective combining
//! per-cluster weighted within-cluster distances, a membership-weighted loss
//! penalty on the labels, and negative-entropy regularizers on both the
//! membership matrix and the per-cluster feature weights. Every block update
//! is available in closed form; the shared kernel is a closed-form minimizer
//! of linear-plus-negative-entropy functions over the probability simplex.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable the default
//! `std` feature for embedded or wasm targets. File formats, CSV ingestion,
//! and the command-line interface live in the companion `sfp` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod eval;
pub mod gme;
pub mod infer;
pub mod loss;
mod mat;
mod math;
pub mod model;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod rng;
pub mod simplex;
pub mod synth;
pub mod table;
pub mod train;

pub use error::{Error, Result};
pub use mat::Mat;
pub use model::{Dataset, Hyperparams, MembershipMatrix, ModelParams};
