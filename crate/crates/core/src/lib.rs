//! Box credal sets for probabilistic classifiers, built post hoc from logits.
//!
//! Given training logits and labels, a relative-likelihood budget `alpha`
//! bounds how far a global logit bias may shift the model while staying
//! plausible against the training evidence. The per-class extremes of those
//! shifts map test softmax outputs to probability intervals; the intervals
//! assemble into box credal sets, over which this crate computes entropy
//! extrema, epistemic/aleatoric decompositions, and evaluation metrics
//! (coverage, efficiency, AUROC), plus a synthetic task generator with an
//! analytically known ground truth.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable the default
//! `std` feature and enable `libm` instead.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("credal-core needs either the `std` or the `libm` feature");

extern crate alloc;

mod error;
mod math;

pub mod credal;
pub mod likelihood;
pub mod metrics;
pub mod rng;
pub mod synth;
pub mod types;
pub mod uncertainty;

pub use error::Error;
pub use types::{
    AlphaLevel, BoxCredalSet, DecalibrationModel, LabeledLogits, LogitMatrix, Mode,
    ProbabilityInterval, ProbabilityVector, ShiftEndpoints, UncertaintyReport,
};

/// Convenience alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;
