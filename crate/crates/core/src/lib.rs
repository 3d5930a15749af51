//! Video saliency ensemble toolkit.
//!
//! Turns fixation logs into ground-truth density maps, runs a bank of
//! classical saliency predictors, selects a representative and diverse subset
//! of them, fuses spatial and temporal saliency adaptively, and scores the
//! result with AUC, shuffled AUC, NSS, SIM and CC.

pub mod config;
pub mod density;
pub mod error;
pub mod fusion;
pub mod io;
pub mod map;
pub mod metrics;
pub mod pipeline;
pub mod predictors;
pub mod selection;
pub mod synthetic;

pub use error::{Error, Result};
pub use map::{normalize_minmax, normalize_sum, resize, NormState, SaliencyMap};
