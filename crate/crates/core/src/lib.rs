//! Raman-spectrum polymer classification for microplastics.
//!
//! The pipeline maps each raw spectrum onto an integer wavenumber grid,
//! takes its rate of change, smooths it with equal-width bin means, and feeds
//! the result to a random forest. Small classes in the training set can be
//! grown with ratio-perturbation augmentation. [`eval`] drives the named
//! experiments (preprocessing ablation, bin-width and noise sweeps, the final
//! model, and the model comparison) under explicit seeds.

pub mod augment;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod models;
pub mod persist;
pub mod preprocess;
pub mod seed;
pub mod synthetic;

pub use error::{Error, Result};
