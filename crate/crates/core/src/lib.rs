//! Benchmarking unsupervised feature selection under multi-label evaluation.
//!
//! Selectors rank feature columns without seeing labels; the top-`d`
//! columns feed an ML-kNN classifier whose predictions are scored with
//! Hamming loss, ranking loss, one-error and multi-label (Jaccard)
//! accuracy. The [`harness`] repeats this over seeded hold-out splits,
//! aggregates mean ± std and average ranks, and can contrast multi-label
//! rankings with the single-label instantiations of the same data.

pub mod dataset;
pub mod harness;
pub mod metrics;
pub mod mlknn;
pub mod numerics;
pub mod rng;
pub mod selectors;
