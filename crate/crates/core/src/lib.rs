//! Toolkit for generative molecular discovery.
//!
//! - [`chem`]: SMILES engine, descriptors, fingerprints.
//! - [`properties`]: named property predictors and generation metrics.
//! - [`registry`]: typed algorithm registry and the sampling contract.
//! - [`store`]: versioned, hash-verified model cache with remote sync.
//! - [`training`]: training pipelines and the n-gram chemical language model.
//! - [`algorithms`]: the shipped generators and predictor.
//! - [`cli`]: the command-line workflow.

pub mod chem;
pub mod properties;
pub mod registry;
pub mod store;
pub mod training;
pub mod algorithms;
pub mod cli;
