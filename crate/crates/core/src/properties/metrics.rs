//! Sample-quality metrics for generated SMILES: validity, uniqueness and
//! novelty, all computed on canonical forms.

use std::collections::HashSet;

use thiserror::Error;

use crate::chem::{canonical_smiles, parse_smiles};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("empty sample batch")]
    EmptyBatch,
    #[error("no valid samples in batch")]
    NoValidSamples,
    #[error("empty training set")]
    EmptyTrainingSet,
}

fn canonical_valid<S: AsRef<str>>(samples: &[S]) -> Vec<String> {
    samples
        .iter()
        .filter_map(|s| parse_smiles(s.as_ref()).ok())
        .map(|m| canonical_smiles(&m))
        .collect()
}

/// Fraction of samples that parse.
pub fn metric_validity<S: AsRef<str>>(samples: &[S]) -> Result<f64, MetricError> {
    if samples.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    let valid = samples
        .iter()
        .filter(|s| parse_smiles(s.as_ref()).is_ok())
        .count();
    Ok(valid as f64 / samples.len() as f64)
}

/// Distinct canonical molecules over valid samples.
pub fn metric_uniqueness<S: AsRef<str>>(samples: &[S]) -> Result<f64, MetricError> {
    if samples.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    let valid = canonical_valid(samples);
    if valid.is_empty() {
        return Err(MetricError::NoValidSamples);
    }
    let distinct: HashSet<&String> = valid.iter().collect();
    Ok(distinct.len() as f64 / valid.len() as f64)
}

/// Fraction of distinct valid samples absent from the training set.
/// Unparseable training entries are ignored.
pub fn metric_novelty<S: AsRef<str>, T: AsRef<str>>(
    samples: &[S],
    training_set: &[T],
) -> Result<f64, MetricError> {
    if samples.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    if training_set.is_empty() {
        return Err(MetricError::EmptyTrainingSet);
    }
    let known: HashSet<String> = canonical_valid(training_set).into_iter().collect();
    let distinct: HashSet<String> = canonical_valid(samples).into_iter().collect();
    if distinct.is_empty() {
        return Err(MetricError::NoValidSamples);
    }
    let novel = distinct.iter().filter(|s| !known.contains(*s)).count();
    Ok(novel as f64 / distinct.len() as f64)
}
