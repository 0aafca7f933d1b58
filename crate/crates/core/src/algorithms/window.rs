//! Controlled sampling: keep only items whose property lands in a window.

use std::sync::Arc;

use crate::chem;
use crate::properties::PropertyRegistry;
use crate::registry::{Batch, RegistryError, SampleItem, Sampler};

use super::ATTEMPTS_PER_ITEM;

pub struct WindowSampler {
    base: Box<dyn Sampler>,
    property: String,
    low: f64,
    high: f64,
    properties: Arc<PropertyRegistry>,
}

/// Wraps `base` so that it only yields molecules with `property` within
/// `target ± tolerance`. An infinite tolerance passes everything through.
pub fn property_window_sample(
    base: Box<dyn Sampler>,
    property: &str,
    target: f64,
    tolerance: f64,
    properties: Arc<PropertyRegistry>,
) -> Result<WindowSampler, RegistryError> {
    properties
        .resolve(property)
        .map_err(super::AlgorithmError::from)?;
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(crate::registry::ParamError::new("tolerance", "must be positive").into());
    }
    Ok(WindowSampler {
        base,
        property: property.to_string(),
        low: target - tolerance,
        high: target + tolerance,
        properties,
    })
}

impl WindowSampler {
    fn accepts(&self, item: &SampleItem) -> bool {
        if self.low == f64::NEG_INFINITY && self.high == f64::INFINITY {
            return true;
        }
        let SampleItem::Smiles(s) = item else {
            return false;
        };
        chem::parse_smiles(s)
            .ok()
            .and_then(|m| self.properties.evaluate(&self.property, &m).ok())
            .is_some_and(|v| v >= self.low && v <= self.high)
    }
}

impl Sampler for WindowSampler {
    fn next_batch(&mut self, n: usize) -> Result<Batch, RegistryError> {
        if n == 0 {
            return Err(RegistryError::InvalidBatchSize);
        }
        let budget = ATTEMPTS_PER_ITEM * n;
        let mut attempts = 0;
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            if attempts >= budget {
                return Err(RegistryError::GenerationStalled {
                    attempts,
                    produced: out.len(),
                });
            }
            let want = (n - out.len()).min(budget - attempts);
            let batch = self.base.next_batch(want)?;
            attempts += batch.items.len();
            for item in batch.items {
                if out.len() < n && self.accepts(&item) {
                    out.push(item);
                }
            }
            if batch.exhausted {
                return Ok(Batch {
                    items: out,
                    exhausted: true,
                });
            }
        }
        Ok(Batch::full(out))
    }
}
