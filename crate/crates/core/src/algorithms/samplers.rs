//! Sample streams of the shipped generators and the predictor.

use std::collections::VecDeque;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::chem;
use crate::properties::PropertyRegistry;
use crate::registry::{Batch, RegistryError, SampleItem, Sampler};
use crate::training::NgramModel;

use super::ga::{ga_run_with_rng, GaConfig};
use super::ATTEMPTS_PER_ITEM;

/// Draws strings from an n-gram model, keeping only valid SMILES.
pub struct NgramSampler {
    model: NgramModel,
    rng: ChaCha8Rng,
    max_length: usize,
}

impl NgramSampler {
    pub fn new(model: NgramModel, rng: ChaCha8Rng, max_length: usize) -> Self {
        NgramSampler { model, rng, max_length }
    }
}

impl Sampler for NgramSampler {
    fn next_batch(&mut self, n: usize) -> Result<Batch, RegistryError> {
        if n == 0 {
            return Err(RegistryError::InvalidBatchSize);
        }
        let budget = ATTEMPTS_PER_ITEM * n;
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0;
        while out.len() < n {
            if attempts >= budget {
                return Err(RegistryError::GenerationStalled {
                    attempts,
                    produced: out.len(),
                });
            }
            attempts += 1;
            let s = self.model.sample(&mut self.rng, self.max_length);
            if !s.is_empty() && chem::parse_smiles(&s).is_ok() {
                out.push(SampleItem::Smiles(s));
            }
        }
        Ok(Batch::full(out))
    }
}

/// Streams the feasible molecules of successive GA runs, each run's
/// distinct results fittest first. Runs continue the sampler's random
/// stream, so later runs explore different paths; molecules can recur
/// across runs.
pub struct GaSampler {
    config: GaConfig,
    properties: Arc<PropertyRegistry>,
    rng: ChaCha8Rng,
    pending: VecDeque<String>,
}

impl GaSampler {
    pub fn new(config: GaConfig, properties: Arc<PropertyRegistry>, rng: ChaCha8Rng) -> Self {
        GaSampler {
            config,
            properties,
            rng,
            pending: VecDeque::new(),
        }
    }
}

impl Sampler for GaSampler {
    fn next_batch(&mut self, n: usize) -> Result<Batch, RegistryError> {
        if n == 0 {
            return Err(RegistryError::InvalidBatchSize);
        }
        let budget = ATTEMPTS_PER_ITEM * n;
        let mut attempts = 0;
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            if let Some(s) = self.pending.pop_front() {
                out.push(SampleItem::Smiles(s));
                continue;
            }
            if attempts >= budget {
                return Err(RegistryError::GenerationStalled {
                    attempts,
                    produced: out.len(),
                });
            }
            let result = ga_run_with_rng(&self.config, &self.properties, &mut self.rng)?;
            // every individual of a run counts, including repeats
            attempts += self.config.population_size;
            for m in result.ranked {
                if m.feasible {
                    self.pending.push_back(m.smiles);
                }
            }
        }
        Ok(Batch::full(out))
    }
}

/// Evaluates a fixed list of inputs, a few per batch.
pub struct PredictorSampler {
    property: String,
    inputs: VecDeque<String>,
    index: usize,
    properties: Arc<PropertyRegistry>,
}

impl PredictorSampler {
    pub fn new(property: &str, inputs: Vec<String>, properties: Arc<PropertyRegistry>) -> Self {
        PredictorSampler {
            property: property.to_string(),
            inputs: inputs.into(),
            index: 0,
            properties,
        }
    }
}

impl Sampler for PredictorSampler {
    fn next_batch(&mut self, n: usize) -> Result<Batch, RegistryError> {
        if n == 0 {
            return Err(RegistryError::InvalidBatchSize);
        }
        let take = n.min(self.inputs.len());
        let chunk: Vec<String> = self.inputs.drain(..take).collect();
        let mut records = super::predictor_algorithm(&self.property, &chunk, &self.properties)?;
        // keep entry numbers global across batches
        for (k, r) in records.iter_mut().enumerate() {
            if let Some(e) = r.error.as_mut() {
                if let Some(rest) = e.strip_prefix(&format!("entry {k}:")) {
                    *e = format!("entry {}:{rest}", self.index + k);
                }
            }
        }
        self.index += take;
        Ok(Batch {
            items: records.into_iter().map(SampleItem::Record).collect(),
            exhausted: self.inputs.is_empty(),
        })
    }
}
