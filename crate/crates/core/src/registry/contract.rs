use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

use super::ident::{latest_version, AlgorithmType, ApplicationIdentifier};
use super::params::{ParamError, ParamSpec, ParamValue, Params};
use crate::algorithms::AlgorithmError;
use crate::properties::{PropertyRecord, PropertyRegistry};
use crate::store::{list_remote_versions, ModelCache, RemoteBackend, StoreError};
use crate::training::TrainingError;

/// Version keyword resolved to the greatest `vN` tag available.
pub const LATEST: &str = "latest";

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown algorithm {0}")]
    UnknownIdentifier(String),
    #[error("algorithm {0} is already registered")]
    DuplicateIdentifier(String),
    #[error("invalid parameters: {0}")]
    ParameterValidation(#[from] ParamError),
    #[error("no model version found for {0}")]
    ModelVersionNotFound(String),
    #[error(transparent)]
    Store(StoreError),
    #[error("model could not be loaded: {0}")]
    Model(#[from] TrainingError),
    #[error("sample size must be at least 1")]
    InvalidBatchSize,
    #[error("generation stalled: {produced} items after {attempts} attempts")]
    GenerationStalled { attempts: usize, produced: usize },
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
}

impl From<StoreError> for RegistryError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::ModelVersionNotFound(id) => RegistryError::ModelVersionNotFound(id),
            other => RegistryError::Store(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleItem {
    Smiles(String),
    Record(PropertyRecord),
}

impl SampleItem {
    pub fn smiles(&self) -> &str {
        match self {
            SampleItem::Smiles(s) => s,
            SampleItem::Record(r) => &r.smiles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Batch {
    pub items: Vec<SampleItem>,
    /// Set when a finite-support algorithm has nothing left; the batch may
    /// then be shorter than requested.
    pub exhausted: bool,
}

impl Batch {
    pub fn full(items: Vec<SampleItem>) -> Self {
        Batch {
            items,
            exhausted: false,
        }
    }

    pub fn smiles(&self) -> Vec<&str> {
        self.items.iter().map(SampleItem::smiles).collect()
    }
}

/// A stateful sample stream. Successive batches continue the same random
/// stream, so a fixed seed gives one deterministic sequence however it is
/// split into batches of a given size.
pub trait Sampler: Send {
    fn next_batch(&mut self, n: usize) -> Result<Batch, RegistryError>;
}

/// Where model-backed algorithms find their files.
#[derive(Clone, Copy)]
pub struct ModelSource<'a> {
    pub cache: &'a ModelCache,
    pub remote: Option<&'a dyn RemoteBackend>,
}

/// Everything a factory may use to build its sampler.
pub struct InstantiateContext<'a> {
    pub registry: &'a AlgorithmRegistry,
    pub identifier: ApplicationIdentifier,
    pub models: Option<ModelSource<'a>>,
    /// Verified local model directory, for model-backed algorithms.
    pub model_dir: Option<PathBuf>,
}

pub type Factory =
    Arc<dyn Fn(&Params, &InstantiateContext<'_>) -> Result<Box<dyn Sampler>, RegistryError> + Send + Sync>;
pub type Validator = Arc<dyn Fn(&Params) -> Result<(), ParamError> + Send + Sync>;

/// Uniform inference contract of one algorithm.
#[derive(Clone)]
pub struct AlgorithmContract {
    pub identifier: ApplicationIdentifier,
    pub description: String,
    pub schema: Vec<ParamSpec>,
    /// Model-backed algorithms accept any version of their family; the
    /// version names the stored model to load.
    pub model_backed: bool,
    validator: Option<Validator>,
    factory: Factory,
}

impl AlgorithmContract {
    pub fn new(identifier: ApplicationIdentifier, description: &str, schema: Vec<ParamSpec>, factory: Factory) -> Self {
        AlgorithmContract {
            identifier,
            description: description.to_string(),
            schema,
            model_backed: false,
            validator: None,
            factory,
        }
    }

    pub fn model_backed(mut self) -> Self {
        self.model_backed = true;
        self
    }

    /// Extra checks (ranges, cross-field rules) run with the schema
    /// validation, before any model file is touched.
    pub fn with_validator(mut self, validator: Validator) -> Self {
        self.validator = Some(validator);
        self
    }

    pub fn validate(&self, raw: &BTreeMap<String, ParamValue>) -> Result<Params, ParamError> {
        let params = Params::validate(&self.schema, raw)?;
        if let Some(v) = &self.validator {
            v(&params)?;
        }
        Ok(params)
    }

    /// `name:kind` summaries of the schema, comma separated.
    pub fn schema_summary(&self) -> String {
        self.schema
            .iter()
            .map(ParamSpec::summary)
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl std::fmt::Debug for AlgorithmContract {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AlgorithmContract")
            .field("identifier", &self.identifier)
            .field("schema", &self.schema)
            .field("model_backed", &self.model_backed)
            .finish_non_exhaustive()
    }
}

/// The single lookup table from identifiers to contracts.
///
/// Populate it from one thread, then share it freely for lookups.
pub struct AlgorithmRegistry {
    contracts: BTreeMap<ApplicationIdentifier, AlgorithmContract>,
    properties: Arc<PropertyRegistry>,
}

impl AlgorithmRegistry {
    pub fn empty(properties: Arc<PropertyRegistry>) -> Self {
        AlgorithmRegistry {
            contracts: BTreeMap::new(),
            properties,
        }
    }

    /// The shipped algorithms over the built-in property predictors.
    pub fn with_builtins() -> Self {
        let mut r = AlgorithmRegistry::empty(Arc::new(PropertyRegistry::with_builtins()));
        for c in crate::algorithms::builtin_contracts() {
            r.register(c).expect("built-in identifiers are unique");
        }
        r
    }

    pub fn properties(&self) -> &Arc<PropertyRegistry> {
        &self.properties
    }

    pub fn register(&mut self, contract: AlgorithmContract) -> Result<(), RegistryError> {
        if self.contracts.contains_key(&contract.identifier) {
            return Err(RegistryError::DuplicateIdentifier(contract.identifier.to_string()));
        }
        self.contracts.insert(contract.identifier.clone(), contract);
        Ok(())
    }

    /// Identifiers sorted by (type, name, version), optionally of one type.
    pub fn list(&self, filter: Option<AlgorithmType>) -> Vec<&ApplicationIdentifier> {
        self.contracts
            .keys()
            .filter(|id| filter.is_none_or(|t| id.algorithm_type == t))
            .collect()
    }

    pub fn contracts(&self) -> impl Iterator<Item = &AlgorithmContract> {
        self.contracts.values()
    }

    /// Exact match, or the model-backed family of `id` for other versions
    /// (including `latest`).
    pub fn resolve(&self, id: &ApplicationIdentifier) -> Result<&AlgorithmContract, RegistryError> {
        if let Some(c) = self.contracts.get(id) {
            return Ok(c);
        }
        self.contracts
            .values()
            .find(|c| c.model_backed && c.identifier.algorithm_type == id.algorithm_type && c.identifier.name == id.name)
            .ok_or_else(|| RegistryError::UnknownIdentifier(id.to_string()))
    }

    /// Greatest `vN` version of `id`'s family across cache and remote.
    fn latest(&self, id: &ApplicationIdentifier, models: ModelSource<'_>) -> Result<ApplicationIdentifier, RegistryError> {
        let mut versions = models.cache.local_versions(id.algorithm_type, &id.name);
        if let Some(remote) = models.remote {
            let listing = list_remote_versions(remote, id.algorithm_type, &id.name)?;
            for w in &listing.warnings {
                log::warn!("{w}");
            }
            versions.extend(listing.versions);
        }
        let latest = latest_version(versions.iter().map(String::as_str))
            .ok_or_else(|| RegistryError::ModelVersionNotFound(id.to_string()))?;
        Ok(id.with_version(latest).expect("listed versions are valid"))
    }

    /// Validates `params`, resolves and verifies the model (if any) and
    /// builds a sampler.
    pub fn instantiate(
        &self,
        id: &ApplicationIdentifier,
        params: &BTreeMap<String, ParamValue>,
        models: Option<ModelSource<'_>>,
    ) -> Result<Box<dyn Sampler>, RegistryError> {
        let contract = self.resolve(id)?;
        let params = contract.validate(params)?;
        let mut identifier = id.clone();
        let mut model_dir = None;
        if contract.model_backed {
            let source = models.ok_or_else(|| RegistryError::ModelVersionNotFound(id.to_string()))?;
            if identifier.version == LATEST {
                identifier = self.latest(id, source)?;
            }
            model_dir = Some(source.cache.ensure_version(&identifier, source.remote)?);
        }
        let ctx = InstantiateContext {
            registry: self,
            identifier,
            models,
            model_dir,
        };
        (contract.factory)(&params, &ctx)
    }
}
