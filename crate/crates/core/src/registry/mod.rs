//! The application registry: typed algorithm addresses, the uniform
//! inference contract, and sample streams.

mod contract;
mod ident;
mod params;

pub use contract::{
    AlgorithmContract, AlgorithmRegistry, Batch, Factory, InstantiateContext, ModelSource, RegistryError,
    SampleItem, Sampler, Validator, LATEST,
};
pub use ident::{compare_versions, latest_version, AlgorithmType, ApplicationIdentifier, IdentifierError};
pub use params::{params_from_toml, ParamError, ParamKind, ParamSpec, ParamValue, Params};
