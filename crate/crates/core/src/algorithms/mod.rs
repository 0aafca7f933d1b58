//! The shipped algorithms, one per algorithm type:
//!
//! | identifier | kind |
//! |---|---|
//! | `generation/ngram_clm/v*` | unconditional sampling from a trained n-gram model |
//! | `conditional_generation/seed_ga/v1` | seed-constrained genetic algorithm |
//! | `controlled_sampling/property_window/v1` | property-window filter over another generator |
//! | `prediction/property_predictor/v1` | property evaluation of given molecules |

mod ga;
mod mutate;
mod samplers;
mod window;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chem::{self, ChemError};
use crate::properties::{PropertyError, PropertyRecord, PropertyRegistry};
use crate::registry::{
    AlgorithmContract, AlgorithmType, ApplicationIdentifier, InstantiateContext, ParamError, ParamKind, ParamSpec,
    ParamValue, Params, Sampler,
};
use crate::training;

pub use ga::{ga_run, ga_run_with_rng, Direction, GaConfig, GaResult, ScoredMolecule};
pub use mutate::mutate_molecule;
pub use samplers::{GaSampler, NgramSampler, PredictorSampler};
pub use window::{property_window_sample, WindowSampler};

/// Retry budget of every sampler: this many attempts per requested item.
pub const ATTEMPTS_PER_ITEM: usize = 100;

pub const DEFAULT_MAX_LENGTH: i64 = 120;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgorithmError {
    #[error("no valid mutation found in {attempts} attempts")]
    MutationStalled { attempts: usize },
    #[error("invalid configuration {key}: {reason}")]
    InvalidConfig { key: String, reason: String },
    #[error("seed does not parse: {0}")]
    ParseSeed(ChemError),
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Chem(#[from] ChemError),
}

/// Evaluates `property` over `inputs`; invalid inputs become error records.
pub fn predictor_algorithm<S: AsRef<str>>(
    property: &str,
    inputs: &[S],
    properties: &PropertyRegistry,
) -> Result<Vec<PropertyRecord>, AlgorithmError> {
    Ok(properties.evaluate_batch(property, inputs)?)
}

fn rng_from(params: &Params) -> ChaCha8Rng {
    match params.int("rng_seed") {
        Some(seed) => ChaCha8Rng::seed_from_u64(seed as u64),
        None => ChaCha8Rng::from_os_rng(),
    }
}

fn rng_seed_spec() -> ParamSpec {
    ParamSpec::optional("rng_seed", ParamKind::Int, None, "random seed; entropy when absent")
}

fn id(t: AlgorithmType, name: &str, version: &str) -> ApplicationIdentifier {
    ApplicationIdentifier::new(t, name, version).expect("static identifiers are valid")
}

fn positive(p: &Params, key: &str) -> Result<(), ParamError> {
    match p.int(key) {
        Some(v) if v < 1 => Err(ParamError::new(key, "must be at least 1")),
        _ => Ok(()),
    }
}

fn fraction(p: &Params, key: &str) -> Result<(), ParamError> {
    match p.real(key) {
        Some(v) if !(0.0..=1.0).contains(&v) => Err(ParamError::new(key, "must be in [0, 1]")),
        _ => Ok(()),
    }
}

fn ngram_contract() -> AlgorithmContract {
    AlgorithmContract::new(
        id(AlgorithmType::Generation, training::NGRAM_TRAINER, "v1"),
        "unconditional samples from a trained character n-gram model; any stored version or `latest`",
        vec![
            rng_seed_spec(),
            ParamSpec::optional(
                "max_length",
                ParamKind::Int,
                Some(ParamValue::Int(DEFAULT_MAX_LENGTH)),
                "maximum characters per sample",
            ),
        ],
        Arc::new(|p: &Params, ctx: &InstantiateContext<'_>| {
            let dir = ctx.model_dir.as_deref().expect("model-backed");
            let model = training::load_ngram(dir)?;
            let max_length = p.int("max_length").expect("defaulted") as usize;
            Ok(Box::new(NgramSampler::new(model, rng_from(p), max_length)) as Box<dyn Sampler>)
        }),
    )
    .model_backed()
    .with_validator(Arc::new(|p: &Params| positive(p, "max_length")))
}

fn ga_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::required("seed_smiles", ParamKind::String, "molecule to explore around"),
        ParamSpec::optional("population_size", ParamKind::Int, Some(ParamValue::Int(100)), ""),
        ParamSpec::optional("generations", ParamKind::Int, Some(ParamValue::Int(30)), ""),
        ParamSpec::optional(
            "similarity_threshold",
            ParamKind::Real,
            Some(ParamValue::Real(0.5)),
            "minimum Tanimoto to the seed",
        ),
        ParamSpec::optional("objective", ParamKind::String, Some(ParamValue::Str("esol".into())), "property name"),
        ParamSpec::optional(
            "direction",
            ParamKind::String,
            Some(ParamValue::Str("maximize".into())),
            "maximize or minimize",
        ),
        ParamSpec::optional("mutation_rate", ParamKind::Real, Some(ParamValue::Real(0.3)), ""),
        ParamSpec::optional("tournament_size", ParamKind::Int, Some(ParamValue::Int(4)), ""),
        rng_seed_spec(),
    ]
}

/// Builds a GA configuration from validated parameters.
pub fn ga_config_from_params(p: &Params) -> Result<GaConfig, ParamError> {
    let direction = p
        .str("direction")
        .expect("defaulted")
        .parse()
        .map_err(|e: String| ParamError::new("direction", e))?;
    let non_negative = |key: &str| {
        let v = p.int(key).expect("defaulted");
        usize::try_from(v).map_err(|_| ParamError::new(key, "must not be negative"))
    };
    let config = GaConfig {
        seed_smiles: p.str("seed_smiles").expect("required").to_string(),
        population_size: non_negative("population_size")?,
        generations: non_negative("generations")?,
        similarity_threshold: p.real("similarity_threshold").expect("defaulted"),
        objective: p.str("objective").expect("defaulted").to_string(),
        direction,
        mutation_rate: p.real("mutation_rate").expect("defaulted"),
        tournament_size: non_negative("tournament_size")?,
        rng_seed: p.int("rng_seed").unwrap_or(0) as u64,
    };
    if let Err(e) = chem::parse_smiles(&config.seed_smiles) {
        return Err(ParamError::new("seed_smiles", e.to_string()));
    }
    Ok(config)
}

fn ga_contract() -> AlgorithmContract {
    AlgorithmContract::new(
        id(AlgorithmType::ConditionalGeneration, "seed_ga", "v1"),
        "mutation-only genetic algorithm around a seed, feasible means Tanimoto >= threshold",
        ga_schema(),
        Arc::new(|p: &Params, ctx: &InstantiateContext<'_>| {
            let config = ga_config_from_params(p)?;
            ctx.registry
                .properties()
                .resolve(&config.objective)
                .map_err(AlgorithmError::from)?;
            Ok(Box::new(GaSampler::new(config, ctx.registry.properties().clone(), rng_from(p))) as Box<dyn Sampler>)
        }),
    )
    .with_validator(Arc::new(|p: &Params| {
        positive(p, "population_size")?;
        positive(p, "tournament_size")?;
        fraction(p, "similarity_threshold")?;
        fraction(p, "mutation_rate")?;
        ga_config_from_params(p).map(|_| ())
    }))
}

/// Parses `k=v;k=v` into raw parameters.
fn parse_nested(text: &str) -> Result<BTreeMap<String, ParamValue>, ParamError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| ParamError::new("base_params", format!("{pair:?} is not key=value")))?;
            Ok((k.trim().to_string(), ParamValue::Str(v.trim().to_string())))
        })
        .collect()
}

fn window_contract() -> AlgorithmContract {
    AlgorithmContract::new(
        id(AlgorithmType::ControlledSampling, "property_window", "v1"),
        "samples of another generator whose property lies in target +/- tolerance",
        vec![
            ParamSpec::optional(
                "base_algorithm",
                ParamKind::String,
                Some(ParamValue::Str("generation/ngram_clm/latest".into())),
                "generator to filter",
            ),
            ParamSpec::optional(
                "base_params",
                ParamKind::String,
                Some(ParamValue::Str(String::new())),
                "parameters of the base, k=v;k=v",
            ),
            ParamSpec::optional("property", ParamKind::String, Some(ParamValue::Str("esol".into())), ""),
            ParamSpec::required("target", ParamKind::Real, "window center"),
            ParamSpec::required("tolerance", ParamKind::Real, "window half-width, > 0, may be inf"),
            rng_seed_spec(),
        ],
        Arc::new(|p: &Params, ctx: &InstantiateContext<'_>| {
            let base_id: ApplicationIdentifier = p.str("base_algorithm").expect("defaulted").parse().expect("validated");
            let mut base_params = parse_nested(p.str("base_params").expect("defaulted"))?;
            if let Some(seed) = p.int("rng_seed") {
                base_params
                    .entry("rng_seed".to_string())
                    .or_insert(ParamValue::Int(seed));
            }
            let base = ctx.registry.instantiate(&base_id, &base_params, ctx.models)?;
            let sampler = property_window_sample(
                base,
                p.str("property").expect("defaulted"),
                p.real("target").expect("required"),
                p.real("tolerance").expect("required"),
                ctx.registry.properties().clone(),
            )?;
            Ok(Box::new(sampler) as Box<dyn Sampler>)
        }),
    )
    .with_validator(Arc::new(|p: &Params| {
        match p.real("tolerance") {
            Some(t) if t.is_nan() || t <= 0.0 => return Err(ParamError::new("tolerance", "must be positive")),
            _ => {}
        }
        let base = p.str("base_algorithm").expect("defaulted");
        match base.parse::<ApplicationIdentifier>() {
            Ok(b) if matches!(b.algorithm_type, AlgorithmType::Generation | AlgorithmType::ConditionalGeneration) => {}
            Ok(_) => return Err(ParamError::new("base_algorithm", "must be a generation algorithm")),
            Err(e) => return Err(ParamError::new("base_algorithm", e.to_string())),
        }
        parse_nested(p.str("base_params").expect("defaulted")).map(|_| ())
    }))
}

/// Splits the predictor's `inputs` parameter on `;`.
pub fn split_inputs(text: &str) -> Vec<String> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn predictor_contract() -> AlgorithmContract {
    AlgorithmContract::new(
        id(AlgorithmType::Prediction, "property_predictor", "v1"),
        "evaluates a registered property over the given molecules",
        vec![
            ParamSpec::optional("property", ParamKind::String, Some(ParamValue::Str("esol".into())), ""),
            ParamSpec::required("inputs", ParamKind::String, "SMILES separated by ;"),
        ],
        Arc::new(|p: &Params, ctx: &InstantiateContext<'_>| {
            let property = p.str("property").expect("defaulted");
            ctx.registry
                .properties()
                .resolve(property)
                .map_err(AlgorithmError::from)?;
            let inputs = split_inputs(p.str("inputs").expect("required"));
            Ok(Box::new(PredictorSampler::new(property, inputs, ctx.registry.properties().clone())) as Box<dyn Sampler>)
        }),
    )
}

/// Contracts registered by [`AlgorithmRegistry::with_builtins`](crate::registry::AlgorithmRegistry::with_builtins).
pub fn builtin_contracts() -> Vec<AlgorithmContract> {
    vec![ngram_contract(), ga_contract(), window_contract(), predictor_contract()]
}
