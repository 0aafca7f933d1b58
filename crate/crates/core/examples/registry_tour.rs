//! The algorithm registry: list contracts, register a custom algorithm and
//! sample through the uniform interface.

use std::collections::BTreeMap;
use std::sync::Arc;

use discokit::registry::{
    AlgorithmContract, AlgorithmRegistry, AlgorithmType, ApplicationIdentifier, Batch, InstantiateContext, ParamKind,
    ParamSpec, ParamValue, Params, RegistryError, SampleItem, Sampler,
};

/// Emits straight carbon chains of growing length.
struct Alkanes(usize);

impl Sampler for Alkanes {
    fn next_batch(&mut self, n: usize) -> Result<Batch, RegistryError> {
        let items = (0..n)
            .map(|_| {
                self.0 += 1;
                SampleItem::Smiles("C".repeat(self.0))
            })
            .collect();
        Ok(Batch::full(items))
    }
}

fn main() {
    let mut registry = AlgorithmRegistry::with_builtins();
    registry
        .register(AlgorithmContract::new(
            ApplicationIdentifier::new(AlgorithmType::Generation, "alkanes", "v1").unwrap(),
            "linear alkanes",
            vec![ParamSpec::optional("start", ParamKind::Int, Some(ParamValue::Int(0)), "")],
            Arc::new(|p: &Params, _: &InstantiateContext<'_>| {
                Ok(Box::new(Alkanes(p.int("start").unwrap() as usize)) as Box<dyn Sampler>)
            }),
        ))
        .unwrap();

    for c in registry.contracts() {
        println!("{:<45} {}", c.identifier.to_string(), c.description);
    }

    let run = |id: &str, params: &[(&str, &str)], n: usize| {
        let raw: BTreeMap<String, ParamValue> =
            params.iter().map(|(k, v)| (k.to_string(), ParamValue::Str(v.to_string()))).collect();
        let mut sampler = registry.instantiate(&id.parse().unwrap(), &raw, None)?;
        sampler.next_batch(n)
    };

    println!("\nalkanes: {:?}", run("generation/alkanes/v1", &[("start", "2")], 3).unwrap().smiles());
    let ga = run(
        "conditional_generation/seed_ga/v1",
        &[("seed_smiles", "c1ccccc1CC(=O)O"), ("generations", "5"), ("rng_seed", "3")],
        4,
    )
    .unwrap();
    println!("seed_ga: {:?}", ga.smiles());
    let window = run(
        "controlled_sampling/property_window/v1",
        &[
            ("base_algorithm", "conditional_generation/seed_ga/v1"),
            ("base_params", "seed_smiles=c1ccccc1CC(=O)O;generations=5"),
            ("target", "-1.5"),
            ("tolerance", "0.5"),
            ("rng_seed", "3"),
        ],
        3,
    )
    .unwrap();
    println!("esol in [-2, -1]: {:?}", window.smiles());
    match run("conditional_generation/seed_ga/v1", &[("population_size", "10")], 1) {
        Err(e) => println!("missing seed: {e}"),
        Ok(_) => unreachable!(),
    }
}
