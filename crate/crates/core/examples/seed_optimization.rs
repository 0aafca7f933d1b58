//! Seed-constrained GA: improve ESOL while staying similar to the seed.
//!
//! cargo run --release --example seed_optimization -- "<seed SMILES>"

use discokit::algorithms::{ga_run, GaConfig};
use discokit::chem;
use discokit::properties::{esol, PropertyRegistry};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "CCCCc1ccc(cc1)C(=O)Nc1ccc(Cl)c(Cl)c1".to_string());
    let mut config = GaConfig::new(&seed);
    config.rng_seed = 42;
    let seed_esol = esol(&chem::parse_smiles(&seed).expect("seed parses")).unwrap();

    let result = ga_run(&config, &PropertyRegistry::with_builtins()).unwrap();
    println!("seed {seed}  esol {seed_esol:.3}");
    println!("best feasible esol per generation:");
    for (g, best) in result.best_feasible.iter().enumerate().step_by(5) {
        println!("  gen {g:>2}  {}", best.map(|v| format!("{v:.3}")).unwrap_or("-".into()));
    }
    println!("top 10 (feasible = Tanimoto >= {}):", config.similarity_threshold);
    for m in result.ranked.iter().take(10) {
        println!(
            "  {:.3}  {:+.3}  {}  {}",
            m.similarity_to_seed,
            m.objective_value - seed_esol,
            if m.feasible { "ok " } else { "   " },
            m.smiles
        );
    }
}
