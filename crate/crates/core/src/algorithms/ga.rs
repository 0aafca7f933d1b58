//! Seed-constrained genetic algorithm: mutation-only search around a seed
//! molecule with feasibility-first lexicographic fitness.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::chem::{self, Fingerprint, Molecule};
use crate::properties::PropertyRegistry;

use super::mutate::mutate_molecule;
use super::AlgorithmError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Maximize => "maximize",
            Direction::Minimize => "minimize",
        }
    }

    /// Orders objective values so that `Greater` means better.
    fn compare(self, a: f64, b: f64) -> Ordering {
        match self {
            Direction::Maximize => a.total_cmp(&b),
            Direction::Minimize => b.total_cmp(&a),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "maximize" => Ok(Direction::Maximize),
            "minimize" => Ok(Direction::Minimize),
            _ => Err(format!("expected maximize or minimize, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub seed_smiles: String,
    pub population_size: usize,
    pub generations: usize,
    /// Minimum Tanimoto similarity to the seed for a molecule to be feasible.
    pub similarity_threshold: f64,
    pub objective: String,
    pub direction: Direction,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub rng_seed: u64,
}

impl GaConfig {
    pub fn new(seed_smiles: &str) -> Self {
        GaConfig {
            seed_smiles: seed_smiles.to_string(),
            population_size: 100,
            generations: 30,
            similarity_threshold: 0.5,
            objective: "esol".to_string(),
            direction: Direction::Maximize,
            mutation_rate: 0.3,
            tournament_size: 4,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), AlgorithmError> {
        let bad = |key: &str, reason: &str| {
            Err(AlgorithmError::InvalidConfig {
                key: key.to_string(),
                reason: reason.to_string(),
            })
        };
        if !(0.0..=1.0).contains(&self.similarity_threshold) {
            return bad("similarity_threshold", "must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("mutation_rate", "must be in [0, 1]");
        }
        if self.population_size == 0 {
            return bad("population_size", "must be positive");
        }
        if self.tournament_size == 0 {
            return bad("tournament_size", "must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredMolecule {
    /// Canonical SMILES.
    pub smiles: String,
    pub similarity_to_seed: f64,
    pub objective_value: f64,
    pub feasible: bool,
}

impl ScoredMolecule {
    /// Lexicographic fitness: feasibility, then objective in `direction`,
    /// then similarity. `Greater` means fitter.
    pub fn fitness_cmp(&self, other: &Self, direction: Direction) -> Ordering {
        self.feasible
            .cmp(&other.feasible)
            .then_with(|| direction.compare(self.objective_value, other.objective_value))
            .then_with(|| self.similarity_to_seed.total_cmp(&other.similarity_to_seed))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    /// Final population, deduplicated by canonical SMILES, fittest first.
    pub ranked: Vec<ScoredMolecule>,
    /// Best feasible objective after each generation; index 0 is the
    /// initial population.
    pub best_feasible: Vec<Option<f64>>,
}

#[derive(Clone)]
struct Individual {
    mol: Molecule,
    score: ScoredMolecule,
}

/// Scores molecules against the seed, memoized by canonical SMILES.
struct Scorer<'a> {
    seed_fp: Fingerprint,
    threshold: f64,
    objective: &'a str,
    properties: &'a PropertyRegistry,
    memo: HashMap<String, Option<ScoredMolecule>>,
}

impl Scorer<'_> {
    fn score(&mut self, mol: &Molecule) -> Result<Option<ScoredMolecule>, AlgorithmError> {
        let smiles = chem::canonical_smiles(mol);
        if let Some(hit) = self.memo.get(&smiles) {
            return Ok(hit.clone());
        }
        // score the canonical form so values recompute exactly from the SMILES
        let mol = &chem::parse_smiles(&smiles)?;
        let similarity = chem::tanimoto(&self.seed_fp, &chem::default_fingerprint(mol))?;
        let scored = match self.properties.evaluate(self.objective, mol) {
            Ok(value) if value.is_finite() => Some(ScoredMolecule {
                smiles: smiles.clone(),
                similarity_to_seed: similarity,
                objective_value: value,
                feasible: similarity >= self.threshold,
            }),
            Ok(_) | Err(crate::properties::PropertyError::Chem(_)) => None,
            Err(e) => return Err(e.into()),
        };
        self.memo.insert(smiles, scored.clone());
        Ok(scored)
    }
}

fn best_feasible(pop: &[Individual], direction: Direction) -> Option<f64> {
    pop.iter()
        .filter(|i| i.score.feasible)
        .map(|i| i.score.objective_value)
        .max_by(|a, b| direction.compare(*a, *b))
}

fn tournament<'p, R: Rng + ?Sized>(
    pop: &'p [Individual],
    size: usize,
    direction: Direction,
    rng: &mut R,
) -> &'p Individual {
    let mut best = &pop[rng.random_range(0..pop.len())];
    for _ in 1..size {
        let challenger = &pop[rng.random_range(0..pop.len())];
        if challenger.score.fitness_cmp(&best.score, direction) == Ordering::Greater {
            best = challenger;
        }
    }
    best
}

/// Runs the GA with a fresh generator seeded from `config.rng_seed`.
pub fn ga_run(config: &GaConfig, properties: &PropertyRegistry) -> Result<GaResult, AlgorithmError> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.rng_seed);
    ga_run_with_rng(config, properties, &mut rng)
}

/// Runs the GA drawing from `rng`; `config.rng_seed` is ignored.
pub fn ga_run_with_rng<R: Rng + ?Sized>(
    config: &GaConfig,
    properties: &PropertyRegistry,
    rng: &mut R,
) -> Result<GaResult, AlgorithmError> {
    config.validate()?;
    properties.resolve(&config.objective)?;
    let seed = chem::parse_smiles(&config.seed_smiles).map_err(AlgorithmError::ParseSeed)?;
    let mut scorer = Scorer {
        seed_fp: chem::default_fingerprint(&seed),
        threshold: config.similarity_threshold,
        objective: &config.objective,
        properties,
        memo: HashMap::new(),
    };
    let seed_score = match scorer.score(&seed)? {
        Some(s) => s,
        None => {
            // surface the evaluator's own error for the seed
            properties.evaluate(&config.objective, &seed)?;
            return Err(AlgorithmError::InvalidConfig {
                key: "objective".into(),
                reason: "objective is not finite for the seed".into(),
            });
        }
    };
    let direction = config.direction;
    let seed_ind = Individual {
        mol: seed,
        score: seed_score,
    };
    let mut population = vec![seed_ind; config.population_size];
    let mut history = vec![best_feasible(&population, direction)];

    for _ in 0..config.generations {
        let mut next = Vec::with_capacity(config.population_size);
        if let Some(elite) = population
            .iter()
            .filter(|i| i.score.feasible)
            .max_by(|a, b| a.score.fitness_cmp(&b.score, direction))
        {
            next.push(elite.clone());
        }
        while next.len() < config.population_size {
            let parent = tournament(&population, config.tournament_size, direction, rng);
            let child = if rng.random::<f64>() < config.mutation_rate {
                let mol = mutate_molecule(&parent.mol, rng)?;
                match scorer.score(&mol)? {
                    Some(score) => Individual { mol, score },
                    None => parent.clone(),
                }
            } else {
                parent.clone()
            };
            next.push(child);
        }
        population = next;
        history.push(best_feasible(&population, direction));
    }

    let mut seen = HashSet::new();
    let mut ranked: Vec<ScoredMolecule> = population
        .into_iter()
        .filter(|i| seen.insert(i.score.smiles.clone()))
        .map(|i| i.score)
        .collect();
    ranked.sort_by(|a, b| b.fitness_cmp(a, direction));
    Ok(GaResult {
        ranked,
        best_feasible: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn props() -> PropertyRegistry {
        PropertyRegistry::with_builtins()
    }

    #[test]
    fn pinned_ethanol_run() {
        let mut c = GaConfig::new("CCO");
        c.generations = 10;
        c.rng_seed = 42;
        let r = ga_run(&c, &props()).unwrap();
        let top = &r.ranked[0];
        assert_eq!(top.smiles, "OCCO");
        assert!(top.feasible);
        // 5 shared bits out of 8
        assert_eq!(top.similarity_to_seed, 0.625);
        assert!((top.objective_value - 0.4894484).abs() < 1e-9);
        let mol = chem::parse_smiles("OCCO").unwrap();
        assert_eq!(top.objective_value, crate::properties::esol(&mol).unwrap());
    }

    #[test]
    fn zero_generations_returns_the_seed() {
        let mut c = GaConfig::new("OCC");
        c.generations = 0;
        let r = ga_run(&c, &props()).unwrap();
        assert_eq!(r.ranked.len(), 1);
        assert_eq!(r.ranked[0].smiles, chem::canonical_smiles(&chem::parse_smiles("CCO").unwrap()));
        assert_eq!(r.ranked[0].similarity_to_seed, 1.0);
        assert!(r.ranked[0].feasible);
    }

    #[test]
    fn zero_threshold_makes_everything_feasible() {
        let mut c = GaConfig::new("CCCCO");
        c.similarity_threshold = 0.0;
        c.generations = 5;
        c.population_size = 30;
        let r = ga_run(&c, &props()).unwrap();
        assert!(r.ranked.iter().all(|m| m.feasible));
    }

    #[test]
    fn elitism_keeps_best_feasible_monotone() {
        for direction in [Direction::Maximize, Direction::Minimize] {
            let mut c = GaConfig::new("CC(C)Cc1ccc(cc1)C(C)C(=O)O");
            c.generations = 15;
            c.population_size = 40;
            c.direction = direction;
            c.rng_seed = 3;
            let r = ga_run(&c, &props()).unwrap();
            assert_eq!(r.best_feasible.len(), 16);
            for w in r.best_feasible.windows(2) {
                let (a, b) = (w[0].unwrap(), w[1].unwrap());
                assert_ne!(direction.compare(b, a), Ordering::Less, "{direction}: {a} -> {b}");
            }
        }
    }

    #[test]
    fn output_is_ranked_deduplicated_and_rescored() {
        let mut c = GaConfig::new("CCOc1ccccc1");
        c.generations = 10;
        c.population_size = 30;
        c.rng_seed = 42;
        let r = ga_run(&c, &props()).unwrap();
        let seed_fp = chem::default_fingerprint(&chem::parse_smiles(&c.seed_smiles).unwrap());
        let mut seen = HashSet::new();
        for m in &r.ranked {
            assert!(seen.insert(m.smiles.clone()));
            let mol = chem::parse_smiles(&m.smiles).unwrap();
            let sim = chem::tanimoto(&seed_fp, &chem::default_fingerprint(&mol)).unwrap();
            assert_eq!(sim, m.similarity_to_seed);
            assert_eq!(m.feasible, sim >= 0.5);
            assert_eq!(props().evaluate("esol", &mol).unwrap(), m.objective_value);
        }
        for w in r.ranked.windows(2) {
            assert_ne!(w[0].fitness_cmp(&w[1], Direction::Maximize), Ordering::Less);
        }
    }

    #[test]
    fn deterministic_and_scale_invariant() {
        let mut c = GaConfig::new("CCCCCCO");
        c.generations = 8;
        c.population_size = 25;
        c.rng_seed = 9;
        let a = ga_run(&c, &props()).unwrap();
        assert_eq!(a, ga_run(&c, &props()).unwrap());

        let mut scaled = PropertyRegistry::empty();
        scaled
            .register(
                crate::properties::PropertyDescriptor::new("esol_x3", "", ""),
                std::sync::Arc::new(|m: &Molecule| Ok(3.0 * crate::properties::esol(m)?)),
            )
            .unwrap();
        let mut c3 = c.clone();
        c3.objective = "esol_x3".into();
        let b = ga_run(&c3, &scaled).unwrap();
        let order = |r: &GaResult| r.ranked.iter().map(|m| m.smiles.clone()).collect::<Vec<_>>();
        assert_eq!(order(&a), order(&b));
    }

    #[test]
    fn bad_configs_rejected() {
        let mut c = GaConfig::new("CCO");
        c.similarity_threshold = 1.5;
        assert!(matches!(ga_run(&c, &props()), Err(AlgorithmError::InvalidConfig { .. })));
        let c = GaConfig::new("C1CC");
        assert!(matches!(ga_run(&c, &props()), Err(AlgorithmError::ParseSeed(_))));
        let mut c = GaConfig::new("CCO");
        c.objective = "qed".into();
        assert!(matches!(ga_run(&c, &props()), Err(AlgorithmError::Property(_))));
    }
}
