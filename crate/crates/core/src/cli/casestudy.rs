//! Unconditional versus seed-constrained generation around one compound,
//! scored by similarity to the seed and estimated solubility.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::svg::{scatter_panels_svg, Axes, Panel};
use crate::algorithms::{GaConfig, GaSampler, NgramSampler, DEFAULT_MAX_LENGTH};
use crate::chem::{self, ChemError};
use crate::properties::{esol, PropertyRegistry};
use crate::registry::{ParamValue, RegistryError, Sampler};
use crate::training::{self, TrainingError, TrainingReport, TrainingTriplet, NGRAM_TRAINER};

pub const UNCONDITIONAL: &str = "ngram_clm";
pub const CONDITIONAL: &str = "seed_ga";

#[derive(Debug, Error)]
pub enum CaseStudyError {
    #[error("seed SMILES does not parse: {0}")]
    ParseSeed(ChemError),
    #[error(transparent)]
    Training(#[from] TrainingError),
    #[error(transparent)]
    Sampling(#[from] RegistryError),
    #[error("sample {smiles}: {source}")]
    Scoring { smiles: String, source: ChemError },
}

#[derive(Debug, Clone)]
pub struct CaseStudyConfig {
    pub seed_smiles: String,
    pub corpus: PathBuf,
    /// Samples per algorithm.
    pub samples: usize,
    pub rng_seed: u64,
    pub order: usize,
    /// Where the trained n-gram artifact is written.
    pub model_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudyRow {
    pub algorithm: &'static str,
    pub smiles: String,
    pub tanimoto: f64,
    pub esol: f64,
}

#[derive(Debug, Clone)]
pub struct CaseStudy {
    pub seed_smiles: String,
    pub seed_esol: f64,
    pub rows: Vec<CaseStudyRow>,
    pub training: TrainingReport,
}

/// Trains the n-gram model on the corpus, then draws `samples` molecules
/// from it and from the seed GA (threshold 0.5, ESOL maximized), both
/// seeded with `rng_seed`.
pub fn run_casestudy(config: &CaseStudyConfig) -> Result<CaseStudy, CaseStudyError> {
    let seed = chem::parse_smiles(&config.seed_smiles).map_err(CaseStudyError::ParseSeed)?;
    let seed_fp = chem::default_fingerprint(&seed);
    let seed_esol = esol(&seed).map_err(|source| CaseStudyError::Scoring {
        smiles: config.seed_smiles.clone(),
        source,
    })?;

    let triplet = TrainingTriplet {
        model: BTreeMap::from([("order".to_string(), ParamValue::Int(config.order as i64))]),
        training: BTreeMap::from([("rng_seed".to_string(), ParamValue::Int(config.rng_seed as i64))]),
        data: BTreeMap::from([(
            "corpus_path".to_string(),
            ParamValue::Str(config.corpus.display().to_string()),
        )]),
    };
    let report = training::run_training(NGRAM_TRAINER, &triplet, &config.model_dir)?;
    let model = training::load_ngram(&report.artifact_dir)?;

    let mut unconditional =
        NgramSampler::new(model, ChaCha8Rng::seed_from_u64(config.rng_seed), DEFAULT_MAX_LENGTH as usize);
    let mut ga = GaConfig::new(&config.seed_smiles);
    ga.similarity_threshold = 0.5;
    ga.objective = "esol".to_string();
    ga.rng_seed = config.rng_seed;
    let mut conditional = GaSampler::new(
        ga,
        Arc::new(PropertyRegistry::with_builtins()),
        ChaCha8Rng::seed_from_u64(config.rng_seed),
    );

    let mut rows = Vec::with_capacity(2 * config.samples);
    for (name, sampler) in [
        (UNCONDITIONAL, &mut unconditional as &mut dyn Sampler),
        (CONDITIONAL, &mut conditional as &mut dyn Sampler),
    ] {
        for smiles in sampler.next_batch(config.samples)?.smiles() {
            let scoring = |source| CaseStudyError::Scoring {
                smiles: smiles.to_string(),
                source,
            };
            let mol = chem::parse_smiles(smiles).map_err(scoring)?;
            let tanimoto = chem::tanimoto(&seed_fp, &chem::default_fingerprint(&mol)).map_err(scoring)?;
            rows.push(CaseStudyRow {
                algorithm: name,
                smiles: smiles.to_string(),
                tanimoto,
                esol: esol(&mol).map_err(scoring)?,
            });
        }
    }
    Ok(CaseStudy {
        seed_smiles: config.seed_smiles.clone(),
        seed_esol,
        rows,
        training: report,
    })
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

impl CaseStudy {
    pub fn rows_of<'a>(&'a self, algorithm: &'a str) -> impl Iterator<Item = &'a CaseStudyRow> + 'a {
        self.rows.iter().filter(move |r| r.algorithm == algorithm)
    }

    pub fn median_tanimoto(&self, algorithm: &str) -> Option<f64> {
        median(self.rows_of(algorithm).map(|r| r.tanimoto).collect())
    }

    /// `algorithm,smiles,tanimoto,esol`, six decimals, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["algorithm", "smiles", "tanimoto", "esol"])
            .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.algorithm,
                r.smiles.as_str(),
                &format!("{:.6}", r.tanimoto),
                &format!("{:.6}", r.esol),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii fields")
    }

    /// Two scatter panels (Tanimoto to seed vs ESOL) with guides at the
    /// similarity threshold and at the seed's ESOL.
    pub fn to_svg(&self) -> String {
        let points = |alg: &str| -> Vec<(f64, f64)> { self.rows_of(alg).map(|r| (r.tanimoto, r.esol)).collect() };
        let (u, c) = (points(UNCONDITIONAL), points(CONDITIONAL));
        scatter_panels_svg(
            &[
                Panel {
                    title: "unconditional (ngram_clm)",
                    points: &u,
                },
                Panel {
                    title: "conditional (seed_ga)",
                    points: &c,
                },
            ],
            &Axes {
                x_label: "Tanimoto similarity to seed",
                y_label: "ESOL log S (mol/L)",
                x_range: (0.0, 1.0),
                x_guide: Some(0.5),
                y_guide: Some(self.seed_esol),
            },
        )
    }
}
