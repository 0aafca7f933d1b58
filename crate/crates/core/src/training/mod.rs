//! Training pipelines configured by a triplet of model, training and data
//! parameters, and the shipped trainable model: a character n-gram
//! chemical language model.
//!
//! The seed-driven genetic algorithm is model-free and therefore has no
//! trainer.

mod ngram;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chem;
use crate::registry::{params_from_toml, ParamError, ParamKind, ParamSpec, ParamValue, Params};

pub use ngram::{NgramModel, Symbol, BEGIN, END, MODEL_FILE};

pub const NGRAM_TRAINER: &str = "ngram_clm";

#[derive(Debug, Error)]
pub enum TrainingError {
    #[error("unknown trainer {0:?}")]
    UnknownTrainer(String),
    #[error("invalid triplet entry {key}: {reason}")]
    TripletValidation { key: String, reason: String },
    #[error("corpus {0} contains no valid SMILES lines")]
    EmptyCorpus(String),
    #[error("validation set is empty")]
    EmptyValidationSet,
    #[error("invalid model file: {0}")]
    InvalidModel(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> TrainingError + '_ {
    move |source| TrainingError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn triplet_err(section: &str, e: ParamError) -> TrainingError {
    TrainingError::TripletValidation {
        key: format!("{section}.{}", e.key),
        reason: e.reason,
    }
}

fn invalid(key: &str, reason: &str) -> TrainingError {
    TrainingError::TripletValidation {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

/// Model hyper-parameters, training parameters and data parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingTriplet {
    pub model: BTreeMap<String, ParamValue>,
    pub training: BTreeMap<String, ParamValue>,
    pub data: BTreeMap<String, ParamValue>,
}

const SECTIONS: [&str; 3] = ["model", "training", "data"];

impl TrainingTriplet {
    /// Parses a TOML document with exactly the sections `[model]`,
    /// `[training]` and `[data]`. A relative `corpus_path` is resolved
    /// against `base_dir` when given.
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<TrainingTriplet, TrainingError> {
        let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| invalid("config", e.message()))?;
        if let Some(extra) = doc.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
            return Err(invalid(extra, "unknown section"));
        }
        let mut sections = Vec::new();
        for name in SECTIONS {
            let table = match doc.get(name) {
                Some(toml::Value::Table(t)) => t,
                Some(_) => return Err(invalid(name, "expected a table")),
                None => return Err(invalid(name, "missing section")),
            };
            sections.push(params_from_toml(table).map_err(|e| triplet_err(name, e))?);
        }
        let data = sections.pop().unwrap();
        let training = sections.pop().unwrap();
        let model = sections.pop().unwrap();
        let mut triplet = TrainingTriplet { model, training, data };
        if let (Some(base), Some(ParamValue::Str(p))) = (base_dir, triplet.data.get("corpus_path")) {
            let joined = base.join(p);
            triplet
                .data
                .insert("corpus_path".into(), ParamValue::Str(joined.display().to_string()));
        }
        Ok(triplet)
    }

    pub fn from_toml_file(path: &Path) -> Result<TrainingTriplet, TrainingError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        TrainingTriplet::from_toml_str(&text, path.parent())
    }

    /// TOML rendering, sections in fixed order.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        for (name, section) in SECTIONS.iter().zip([&self.model, &self.training, &self.data]) {
            out.push_str(&format!("[{name}]\n"));
            for (k, v) in section {
                let rendered = match v {
                    ParamValue::Str(s) => toml::Value::String(s.clone()).to_string(),
                    ParamValue::Real(x) => toml::Value::Float(*x).to_string(),
                    other => other.to_string(),
                };
                out.push_str(&format!("{k} = {rendered}\n"));
            }
        }
        out
    }
}

/// A trainer and the schema of each triplet section.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainerDescriptor {
    pub name: String,
    pub description: String,
    pub model_schema: Vec<ParamSpec>,
    pub training_schema: Vec<ParamSpec>,
    pub data_schema: Vec<ParamSpec>,
}

fn ngram_descriptor() -> TrainerDescriptor {
    TrainerDescriptor {
        name: NGRAM_TRAINER.to_string(),
        description: "character n-gram chemical language model (the seed GA is model-free and not trainable)"
            .to_string(),
        model_schema: vec![
            ParamSpec::required("order", ParamKind::Int, "context length, 1 to 5"),
            ParamSpec::optional(
                "laplace_alpha",
                ParamKind::Real,
                Some(ParamValue::Real(0.01)),
                "additive smoothing, > 0",
            ),
        ],
        training_schema: vec![
            ParamSpec::optional("rng_seed", ParamKind::Int, Some(ParamValue::Int(0)), "seed of the validation split"),
            ParamSpec::optional("max_corpus_lines", ParamKind::Int, None, "use at most this many valid lines"),
        ],
        data_schema: vec![
            ParamSpec::required("corpus_path", ParamKind::String, "one SMILES per line, # comments"),
            ParamSpec::optional(
                "validation_fraction",
                ParamKind::Real,
                Some(ParamValue::Real(0.1)),
                "held-out share, in [0, 1)",
            ),
        ],
    }
}

pub fn list_trainers() -> Vec<TrainerDescriptor> {
    vec![ngram_descriptor()]
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    pub trainer: String,
    pub triplet: TrainingTriplet,
    /// Valid corpus lines used (training plus validation).
    pub corpus_size: usize,
    pub training_lines: usize,
    pub validation_lines: usize,
    /// Lines rejected for containing a framing marker or not parsing.
    pub skipped_lines: usize,
    pub validation_perplexity: f64,
    pub artifact_dir: PathBuf,
}

impl TrainingReport {
    pub fn model_path(&self) -> PathBuf {
        self.artifact_dir.join(MODEL_FILE)
    }
}

/// Valid SMILES lines of a corpus file plus the number of rejected lines.
pub fn read_corpus(path: &Path) -> Result<(Vec<String>, usize), TrainingError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = Vec::new();
    let mut skipped = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.contains(BEGIN) || line.contains(END) {
            log::warn!("{}:{}: framing marker in corpus line, skipped", path.display(), i + 1);
            skipped += 1;
        } else if let Err(e) = chem::parse_smiles(line) {
            log::warn!("{}:{}: {e}, skipped", path.display(), i + 1);
            skipped += 1;
        } else {
            lines.push(line.to_string());
        }
    }
    Ok((lines, skipped))
}

/// Trains `trainer_name` and writes its artifact into `output_dir`.
pub fn run_training(
    trainer_name: &str,
    triplet: &TrainingTriplet,
    output_dir: &Path,
) -> Result<TrainingReport, TrainingError> {
    let descriptor = list_trainers()
        .into_iter()
        .find(|t| t.name == trainer_name)
        .ok_or_else(|| TrainingError::UnknownTrainer(trainer_name.to_string()))?;
    let model = Params::validate(&descriptor.model_schema, &triplet.model).map_err(|e| triplet_err("model", e))?;
    let training =
        Params::validate(&descriptor.training_schema, &triplet.training).map_err(|e| triplet_err("training", e))?;
    let data = Params::validate(&descriptor.data_schema, &triplet.data).map_err(|e| triplet_err("data", e))?;

    let order = model.int("order").expect("required");
    if !(1..=5).contains(&order) {
        return Err(invalid("model.order", "must be between 1 and 5"));
    }
    let alpha = model.real("laplace_alpha").expect("defaulted");
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid("model.laplace_alpha", "must be a positive finite number"));
    }
    let seed = training.int("rng_seed").expect("defaulted") as u64;
    let max_lines = match training.int("max_corpus_lines") {
        Some(n) if n < 1 => return Err(invalid("training.max_corpus_lines", "must be at least 1")),
        Some(n) => Some(n as usize),
        None => None,
    };
    let fraction = data.real("validation_fraction").expect("defaulted");
    if !(0.0..1.0).contains(&fraction) {
        return Err(invalid("data.validation_fraction", "must be in [0, 1)"));
    }
    let corpus_path = PathBuf::from(data.str("corpus_path").expect("required"));

    let (mut lines, skipped) = read_corpus(&corpus_path)?;
    if let Some(n) = max_lines {
        lines.truncate(n);
    }
    if lines.is_empty() {
        return Err(TrainingError::EmptyCorpus(corpus_path.display().to_string()));
    }
    let corpus_size = lines.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = lines;
    shuffled.shuffle(&mut rng);
    let n_val = (corpus_size as f64 * fraction).floor() as usize;
    let (validation, train) = shuffled.split_at(n_val);
    let ngram = NgramModel::train(train, order as usize, alpha);
    // too small to hold anything out: report fit on the training lines
    let held_out = if validation.is_empty() { train } else { validation };
    let perplexity = ngram.perplexity(held_out)?;

    fs::create_dir_all(output_dir).map_err(io_err(output_dir))?;
    let model_path = output_dir.join(MODEL_FILE);
    fs::write(&model_path, ngram.to_text()).map_err(io_err(&model_path))?;

    Ok(TrainingReport {
        trainer: descriptor.name,
        triplet: triplet.clone(),
        corpus_size,
        training_lines: train.len(),
        validation_lines: validation.len(),
        skipped_lines: skipped,
        validation_perplexity: perplexity,
        artifact_dir: output_dir.to_path_buf(),
    })
}

/// Loads the n-gram model stored in an artifact or cache directory.
pub fn load_ngram(dir: &Path) -> Result<NgramModel, TrainingError> {
    let path = dir.join(MODEL_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    NgramModel::from_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triplet(corpus: &Path, order: i64, alpha: f64) -> TrainingTriplet {
        TrainingTriplet::from_toml_str(
            &format!(
                "[model]\norder = {order}\nlaplace_alpha = {alpha:e}\n[training]\nrng_seed = 5\n[data]\ncorpus_path = {:?}\n",
                corpus.display().to_string()
            ),
            None,
        )
        .unwrap()
    }

    #[test]
    fn trainers_listed() {
        let names: Vec<String> = list_trainers().into_iter().map(|t| t.name).collect();
        assert_eq!(names, vec!["ngram_clm"]);
        assert!(list_trainers()[0].model_schema.iter().any(|s| s.name == "order" && s.required));
        assert_eq!(list_trainers(), list_trainers());
    }

    #[test]
    fn config_sections_validated() {
        assert!(matches!(
            TrainingTriplet::from_toml_str("[model]\norder = 1\n[training]\n", None),
            Err(TrainingError::TripletValidation { key, .. }) if key == "data"
        ));
        assert!(matches!(
            TrainingTriplet::from_toml_str("[model]\n[training]\n[data]\n[extra]\n", None),
            Err(TrainingError::TripletValidation { key, .. }) if key == "extra"
        ));
        let t = TrainingTriplet::from_toml_str(
            "[model]\norder = 9\n[training]\n[data]\ncorpus_path = 'c.smi'\n",
            Some(Path::new("/base")),
        )
        .unwrap();
        assert_eq!(t.data["corpus_path"], ParamValue::Str("/base/c.smi".into()));
        let reparsed = TrainingTriplet::from_toml_str(&t.to_toml(), None).unwrap();
        assert_eq!(reparsed, t);
        let out = tempfile::tempdir().unwrap();
        assert!(matches!(
            run_training("ngram_clm", &t, out.path()),
            Err(TrainingError::TripletValidation { key, .. }) if key == "model.order"
        ));
        let mut t2 = t.clone();
        t2.model.insert("dropout".into(), ParamValue::Real(0.1));
        assert!(matches!(
            run_training("ngram_clm", &t2, out.path()),
            Err(TrainingError::TripletValidation { key, .. }) if key == "model.dropout"
        ));
        assert!(matches!(
            run_training("vae", &t, out.path()),
            Err(TrainingError::UnknownTrainer(_))
        ));
    }

    #[test]
    fn empty_and_marker_corpora() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = dir.path().join("c.smi");
        fs::write(&corpus, "# nothing here\n\n").unwrap();
        assert!(matches!(
            run_training("ngram_clm", &triplet(&corpus, 1, 0.01), &dir.path().join("out")),
            Err(TrainingError::EmptyCorpus(_))
        ));
        fs::write(&corpus, "C^C\nCC$\nCCO\nnot smiles\n").unwrap();
        let report = run_training("ngram_clm", &triplet(&corpus, 1, 0.01), &dir.path().join("out")).unwrap();
        assert_eq!(report.corpus_size, 1);
        assert_eq!(report.skipped_lines, 3);
        assert!(report.model_path().is_file());
    }

    #[test]
    fn two_line_corpus_hand_model() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = dir.path().join("c.smi");
        fs::write(&corpus, "CC\nCC\n").unwrap();
        let report = run_training("ngram_clm", &triplet(&corpus, 1, 1e-12), &dir.path().join("out")).unwrap();
        // floor(2 * 0.1) = 0 held out, so the report scores the training lines
        assert_eq!(report.validation_lines, 0);
        let expected = (2.0f64 * 2.0f64.ln() / 3.0).exp();
        assert!((report.validation_perplexity - expected).abs() < 1e-9);
        let m = load_ngram(&report.artifact_dir).unwrap();
        let row = m.distribution("C").unwrap();
        assert!((row.iter().find(|(s, _)| *s == Some(END)).unwrap().1 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn deterministic_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = dir.path().join("c.smi");
        fs::write(&corpus, "CCO\nc1ccccc1\nCC(=O)O\nCCN\nOCCO\nC1CCCCC1\nCOC\nCCCl\nNCC(=O)O\nCS\n").unwrap();
        let t = triplet(&corpus, 3, 0.01);
        let a = run_training("ngram_clm", &t, &dir.path().join("a")).unwrap();
        let b = run_training("ngram_clm", &t, &dir.path().join("b")).unwrap();
        assert_eq!(fs::read(a.model_path()).unwrap(), fs::read(b.model_path()).unwrap());
        assert_eq!(a.validation_lines, 1);
        assert!(a.validation_perplexity.is_finite() && a.validation_perplexity >= 1.0);
    }
}
