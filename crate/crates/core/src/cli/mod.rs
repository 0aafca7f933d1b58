//! The `discokit` command line: `inference`, `trainer`, `saving`, `upload`
//! and `casestudy`.
//!
//! Exit codes are 0 on success, 1 on a domain error and 2 on a usage
//! error. Every failure prints one `E_<NAME>: message` line to stderr.
//! The cache root comes from `DISCO_CACHE_DIR` and the default remote from
//! `DISCO_REMOTE`.

mod casestudy;
mod svg;

pub use casestudy::{run_casestudy, CaseStudy, CaseStudyConfig, CaseStudyError, CaseStudyRow, CONDITIONAL, UNCONDITIONAL};
pub use svg::{scatter_panels_svg, Axes, Panel};

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::algorithms::AlgorithmError;
use crate::registry::{
    latest_version, params_from_toml, AlgorithmRegistry, AlgorithmType, ApplicationIdentifier, ModelSource,
    ParamSpec, ParamValue, RegistryError, SampleItem, LATEST,
};
use crate::store::{open_remote, ModelCache, StoreError};
use crate::training::{self, TrainingError, TrainingTriplet};

#[derive(Debug, Parser)]
#[command(name = "discokit", version, about = "Generative molecular discovery workflow")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the registered algorithms or draw samples from one
    Inference(InferenceArgs),
    /// List trainers or train a model from a config triplet
    Trainer(TrainerArgs),
    /// Store a trained artifact in the local cache as a model version
    Saving(SavingArgs),
    /// Push a cached model version to a remote hub
    Upload(UploadArgs),
    /// Compare unconditional and seed-constrained generation around a seed
    Casestudy(CasestudyArgs),
}

#[derive(Debug, Args)]
pub struct InferenceArgs {
    /// Print the algorithm table and exit
    #[arg(long, conflicts_with_all = ["algorithm", "params", "params_file", "output"])]
    pub list: bool,
    /// Identifier type/name/version; model-backed algorithms accept `latest`
    #[arg(long, required_unless_present = "list")]
    pub algorithm: Option<String>,
    /// Comma-separated key=value pairs, or a TOML file; repeatable
    #[arg(long)]
    pub params: Vec<String>,
    /// TOML file of parameters; inline --params win on conflicts
    #[arg(long)]
    pub params_file: Option<PathBuf>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub number_of_samples: u64,
    /// Output file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Model hub to fetch missing versions from (URL or directory)
    #[arg(long, env = "DISCO_REMOTE")]
    pub remote: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainerArgs {
    /// Print the trainers and their config schema
    #[arg(long, conflicts_with_all = ["trainer", "config", "output"])]
    pub list: bool,
    #[arg(long, required_unless_present = "list")]
    pub trainer: Option<String>,
    /// TOML file with [model], [training] and [data] sections
    #[arg(long, required_unless_present = "list")]
    pub config: Option<PathBuf>,
    /// Artifact directory [default: ./<trainer>_artifact]
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SavingArgs {
    /// Directory written by `trainer`
    #[arg(long)]
    pub artifact: PathBuf,
    /// Version identifier type/name/version
    #[arg(long)]
    pub target: String,
}

#[derive(Debug, Args)]
pub struct UploadArgs {
    /// Cached version type/name/version, or type/name/latest
    #[arg(long)]
    pub target: String,
    /// Model hub (URL or directory)
    #[arg(long, env = "DISCO_REMOTE")]
    pub remote: String,
}

#[derive(Debug, Args)]
pub struct CasestudyArgs {
    #[arg(long)]
    pub seed_smiles: String,
    /// Training corpus for the unconditional n-gram model
    #[arg(long)]
    pub corpus: PathBuf,
    /// Samples per algorithm
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub rng_seed: u64,
    /// n-gram order
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=5))]
    pub order: u64,
    #[arg(long, default_value = "casestudy")]
    pub output: PathBuf,
}

/// A failure with its stderr code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl fmt::Display) -> Self {
        CliError {
            code,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // keep the code line greppable
        write!(f, "{}: {}", self.code, self.message.replace('\n', " "))
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::new("E_IO", e)
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        let code = match &e {
            StoreError::VersionExists(_) => "E_VERSION_EXISTS",
            StoreError::EmptyArtifact(_) => "E_EMPTY_ARTIFACT",
            StoreError::NotInCache(_) => "E_NOT_IN_CACHE",
            StoreError::ModelVersionNotFound(_) => "E_MODEL_NOT_FOUND",
            StoreError::HashMismatch { .. } => "E_HASH",
            StoreError::InvalidManifest(_) => "E_MANIFEST",
            StoreError::Remote(_) => "E_REMOTE",
            StoreError::Io(_) => "E_IO",
        };
        CliError::new(code, e)
    }
}

impl From<TrainingError> for CliError {
    fn from(e: TrainingError) -> Self {
        let code = match &e {
            TrainingError::UnknownTrainer(_) => "E_UNKNOWN_TRAINER",
            TrainingError::TripletValidation { .. } => "E_TRIPLET",
            TrainingError::EmptyCorpus(_) | TrainingError::EmptyValidationSet => "E_EMPTY_CORPUS",
            TrainingError::InvalidModel(_) => "E_MODEL",
            TrainingError::Io { .. } => "E_IO",
        };
        CliError::new(code, e)
    }
}

impl From<AlgorithmError> for CliError {
    fn from(e: AlgorithmError) -> Self {
        let code = match &e {
            AlgorithmError::ParseSeed(_) => "E_PARSE_SEED",
            AlgorithmError::MutationStalled { .. } => "E_STALLED",
            AlgorithmError::InvalidConfig { .. } | AlgorithmError::Property(_) => "E_PARAM",
            AlgorithmError::Chem(_) => "E_CHEM",
        };
        CliError::new(code, e)
    }
}

impl From<RegistryError> for CliError {
    fn from(e: RegistryError) -> Self {
        match e {
            RegistryError::Store(e) => e.into(),
            RegistryError::Model(e) => e.into(),
            RegistryError::Algorithm(e) => e.into(),
            e => {
                let code = match &e {
                    RegistryError::UnknownIdentifier(_) => "E_UNKNOWN_ALGORITHM",
                    RegistryError::ParameterValidation(_) | RegistryError::InvalidBatchSize => "E_PARAM",
                    RegistryError::ModelVersionNotFound(_) => "E_MODEL_NOT_FOUND",
                    RegistryError::GenerationStalled { .. } => "E_STALLED",
                    _ => "E_INTERNAL",
                };
                CliError::new(code, e)
            }
        }
    }
}

impl From<CaseStudyError> for CliError {
    fn from(e: CaseStudyError) -> Self {
        match e {
            CaseStudyError::ParseSeed(c) => CliError::new("E_PARSE_SEED", c),
            CaseStudyError::Training(e) => e.into(),
            CaseStudyError::Sampling(e) => e.into(),
            e @ CaseStudyError::Scoring { .. } => CliError::new("E_CHEM", e),
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.exit_code() == 0 {
                let _ = write!(out, "{text}");
                return 0;
            }
            let (head, rest) = text.split_once("\n\n").unwrap_or((&text, ""));
            let head: Vec<&str> = head.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
            let _ = writeln!(err, "E_USAGE: {}", head.join(" ").trim_start_matches("error: "));
            let _ = write!(err, "{rest}");
            return 2;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            1
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Inference(a) => inference(a, out),
        Command::Trainer(a) => trainer(a, out),
        Command::Saving(a) => saving(a, out),
        Command::Upload(a) => upload(a, out),
        Command::Casestudy(a) => casestudy(a, out),
    }
}

fn parse_id(text: &str, code: &'static str) -> Result<ApplicationIdentifier, CliError> {
    text.parse().map_err(|e| CliError::new(code, e))
}

fn read_params_file(path: &Path) -> Result<BTreeMap<String, ParamValue>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::new("E_PARAM", format!("{}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::new("E_PARAM", format!("{}: {}", path.display(), e.message())))?;
    params_from_toml(&table).map_err(|e| CliError::new("E_PARAM", e))
}

/// Merges the params file (if any) with inline `key=value` lists. Values
/// stay strings here and are coerced against the schema later.
pub fn collect_params(inline: &[String], file: Option<&Path>) -> Result<BTreeMap<String, ParamValue>, CliError> {
    let mut raw = match file {
        Some(f) => read_params_file(f)?,
        None => BTreeMap::new(),
    };
    for arg in inline {
        if !arg.contains('=') {
            raw.extend(read_params_file(Path::new(arg))?);
            continue;
        }
        for pair in arg.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::new("E_PARAM", format!("{pair:?} is not key=value")))?;
            raw.insert(k.trim().to_string(), ParamValue::Str(v.trim().to_string()));
        }
    }
    Ok(raw)
}

fn write_table(rows: &[Vec<String>], out: &mut dyn Write) -> io::Result<()> {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c + 1 == row.len() {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{cell:<w$}  ", w = widths[c]));
            }
        }
        writeln!(out, "{}", line.trim_end())?;
    }
    Ok(())
}

fn inference(a: InferenceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let registry = AlgorithmRegistry::with_builtins();
    if a.list {
        let mut rows = vec![vec!["TYPE".into(), "NAME".into(), "VERSION".into(), "PARAMETERS".into()]];
        for c in registry.contracts() {
            let version = if c.model_backed { "v*".to_string() } else { c.identifier.version.clone() };
            rows.push(vec![
                c.identifier.algorithm_type.as_str().to_string(),
                c.identifier.name.clone(),
                version,
                c.schema_summary(),
            ]);
        }
        write_table(&rows, out)?;
        let props: Vec<&str> = registry.properties().list().iter().map(|d| d.name.as_str()).collect();
        writeln!(out, "\nproperties: {}", props.join(", "))?;
        return Ok(());
    }

    let id = parse_id(a.algorithm.as_deref().expect("required unless --list"), "E_UNKNOWN_ALGORITHM")?;
    let raw = collect_params(&a.params, a.params_file.as_deref())?;
    let cache = ModelCache::from_env();
    let remote = a.remote.as_deref().map(open_remote);
    let source = ModelSource {
        cache: &cache,
        remote: remote.as_deref(),
    };
    let mut sampler = registry.instantiate(&id, &raw, Some(source))?;
    let n = a.number_of_samples as usize;
    let mut items = Vec::with_capacity(n);
    while items.len() < n {
        let batch = sampler.next_batch(n - items.len())?;
        items.extend(batch.items);
        if batch.exhausted {
            break;
        }
    }

    let mut text = Vec::new();
    let records: Vec<_> = items
        .iter()
        .filter_map(|i| match i {
            SampleItem::Record(r) => Some(r.clone()),
            SampleItem::Smiles(_) => None,
        })
        .collect();
    if id.algorithm_type == AlgorithmType::Prediction {
        crate::properties::write_records_csv(&records, &mut text)?;
    } else {
        for item in &items {
            writeln!(text, "{}", item.smiles())?;
        }
    }
    match &a.output {
        Some(path) => fs::write(path, &text)?,
        None => out.write_all(&text)?,
    }
    Ok(())
}

fn schema_lines(section: &str, schema: &[ParamSpec], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "  [{section}]")?;
    for p in schema {
        if p.description.is_empty() {
            writeln!(out, "    {}", p.summary())?;
        } else {
            writeln!(out, "    {}  # {}", p.summary(), p.description)?;
        }
    }
    Ok(())
}

fn trainer(a: TrainerArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.list {
        for t in training::list_trainers() {
            writeln!(out, "{}: {}", t.name, t.description)?;
            schema_lines("model", &t.model_schema, out)?;
            schema_lines("training", &t.training_schema, out)?;
            schema_lines("data", &t.data_schema, out)?;
        }
        return Ok(());
    }
    let name = a.trainer.expect("required unless --list");
    if !training::list_trainers().iter().any(|t| t.name == name) {
        return Err(TrainingError::UnknownTrainer(name).into());
    }
    let config = a.config.expect("required unless --list");
    let triplet = TrainingTriplet::from_toml_file(&config).map_err(|e| match e {
        TrainingError::Io { .. } => CliError::new("E_TRIPLET", e),
        e => e.into(),
    })?;
    let output = a.output.unwrap_or_else(|| PathBuf::from(format!("{name}_artifact")));
    let report = training::run_training(&name, &triplet, &output)?;
    writeln!(out, "trainer: {}", report.trainer)?;
    writeln!(out, "artifact: {}", report.artifact_dir.display())?;
    writeln!(out, "model_file: {}", report.model_path().display())?;
    writeln!(out, "corpus_lines: {}", report.corpus_size)?;
    writeln!(out, "training_lines: {}", report.training_lines)?;
    writeln!(out, "validation_lines: {}", report.validation_lines)?;
    writeln!(out, "skipped_lines: {}", report.skipped_lines)?;
    writeln!(out, "validation_perplexity: {:.6}", report.validation_perplexity)?;
    Ok(())
}

fn saving(a: SavingArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let id = parse_id(&a.target, "E_TARGET")?;
    if id.version == LATEST {
        return Err(CliError::new("E_TARGET", "a saved version needs an explicit name, not `latest`"));
    }
    let cache = ModelCache::from_env();
    cache.save_version(&id, &a.artifact)?;
    writeln!(out, "{}", cache.manifest_path(&id).display())?;
    Ok(())
}

fn upload(a: UploadArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut id = parse_id(&a.target, "E_TARGET")?;
    let cache = ModelCache::from_env();
    if id.version == LATEST {
        let versions = cache.local_versions(id.algorithm_type, &id.name);
        let v = latest_version(versions.iter().map(String::as_str))
            .ok_or_else(|| StoreError::NotInCache(id.to_string()))?;
        id = id.with_version(v).map_err(|e| CliError::new("E_TARGET", e))?;
    }
    let remote = open_remote(&a.remote);
    cache.upload_version(&id, remote.as_ref())?;
    writeln!(out, "uploaded {id} to {}", remote.describe())?;
    Ok(())
}

fn casestudy(a: CasestudyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = CaseStudyConfig {
        seed_smiles: a.seed_smiles,
        corpus: a.corpus,
        samples: a.samples as usize,
        rng_seed: a.rng_seed,
        order: a.order as usize,
        model_dir: a.output.join("ngram_model"),
    };
    // fail on the seed before training anything
    crate::chem::parse_smiles(&config.seed_smiles).map_err(|e| CliError::new("E_PARSE_SEED", e))?;
    let study = run_casestudy(&config)?;
    fs::create_dir_all(&a.output)?;
    let csv_path = a.output.join("casestudy.csv");
    let svg_path = a.output.join("casestudy.svg");
    fs::write(&csv_path, study.to_csv())?;
    fs::write(&svg_path, study.to_svg())?;
    writeln!(out, "seed: {} (esol {:.3})", study.seed_smiles, study.seed_esol)?;
    for alg in [UNCONDITIONAL, CONDITIONAL] {
        let n = study.rows_of(alg).count();
        let above = study.rows_of(alg).filter(|r| r.tanimoto >= 0.5).count();
        writeln!(
            out,
            "{alg}: {n} samples, median tanimoto {:.3}, {above} with tanimoto >= 0.5",
            study.median_tanimoto(alg).unwrap_or(f64::NAN)
        )?;
    }
    writeln!(out, "wrote {}", csv_path.display())?;
    writeln!(out, "wrote {}", svg_path.display())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["discokit"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn inline_and_file_params() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("p.toml");
        fs::write(&f, "rng_seed = 3\nproperty = \"esol\"\n").unwrap();
        let raw = collect_params(&["rng_seed=9, inputs=C=C;CCO".into()], Some(&f)).unwrap();
        assert_eq!(raw["rng_seed"], ParamValue::Str("9".into()));
        assert_eq!(raw["inputs"], ParamValue::Str("C=C;CCO".into()));
        assert_eq!(raw["property"], ParamValue::Str("esol".into()));
        let from_path = collect_params(&[f.display().to_string()], None).unwrap();
        assert_eq!(from_path["rng_seed"], ParamValue::Int(3));
        assert_eq!(collect_params(&["a=1,b".into()], None).unwrap_err().code, "E_PARAM");
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = run_capture(&["inference"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("E_USAGE: "));
        let (_, _, err) = run_capture(&["upload", "--target", "a/b/c"]);
        assert!(err.lines().next().unwrap().contains("--remote"), "{err}");
        assert_eq!(run_capture(&["nonsense"]).0, 2);
        assert_eq!(run_capture(&["inference", "--list", "--algorithm", "x/y/z"]).0, 2);
        assert_eq!(run_capture(&["inference", "--list", "--number-of-samples", "0"]).0, 2);
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("casestudy"));
    }

    #[test]
    fn prediction_writes_csv() {
        let (code, out, err) = run_capture(&[
            "inference",
            "--algorithm",
            "prediction/property_predictor/v1",
            "--params",
            "inputs=CCO;C1CC",
        ]);
        assert_eq!(code, 0, "{err}");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "smiles,property,value,error");
        assert!(lines[1].starts_with("CCO,esol,"));
        assert!(lines[2].starts_with("C1CC,esol,,entry 1:"));
    }

    #[test]
    fn error_codes() {
        let (code, _, err) = run_capture(&["inference", "--algorithm", "generation/nope/v1"]);
        assert_eq!((code, err.split(':').next().unwrap()), (1, "E_UNKNOWN_ALGORITHM"));
        let (code, _, err) = run_capture(&[
            "inference",
            "--algorithm",
            "conditional_generation/seed_ga/v1",
            "--params",
            "seed_smiles=CCO,population_size=zero",
        ]);
        assert_eq!((code, err.split(':').next().unwrap()), (1, "E_PARAM"));
        let (code, _, err) = run_capture(&["trainer", "--trainer", "vae", "--config", "x.toml"]);
        assert_eq!((code, err.split(':').next().unwrap()), (1, "E_UNKNOWN_TRAINER"));
        let (code, _, err) = run_capture(&["casestudy", "--seed-smiles", "C1CC", "--corpus", "x.smi"]);
        assert_eq!((code, err.split(':').next().unwrap()), (1, "E_PARSE_SEED"));
    }

    #[test]
    fn registry_errors_map_through() {
        let e: CliError = RegistryError::Store(StoreError::HashMismatch { path: "f".into() }).into();
        assert_eq!(e.code, "E_HASH");
        let e: CliError = RegistryError::Algorithm(AlgorithmError::MutationStalled { attempts: 5 }).into();
        assert_eq!(e.code, "E_STALLED");
        let e: CliError = RegistryError::GenerationStalled { attempts: 1, produced: 0 }.into();
        assert_eq!(e.code, "E_STALLED");
        assert_eq!(CliError::new("E_X", "a\nb").to_string(), "E_X: a b");
    }
}
