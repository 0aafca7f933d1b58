//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test --test acceptance`.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use discokit::algorithms::{ga_run, GaConfig, DEFAULT_MAX_LENGTH};
use discokit::chem::{self, Fingerprint};
use discokit::cli::{run_casestudy, CaseStudyConfig, CONDITIONAL, UNCONDITIONAL};
use discokit::properties::{esol, esol_from_descriptors, metric_validity, EsolDescriptors};
use discokit::registry::{AlgorithmType, ApplicationIdentifier};
use discokit::store::{
    compute_sha256, DirRemote, FileEntry, ModelCache, ModelManifest, RemoteBackend, RemoteError, StoreError,
};
use discokit::training::{self, NgramModel, TrainingTriplet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stand-in for the case-study hit compound: imatinib, a DDR1 inhibitor.
const SEED: &str = "Cc1ccc(NC(=O)c2ccc(CN3CCN(C)CC3)cc2)cc1Nc1nccc(-c2cccnc2)n1";

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn corpus_lines(name: &str) -> Vec<String> {
    fs::read_to_string(data(name))
        .unwrap()
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_round_trip() -> Outcome {
    let lines = corpus_lines("corpus_100.smi");
    let start = Instant::now();
    let mut ok = 0;
    for s in &lines {
        let m = chem::parse_smiles(s).map_err(|e| format!("{s}: {e}"))?;
        let back = chem::parse_smiles(&chem::write_smiles(&m)).map_err(|e| format!("{s}: rewrite {e}"))?;
        if chem::is_isomorphic(&m, &back) {
            ok += 1;
        }
    }
    let t = start.elapsed();
    check(
        lines.len() == 100 && ok == 100 && t < Duration::from_secs(1),
        format!("{ok}/{} isomorphic in {t:.2?}", lines.len()),
    )
}

/// Every permutation of 0..n, by Heap's algorithm.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            if i + 1 < k {
                a.swap(j, k - 1);
            }
        }
    }
    let mut out = Vec::new();
    heap(n, &mut (0..n).collect(), &mut out);
    out
}

fn c2_canonical() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut molecules, mut orders, mut violations) = (0, 0, 0);
    for s in corpus_lines("corpus_100.smi") {
        let m = chem::parse_smiles(&s).unwrap();
        if m.heavy_atom_count() > 8 {
            continue;
        }
        molecules += 1;
        let reference = chem::canonical_smiles(&m);
        let n = m.atom_count();
        let perms = if n <= 6 {
            permutations(n)
        } else {
            (0..20)
                .map(|_| {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.shuffle(&mut rng);
                    p
                })
                .collect()
        };
        for p in perms {
            orders += 1;
            if chem::canonical_smiles(&m.renumbered(&p)) != reference {
                violations += 1;
            }
        }
    }
    check(
        molecules > 0 && violations == 0,
        format!("{molecules} molecules, {orders} atom orders, {violations} violations"),
    )
}

fn c3_descriptors() -> Outcome {
    let mw = |s: &str| chem::molecular_weight(&chem::parse_smiles(s).unwrap());
    let (methane, ethanol) = (mw("C"), mw("CCO"));
    let d = |clogp, mw| EsolDescriptors { clogp, mw, rb: 0.0, ap: 0.0 };
    let zero = esol_from_descriptors(&d(0.0, 0.0));
    let one = esol_from_descriptors(&d(1.0, 100.0));
    // 0.16 - 0.63 * 1 - 0.0062 * 100
    let one_oracle = -1.09;
    check(
        (methane - 16.043).abs() <= 1e-3
            && (ethanol - 46.069).abs() <= 1e-3
            && zero == 0.16
            && (one - one_oracle).abs() <= 1e-9,
        format!("MW(C)={methane:.4} MW(CCO)={ethanol:.4} esol(0)={zero} esol(1,100)={one:.12}"),
    )
}

fn c4_tanimoto() -> Outcome {
    let fp = |bits: &[usize]| Fingerprint::from_bits(2048, 2, bits.iter().copied());
    let t = |a: &Fingerprint, b: &Fingerprint| chem::tanimoto(a, b).unwrap();
    let a = fp(&[1, 2, 3]);
    let fixed = [t(&a, &a), t(&a, &fp(&[7, 8])), t(&a, &fp(&[2, 3, 4]))];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    for _ in 0..1000 {
        let mut draw = || -> BTreeSet<usize> {
            let density = rng.random_range(0.0..0.2);
            (0..2048).filter(|_| rng.random_bool(density)).collect()
        };
        let (x, y) = (draw(), draw());
        let (fx, fy) = (fp(&x.iter().copied().collect::<Vec<_>>()), fp(&y.iter().copied().collect::<Vec<_>>()));
        let (xy, yx) = (t(&fx, &fy), t(&fy, &fx));
        let union = x.union(&y).count();
        let oracle = if union == 0 { xy } else { x.intersection(&y).count() as f64 / union as f64 };
        if xy != yx || !(0.0..=1.0).contains(&xy) || (xy - oracle).abs() > 1e-12 {
            bad += 1;
        }
    }
    check(
        fixed == [1.0, 0.0, 0.5] && bad == 0,
        format!("identity={} disjoint={} overlap={}; {bad}/1000 random pairs off", fixed[0], fixed[1], fixed[2]),
    )
}

fn c5_and_c7_case_study_ga() -> (Outcome, Outcome) {
    let seed = chem::parse_smiles(SEED).unwrap();
    let seed_esol = esol(&seed).unwrap();
    let seed_fp = chem::default_fingerprint(&seed);
    let mut config = GaConfig::new(SEED);
    config.rng_seed = 42;
    let props = discokit::properties::PropertyRegistry::with_builtins();
    let start = Instant::now();
    let result = match ga_run(&config, &props) {
        Ok(r) => r,
        Err(e) => return (Err(e.to_string()), Err("no run".into())),
    };
    let elapsed = start.elapsed();

    let top10 = &result.ranked[..result.ranked.len().min(10)];
    // similarity recomputed from the SMILES, not taken from the result
    let similar = top10
        .iter()
        .filter(|m| {
            let fp = chem::default_fingerprint(&chem::parse_smiles(&m.smiles).unwrap());
            chem::tanimoto(&seed_fp, &fp).unwrap() >= 0.5
        })
        .count();
    let best = result
        .ranked
        .iter()
        .filter(|m| m.feasible)
        .map(|m| esol(&chem::parse_smiles(&m.smiles).unwrap()).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    let c5 = check(
        similar >= 5 && best >= seed_esol + 1.0 && elapsed < Duration::from_secs(120),
        format!(
            "{similar}/10 top molecules with Tanimoto >= 0.5, best feasible ESOL {best:.3} vs seed {seed_esol:.3} (gain {:.3}), {elapsed:.2?}",
            best - seed_esol
        ),
    );

    let trace = &result.best_feasible;
    let mut violations = 0;
    for w in trace.windows(2) {
        match (w[0], w[1]) {
            (Some(a), Some(b)) if b < a => violations += 1,
            (Some(_), None) => violations += 1,
            _ => {}
        }
    }
    let c7 = check(
        trace.len() == config.generations + 1 && violations == 0,
        format!("{} generation records, {violations} decreases", trace.len()),
    );
    (c5, c7)
}

fn c6_contrast() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let study = run_casestudy(&CaseStudyConfig {
        seed_smiles: SEED.into(),
        corpus: data("corpus_1000.smi"),
        samples: 200,
        rng_seed: 42,
        order: 3,
        model_dir: dir.path().join("model"),
    })
    .map_err(|e| e.to_string())?;
    let n_u = study.rows_of(UNCONDITIONAL).count();
    let n_c = study.rows_of(CONDITIONAL).count();
    let (mu, mc) = (
        study.median_tanimoto(UNCONDITIONAL).unwrap(),
        study.median_tanimoto(CONDITIONAL).unwrap(),
    );
    check(
        n_u == 200 && n_c == 200 && mu < mc && mu < 0.3,
        format!("median Tanimoto ngram_clm {mu:.3} vs seed_ga {mc:.3} over {n_u}+{n_c} samples"),
    )
}

/// Serves real data from `inner` until `fail_at` gets have happened, then
/// errors or panics.
struct Faulty<'a> {
    inner: &'a dyn RemoteBackend,
    gets: AtomicUsize,
    fail_at: usize,
    panic: bool,
}

impl RemoteBackend for Faulty<'_> {
    fn list(&self, prefix: &str) -> Result<Vec<String>, RemoteError> {
        self.inner.list(prefix)
    }
    fn get(&self, key: &str) -> Result<Vec<u8>, RemoteError> {
        if self.gets.fetch_add(1, Ordering::SeqCst) + 1 >= self.fail_at {
            if self.panic {
                panic!("simulated crash");
            }
            return Err(RemoteError::Http("connection reset".into()));
        }
        self.inner.get(key)
    }
    fn put(&self, key: &str, bytes: &[u8]) -> Result<(), RemoteError> {
        self.inner.put(key, bytes)
    }
    fn describe(&self) -> String {
        "faulty".into()
    }
}

/// sha256 by the system tool, when present.
fn external_sha256(path: &Path) -> Option<String> {
    let out = Command::new("sha256sum").arg(path).output().ok()?;
    let text = String::from_utf8(out.stdout).ok()?;
    text.split_whitespace().next().map(str::to_string)
}

fn c8_store() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let artifact = tmp.path().join("artifact");
    let files: [(&str, &[u8]); 3] = [
        ("ngram_model.tsv", b"model bytes\n"),
        ("extra/notes.txt", b"nested"),
        ("empty.bin", b""),
    ];
    for (rel, bytes) in files {
        let p = artifact.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, bytes).unwrap();
    }
    let id: ApplicationIdentifier = "generation/ngram_clm/v3".parse().unwrap();
    let cache_root = tmp.path().join("cache");
    let cache = ModelCache::new(&cache_root);
    let manifest = cache.save_version(&id, &artifact).map_err(|e| e.to_string())?;
    let mut external = 0;
    for f in &manifest.files {
        if let Some(h) = external_sha256(&artifact.join(&f.path)) {
            if h != f.sha256 {
                return Err(format!("{} hashes to {h}, manifest says {}", f.path, f.sha256));
            }
            external += 1;
        }
    }
    let remote = DirRemote::new(tmp.path().join("remote"));
    cache.upload_version(&id, &remote).map_err(|e| e.to_string())?;
    fs::remove_dir_all(&cache_root).unwrap();

    let dir = cache.ensure_version(&id, Some(&remote)).map_err(|e| e.to_string())?;
    let identical = files
        .iter()
        .all(|(rel, bytes)| fs::read(dir.join(rel)).map(|b| b == *bytes).unwrap_or(false));
    let verified = cache.verify(&id).is_ok();

    let fresh = ModelCache::new(tmp.path().join("cache2"));
    let error_abort = Faulty {
        inner: &remote,
        gets: AtomicUsize::new(0),
        fail_at: 3,
        panic: false,
    };
    let aborted = matches!(fresh.ensure_version(&id, Some(&error_abort)), Err(StoreError::Remote(_)));
    let crash = Faulty {
        inner: &remote,
        gets: AtomicUsize::new(0),
        fail_at: 2,
        panic: true,
    };
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let crashed = panic::catch_unwind(AssertUnwindSafe(|| fresh.ensure_version(&id, Some(&crash)))).is_err();
    panic::set_hook(hook);
    let invisible = !fresh.contains(&id)
        && !fresh.version_dir(&id).exists()
        && fresh.local_versions(AlgorithmType::Generation, "ngram_clm").is_empty();
    let retried = fresh.ensure_version(&id, Some(&remote)).is_ok() && fresh.verify(&id).is_ok();

    check(
        identical && verified && aborted && crashed && invisible && retried,
        format!(
            "round trip identical={identical} verified={verified} (external sha256 on {external} files); abort={aborted} crash={crashed} invisible={invisible} retry={retried}"
        ),
    )
}

fn run_cli(args: &[&str], cache: &Path) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_discokit"))
        .args(args)
        .env("DISCO_CACHE_DIR", cache)
        .env_remove("DISCO_REMOTE")
        .output()
        .expect("binary runs");
    (
        out.status.success(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn c9_workflow() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let config = tmp.path().join("triplet.toml");
    fs::write(
        &config,
        format!(
            "[model]\norder = 3\n[training]\nrng_seed = 1\n[data]\ncorpus_path = {:?}\n",
            data("corpus_1000.smi").display().to_string()
        ),
    )
    .unwrap();
    let artifact = tmp.path().join("artifact");
    let remote = tmp.path().join("hub");
    let (a, r) = (artifact.display().to_string(), remote.display().to_string());
    let start = Instant::now();
    let steps: [(&str, Vec<&str>); 3] = [
        (
            "trainer",
            vec!["trainer", "--trainer", "ngram_clm", "--config", config.to_str().unwrap(), "--output", &a],
        ),
        ("saving", vec!["saving", "--artifact", &a, "--target", "generation/ngram_clm/v1"]),
        ("upload", vec!["upload", "--target", "generation/ngram_clm/v1", "--remote", &r]),
    ];
    for (name, args) in steps {
        let (ok, _, err) = run_cli(&args, &cache);
        if !ok {
            return Err(format!("{name} failed: {err}"));
        }
    }
    fs::remove_dir_all(&cache).unwrap();
    let n = 25;
    let n_text = n.to_string();
    let (ok, out, err) = run_cli(
        &[
            "inference",
            "--algorithm",
            "generation/ngram_clm/latest",
            "--number-of-samples",
            &n_text,
            "--params",
            "rng_seed=7",
            "--remote",
            &r,
        ],
        &cache,
    );
    if !ok {
        return Err(format!("inference failed: {err}"));
    }
    let elapsed = start.elapsed();
    let lines: Vec<&str> = out.lines().collect();
    let valid = lines.iter().filter(|s| chem::parse_smiles(s).is_ok()).count();
    check(
        lines.len() == n && valid == n && elapsed < Duration::from_secs(30),
        format!("trainer -> saving -> upload -> inference: {valid}/{n} valid SMILES in {elapsed:.2?}"),
    )
}

fn c10_ngram() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let triplet = |order: i64| {
        TrainingTriplet::from_toml_str(
            &format!(
                "[model]\norder = {order}\n[training]\nrng_seed = 7\n[data]\ncorpus_path = {:?}\n",
                data("corpus_1000.smi").display().to_string()
            ),
            None,
        )
        .unwrap()
    };
    let train = |order: i64, dir: &str| -> NgramModel {
        let report = training::run_training("ngram_clm", &triplet(order), &tmp.path().join(dir)).unwrap();
        training::load_ngram(&report.artifact_dir).unwrap()
    };
    let model = train(3, "a");
    train(3, "b");
    let mut worst = 0.0f64;
    let mut contexts = 0;
    for ctx in model.contexts() {
        contexts += 1;
        let total: f64 = model.distribution(ctx).unwrap().iter().map(|(_, p)| p).sum();
        worst = worst.max((total - 1.0).abs());
    }
    let file = training::MODEL_FILE;
    let deterministic = fs::read(tmp.path().join("a").join(file)).unwrap() == fs::read(tmp.path().join("b").join(file)).unwrap();

    let validity = |m: &NgramModel| {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<String> = (0..500).map(|_| m.sample(&mut rng, DEFAULT_MAX_LENGTH as usize)).collect();
        metric_validity(&samples).unwrap()
    };
    let (v3, v1) = (validity(&model), validity(&train(1, "c")));
    check(
        contexts > 0 && worst <= 1e-9 && deterministic && v3 > v1,
        format!(
            "{contexts} contexts, max |row sum - 1| = {worst:.1e}; byte-identical retrain={deterministic}; validity order 3 {v3:.3} vs order 1 {v1:.3}"
        ),
    )
}

fn c11_manifest() -> Outcome {
    use proptest::prelude::*;
    use proptest::test_runner::{Config, TestRng, TestRunner, RngAlgorithm};

    let file = ("[a-z]{1,6}(/[a-z0-9_.]{1,6}){0,2}", "[0-9a-f]{64}", any::<u64>())
        .prop_map(|(path, sha256, bytes)| FileEntry { bytes, path, sha256 });
    let strategy = (
        proptest::sample::select(AlgorithmType::ALL.to_vec()),
        any::<i64>(),
        proptest::collection::vec(file, 0..6),
        "[a-z0-9_-]{1,12}",
        "v[0-9]{1,3}",
    )
        .prop_map(|(t, created_unix, mut files, name, version)| {
            files.sort_by(|a, b| a.path.cmp(&b.path));
            files.dedup_by(|a, b| a.path == b.path);
            ModelManifest {
                algorithm_type: t.as_str().to_string(),
                created_unix,
                files,
                name,
                version,
            }
        })
        .prop_filter("valid", |m| m.validate().is_ok());

    let cases = AtomicUsize::new(0);
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 100,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let outcome = runner.run(&strategy, |m| {
        cases.fetch_add(1, Ordering::SeqCst);
        let bytes = m.to_canonical_bytes();
        let back = ModelManifest::from_bytes(&bytes).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back.to_canonical_bytes(), bytes);
        Ok(())
    });
    // FIPS 180-2 test vector for the empty message
    let empty = compute_sha256(b"");
    let published = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";
    let n = cases.load(Ordering::SeqCst);
    check(
        outcome.is_ok() && n >= 100 && empty == published,
        format!(
            "{n} generated manifests round-tripped{}; sha256(\"\") matches={}",
            outcome.err().map(|e| format!(" (failure: {e})")).unwrap_or_default(),
            empty == published
        ),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut run = |n: u32, name: &'static str, f: &dyn Fn() -> Outcome| {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        results.push((n, name, outcome));
    };
    run(1, "parser round trip", &c1_round_trip);
    run(2, "canonicalization", &c2_canonical);
    run(3, "descriptor oracles", &c3_descriptors);
    run(4, "tanimoto suite", &c4_tanimoto);
    let (c5, c7) = c5_and_c7_case_study_ga();
    run(5, "case-study directional claim", &|| c5.clone());
    run(6, "unconditional contrast", &c6_contrast);
    run(7, "GA elitism invariant", &|| c7.clone());
    run(8, "store round trip and crash safety", &c8_store);
    run(9, "complete discovery workflow", &c9_workflow);
    run(10, "n-gram correctness", &c10_ngram);
    run(11, "manifest canonical form", &c11_manifest);

    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
