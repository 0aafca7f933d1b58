//! Train the character n-gram model at several orders and compare them.

use std::path::Path;

use discokit::properties::{metric_novelty, metric_uniqueness, metric_validity};
use discokit::training::{load_ngram, read_corpus, run_training, TrainingTriplet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus_1000.smi");
    let (reference, _) = read_corpus(&corpus).unwrap();
    let out = std::env::temp_dir().join(format!("discokit-train-{}", std::process::id()));

    println!("order  perplexity  validity  uniqueness  novelty");
    for order in 1..=5 {
        let triplet = TrainingTriplet::from_toml_str(
            &format!(
                "[model]\norder = {order}\n[training]\nrng_seed = 1\n[data]\ncorpus_path = {:?}\n",
                corpus.display().to_string()
            ),
            None,
        )
        .unwrap();
        let report = run_training("ngram_clm", &triplet, &out.join(order.to_string())).unwrap();
        let model = load_ngram(&report.artifact_dir).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<String> = (0..500).map(|_| model.sample(&mut rng, 120)).collect();
        let valid: Vec<&String> = samples
            .iter()
            .filter(|s| discokit::chem::parse_smiles(s).is_ok())
            .collect();
        let uniq = metric_uniqueness(&valid).unwrap_or(f64::NAN);
        let novel = metric_novelty(&valid, &reference).unwrap_or(f64::NAN);
        println!(
            "{order:>5}  {:>10.3}  {:>8.3}  {uniq:>10.3}  {novel:>7.3}",
            report.validation_perplexity,
            metric_validity(&samples).unwrap()
        );
    }
    let _ = std::fs::remove_dir_all(out);
}
