//! Unconditional n-gram sampling versus the seed GA around a seed compound,
//! written as CSV + SVG (same as `discokit casestudy`).
//!
//! cargo run --release --example casestudy -- [seed SMILES] [output dir]

use std::path::{Path, PathBuf};

use discokit::cli::{run_casestudy, CaseStudyConfig, CONDITIONAL, UNCONDITIONAL};

/// Imatinib, standing in for an unpublished DDR1 hit.
const DEFAULT_SEED: &str = "Cc1ccc(NC(=O)c2ccc(CN3CCN(C)CC3)cc2)cc1Nc1nccc(-c2cccnc2)n1";

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args.next().unwrap_or_else(|| DEFAULT_SEED.to_string());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "casestudy".to_string()));

    let study = run_casestudy(&CaseStudyConfig {
        seed_smiles: seed,
        corpus: Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus_1000.smi"),
        samples: 200,
        rng_seed: 42,
        order: 3,
        model_dir: out.join("ngram_model"),
    })
    .unwrap();
    std::fs::write(out.join("casestudy.csv"), study.to_csv()).unwrap();
    std::fs::write(out.join("casestudy.svg"), study.to_svg()).unwrap();

    println!("seed esol {:.3}", study.seed_esol);
    for alg in [UNCONDITIONAL, CONDITIONAL] {
        let rows: Vec<_> = study.rows_of(alg).collect();
        let improved = rows
            .iter()
            .filter(|r| r.tanimoto >= 0.5 && r.esol >= study.seed_esol + 1.0)
            .count();
        println!(
            "{alg:<10} median Tanimoto {:.3}; {improved}/{} similar and >= 1 log unit more soluble",
            study.median_tanimoto(alg).unwrap(),
            rows.len()
        );
    }
    println!("wrote {}/casestudy.{{csv,svg}}", out.display());
}
