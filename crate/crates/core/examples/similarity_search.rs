//! Rank the bundled corpus by Tanimoto similarity to a query.
//!
//! cargo run --example similarity_search -- "c1ccc(cc1)C(=O)N"

use discokit::chem;

fn main() {
    let query = std::env::args().nth(1).unwrap_or_else(|| "CC(=O)Nc1ccc(O)cc1".to_string());
    let q = chem::default_fingerprint(&chem::parse_smiles(&query).expect("query parses"));
    let corpus = include_str!("../data/corpus_1000.smi");

    let mut hits: Vec<(f64, &str)> = corpus
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| {
            let m = chem::parse_smiles(l).ok()?;
            Some((chem::tanimoto(&q, &chem::default_fingerprint(&m)).ok()?, l))
        })
        .collect();
    hits.sort_by(|a, b| b.0.total_cmp(&a.0));

    println!("nearest neighbours of {query}:");
    for (t, s) in hits.iter().take(10) {
        println!("  {t:.3}  {s}");
    }
}
