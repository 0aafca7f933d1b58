//! Batch property prediction through the property registry, written as CSV.

use discokit::properties::{write_records_csv, PropertyRegistry};

fn main() {
    let registry = PropertyRegistry::with_builtins();
    for d in registry.list() {
        println!("# {}: {} [{}]", d.name, d.description, d.output_unit);
    }

    let inputs = ["CCO", "c1ccccc1", "CCCCCCCCCC", "OC(=O)c1ccccc1O", "not smiles", "Clc1ccc(Cl)cc1"];
    let mut records = registry.evaluate_batch("esol", &inputs).unwrap();
    // most soluble first, failures last
    records.sort_by(|a, b| match (a.value, b.value) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    write_records_csv(&records, std::io::stdout().lock()).unwrap();
}
