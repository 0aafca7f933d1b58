//! Parse SMILES strings and print their canonical form and descriptors.
//!
//! cargo run --example parse_and_describe -- "CC(=O)Oc1ccccc1C(=O)O"

use discokit::chem;

fn main() {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = vec!["CC(=O)Oc1ccccc1C(=O)O".into(), "c1ccc2[nH]ccc2c1".into(), "C1CC".into()];
    }
    for s in &inputs {
        let mol = match chem::parse_smiles(s) {
            Ok(m) => m,
            Err(e) => {
                println!("{s}: {e}");
                continue;
            }
        };
        println!("{s}");
        println!("  canonical         {}", chem::canonical_smiles(&mol));
        println!("  heavy atoms       {}", mol.heavy_atom_count());
        println!("  molecular weight  {:.3}", chem::molecular_weight(&mol));
        println!("  cLogP             {:.3}", chem::crippen_logp(&mol).unwrap());
        println!("  rotatable bonds   {}", chem::count_rotatable_bonds(&mol));
        println!("  aromatic fraction {:.3}", chem::aromatic_proportion(&mol));
        println!("  fingerprint bits  {}", chem::default_fingerprint(&mol).count_ones());
    }
}
