//! Molecular descriptors feeding the solubility model.

use super::element::{Element, HYDROGEN_WEIGHT};
use super::molecule::{BondOrder, Molecule};

/// Heavy-atom weights plus every attached hydrogen, in daltons.
pub fn molecular_weight(mol: &Molecule) -> f64 {
    mol.atoms()
        .iter()
        .map(|a| a.element.atomic_weight() + a.hydrogen_count() as f64 * HYDROGEN_WEIGHT)
        .sum()
}

/// Acyclic single bonds between two non-terminal atoms, amide C-N excluded.
pub fn count_rotatable_bonds(mol: &Molecule) -> usize {
    mol.bonds()
        .iter()
        .filter(|b| b.order == BondOrder::Single && !b.in_ring)
        .filter(|b| heavy_degree(mol, b.a) >= 2 && heavy_degree(mol, b.b) >= 2)
        .filter(|b| !is_amide(mol, b.a, b.b) && !is_amide(mol, b.b, b.a))
        .count()
}

fn heavy_degree(mol: &Molecule, atom: usize) -> usize {
    mol.neighbors(atom)
        .iter()
        .filter(|&&(w, _)| mol.atom(w).element != Element::H)
        .count()
}

fn is_amide(mol: &Molecule, carbon: usize, nitrogen: usize) -> bool {
    mol.atom(carbon).element == Element::C
        && mol.atom(nitrogen).element == Element::N
        && mol.neighbors(carbon).iter().any(|&(w, bi)| {
            mol.atom(w).element == Element::O && mol.bonds()[bi].order == BondOrder::Double
        })
}

/// Fraction of heavy atoms that are aromatic.
pub fn aromatic_proportion(mol: &Molecule) -> f64 {
    let heavy = mol.heavy_atom_count();
    if heavy == 0 {
        return 0.0;
    }
    let aromatic = mol
        .atoms()
        .iter()
        .filter(|a| a.element != Element::H && a.aromatic)
        .count();
    aromatic as f64 / heavy as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    fn mol(s: &str) -> Molecule {
        parse_smiles(s).unwrap()
    }

    #[test]
    fn weights() {
        assert!((molecular_weight(&mol("C")) - 16.043).abs() < 1e-3);
        assert!((molecular_weight(&mol("CCO")) - 46.069).abs() < 1e-3);
        // explicit and implicit hydrogens weigh the same
        assert!((molecular_weight(&mol("[CH4]")) - molecular_weight(&mol("C"))).abs() < 1e-12);
    }

    #[test]
    fn rotatable() {
        assert_eq!(count_rotatable_bonds(&mol("CCO")), 0);
        assert_eq!(count_rotatable_bonds(&mol("CCCC")), 1);
        assert_eq!(count_rotatable_bonds(&mol("c1ccccc1")), 0);
        // amide C-N excluded, C-C(=O) counted
        assert_eq!(count_rotatable_bonds(&mol("CCC(=O)NC")), 1);
        assert_eq!(count_rotatable_bonds(&mol("c1ccccc1-c1ccccc1")), 1);
    }

    #[test]
    fn aromatic_fraction() {
        assert_eq!(aromatic_proportion(&mol("c1ccccc1")), 1.0);
        assert_eq!(aromatic_proportion(&mol("CCO")), 0.0);
        assert!((aromatic_proportion(&mol("Cc1ccccc1")) - 6.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn descriptors_are_pure() {
        let m = mol("CC(=O)Oc1ccccc1C(=O)O");
        assert_eq!(molecular_weight(&m).to_bits(), molecular_weight(&m).to_bits());
        assert_eq!(count_rotatable_bonds(&m), count_rotatable_bonds(&m));
    }
}
