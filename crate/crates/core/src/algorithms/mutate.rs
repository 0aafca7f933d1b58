//! Single-edit graph mutations that keep molecules valence-valid.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::chem::{Atom, BondOrder, Element, Molecule};

use super::AlgorithmError;

const MAX_ATTEMPTS: usize = 50;

const SP3_SWAP: [Element; 3] = [Element::C, Element::N, Element::O];
const HALOGENS: [Element; 4] = [Element::F, Element::Cl, Element::Br, Element::I];
const APPENDABLE: [Element; 4] = [Element::C, Element::N, Element::O, Element::F];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edit {
    Substitute,
    HalogenSwap,
    ToggleBond,
    Append,
    Delete,
}

const EDITS: [Edit; 5] = [
    Edit::Substitute,
    Edit::HalogenSwap,
    Edit::ToggleBond,
    Edit::Append,
    Edit::Delete,
];

type Parts = (Vec<Atom>, Vec<(usize, usize, BondOrder)>);

fn is_sp3_site(mol: &Molecule, i: usize) -> bool {
    let a = mol.atom(i);
    !a.aromatic
        && !a.is_bracket()
        && SP3_SWAP.contains(&a.element)
        && mol
            .neighbors(i)
            .iter()
            .all(|&(_, bi)| mol.bonds()[bi].order == BondOrder::Single)
}

fn pick_other<R: Rng + ?Sized>(set: &[Element], current: Element, rng: &mut R) -> Element {
    let others: Vec<Element> = set.iter().copied().filter(|&e| e != current).collect();
    *others.choose(rng).expect("sets have at least two members")
}

/// Proposes one edit; `None` when the chosen edit has no applicable site.
fn propose<R: Rng + ?Sized>(mol: &Molecule, edit: Edit, rng: &mut R) -> Option<Parts> {
    let (mut atoms, mut bonds) = mol.to_parts();
    let n = atoms.len();
    match edit {
        Edit::Substitute => {
            let sites: Vec<usize> = (0..n).filter(|&i| is_sp3_site(mol, i)).collect();
            let &i = sites.choose(rng)?;
            atoms[i] = Atom::organic(pick_other(&SP3_SWAP, atoms[i].element, rng), false);
        }
        Edit::HalogenSwap => {
            let sites: Vec<usize> = (0..n)
                .filter(|&i| !atoms[i].is_bracket() && atoms[i].element.is_halogen())
                .collect();
            let &i = sites.choose(rng)?;
            atoms[i] = Atom::organic(pick_other(&HALOGENS, atoms[i].element, rng), false);
        }
        Edit::ToggleBond => {
            let sites: Vec<usize> = (0..bonds.len())
                .filter(|&b| {
                    let (x, y, order) = bonds[b];
                    matches!(order, BondOrder::Single | BondOrder::Double)
                        && !atoms[x].aromatic
                        && !atoms[y].aromatic
                })
                .collect();
            let &b = sites.choose(rng)?;
            bonds[b].2 = match bonds[b].2 {
                BondOrder::Single => BondOrder::Double,
                _ => BondOrder::Single,
            };
        }
        Edit::Append => {
            let i = rng.random_range(0..n);
            let element = *APPENDABLE.choose(rng).expect("non-empty");
            atoms.push(Atom::organic(element, false));
            bonds.push((i, n, BondOrder::Single));
        }
        Edit::Delete => {
            if mol.heavy_atom_count() < 3 {
                return None;
            }
            let terminals: Vec<usize> = (0..n).filter(|&i| mol.degree(i) == 1).collect();
            let &t = terminals.choose(rng)?;
            atoms.remove(t);
            let shift = |x: usize| if x > t { x - 1 } else { x };
            bonds = bonds
                .into_iter()
                .filter(|&(a, b, _)| a != t && b != t)
                .map(|(a, b, o)| (shift(a), shift(b), o))
                .collect();
        }
    }
    Some((atoms, bonds))
}

/// Applies exactly one random edit and returns the valence-valid result.
///
/// Edits: C/N/O substitution on saturated non-aromatic atoms, halogen
/// swaps, single/double bond toggles, appending a terminal C, N, O or F,
/// and deleting a terminal atom while at least two heavy atoms remain.
/// Invalid proposals are retried up to 50 times.
pub fn mutate_molecule<R: Rng + ?Sized>(mol: &Molecule, rng: &mut R) -> Result<Molecule, AlgorithmError> {
    for _ in 0..MAX_ATTEMPTS {
        let edit = *EDITS.choose(rng).expect("non-empty");
        let Some((atoms, bonds)) = propose(mol, edit, rng) else {
            continue;
        };
        // aromatic bonds stay aromatic, so ring perception is unaffected
        if let Ok(m) = Molecule::new(atoms, bonds) {
            return Ok(m);
        }
    }
    Err(AlgorithmError::MutationStalled { attempts: MAX_ATTEMPTS })
}
