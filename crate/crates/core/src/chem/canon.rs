//! Canonical SMILES.
//!
//! Atoms are ranked by iterative neighborhood refinement. Remaining ties are
//! broken by branching over every member of the first tied class and keeping
//! the lexicographically smallest output, so symmetric atoms cannot leak
//! input order into the result. A leaf budget bounds the search on highly
//! symmetric graphs.

use super::molecule::Molecule;
use super::writer::write_ranked;

const LEAF_BUDGET: usize = 256;

pub fn canonical_smiles(mol: &Molecule) -> String {
    let initial = initial_ranks(mol);
    let refined = refine(mol, initial);
    let mut budget = LEAF_BUDGET;
    search(mol, refined, &mut budget)
}

/// Dense ranks from per-atom invariants.
fn initial_ranks(mol: &Molecule) -> Vec<usize> {
    let keys: Vec<_> = (0..mol.atom_count())
        .map(|i| {
            let a = mol.atom(i);
            let ring_bonds = mol
                .neighbors(i)
                .iter()
                .filter(|&&(_, bi)| mol.bonds()[bi].in_ring)
                .count();
            (
                mol.degree(i),
                a.element.atomic_number(),
                a.aromatic,
                a.formal_charge,
                a.hydrogen_count(),
                a.isotope.unwrap_or(0),
                ring_bonds,
            )
        })
        .collect();
    dense_rank(&keys)
}

fn dense_rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect()
}

fn class_count(ranks: &[usize]) -> usize {
    let mut r = ranks.to_vec();
    r.sort_unstable();
    r.dedup();
    r.len()
}

/// Refines ranks by the sorted multiset of (neighbor rank, bond order)
/// until the partition stops splitting.
fn refine(mol: &Molecule, mut ranks: Vec<usize>) -> Vec<usize> {
    let mut classes = class_count(&ranks);
    loop {
        let keys: Vec<(usize, Vec<(usize, u32)>)> = (0..mol.atom_count())
            .map(|i| {
                let mut nb: Vec<(usize, u32)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(w, bi)| (ranks[w], mol.bonds()[bi].order.half_units()))
                    .collect();
                nb.sort_unstable();
                (ranks[i], nb)
            })
            .collect();
        let next = dense_rank(&keys);
        let next_classes = class_count(&next);
        if next_classes == classes {
            return ranks;
        }
        ranks = next;
        classes = next_classes;
    }
}

fn search(mol: &Molecule, ranks: Vec<usize>, budget: &mut usize) -> String {
    let n = ranks.len();
    let mut counts = vec![0usize; n];
    for &r in &ranks {
        counts[r] += 1;
    }
    let Some(tied) = (0..n).find(|&r| counts[r] > 1) else {
        *budget = budget.saturating_sub(1);
        return write_ranked(mol, &ranks);
    };

    let members: Vec<usize> = (0..n).filter(|&i| ranks[i] == tied).collect();
    let mut best: Option<String> = None;
    for (k, &chosen) in members.iter().enumerate() {
        if k > 0 && *budget == 0 {
            break;
        }
        // chosen atom keeps the lower slot, the rest of its class moves up
        let split: Vec<usize> = (0..n)
            .map(|i| {
                if ranks[i] > tied || (ranks[i] == tied && i != chosen) {
                    ranks[i] * 2 + 1
                } else {
                    ranks[i] * 2
                }
            })
            .collect();
        let split = refine(mol, dense_rank(&split));
        let candidate = search(mol, split, budget);
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
    }
    best.expect("at least one member explored")
}
