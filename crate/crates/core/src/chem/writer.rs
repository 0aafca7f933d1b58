//! SMILES writer. Traversal order is driven by a per-atom rank so the same
//! routine serves both input-order output and canonical output.

use std::fmt::Write as _;

use super::molecule::{Atom, BondOrder, Molecule};

/// Writes `mol` following its input atom order.
pub fn write_smiles(mol: &Molecule) -> String {
    let ranks: Vec<usize> = (0..mol.atom_count()).collect();
    write_ranked(mol, &ranks)
}

struct Closure {
    partner: usize,
    order: BondOrder,
}

/// Writes `mol` starting from the lowest-ranked atom and visiting neighbors
/// in ascending rank.
pub(crate) fn write_ranked(mol: &Molecule, ranks: &[usize]) -> String {
    let n = mol.atom_count();
    let start = (0..n).min_by_key(|&i| ranks[i]).expect("molecule has atoms");

    let sorted_neighbors: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|i| {
            let mut nb = mol.neighbors(i).to_vec();
            nb.sort_by_key(|&(a, _)| ranks[a]);
            nb
        })
        .collect();

    // DFS to fix the spanning tree and the ring-closure (back) edges.
    let mut preorder = vec![usize::MAX; n];
    let mut on_stack = vec![false; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut opens: Vec<Vec<Closure>> = (0..n).map(|_| Vec::new()).collect();
    let mut closes: Vec<Vec<Closure>> = (0..n).map(|_| Vec::new()).collect();
    let mut counter = 0;
    let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(start, None, 0)];
    preorder[start] = counter;
    counter += 1;
    on_stack[start] = true;
    while let Some(&mut (v, parent, ref mut cursor)) = stack.last_mut() {
        let Some(&(w, bi)) = sorted_neighbors[v].get(*cursor) else {
            on_stack[v] = false;
            stack.pop();
            continue;
        };
        *cursor += 1;
        if Some(w) == parent {
            continue;
        }
        if preorder[w] == usize::MAX {
            preorder[w] = counter;
            counter += 1;
            on_stack[w] = true;
            children[v].push(w);
            stack.push((w, Some(v), 0));
        } else if on_stack[w] {
            let order = mol.bonds()[bi].order;
            opens[w].push(Closure { partner: v, order });
            closes[v].push(Closure { partner: w, order });
        }
    }
    for list in &mut opens {
        list.sort_by_key(|c| preorder[c.partner]);
    }

    let mut out = String::new();
    let mut digits: Vec<Option<(usize, usize)>> = Vec::new();
    emit(mol, start, &children, &opens, &closes, &mut digits, &mut out);
    out
}

fn emit(
    mol: &Molecule,
    start: usize,
    children: &[Vec<usize>],
    opens: &[Vec<Closure>],
    closes: &[Vec<Closure>],
    digits: &mut Vec<Option<(usize, usize)>>,
    out: &mut String,
) {
    enum Step {
        Atom(usize, Option<usize>),
        Text(&'static str),
    }
    let mut work = vec![Step::Atom(start, None)];
    while let Some(step) = work.pop() {
        let (v, parent) = match step {
            Step::Text(t) => {
                out.push_str(t);
                continue;
            }
            Step::Atom(v, parent) => (v, parent),
        };
        if let Some(p) = parent {
            push_bond(mol, p, v, mol.bond_between(p, v).unwrap().order, out);
        }
        push_atom(mol.atom(v), mol, v, out);

        // closures first so their digits can be reused by openings here
        for c in &closes[v] {
            let slot = digits
                .iter()
                .position(|d| *d == Some((c.partner, v)))
                .expect("ring opened before closing");
            digits[slot] = None;
            push_digit(slot + 1, out);
        }
        for c in &opens[v] {
            let slot = match digits.iter().position(Option::is_none) {
                Some(s) => s,
                None => {
                    digits.push(None);
                    digits.len() - 1
                }
            };
            digits[slot] = Some((v, c.partner));
            push_bond(mol, v, c.partner, c.order, out);
            push_digit(slot + 1, out);
        }

        let kids = &children[v];
        if let Some((&last, rest)) = kids.split_last() {
            work.push(Step::Atom(last, Some(v)));
            for &k in rest.iter().rev() {
                work.push(Step::Text(")"));
                work.push(Step::Atom(k, Some(v)));
                work.push(Step::Text("("));
            }
        }
    }
}

fn push_digit(d: usize, out: &mut String) {
    if d < 10 {
        let _ = write!(out, "{d}");
    } else {
        let _ = write!(out, "%{d:02}");
    }
}

fn push_bond(mol: &Molecule, a: usize, b: usize, order: BondOrder, out: &mut String) {
    let both_aromatic = mol.atom(a).aromatic && mol.atom(b).aromatic;
    match order {
        BondOrder::Single if both_aromatic => out.push('-'),
        BondOrder::Single | BondOrder::Aromatic => {}
        BondOrder::Double => out.push('='),
        BondOrder::Triple => out.push('#'),
    }
}

fn push_atom(atom: &Atom, mol: &Molecule, idx: usize, out: &mut String) {
    let symbol = atom.element.symbol();
    let written = if atom.aromatic {
        symbol.to_ascii_lowercase()
    } else {
        symbol.to_string()
    };
    let needs_bracket = atom.formal_charge != 0
        || atom.isotope.is_some()
        || !atom.element.organic_subset()
        || super::molecule::implicit_hydrogens(atom.element, atom.aromatic, mol.bond_profile(idx))
            != Some(atom.hydrogen_count());
    if !needs_bracket {
        out.push_str(&written);
        return;
    }
    out.push('[');
    if let Some(iso) = atom.isotope {
        let _ = write!(out, "{iso}");
    }
    out.push_str(&written);
    match atom.hydrogen_count() {
        0 => {}
        1 => out.push('H'),
        h => {
            let _ = write!(out, "H{h}");
        }
    }
    match atom.formal_charge {
        0 => {}
        1 => out.push('+'),
        -1 => out.push('-'),
        q if q > 0 => {
            let _ = write!(out, "+{q}");
        }
        q => {
            let _ = write!(out, "-{}", -q);
        }
    }
    out.push(']');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::{is_isomorphic, parse_smiles};

    fn round_trip(s: &str) -> String {
        let m = parse_smiles(s).unwrap();
        let w = write_smiles(&m);
        let back = parse_smiles(&w).unwrap_or_else(|e| panic!("{s} -> {w}: {e}"));
        assert!(is_isomorphic(&m, &back), "{s} -> {w}");
        w
    }

    #[test]
    fn single_atom() {
        assert_eq!(round_trip("C"), "C");
    }

    #[test]
    fn simple_chains_and_rings() {
        round_trip("CCO");
        let w = round_trip("C1CC1");
        let m = parse_smiles(&w).unwrap();
        assert_eq!((m.atom_count(), m.bonds().len()), (3, 3));
    }

    #[test]
    fn tricky_inputs() {
        for s in [
            "c1ccccc1-c1ccccc1",
            "c1cc[nH]c1",
            "[NH4+]",
            "[13CH4]",
            "OC(=O)C#N",
            "C12CC1CC2",
            "C1CC2CCC1CC2",
            "CC(C)(C)c1ccc2c(c1)OCO2",
            "[O-][N+](=O)c1ccccc1",
            "C%11CCCCC%11",
            "[H][H]",
        ] {
            round_trip(s);
        }
    }
}
