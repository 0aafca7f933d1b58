//! Exact graph-isomorphism test by backtracking. Independent of the
//! canonical ranking, so it can serve as an oracle for it.

use super::molecule::Molecule;

type Label = (u8, bool, i8, u8, usize, Option<u16>);

fn label(mol: &Molecule, i: usize) -> Label {
    let a = mol.atom(i);
    (
        a.element.atomic_number(),
        a.aromatic,
        a.formal_charge,
        a.hydrogen_count(),
        mol.degree(i),
        a.isotope,
    )
}

/// True when the two molecules have the same labelled graph: element,
/// aromaticity, charge, hydrogen count, isotope and bond orders.
pub fn is_isomorphic(a: &Molecule, b: &Molecule) -> bool {
    let n = a.atom_count();
    if n != b.atom_count() || a.bonds().len() != b.bonds().len() {
        return false;
    }
    let mut la: Vec<Label> = (0..n).map(|i| label(a, i)).collect();
    let mut lb: Vec<Label> = (0..n).map(|i| label(b, i)).collect();
    let (labels_a, labels_b) = (la.clone(), lb.clone());
    la.sort();
    lb.sort();
    if la != lb {
        return false;
    }

    // BFS order over `a`, each atom after the first has an earlier neighbor.
    let mut order = Vec::with_capacity(n);
    let mut anchor = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    order.push(0);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &(w, _) in a.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                anchor[w] = v;
                order.push(w);
            }
        }
    }

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(a, b, &labels_a, &labels_b, &order, &anchor, 0, &mut map, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    a: &Molecule,
    b: &Molecule,
    labels_a: &[Label],
    labels_b: &[Label],
    order: &[usize],
    anchor: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    let candidates: Vec<usize> = if depth == 0 {
        (0..b.atom_count()).collect()
    } else {
        b.neighbors(map[anchor[v]]).iter().map(|&(w, _)| w).collect()
    };
    for c in candidates {
        if used[c] || labels_a[v] != labels_b[c] {
            continue;
        }
        let consistent = a.neighbors(v).iter().all(|&(w, bi)| {
            if map[w] == usize::MAX {
                return true;
            }
            match b.bond_between(c, map[w]) {
                Some(bond) => bond.order == a.bonds()[bi].order,
                None => false,
            }
        });
        if !consistent {
            continue;
        }
        map[v] = c;
        used[c] = true;
        if extend(a, b, labels_a, labels_b, order, anchor, depth + 1, map, used) {
            return true;
        }
        map[v] = usize::MAX;
        used[c] = false;
    }
    false
}
