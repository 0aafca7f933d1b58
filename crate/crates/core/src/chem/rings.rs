//! Ring membership via bridge detection: a bond lies on a cycle iff it is
//! not a bridge of the graph.

use super::molecule::Molecule;

pub(crate) fn perceive_rings(mol: &mut Molecule) {
    let bridges = find_bridges(mol);
    for (i, bond) in mol.bonds_mut().iter_mut().enumerate() {
        bond.in_ring = !bridges[i];
    }
}

/// Flags every bridge bond, by bond index. Iterative Tarjan low-link.
pub(crate) fn find_bridges(mol: &Molecule) -> Vec<bool> {
    let n = mol.atom_count();
    let mut bridge = vec![false; mol.bonds().len()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (atom, bond used to enter, next neighbor cursor)
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (v, parent_bond, ref mut cursor)) = stack.last_mut() {
            if let Some(&(w, bi)) = mol.neighbors(v).get(*cursor) {
                *cursor += 1;
                if Some(bi) == parent_bond {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, Some(bi), 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let (Some(bi), Some(&(u, _, _))) = (parent_bond, stack.last()) {
                    low[u] = low[u].min(low[v]);
                    if low[v] > disc[u] {
                        bridge[bi] = true;
                    }
                }
            }
        }
    }
    bridge
}

/// Returns a copy of `mol` with ring flags recomputed.
pub fn perceive(mol: &Molecule) -> Molecule {
    let mut out = mol.clone();
    perceive_rings(&mut out);
    out
}
