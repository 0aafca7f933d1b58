//! Molecular graph: atoms, bonds and the validated [`Molecule`] container.

use super::element::Element;
use super::error::ChemError;

/// Upper bound on graph size accepted anywhere in the toolkit.
pub const MAX_ATOMS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Bond order in half-units (aromatic counts 1.5).
    pub fn half_units(self) -> u32 {
        match self {
            BondOrder::Single => 2,
            BondOrder::Double => 4,
            BondOrder::Triple => 6,
            BondOrder::Aromatic => 3,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            BondOrder::Single => '-',
            BondOrder::Double => '=',
            BondOrder::Triple => '#',
            BondOrder::Aromatic => ':',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub element: Element,
    pub aromatic: bool,
    pub formal_charge: i8,
    /// Hydrogen count written inside a bracket atom.
    pub explicit_h: Option<u8>,
    pub isotope: Option<u16>,
    pub(crate) bracket: bool,
    pub(crate) hydrogens: u8,
}

impl Atom {
    /// An organic-subset atom whose hydrogens are derived from valence.
    pub fn organic(element: Element, aromatic: bool) -> Atom {
        Atom {
            element,
            aromatic,
            formal_charge: 0,
            explicit_h: None,
            isotope: None,
            bracket: false,
            hydrogens: 0,
        }
    }

    /// A bracket atom with its hydrogen count, charge and isotope spelled out.
    pub fn bracket(
        element: Element,
        aromatic: bool,
        hydrogens: u8,
        formal_charge: i8,
        isotope: Option<u16>,
    ) -> Atom {
        Atom {
            element,
            aromatic,
            formal_charge,
            explicit_h: Some(hydrogens),
            isotope,
            bracket: true,
            hydrogens: 0,
        }
    }

    pub fn is_bracket(&self) -> bool {
        self.bracket
    }

    /// Total attached hydrogens, implicit or explicit.
    pub fn hydrogen_count(&self) -> u8 {
        self.hydrogens
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    pub in_ring: bool,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

/// A connected, valence-checked molecular graph.
///
/// Construction goes through [`Molecule::new`], which assigns hydrogen
/// counts and ring membership. Instances are immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Per atom: (neighbor, bond index).
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Molecule {
    pub fn new(mut atoms: Vec<Atom>, bonds: Vec<(usize, usize, BondOrder)>) -> Result<Self, ChemError> {
        if atoms.is_empty() {
            return Err(ChemError::EmptyInput);
        }
        if atoms.len() > MAX_ATOMS {
            return Err(ChemError::TooManyAtoms { count: atoms.len() });
        }
        for atom in &atoms {
            if atom.aromatic && !atom.element.can_be_aromatic() {
                return Err(ChemError::InvalidAromatic {
                    symbol: atom.element.symbol().to_string(),
                });
            }
        }

        let n = atoms.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut out_bonds = Vec::with_capacity(bonds.len());
        for (a, b, order) in bonds {
            if a >= n || b >= n || a == b {
                return Err(ChemError::InvalidBond { a, b });
            }
            if adjacency[a].iter().any(|&(nb, _)| nb == b) {
                return Err(ChemError::DuplicateBond { a, b });
            }
            if order == BondOrder::Aromatic && !(atoms[a].aromatic && atoms[b].aromatic) {
                return Err(ChemError::InvalidBond { a, b });
            }
            let idx = out_bonds.len();
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            out_bonds.push(Bond {
                a,
                b,
                order,
                in_ring: false,
            });
            adjacency[a].push((b, idx));
            adjacency[b].push((a, idx));
        }

        for (i, atom) in atoms.iter_mut().enumerate() {
            let p = profile(&adjacency[i], &out_bonds);
            atom.hydrogens = assign_hydrogens(atom, p).ok_or(ChemError::ValenceViolation { atom: i })?;
        }

        let mut mol = Molecule {
            atoms,
            bonds: out_bonds,
            adjacency,
        };
        if !mol.is_connected() {
            return Err(ChemError::MultipleFragments { position: None });
        }
        super::rings::perceive_rings(&mut mol);
        Ok(mol)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.element != Element::H).count()
    }

    /// Neighbors of `atom` as (neighbor index, bond index) pairs.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.adjacency[a]
            .iter()
            .find(|&&(nb, _)| nb == b)
            .map(|&(_, bi)| &self.bonds[bi])
    }

    /// Bond-order sum of `atom` in half-units.
    pub fn bond_half_units(&self, atom: usize) -> u32 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, bi)| self.bonds[bi].order.half_units())
            .sum()
    }

    /// Raw graph with hydrogen bookkeeping stripped, suitable for editing
    /// and feeding back into [`Molecule::new`].
    pub fn to_parts(&self) -> (Vec<Atom>, Vec<(usize, usize, BondOrder)>) {
        let atoms = self.atoms.to_vec();
        let bonds = self.bonds.iter().map(|b| (b.a, b.b, b.order)).collect();
        (atoms, bonds)
    }

    /// The same molecule with atom `i` moved to position `order[i]`.
    pub fn renumbered(&self, order: &[usize]) -> Molecule {
        assert_eq!(order.len(), self.atoms.len(), "permutation length mismatch");
        let mut atoms = vec![None; self.atoms.len()];
        for (old, &new) in order.iter().enumerate() {
            atoms[new] = Some(self.atoms[old].clone());
        }
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|a| a.expect("order is not a permutation"))
            .collect();
        let bonds = self
            .bonds
            .iter()
            .map(|b| (order[b.a], order[b.b], b.order))
            .collect();
        Molecule::new(atoms, bonds).expect("renumbering preserves validity")
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.atoms.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(a) = stack.pop() {
            for &(nb, _) in &self.adjacency[a] {
                if !seen[nb] {
                    seen[nb] = true;
                    count += 1;
                    stack.push(nb);
                }
            }
        }
        count == self.atoms.len()
    }

    pub(crate) fn bonds_mut(&mut self) -> &mut [Bond] {
        &mut self.bonds
    }
}

/// Implicit hydrogens an unbracketed atom would receive.
pub(crate) fn implicit_hydrogens(element: Element, aromatic: bool, profile: BondProfile) -> Option<u8> {
    assign_hydrogens(&Atom::organic(element, aromatic), profile)
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct BondProfile {
    aromatic: u32,
    /// Order sum of the non-aromatic bonds.
    other: u32,
    multiple: bool,
}

fn profile(adjacent: &[(usize, usize)], bonds: &[Bond]) -> BondProfile {
    let mut p = BondProfile::default();
    for &(_, bi) in adjacent {
        match bonds[bi].order {
            BondOrder::Aromatic => p.aromatic += 1,
            o => {
                p.other += o.half_units() / 2;
                p.multiple |= o != BondOrder::Single;
            }
        }
    }
    p
}

/// Hydrogen count for an atom, or `None` when no allowed valence fits.
///
/// Aromatic bonds count one each. An aromatic atom then sits either at its
/// valence (lone-pair donor such as pyrrole N or furan O) or one unit short,
/// the missing unit being its share of a ring double bond. Aromatic carbon
/// has no lone pair, so it must be one short unless it carries an
/// exocyclic double bond.
fn assign_hydrogens(atom: &Atom, p: BondProfile) -> Option<u8> {
    let valences = atom.element.valences_with_charge(atom.formal_charge as i32);
    let used = p.aromatic + p.other;
    if atom.aromatic {
        let (h, pi) = if atom.bracket {
            let h = atom.explicit_h.unwrap_or(0);
            let total = used + h as u32;
            let v = valences.iter().map(|&v| v as u32).find(|&v| v >= total)?;
            match v - total {
                0 => (h, false),
                1 => (h, true),
                _ => return None,
            }
        } else {
            let v = valences.iter().map(|&v| v as u32).find(|&v| v >= used)?;
            if v == used {
                (0, false)
            } else {
                ((v - used - 1) as u8, true)
            }
        };
        let carbon_like = atom.element == Element::C && atom.formal_charge == 0;
        return (pi || p.multiple || !carbon_like).then_some(h);
    }
    if atom.bracket {
        let h = atom.explicit_h.unwrap_or(0);
        return valences.contains(&((used + h as u32) as u8)).then_some(h);
    }
    valences
        .iter()
        .map(|&v| v as u32)
        .find(|&v| v >= used)
        .map(|v| (v - used) as u8)
}

impl Molecule {
    pub(crate) fn bond_profile(&self, atom: usize) -> BondProfile {
        profile(&self.adjacency[atom], &self.bonds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn implicit_hydrogens_follow_valence_table() {
        let c = || Atom::organic(Element::C, false);
        let m = Molecule::new(
            vec![c(), c(), Atom::organic(Element::O, false)],
            vec![(0, 1, BondOrder::Single), (1, 2, BondOrder::Single)],
        )
        .unwrap();
        let hs: Vec<u8> = m.atoms().iter().map(|a| a.hydrogen_count()).collect();
        assert_eq!(hs, vec![3, 2, 1]);
    }

    #[test]
    fn hypervalent_sulfur_picks_next_valence() {
        // S with three single bonds -> valence 4 -> one implicit H
        let atoms = vec![
            Atom::organic(Element::S, false),
            Atom::organic(Element::C, false),
            Atom::organic(Element::C, false),
            Atom::organic(Element::C, false),
        ];
        let m = Molecule::new(
            atoms,
            vec![
                (0, 1, BondOrder::Single),
                (0, 2, BondOrder::Single),
                (0, 3, BondOrder::Single),
            ],
        )
        .unwrap();
        assert_eq!(m.atom(0).hydrogen_count(), 1);
    }

    #[test]
    fn rejects_overvalent_carbon() {
        let atoms = vec![Atom::organic(Element::C, false), Atom::organic(Element::O, false)];
        assert!(Molecule::new(atoms, vec![(0, 1, BondOrder::Triple)]).is_err());
    }

    #[test]
    fn rejects_disconnected_graph() {
        let atoms = vec![Atom::organic(Element::C, false), Atom::organic(Element::C, false)];
        assert!(matches!(
            Molecule::new(atoms, vec![]),
            Err(ChemError::MultipleFragments { .. })
        ));
    }

    #[test]
    fn rejects_duplicate_bond() {
        let atoms = vec![Atom::organic(Element::C, false), Atom::organic(Element::C, false)];
        assert!(matches!(
            Molecule::new(atoms, vec![(0, 1, BondOrder::Single), (1, 0, BondOrder::Single)]),
            Err(ChemError::DuplicateBond { .. })
        ));
    }
}
