//! SMILES reader.
//!
//! Supports organic-subset atoms, bracket atoms (isotope, hydrogen count,
//! charge, atom class), the bond symbols `- = # :`, branches and ring
//! closures (`1`-`9`, `%nn`). Stereo markers `/ \ @` are accepted and
//! dropped. A `.` is rejected: only single-fragment molecules are modelled.

use std::collections::BTreeMap;

use super::element::Element;
use super::error::ChemError;
use super::molecule::{Atom, BondOrder, Molecule, MAX_ATOMS};

pub fn parse_smiles(text: &str) -> Result<Molecule, ChemError> {
    if text.is_empty() {
        return Err(ChemError::EmptyInput);
    }
    Parser::new(text).run()
}

struct OpenRing {
    atom: usize,
    order: Option<BondOrder>,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bonds: Vec<(usize, usize, BondOrder)>,
    prev: Option<usize>,
    pending: Option<BondOrder>,
    branches: Vec<(usize, usize)>,
    rings: BTreeMap<u32, OpenRing>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            atoms: Vec::new(),
            bonds: Vec::new(),
            prev: None,
            pending: None,
            branches: Vec::new(),
            rings: BTreeMap::new(),
        }
    }

    fn run(mut self) -> Result<Molecule, ChemError> {
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            match c {
                b'(' => {
                    let Some(prev) = self.prev else {
                        return Err(ChemError::UnbalancedParenthesis { position: self.pos });
                    };
                    if self.pending.is_some() {
                        return Err(self.unexpected());
                    }
                    self.branches.push((prev, self.pos));
                    self.pos += 1;
                }
                b')' => {
                    let Some((atom, _)) = self.branches.pop() else {
                        return Err(ChemError::UnbalancedParenthesis { position: self.pos });
                    };
                    if self.pending.is_some() {
                        return Err(self.unexpected());
                    }
                    self.prev = Some(atom);
                    self.pos += 1;
                }
                b'-' | b'/' | b'\\' => self.set_bond(BondOrder::Single)?,
                b'=' => self.set_bond(BondOrder::Double)?,
                b'#' => self.set_bond(BondOrder::Triple)?,
                b':' => self.set_bond(BondOrder::Aromatic)?,
                b'.' => return Err(ChemError::MultipleFragments { position: Some(self.pos) }),
                b'0'..=b'9' => {
                    let digit = (c - b'0') as u32;
                    self.pos += 1;
                    self.ring_closure(digit)?;
                }
                b'%' => {
                    let start = self.pos;
                    let digits = self.bytes.get(self.pos + 1..self.pos + 3);
                    match digits {
                        Some(&[a, b]) if a.is_ascii_digit() && b.is_ascii_digit() => {
                            self.pos += 3;
                            self.ring_closure(((a - b'0') * 10 + (b - b'0')) as u32)?;
                        }
                        _ => return Err(ChemError::UnexpectedChar { position: start, ch: '%' }),
                    }
                }
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.add_atom(atom)?;
                }
                _ => {
                    let atom = self.organic_atom()?;
                    self.add_atom(atom)?;
                }
            }
        }
        if let Some(&(_, position)) = self.branches.last() {
            return Err(ChemError::UnbalancedParenthesis { position });
        }
        if let Some((&digit, _)) = self.rings.iter().next() {
            return Err(ChemError::UnclosedRing { digit });
        }
        if self.pending.is_some() {
            return Err(ChemError::UnexpectedChar {
                position: self.bytes.len() - 1,
                ch: self.bytes[self.bytes.len() - 1] as char,
            });
        }
        if self.atoms.is_empty() {
            return Err(ChemError::EmptyInput);
        }
        Molecule::new(self.atoms, self.bonds)
    }

    fn unexpected(&self) -> ChemError {
        ChemError::UnexpectedChar {
            position: self.pos,
            ch: self.bytes[self.pos] as char,
        }
    }

    fn set_bond(&mut self, order: BondOrder) -> Result<(), ChemError> {
        if self.prev.is_none() || self.pending.is_some() {
            return Err(self.unexpected());
        }
        self.pending = Some(order);
        self.pos += 1;
        Ok(())
    }

    fn default_order(&self, a: usize, b: usize) -> BondOrder {
        if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn add_atom(&mut self, atom: Atom) -> Result<(), ChemError> {
        if self.atoms.len() >= MAX_ATOMS {
            return Err(ChemError::TooManyAtoms { count: self.atoms.len() + 1 });
        }
        let idx = self.atoms.len();
        self.atoms.push(atom);
        if let Some(prev) = self.prev {
            let order = self.pending.take().unwrap_or_else(|| self.default_order(prev, idx));
            self.bonds.push((prev, idx, order));
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn ring_closure(&mut self, digit: u32) -> Result<(), ChemError> {
        let Some(atom) = self.prev else {
            return Err(ChemError::UnexpectedChar {
                position: self.pos - 1,
                ch: self.bytes[self.pos - 1] as char,
            });
        };
        let order = self.pending.take();
        match self.rings.remove(&digit) {
            None => {
                self.rings.insert(digit, OpenRing { atom, order });
            }
            Some(open) => {
                if open.atom == atom {
                    return Err(ChemError::InvalidBond { a: atom, b: atom });
                }
                let order = match (open.order, order) {
                    (Some(x), Some(y)) if x != y => {
                        return Err(ChemError::InvalidBond { a: open.atom, b: atom })
                    }
                    (Some(x), _) | (None, Some(x)) => x,
                    (None, None) => self.default_order(open.atom, atom),
                };
                if self
                    .bonds
                    .iter()
                    .any(|&(x, y, _)| (x, y) == (open.atom, atom) || (y, x) == (open.atom, atom))
                {
                    return Err(ChemError::DuplicateBond { a: open.atom, b: atom });
                }
                self.bonds.push((open.atom, atom, order));
            }
        }
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<Atom, ChemError> {
        let start = self.pos;
        let c = self.bytes[self.pos];
        let next = self.bytes.get(self.pos + 1).copied();
        let (element, aromatic, len) = match (c, next) {
            (b'C', Some(b'l')) => (Element::Cl, false, 2),
            (b'B', Some(b'r')) => (Element::Br, false, 2),
            (b'B', _) => (Element::B, false, 1),
            (b'C', _) => (Element::C, false, 1),
            (b'N', _) => (Element::N, false, 1),
            (b'O', _) => (Element::O, false, 1),
            (b'P', _) => (Element::P, false, 1),
            (b'S', _) => (Element::S, false, 1),
            (b'F', _) => (Element::F, false, 1),
            (b'I', _) => (Element::I, false, 1),
            (b'b', _) => (Element::B, true, 1),
            (b'c', _) => (Element::C, true, 1),
            (b'n', _) => (Element::N, true, 1),
            (b'o', _) => (Element::O, true, 1),
            (b'p', _) => (Element::P, true, 1),
            (b's', _) => (Element::S, true, 1),
            (c, _) if c.is_ascii_alphabetic() || c == b'*' => {
                return Err(ChemError::UnknownElement { position: start })
            }
            _ => return Err(self.unexpected()),
        };
        self.pos += len;
        Ok(Atom::organic(element, aromatic))
    }

    fn bracket_atom(&mut self) -> Result<Atom, ChemError> {
        let open = self.pos;
        self.pos += 1;
        let isotope = self.number().map(|n| n as u16);
        if isotope == Some(0) {
            return Err(ChemError::UnexpectedChar { position: open + 1, ch: '0' });
        }

        let sym_start = self.pos;
        let first = *self.bytes.get(self.pos).ok_or(ChemError::UnexpectedChar {
            position: open,
            ch: '[',
        })?;
        let (element, aromatic) = if first.is_ascii_lowercase() {
            let element = match first {
                b'b' => Element::B,
                b'c' => Element::C,
                b'n' => Element::N,
                b'o' => Element::O,
                b'p' => Element::P,
                b's' => Element::S,
                _ => return Err(ChemError::UnknownElement { position: sym_start }),
            };
            self.pos += 1;
            (element, true)
        } else if first.is_ascii_uppercase() {
            let two = self
                .bytes
                .get(self.pos..self.pos + 2)
                .and_then(|s| std::str::from_utf8(s).ok())
                .and_then(Element::from_symbol)
                .filter(|_| self.bytes[self.pos + 1].is_ascii_lowercase());
            if let Some(e) = two {
                self.pos += 2;
                (e, false)
            } else {
                let one = std::str::from_utf8(&self.bytes[self.pos..self.pos + 1])
                    .ok()
                    .and_then(Element::from_symbol);
                // a following lowercase letter means an unsupported two-letter symbol
                let follows_lower = self
                    .bytes
                    .get(self.pos + 1)
                    .is_some_and(|b| b.is_ascii_lowercase());
                match one {
                    Some(e) if !follows_lower => {
                        self.pos += 1;
                        (e, false)
                    }
                    _ => return Err(ChemError::UnknownElement { position: sym_start }),
                }
            }
        } else {
            return Err(ChemError::UnknownElement { position: sym_start });
        };

        let mut chiral = false;
        while self.peek() == Some(b'@') {
            self.pos += 1;
            chiral = true;
        }
        // @TH1-style chirality classes are parsed and discarded as well
        if chiral {
            let class = self.bytes.get(self.pos..self.pos + 2);
            if class.is_some_and(|c| c.iter().all(u8::is_ascii_uppercase)) {
                self.pos += 2;
                self.number();
            }
        }

        let mut hydrogens = 0u8;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            hydrogens = self.number().map(|n| n as u8).unwrap_or(1);
        }

        let mut charge: i32 = 0;
        while let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            match self.number() {
                Some(n) => charge += unit * n as i32,
                None => charge += unit,
            }
        }
        if !(-4..=4).contains(&charge) {
            return Err(ChemError::UnexpectedChar { position: self.pos - 1, ch: '+' });
        }

        if self.peek() == Some(b':') {
            self.pos += 1;
            if self.number().is_none() {
                return Err(self.unexpected());
            }
        }
        match self.peek() {
            Some(b']') => self.pos += 1,
            Some(_) => return Err(self.unexpected()),
            None => return Err(ChemError::UnexpectedChar { position: open, ch: '[' }),
        }
        Ok(Atom::bracket(element, aromatic, hydrogens, charge as i8, isotope))
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) && self.pos - start < 4 {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).ok()?.parse().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aromatic_valence() {
        for ok in [
            "c1ccccc1",
            "c1ccc2ccccc2c1",
            "c1cc[nH]c1",
            "Cn1cccc1",
            "o1cccc1",
            "s1cccc1",
            "O=c1cccc[nH]1",
            "C[n+]1ccccc1",
            "[cH-]1cccc1",
            "c1ccncc1",
            "Oc1ccccc1",
            "c1cc2ccccc2n1",
        ] {
            assert!(parse_smiles(ok).is_ok(), "{ok}");
        }
        // sp3 carbon inside an aromatic ring
        assert_eq!(parse_smiles("Oc1(O)ccccc1"), Err(ChemError::ValenceViolation { atom: 1 }));
        assert!(parse_smiles("c1ccccc1C(O)(O)").is_ok());
        assert_eq!(parse_smiles("c1cc[c]cc1"), Err(ChemError::ValenceViolation { atom: 3 }));
    }

    #[test]
    fn ethanol() {
        let m = parse_smiles("CCO").unwrap();
        assert_eq!(m.heavy_atom_count(), 3);
        assert_eq!(m.bonds().len(), 2);
        assert!(m.bonds().iter().all(|b| b.order == BondOrder::Single));
        let hs: Vec<u8> = m.atoms().iter().map(|a| a.hydrogen_count()).collect();
        assert_eq!(hs, vec![3, 2, 1]);
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse_smiles(""), Err(ChemError::EmptyInput));
    }

    #[test]
    fn unclosed_ring() {
        assert_eq!(parse_smiles("C1CC"), Err(ChemError::UnclosedRing { digit: 1 }));
    }

    #[test]
    fn benzene() {
        let m = parse_smiles("c1ccccc1").unwrap();
        assert_eq!(m.atom_count(), 6);
        assert!(m.atoms().iter().all(|a| a.aromatic && a.hydrogen_count() == 1));
        assert_eq!(m.bonds().len(), 6);
        assert!(m
            .bonds()
            .iter()
            .all(|b| b.order == BondOrder::Aromatic && b.in_ring));
    }

    #[test]
    fn error_positions() {
        assert_eq!(parse_smiles("CX"), Err(ChemError::UnknownElement { position: 1 }));
        assert_eq!(parse_smiles("C(C"), Err(ChemError::UnbalancedParenthesis { position: 1 }));
        assert_eq!(parse_smiles("CC)C"), Err(ChemError::UnbalancedParenthesis { position: 2 }));
        assert_eq!(
            parse_smiles("CC.O"),
            Err(ChemError::MultipleFragments { position: Some(2) })
        );
        assert_eq!(parse_smiles("C(=O)(=O)C"), Err(ChemError::ValenceViolation { atom: 0 }));
        assert_eq!(parse_smiles("[Xe]"), Err(ChemError::UnknownElement { position: 1 }));
    }

    #[test]
    fn brackets_and_stereo() {
        let m = parse_smiles("[NH4+]").unwrap();
        assert_eq!(m.atom(0).formal_charge, 1);
        assert_eq!(m.atom(0).hydrogen_count(), 4);

        let m = parse_smiles("[13CH3]C").unwrap();
        assert_eq!(m.atom(0).isotope, Some(13));

        let m = parse_smiles("C[C@@H](N)C(=O)O").unwrap();
        assert_eq!(m.atom(1).hydrogen_count(), 1);

        let m = parse_smiles("F/C=C/F").unwrap();
        assert_eq!(m.bonds()[1].order, BondOrder::Double);

        let m = parse_smiles("c1cc[nH]c1").unwrap();
        assert_eq!(m.atom(3).hydrogen_count(), 1);

        let m = parse_smiles("[O-]C(=O)C").unwrap();
        assert_eq!(m.atom(0).formal_charge, -1);
    }

    #[test]
    fn heteroaromatics() {
        for s in ["c1ccoc1", "c1ccsc1", "c1ccncc1", "O=c1cccc[nH]1", "c1ccc2[nH]ccc2c1"] {
            parse_smiles(s).unwrap_or_else(|e| panic!("{s}: {e}"));
        }
    }

    #[test]
    fn percent_ring_closures() {
        let m = parse_smiles("C%10CC%10").unwrap();
        assert_eq!(m.bonds().len(), 3);
        assert!(m.bonds().iter().all(|b| b.in_ring));
    }

    #[test]
    fn ring_bond_order_on_either_side() {
        let m = parse_smiles("C=1CCC1").unwrap();
        assert_eq!(m.bond_between(0, 3).unwrap().order, BondOrder::Double);
        let m = parse_smiles("C1CCC=1").unwrap();
        assert_eq!(m.bond_between(0, 3).unwrap().order, BondOrder::Double);
    }

    #[test]
    fn rejects_too_many_atoms() {
        let long = "C".repeat(MAX_ATOMS + 1);
        assert!(matches!(parse_smiles(&long), Err(ChemError::TooManyAtoms { .. })));
        assert!(parse_smiles(&"C".repeat(MAX_ATOMS)).is_ok());
    }

    #[test]
    fn dangling_bond_rejected() {
        assert!(parse_smiles("CC=").is_err());
        assert!(parse_smiles("=CC").is_err());
    }
}
