//! The supported element table.

use std::fmt;

/// Chemical elements accepted by the SMILES engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    H,
    B,
    C,
    N,
    O,
    F,
    P,
    S,
    Cl,
    Br,
    I,
}

/// Standard atomic weight of hydrogen, used for implicit hydrogens.
pub const HYDROGEN_WEIGHT: f64 = 1.008;

impl Element {
    pub const ALL: [Element; 11] = [
        Element::H,
        Element::B,
        Element::C,
        Element::N,
        Element::O,
        Element::F,
        Element::P,
        Element::S,
        Element::Cl,
        Element::Br,
        Element::I,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Element::H => "H",
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::F => "F",
            Element::P => "P",
            Element::S => "S",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<Element> {
        Element::ALL.into_iter().find(|e| e.symbol() == symbol)
    }

    pub fn atomic_number(self) -> u8 {
        match self {
            Element::H => 1,
            Element::B => 5,
            Element::C => 6,
            Element::N => 7,
            Element::O => 8,
            Element::F => 9,
            Element::P => 15,
            Element::S => 16,
            Element::Cl => 17,
            Element::Br => 35,
            Element::I => 53,
        }
    }

    /// Standard atomic weight in daltons.
    pub fn atomic_weight(self) -> f64 {
        match self {
            Element::H => HYDROGEN_WEIGHT,
            Element::B => 10.81,
            Element::C => 12.011,
            Element::N => 14.007,
            Element::O => 15.999,
            Element::F => 18.998,
            Element::P => 30.974,
            Element::S => 32.06,
            Element::Cl => 35.45,
            Element::Br => 79.904,
            Element::I => 126.904,
        }
    }

    /// Allowed valences for the neutral atom, ascending.
    pub fn default_valences(self) -> &'static [u8] {
        match self {
            Element::H => &[1],
            Element::B => &[3],
            Element::C => &[4],
            Element::N | Element::P => &[3, 5],
            Element::O => &[2],
            Element::S => &[2, 4, 6],
            Element::F | Element::Cl | Element::Br | Element::I => &[1],
        }
    }

    /// Whether the element may be written without brackets.
    pub fn organic_subset(self) -> bool {
        !matches!(self, Element::H)
    }

    /// Whether a lowercase (aromatic) spelling exists for the element.
    pub fn can_be_aromatic(self) -> bool {
        matches!(
            self,
            Element::B | Element::C | Element::N | Element::O | Element::P | Element::S
        )
    }

    pub fn is_halogen(self) -> bool {
        matches!(self, Element::F | Element::Cl | Element::Br | Element::I)
    }

    fn valence_electrons(self) -> i32 {
        match self {
            Element::H => 1,
            Element::B => 3,
            Element::C => 4,
            Element::N | Element::P => 5,
            Element::O | Element::S => 6,
            Element::F | Element::Cl | Element::Br | Element::I => 7,
        }
    }

    fn expanded_octet(self) -> bool {
        matches!(
            self,
            Element::P | Element::S | Element::Cl | Element::Br | Element::I
        )
    }

    /// Allowed valences once a formal charge is applied.
    ///
    /// A charged atom takes the valences of its isoelectronic neutral
    /// counterpart (N+ behaves like C, O- like F, C- like N).
    pub fn valences_with_charge(self, charge: i32) -> Vec<u8> {
        if charge == 0 {
            return self.default_valences().to_vec();
        }
        if self == Element::H {
            return if charge.abs() == 1 { vec![0] } else { Vec::new() };
        }
        let electrons = self.valence_electrons() - charge;
        if !(0..=8).contains(&electrons) {
            return Vec::new();
        }
        let base = if electrons >= 4 { 8 - electrons } else { electrons };
        let mut out = vec![base as u8];
        if self.expanded_octet() && base > 0 && electrons >= 5 {
            let mut v = base + 2;
            while v <= electrons {
                out.push(v as u8);
                v += 2;
            }
        }
        out
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
