//! Additive cLogP from an atom-type contribution table.
//!
//! The shipped table lives in `data/clogp_table.tsv`; callers can also load
//! their own with [`LogPTable::parse`].

use std::sync::OnceLock;

use super::element::Element;
use super::error::ChemError;
use super::molecule::{BondOrder, Molecule};

const BUILTIN_TABLE: &str = include_str!("../../data/clogp_table.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unsat {
    None,
    Carbon,
    Hetero,
    Any,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct MatchSpec {
    element: Option<Element>,
    aromatic: Option<bool>,
    hetero: Option<bool>,
    unsat: Option<Unsat>,
    has_hydrogens: Option<bool>,
    attached: Option<Element>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomType {
    pub type_id: String,
    spec: MatchSpec,
    pub contribution: f64,
}

/// Ordered list of atom types; the first matching row wins.
#[derive(Debug, Clone, PartialEq)]
pub struct LogPTable {
    rows: Vec<AtomType>,
}

/// What the table needs to know about an atom.
#[derive(Debug, Clone, Copy)]
struct AtomFacts {
    element: Element,
    aromatic: bool,
    hetero: bool,
    unsat: Unsat,
    has_hydrogens: bool,
    attached: Option<Element>,
}

impl MatchSpec {
    fn matches(&self, f: &AtomFacts) -> bool {
        self.element.is_none_or(|e| e == f.element)
            && self.aromatic.is_none_or(|a| a == f.aromatic)
            && self.hetero.is_none_or(|h| h == f.hetero)
            && self.has_hydrogens.is_none_or(|h| h == f.has_hydrogens)
            && self.attached.is_none_or(|e| Some(e) == f.attached)
            && self.unsat.is_none_or(|u| match u {
                Unsat::Any => f.unsat != Unsat::None,
                other => other == f.unsat,
            })
    }

    fn parse(text: &str, line: usize) -> Result<MatchSpec, ChemError> {
        let bad = |reason: String| ChemError::BadTable { line, reason };
        let mut spec = MatchSpec::default();
        for clause in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (key, value) = clause
                .split_once('=')
                .ok_or_else(|| bad(format!("clause {clause:?} lacks '='")))?;
            let flag = |v: &str| match v {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(bad(format!("expected 0 or 1 for {key}, got {v:?}"))),
            };
            let element = |v: &str| {
                Element::from_symbol(v).ok_or_else(|| bad(format!("unknown element {v:?}")))
            };
            match key {
                "elem" => spec.element = Some(element(value)?),
                "aromatic" => spec.aromatic = Some(flag(value)?),
                "hetero" => spec.hetero = Some(flag(value)?),
                "hydrogens" => {
                    spec.has_hydrogens = Some(match value {
                        "0" => false,
                        "1+" => true,
                        _ => return Err(bad(format!("expected 0 or 1+ for hydrogens, got {value:?}"))),
                    })
                }
                "unsat" => {
                    spec.unsat = Some(match value {
                        "none" => Unsat::None,
                        "carbon" => Unsat::Carbon,
                        "hetero" => Unsat::Hetero,
                        "any" => Unsat::Any,
                        _ => return Err(bad(format!("unknown unsat value {value:?}"))),
                    })
                }
                "attached" => spec.attached = Some(element(value)?),
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        Ok(spec)
    }
}

impl LogPTable {
    pub fn builtin() -> &'static LogPTable {
        static TABLE: OnceLock<LogPTable> = OnceLock::new();
        TABLE.get_or_init(|| LogPTable::parse(BUILTIN_TABLE).expect("bundled cLogP table is valid"))
    }

    /// Parses the TSV format: `#` comments, a header row, then
    /// `type_id<TAB>match_spec<TAB>contribution`.
    pub fn parse(text: &str) -> Result<LogPTable, ChemError> {
        let mut rows = Vec::new();
        let mut header_seen = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 3 {
                return Err(ChemError::BadTable {
                    line,
                    reason: format!("expected 3 columns, found {}", cols.len()),
                });
            }
            if !header_seen {
                header_seen = true;
                if cols == ["type_id", "match_spec", "contribution"] {
                    continue;
                }
            }
            let contribution = cols[2].trim().parse::<f64>().map_err(|e| ChemError::BadTable {
                line,
                reason: e.to_string(),
            })?;
            rows.push(AtomType {
                type_id: cols[0].to_string(),
                spec: MatchSpec::parse(cols[1], line)?,
                contribution,
            });
        }
        Ok(LogPTable { rows })
    }

    pub fn rows(&self) -> &[AtomType] {
        &self.rows
    }

    pub fn contribution(&self, type_id: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.type_id == type_id)
            .map(|r| r.contribution)
    }

    fn lookup(&self, facts: &AtomFacts) -> Option<&AtomType> {
        self.rows.iter().find(|r| r.spec.matches(facts))
    }

    /// Type id assigned to each atom, or the first untyped atom.
    pub fn assign_types(&self, mol: &Molecule) -> Result<Vec<&str>, ChemError> {
        (0..mol.atom_count())
            .map(|i| {
                self.lookup(&atom_facts(mol, i))
                    .map(|r| r.type_id.as_str())
                    .ok_or(ChemError::UntypedAtom { atom: i })
            })
            .collect()
    }

    pub fn logp(&self, mol: &Molecule) -> Result<f64, ChemError> {
        let mut total = 0.0;
        for i in 0..mol.atom_count() {
            let facts = atom_facts(mol, i);
            let row = self.lookup(&facts).ok_or(ChemError::UntypedAtom { atom: i })?;
            total += row.contribution;
            let h = mol.atom(i).hydrogen_count();
            if h > 0 {
                let hydrogen = AtomFacts {
                    element: Element::H,
                    aromatic: false,
                    hetero: false,
                    unsat: Unsat::None,
                    has_hydrogens: false,
                    attached: Some(facts.element),
                };
                let hrow = self.lookup(&hydrogen).ok_or(ChemError::UntypedAtom { atom: i })?;
                total += h as f64 * hrow.contribution;
            }
        }
        Ok(total)
    }
}

fn atom_facts(mol: &Molecule, i: usize) -> AtomFacts {
    let atom = mol.atom(i);
    let mut hetero = false;
    let mut unsat = Unsat::None;
    let mut attached = None;
    for &(w, bi) in mol.neighbors(i) {
        let other = mol.atom(w).element;
        attached.get_or_insert(other);
        if other != Element::C && other != Element::H {
            hetero = true;
        }
        let order = mol.bonds()[bi].order;
        if matches!(order, BondOrder::Double | BondOrder::Triple) {
            if other == Element::C {
                if unsat == Unsat::None {
                    unsat = Unsat::Carbon;
                }
            } else {
                unsat = Unsat::Hetero;
            }
        }
    }
    AtomFacts {
        element: atom.element,
        aromatic: atom.aromatic,
        hetero,
        unsat,
        has_hydrogens: atom.hydrogen_count() > 0,
        // only explicit hydrogen nodes are typed by their host
        attached: if atom.element == Element::H { attached } else { None },
    }
}

/// cLogP with the bundled table.
pub fn crippen_logp(mol: &Molecule) -> Result<f64, ChemError> {
    LogPTable::builtin().logp(mol)
}
