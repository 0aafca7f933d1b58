//! Property registry: named molecular property predictors, batch evaluation
//! and generation-quality metrics.

mod esol;
mod metrics;

use std::collections::BTreeMap;
use std::io;
use std::sync::Arc;

use thiserror::Error;

use crate::chem::{self, ChemError, Molecule};

pub use esol::{esol, esol_from_descriptors, EsolDescriptors};
pub use metrics::{metric_novelty, metric_uniqueness, metric_validity, MetricError};

/// Evaluators must be pure functions of the molecule.
pub type Evaluator = Arc<dyn Fn(&Molecule) -> Result<f64, ChemError> + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyDescriptor {
    pub name: String,
    pub description: String,
    pub output_unit: String,
    pub output_range: Option<(f64, f64)>,
}

impl PropertyDescriptor {
    pub fn new(name: &str, description: &str, unit: &str) -> Self {
        PropertyDescriptor {
            name: name.to_string(),
            description: description.to_string(),
            output_unit: unit.to_string(),
            output_range: None,
        }
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.output_range = Some((lo, hi));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropertyError {
    #[error("property {0:?} is already registered")]
    DuplicateName(String),
    #[error("invalid property name {0:?}: expected [a-z0-9_]+")]
    InvalidName(String),
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
    #[error(transparent)]
    Chem(#[from] ChemError),
}

/// One evaluated molecule. Failed entries keep the input string and carry
/// the error text instead of a value.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyRecord {
    pub smiles: String,
    pub property: String,
    pub value: Option<f64>,
    pub error: Option<String>,
}

impl PropertyRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

struct Entry {
    descriptor: PropertyDescriptor,
    evaluator: Evaluator,
}

/// Name-keyed property predictors.
///
/// Registration is expected during start-up from a single thread; once
/// populated the registry can be shared for concurrent lookups.
pub struct PropertyRegistry {
    entries: BTreeMap<String, Entry>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}

impl PropertyRegistry {
    pub fn empty() -> Self {
        PropertyRegistry {
            entries: BTreeMap::new(),
        }
    }

    /// Registry pre-populated with the shipped predictors.
    pub fn with_builtins() -> Self {
        let mut r = PropertyRegistry::empty();
        let builtins: Vec<(PropertyDescriptor, Evaluator)> = vec![
            (
                PropertyDescriptor::new("esol", "estimated aqueous solubility (Delaney)", "log10(mol/L)"),
                Arc::new(esol),
            ),
            (
                PropertyDescriptor::new("molecular_weight", "average molecular weight", "Da"),
                Arc::new(|m: &Molecule| Ok(chem::molecular_weight(m))),
            ),
            (
                PropertyDescriptor::new("clogp", "atom-additive octanol/water logP", "log10"),
                Arc::new(chem::crippen_logp),
            ),
            (
                PropertyDescriptor::new("rotatable_bonds", "rotatable bond count", "count"),
                Arc::new(|m: &Molecule| Ok(chem::count_rotatable_bonds(m) as f64)),
            ),
            (
                PropertyDescriptor::new("aromatic_proportion", "aromatic heavy-atom fraction", "fraction")
                    .with_range(0.0, 1.0),
                Arc::new(|m: &Molecule| Ok(chem::aromatic_proportion(m))),
            ),
        ];
        for (d, e) in builtins {
            r.register(d, e).expect("built-in names are unique");
        }
        r
    }

    pub fn register(&mut self, descriptor: PropertyDescriptor, evaluator: Evaluator) -> Result<(), PropertyError> {
        if !valid_name(&descriptor.name) {
            return Err(PropertyError::InvalidName(descriptor.name));
        }
        if self.entries.contains_key(&descriptor.name) {
            return Err(PropertyError::DuplicateName(descriptor.name));
        }
        self.entries.insert(
            descriptor.name.clone(),
            Entry {
                descriptor,
                evaluator,
            },
        );
        Ok(())
    }

    pub fn resolve(&self, name: &str) -> Result<&PropertyDescriptor, PropertyError> {
        self.entries
            .get(name)
            .map(|e| &e.descriptor)
            .ok_or_else(|| PropertyError::UnknownProperty(name.to_string()))
    }

    /// Descriptors sorted by name.
    pub fn list(&self) -> Vec<&PropertyDescriptor> {
        self.entries.values().map(|e| &e.descriptor).collect()
    }

    pub fn evaluate(&self, name: &str, mol: &Molecule) -> Result<f64, PropertyError> {
        let entry = self
            .entries
            .get(name)
            .ok_or_else(|| PropertyError::UnknownProperty(name.to_string()))?;
        Ok((entry.evaluator)(mol)?)
    }

    /// Evaluates `name` over every input, preserving order. Parse or
    /// evaluation failures become error records rather than aborting.
    pub fn evaluate_batch<S: AsRef<str>>(
        &self,
        name: &str,
        molecules: &[S],
    ) -> Result<Vec<PropertyRecord>, PropertyError> {
        let entry = self
            .entries
            .get(name)
            .ok_or_else(|| PropertyError::UnknownProperty(name.to_string()))?;
        Ok(molecules
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let s = s.as_ref();
                let outcome = chem::parse_smiles(s)
                    .and_then(|m| (entry.evaluator)(&m).map(|v| (chem::canonical_smiles(&m), v)));
                match outcome {
                    Ok((canonical, value)) => PropertyRecord {
                        smiles: canonical,
                        property: name.to_string(),
                        value: Some(value),
                        error: None,
                    },
                    Err(e) => PropertyRecord {
                        smiles: s.to_string(),
                        property: name.to_string(),
                        value: None,
                        error: Some(format!("entry {i}: {e}")),
                    },
                }
            })
            .collect())
    }
}

impl Default for PropertyRegistry {
    fn default() -> Self {
        PropertyRegistry::with_builtins()
    }
}

/// Writes records as CSV with header `smiles,property,value,error`.
pub fn write_records_csv<W: io::Write>(records: &[PropertyRecord], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["smiles", "property", "value", "error"])?;
    for r in records {
        let value = r.value.map(|v| format!("{v:.6}")).unwrap_or_default();
        w.write_record([
            r.smiles.as_str(),
            r.property.as_str(),
            value.as_str(),
            r.error.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_listed() {
        let r = PropertyRegistry::with_builtins();
        let names: Vec<&str> = r.list().iter().map(|d| d.name.as_str()).collect();
        assert_eq!(
            names,
            vec!["aromatic_proportion", "clogp", "esol", "molecular_weight", "rotatable_bonds"]
        );
    }

    #[test]
    fn register_and_resolve() {
        let mut r = PropertyRegistry::empty();
        let d = PropertyDescriptor::new("heavy_atoms", "heavy atom count", "count");
        r.register(d.clone(), Arc::new(|m: &Molecule| Ok(m.heavy_atom_count() as f64)))
            .unwrap();
        assert_eq!(r.resolve("heavy_atoms").unwrap(), &d);
        assert_eq!(
            r.register(d, Arc::new(|_: &Molecule| Ok(0.0))),
            Err(PropertyError::DuplicateName("heavy_atoms".into()))
        );
        assert!(matches!(
            r.register(PropertyDescriptor::new("Bad-Name", "", ""), Arc::new(|_: &Molecule| Ok(0.0))),
            Err(PropertyError::InvalidName(_))
        ));
    }

    #[test]
    fn batch_preserves_order_and_tolerates_failures() {
        let r = PropertyRegistry::with_builtins();
        assert!(r.evaluate_batch::<&str>("esol", &[]).unwrap().is_empty());

        let recs = r.evaluate_batch("molecular_weight", &["CCO", "CCO"]).unwrap();
        assert_eq!(recs.len(), 2);
        for rec in &recs {
            assert!((rec.value.unwrap() - 46.069).abs() < 1e-3);
        }

        let recs = r.evaluate_batch("esol", &["CCO", "C1CC", "CB", "c1ccccc1"]).unwrap();
        assert_eq!(recs.len(), 4);
        assert!(recs[0].is_ok() && recs[3].is_ok());
        assert!(recs[1].error.as_deref().unwrap().contains("ring closure 1"));
        assert!(recs[2].error.is_some());
        assert_eq!(recs[1].smiles, "C1CC");

        assert_eq!(
            r.evaluate_batch("qed", &["CCO"]),
            Err(PropertyError::UnknownProperty("qed".into()))
        );
    }

    #[test]
    fn csv_schema() {
        let r = PropertyRegistry::with_builtins();
        let recs = r.evaluate_batch("molecular_weight", &["OCC", "X"]).unwrap();
        let mut buf = Vec::new();
        write_records_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "smiles,property,value,error");
        assert_eq!(lines[1], "CCO,molecular_weight,46.069000,");
        assert!(lines[2].starts_with("X,molecular_weight,,"));
    }
}
