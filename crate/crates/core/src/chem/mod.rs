//! SMILES engine, molecular graph, descriptors and fingerprints.

mod canon;
mod crippen;
mod descriptors;
mod element;
mod error;
mod fingerprint;
mod isomorphism;
mod molecule;
mod parser;
mod rings;
mod writer;

pub use canon::canonical_smiles;
pub use crippen::{crippen_logp, AtomType, LogPTable};
pub use descriptors::{aromatic_proportion, count_rotatable_bonds, molecular_weight};
pub use element::{Element, HYDROGEN_WEIGHT};
pub use error::ChemError;
pub use fingerprint::{
    atom_environments, default_fingerprint, fnv1a, morgan_fingerprint, tanimoto, Fingerprint,
    DEFAULT_RADIUS, DEFAULT_WIDTH,
};
pub use isomorphism::is_isomorphic;
pub use molecule::{Atom, Bond, BondOrder, Molecule, MAX_ATOMS};
pub use parser::parse_smiles;
pub use rings::perceive as perceive_rings;
pub use writer::write_smiles;
