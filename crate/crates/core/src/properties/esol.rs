//! Delaney's ESOL: a linear model of aqueous solubility (log10 mol/L)
//! over cLogP, molecular weight, rotatable bonds and aromatic proportion.

use std::ops::Add;

use crate::chem::{self, ChemError, Molecule};

pub const INTERCEPT: f64 = 0.16;
pub const CLOGP_COEF: f64 = -0.63;
pub const MW_COEF: f64 = -0.0062;
pub const RB_COEF: f64 = 0.066;
pub const AP_COEF: f64 = -0.74;

/// The four regressors of the solubility model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsolDescriptors {
    pub clogp: f64,
    pub mw: f64,
    pub rb: f64,
    pub ap: f64,
}

impl EsolDescriptors {
    pub fn from_molecule(mol: &Molecule) -> Result<Self, ChemError> {
        Ok(EsolDescriptors {
            clogp: chem::crippen_logp(mol)?,
            mw: chem::molecular_weight(mol),
            rb: chem::count_rotatable_bonds(mol) as f64,
            ap: chem::aromatic_proportion(mol),
        })
    }
}

impl Add for EsolDescriptors {
    type Output = EsolDescriptors;

    fn add(self, o: Self) -> Self {
        EsolDescriptors {
            clogp: self.clogp + o.clogp,
            mw: self.mw + o.mw,
            rb: self.rb + o.rb,
            ap: self.ap + o.ap,
        }
    }
}

/// Evaluates the linear model. Accepts any descriptor values, including
/// ones a real molecule cannot produce (e.g. all zeros).
pub fn esol_from_descriptors(d: &EsolDescriptors) -> f64 {
    INTERCEPT + CLOGP_COEF * d.clogp + MW_COEF * d.mw + RB_COEF * d.rb + AP_COEF * d.ap
}

pub fn esol(mol: &Molecule) -> Result<f64, ChemError> {
    EsolDescriptors::from_molecule(mol).map(|d| esol_from_descriptors(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    fn d(clogp: f64, mw: f64, rb: f64, ap: f64) -> EsolDescriptors {
        EsolDescriptors { clogp, mw, rb, ap }
    }

    #[test]
    fn intercept_only() {
        assert_eq!(esol_from_descriptors(&d(0.0, 0.0, 0.0, 0.0)), 0.16);
    }

    #[test]
    fn hand_arithmetic() {
        assert!((esol_from_descriptors(&d(1.0, 100.0, 0.0, 0.0)) - -1.09).abs() < 1e-9);
        // 0.16 - 1.26 - 0.4843068 - 0.74
        assert!((esol_from_descriptors(&d(2.0, 78.114, 0.0, 1.0)) - -2.3243068).abs() < 1e-9);
    }

    #[test]
    fn ethanol_through_descriptors() {
        let clogp = 0.1441 + 3.0 * 0.1230 - 0.2035 + 2.0 * 0.1230 - 0.2893 - 0.2677;
        let mw = 2.0 * 12.011 + 15.999 + 6.0 * 1.008;
        let hand = 0.16 - 0.63 * clogp - 0.0062 * mw;
        let v = esol(&parse_smiles("CCO").unwrap()).unwrap();
        assert!((v - hand).abs() < 1e-6, "{v} vs {hand}");
    }

    #[test]
    fn benzene_through_descriptors() {
        let clogp = 6.0 * 0.1581 + 6.0 * 0.1230;
        let mw = 6.0 * 12.011 + 6.0 * 1.008;
        let hand = 0.16 - 0.63 * clogp - 0.0062 * mw - 0.74;
        let v = esol(&parse_smiles("c1ccccc1").unwrap()).unwrap();
        assert!((v - hand).abs() < 1e-6);
    }

    #[test]
    fn pure_across_parses() {
        let a = esol(&parse_smiles("CC(=O)Nc1ccc(O)cc1").unwrap()).unwrap();
        let b = esol(&parse_smiles("CC(=O)Nc1ccc(O)cc1").unwrap()).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn untyped_atoms_propagate() {
        assert_eq!(
            esol(&parse_smiles("CB").unwrap()),
            Err(ChemError::UntypedAtom { atom: 1 })
        );
    }
}
