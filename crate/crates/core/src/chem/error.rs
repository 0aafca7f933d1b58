use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChemError {
    #[error("empty SMILES input")]
    EmptyInput,
    #[error("unknown element at position {position}")]
    UnknownElement { position: usize },
    #[error("unexpected character {ch:?} at position {position}")]
    UnexpectedChar { position: usize, ch: char },
    #[error("ring closure {digit} is never closed")]
    UnclosedRing { digit: u32 },
    #[error("unbalanced parenthesis at position {position}")]
    UnbalancedParenthesis { position: usize },
    #[error("valence violation at atom {atom}")]
    ValenceViolation { atom: usize },
    #[error("multi-fragment molecules are not supported")]
    MultipleFragments { position: Option<usize> },
    #[error("molecule has {count} atoms, above the supported maximum")]
    TooManyAtoms { count: usize },
    #[error("element {symbol} cannot be aromatic")]
    InvalidAromatic { symbol: String },
    #[error("invalid bond between atoms {a} and {b}")]
    InvalidBond { a: usize, b: usize },
    #[error("duplicate bond between atoms {a} and {b}")]
    DuplicateBond { a: usize, b: usize },
    #[error("no cLogP atom type matches atom {atom}")]
    UntypedAtom { atom: usize },
    #[error("fingerprints differ in width or radius")]
    IncomparableFingerprints,
    #[error("malformed cLogP table at line {line}: {reason}")]
    BadTable { line: usize, reason: String },
}
