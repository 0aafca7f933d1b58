use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// The four kinds of algorithm the registry can hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmType {
    ConditionalGeneration,
    ControlledSampling,
    Generation,
    Prediction,
}

impl AlgorithmType {
    pub const ALL: [AlgorithmType; 4] = [
        AlgorithmType::ConditionalGeneration,
        AlgorithmType::ControlledSampling,
        AlgorithmType::Generation,
        AlgorithmType::Prediction,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmType::Generation => "generation",
            AlgorithmType::ConditionalGeneration => "conditional_generation",
            AlgorithmType::ControlledSampling => "controlled_sampling",
            AlgorithmType::Prediction => "prediction",
        }
    }
}

impl fmt::Display for AlgorithmType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentifierError {
    #[error("unknown algorithm type {0:?}")]
    UnknownType(String),
    #[error("malformed identifier {0:?}: expected type/name/version")]
    Malformed(String),
    #[error("invalid algorithm name {0:?}: expected [a-z0-9_-]+")]
    InvalidName(String),
    #[error("invalid version {0:?}")]
    InvalidVersion(String),
}

impl FromStr for AlgorithmType {
    type Err = IdentifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| IdentifierError::UnknownType(s.to_string()))
    }
}

/// Typed address of an algorithm: `type/name/version`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ApplicationIdentifier {
    pub algorithm_type: AlgorithmType,
    pub name: String,
    pub version: String,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'-')
}

fn valid_version(version: &str) -> bool {
    !version.is_empty()
        && version != "."
        && version != ".."
        && version
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-'))
}

impl ApplicationIdentifier {
    pub fn new(
        algorithm_type: AlgorithmType,
        name: &str,
        version: &str,
    ) -> Result<Self, IdentifierError> {
        if !valid_name(name) {
            return Err(IdentifierError::InvalidName(name.to_string()));
        }
        if !valid_version(version) {
            return Err(IdentifierError::InvalidVersion(version.to_string()));
        }
        Ok(ApplicationIdentifier {
            algorithm_type,
            name: name.to_string(),
            version: version.to_string(),
        })
    }

    /// Same algorithm, different version.
    pub fn with_version(&self, version: &str) -> Result<Self, IdentifierError> {
        ApplicationIdentifier::new(self.algorithm_type, &self.name, version)
    }

    /// Key prefix shared by every file of this version, with trailing `/`.
    pub fn key_prefix(&self) -> String {
        format!("{self}/")
    }
}

impl fmt::Display for ApplicationIdentifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.algorithm_type, self.name, self.version)
    }
}

impl FromStr for ApplicationIdentifier {
    type Err = IdentifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split('/').collect();
        let [t, name, version] = parts.as_slice() else {
            return Err(IdentifierError::Malformed(s.to_string()));
        };
        ApplicationIdentifier::new(t.parse()?, name, version)
    }
}

impl PartialOrd for ApplicationIdentifier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ApplicationIdentifier {
    /// Lexicographic by rendered type name, then name, then version.
    fn cmp(&self, other: &Self) -> Ordering {
        self.algorithm_type
            .as_str()
            .cmp(other.algorithm_type.as_str())
            .then_with(|| self.name.cmp(&other.name))
            .then_with(|| compare_versions(&self.version, &other.version))
    }
}

fn tag_number(v: &str) -> Option<u64> {
    v.strip_prefix('v')
        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|d| d.parse().ok())
}

/// Orders `vN` tags by N, anything else lexicographically after them.
pub fn compare_versions(a: &str, b: &str) -> Ordering {
    match (tag_number(a), tag_number(b)) {
        (Some(x), Some(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.cmp(b),
    }
}

/// Greatest `vN` tag among `versions`, ignoring non-tag strings.
pub fn latest_version<'a>(versions: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    versions
        .into_iter()
        .filter(|v| tag_number(v).is_some())
        .max_by(|a, b| compare_versions(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        let id: ApplicationIdentifier = "generation/ngram_clm/v1".parse().unwrap();
        assert_eq!(id.algorithm_type, AlgorithmType::Generation);
        assert_eq!(id.to_string(), "generation/ngram_clm/v1");
        assert_eq!(id.key_prefix(), "generation/ngram_clm/v1/");
    }

    #[test]
    fn rejects_bad_identifiers() {
        assert!(matches!(
            "generation/ngram_clm".parse::<ApplicationIdentifier>(),
            Err(IdentifierError::Malformed(_))
        ));
        assert!(matches!(
            "sampling/x/v1".parse::<ApplicationIdentifier>(),
            Err(IdentifierError::UnknownType(_))
        ));
        assert!(matches!(
            "generation/Ngram/v1".parse::<ApplicationIdentifier>(),
            Err(IdentifierError::InvalidName(_))
        ));
        assert!(matches!(
            "generation/ngram/..".parse::<ApplicationIdentifier>(),
            Err(IdentifierError::InvalidVersion(_))
        ));
    }

    #[test]
    fn version_ordering() {
        let mut v = vec!["v10", "v2", "v1", "beta"];
        v.sort_by(|a, b| compare_versions(a, b));
        assert_eq!(v, vec!["v1", "v2", "v10", "beta"]);
        assert_eq!(latest_version(["v9", "v10", "beta"]), Some("v10"));
        assert_eq!(latest_version(["beta"]), None);
    }
}
