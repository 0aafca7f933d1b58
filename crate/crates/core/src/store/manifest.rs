use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::StoreError;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Lowercase hex SHA-256 digest.
pub fn compute_sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

// Field order is alphabetical so serde emits sorted keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEntry {
    pub bytes: u64,
    pub path: String,
    pub sha256: String,
}

/// Hash-verified inventory of one model version. Written last when a
/// version is stored, so its presence marks the version as complete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelManifest {
    pub algorithm_type: String,
    pub created_unix: i64,
    pub files: Vec<FileEntry>,
    pub name: String,
    pub version: String,
}

/// Relative, `/`-separated, no empty, `.` or `..` components.
pub(crate) fn valid_relative_path(path: &str) -> bool {
    !path.is_empty()
        && !path.starts_with('/')
        && !path.contains('\\')
        && path
            .split('/')
            .all(|c| !c.is_empty() && c != "." && c != "..")
}

impl ModelManifest {
    pub fn validate(&self) -> Result<(), StoreError> {
        let bad = |reason: String| Err(StoreError::InvalidManifest(reason));
        let mut seen = HashSet::new();
        for f in &self.files {
            if !valid_relative_path(&f.path) {
                return bad(format!("path {:?} is not a clean relative path", f.path));
            }
            if f.path == MANIFEST_FILE {
                return bad(format!("{MANIFEST_FILE} cannot list itself"));
            }
            if !seen.insert(f.path.as_str()) {
                return bad(format!("duplicate path {:?}", f.path));
            }
            if f.sha256.len() != 64
                || !f
                    .sha256
                    .bytes()
                    .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
            {
                return bad(format!("bad sha256 for {:?}", f.path));
            }
        }
        Ok(())
    }

    /// Canonical JSON: sorted keys at every level, no whitespace.
    pub fn to_canonical_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("manifest serialization cannot fail")
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<ModelManifest, StoreError> {
        let m: ModelManifest = serde_json::from_slice(bytes)
            .map_err(|e| StoreError::InvalidManifest(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }
}
