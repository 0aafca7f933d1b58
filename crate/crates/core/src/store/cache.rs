use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use super::manifest::{compute_sha256, FileEntry, ModelManifest, MANIFEST_FILE};
use super::remote::{RemoteBackend, RemoteError};
use super::StoreError;
use crate::registry::{compare_versions, AlgorithmType, ApplicationIdentifier};

pub const CACHE_ENV: &str = "DISCO_CACHE_DIR";

const STAGING_DIR: &str = ".staging";

static STAGING_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Local model cache. Every version directory holds a `manifest.json`; a
/// version without one is never created, because versions are assembled in
/// a staging directory and renamed into place.
#[derive(Debug, Clone)]
pub struct ModelCache {
    root: PathBuf,
}

fn relative_files(dir: &Path, rel: &str, out: &mut Vec<(String, PathBuf)>) -> io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let key = if rel.is_empty() { name } else { format!("{rel}/{name}") };
        if entry.file_type()?.is_dir() {
            relative_files(&entry.path(), &key, out)?;
        } else {
            out.push((key, entry.path()));
        }
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, bytes)
}

/// Writes `bytes` beside `path` and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    write_file(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn check_identity(m: &ModelManifest, id: &ApplicationIdentifier) -> Result<(), StoreError> {
    if m.algorithm_type != id.algorithm_type.as_str() || m.name != id.name || m.version != id.version {
        return Err(StoreError::InvalidManifest(format!(
            "manifest describes {}/{}/{}, expected {id}",
            m.algorithm_type, m.name, m.version
        )));
    }
    Ok(())
}

fn verify_entry(entry: &FileEntry, bytes: &[u8]) -> Result<(), StoreError> {
    if bytes.len() as u64 != entry.bytes || compute_sha256(bytes) != entry.sha256 {
        return Err(StoreError::HashMismatch {
            path: entry.path.clone(),
        });
    }
    Ok(())
}

impl ModelCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ModelCache { root: root.into() }
    }

    /// `$DISCO_CACHE_DIR`, falling back to `~/.cache/discokit`.
    pub fn from_env() -> Self {
        if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()) {
            return ModelCache::new(dir);
        }
        let home = std::env::var_os("HOME").map(PathBuf::from).unwrap_or_default();
        ModelCache::new(home.join(".cache").join("discokit"))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn version_dir(&self, id: &ApplicationIdentifier) -> PathBuf {
        self.root
            .join(id.algorithm_type.as_str())
            .join(&id.name)
            .join(&id.version)
    }

    pub fn manifest_path(&self, id: &ApplicationIdentifier) -> PathBuf {
        self.version_dir(id).join(MANIFEST_FILE)
    }

    pub fn contains(&self, id: &ApplicationIdentifier) -> bool {
        self.manifest_path(id).is_file()
    }

    pub fn read_manifest(&self, id: &ApplicationIdentifier) -> Result<ModelManifest, StoreError> {
        let bytes = match fs::read(self.manifest_path(id)) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::NotInCache(id.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        let m = ModelManifest::from_bytes(&bytes)?;
        check_identity(&m, id)?;
        Ok(m)
    }

    /// Re-hashes every file of a cached version.
    pub fn verify(&self, id: &ApplicationIdentifier) -> Result<ModelManifest, StoreError> {
        let m = self.read_manifest(id)?;
        let dir = self.version_dir(id);
        for entry in &m.files {
            let bytes = fs::read(dir.join(&entry.path)).map_err(|e| match e.kind() {
                io::ErrorKind::NotFound => StoreError::HashMismatch {
                    path: entry.path.clone(),
                },
                _ => e.into(),
            })?;
            verify_entry(entry, &bytes)?;
        }
        Ok(m)
    }

    /// Versions of `type/name` present locally, ascending.
    pub fn local_versions(&self, algorithm_type: AlgorithmType, name: &str) -> Vec<String> {
        let dir = self.root.join(algorithm_type.as_str()).join(name);
        let mut versions: Vec<String> = fs::read_dir(dir)
            .into_iter()
            .flatten()
            .flatten()
            .filter(|e| e.path().join(MANIFEST_FILE).is_file())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .collect();
        versions.sort_by(|a, b| compare_versions(a, b));
        versions
    }

    fn staging_dir(&self) -> PathBuf {
        let nanos = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.subsec_nanos())
            .unwrap_or(0);
        self.root.join(STAGING_DIR).join(format!(
            "{}-{}-{nanos}",
            std::process::id(),
            STAGING_COUNTER.fetch_add(1, Ordering::Relaxed)
        ))
    }

    /// Moves a fully written staging directory into the version slot.
    fn publish(&self, staging: &Path, id: &ApplicationIdentifier) -> io::Result<PathBuf> {
        let target = self.version_dir(id);
        fs::create_dir_all(target.parent().expect("version dir has a parent"))?;
        fs::rename(staging, &target)?;
        Ok(target)
    }

    /// Copies `artifact_dir` into the cache as version `id`.
    pub fn save_version(
        &self,
        id: &ApplicationIdentifier,
        artifact_dir: &Path,
    ) -> Result<ModelManifest, StoreError> {
        if self.version_dir(id).exists() {
            return Err(StoreError::VersionExists(id.to_string()));
        }
        let mut files = Vec::new();
        relative_files(artifact_dir, "", &mut files)?;
        if files.is_empty() {
            return Err(StoreError::EmptyArtifact(artifact_dir.display().to_string()));
        }
        if files.iter().any(|(rel, _)| rel == MANIFEST_FILE) {
            return Err(StoreError::InvalidManifest(format!(
                "artifact may not contain a top-level {MANIFEST_FILE}"
            )));
        }
        files.sort();

        let staging = self.staging_dir();
        let result = (|| {
            let mut entries = Vec::with_capacity(files.len());
            for (rel, path) in &files {
                let bytes = fs::read(path)?;
                write_file(&staging.join(rel), &bytes)?;
                entries.push(FileEntry {
                    bytes: bytes.len() as u64,
                    path: rel.clone(),
                    sha256: compute_sha256(&bytes),
                });
            }
            let manifest = ModelManifest {
                algorithm_type: id.algorithm_type.as_str().to_string(),
                created_unix: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs() as i64)
                    .unwrap_or(0),
                files: entries,
                name: id.name.clone(),
                version: id.version.clone(),
            };
            manifest.validate()?;
            write_atomic(&staging.join(MANIFEST_FILE), &manifest.to_canonical_bytes())?;
            Ok::<_, StoreError>(manifest)
        })();
        let manifest = match result {
            Ok(m) => m,
            Err(e) => {
                let _ = fs::remove_dir_all(&staging);
                return Err(e);
            }
        };
        if let Err(e) = self.publish(&staging, id) {
            let _ = fs::remove_dir_all(&staging);
            return Err(if self.version_dir(id).exists() {
                StoreError::VersionExists(id.to_string())
            } else {
                e.into()
            });
        }
        Ok(manifest)
    }

    /// Pushes a verified cached version to `remote`, manifest last.
    pub fn upload_version(
        &self,
        id: &ApplicationIdentifier,
        remote: &dyn RemoteBackend,
    ) -> Result<(), StoreError> {
        let manifest = self.verify(id)?;
        let dir = self.version_dir(id);
        let prefix = id.key_prefix();
        for entry in &manifest.files {
            let bytes = fs::read(dir.join(&entry.path))?;
            // the file may have changed since verification
            verify_entry(entry, &bytes)?;
            remote.put(&format!("{prefix}{}", entry.path), &bytes)?;
        }
        let manifest_bytes = fs::read(self.manifest_path(id))?;
        remote.put(&format!("{prefix}{MANIFEST_FILE}"), &manifest_bytes)?;
        remote.refresh_index()?;
        Ok(())
    }

    /// Returns the local directory of a verified copy of `id`, downloading
    /// it from `remote` when it is not cached. A cached version is served
    /// without touching the remote.
    pub fn ensure_version(
        &self,
        id: &ApplicationIdentifier,
        remote: Option<&dyn RemoteBackend>,
    ) -> Result<PathBuf, StoreError> {
        if self.contains(id) {
            self.verify(id)?;
            return Ok(self.version_dir(id));
        }
        let not_found = || StoreError::ModelVersionNotFound(id.to_string());
        let remote = remote.ok_or_else(not_found)?;
        let prefix = id.key_prefix();
        let manifest_bytes = match remote.get(&format!("{prefix}{MANIFEST_FILE}")) {
            Ok(b) => b,
            Err(RemoteError::NotFound(_)) => return Err(not_found()),
            Err(e) => return Err(e.into()),
        };
        let manifest = ModelManifest::from_bytes(&manifest_bytes)?;
        check_identity(&manifest, id)?;

        let staging = self.staging_dir();
        let result = (|| {
            for entry in &manifest.files {
                let bytes = remote.get(&format!("{prefix}{}", entry.path))?;
                verify_entry(entry, &bytes)?;
                write_file(&staging.join(&entry.path), &bytes)?;
            }
            write_atomic(&staging.join(MANIFEST_FILE), &manifest_bytes)?;
            Ok::<_, StoreError>(())
        })();
        if let Err(e) = result {
            let _ = fs::remove_dir_all(&staging);
            return Err(e);
        }
        match self.publish(&staging, id) {
            Ok(dir) => Ok(dir),
            Err(e) => {
                let _ = fs::remove_dir_all(&staging);
                // another process may have published the same version first
                if self.contains(id) {
                    self.verify(id)?;
                    Ok(self.version_dir(id))
                } else {
                    Err(e.into())
                }
            }
        }
    }
}

/// Outcome of scanning a remote: usable versions plus notes about versions
/// that were skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RemoteListing {
    pub versions: Vec<String>,
    pub warnings: Vec<String>,
}

/// Versions of `type/name` on `remote` with a valid manifest, ascending.
pub fn list_remote_versions(
    remote: &dyn RemoteBackend,
    algorithm_type: AlgorithmType,
    name: &str,
) -> Result<RemoteListing, StoreError> {
    let prefix = format!("{}/{name}/", algorithm_type.as_str());
    let mut candidates = BTreeSet::new();
    for key in remote.list(&prefix)? {
        if let Some(version) = key
            .strip_prefix(&prefix)
            .and_then(|rest| rest.strip_suffix(&format!("/{MANIFEST_FILE}")))
            .filter(|v| !v.contains('/'))
        {
            candidates.insert(version.to_string());
        }
    }
    let mut listing = RemoteListing::default();
    for version in candidates {
        let key = format!("{prefix}{version}/{MANIFEST_FILE}");
        let checked = remote
            .get(&key)
            .map_err(StoreError::from)
            .and_then(|b| ModelManifest::from_bytes(&b))
            .and_then(|m| {
                if m.algorithm_type == algorithm_type.as_str() && m.name == name && m.version == version {
                    Ok(())
                } else {
                    Err(StoreError::InvalidManifest("identity does not match key".into()))
                }
            });
        match checked {
            Ok(()) => listing.versions.push(version),
            Err(e) => listing.warnings.push(format!("skipping {prefix}{version}: {e}")),
        }
    }
    listing.versions.sort_by(|a, b| compare_versions(a, b));
    Ok(listing)
}
