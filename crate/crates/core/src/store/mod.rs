//! Versioned model artifacts: a local cache laid out as
//! `<root>/<type>/<name>/<version>/`, hash-verified manifests, and sync
//! against a remote object store.

mod cache;
mod manifest;
mod remote;

use std::io;

use thiserror::Error;

pub use cache::{list_remote_versions, ModelCache, RemoteListing, CACHE_ENV};
pub use manifest::{compute_sha256, FileEntry, ModelManifest, MANIFEST_FILE};
pub use remote::{open_remote, DirRemote, HttpRemote, MemoryRemote, RemoteBackend, RemoteError, INDEX_FILE};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("version {0} already exists in the cache")]
    VersionExists(String),
    #[error("artifact directory {0} contains no files")]
    EmptyArtifact(String),
    #[error("version {0} is not in the local cache")]
    NotInCache(String),
    #[error("model version {0} not found locally or remotely")]
    ModelVersionNotFound(String),
    #[error("hash mismatch for {path}")]
    HashMismatch { path: String },
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error(transparent)]
    Remote(#[from] RemoteError),
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
}
