//! Object-store backends: a directory on disk, an in-memory map, and a
//! read-only HTTP mirror.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use super::manifest::valid_relative_path;

/// Name of the key index a directory remote publishes for HTTP mirrors.
pub const INDEX_FILE: &str = "index.txt";

const PARTIAL_PREFIX: &str = ".partial-";
const HTTP_BODY_LIMIT: u64 = 1 << 30;

#[derive(Debug, Error)]
pub enum RemoteError {
    #[error("remote key {0:?} not found")]
    NotFound(String),
    #[error("invalid remote key {0:?}")]
    InvalidKey(String),
    #[error("operation not supported by this remote: {0}")]
    Unsupported(&'static str),
    #[error("remote i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("http failure: {0}")]
    Http(String),
}

/// Flat key/value object store. Keys are `/`-separated relative paths.
pub trait RemoteBackend: Send + Sync {
    /// Keys starting with `prefix`, sorted.
    fn list(&self, prefix: &str) -> Result<Vec<String>, RemoteError>;
    fn get(&self, key: &str) -> Result<Vec<u8>, RemoteError>;
    fn put(&self, key: &str, bytes: &[u8]) -> Result<(), RemoteError>;
    /// Human-readable location, for messages.
    fn describe(&self) -> String;
    /// Called after an upload completes. Backends with a listing file
    /// refresh it here.
    fn refresh_index(&self) -> Result<(), RemoteError> {
        Ok(())
    }
}

fn check_key(key: &str) -> Result<(), RemoteError> {
    if valid_relative_path(key) {
        Ok(())
    } else {
        Err(RemoteError::InvalidKey(key.to_string()))
    }
}

/// Remote backed by a local directory, e.g. a shared drive acting as hub.
#[derive(Debug, Clone)]
pub struct DirRemote {
    root: PathBuf,
}

impl DirRemote {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DirRemote { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Rewrites `index.txt` with every key, one per line, so the directory
    /// can be served as a static HTTP remote.
    pub fn write_index(&self) -> Result<(), RemoteError> {
        let mut text = String::new();
        for key in self.list("")? {
            text.push_str(&key);
            text.push('\n');
        }
        self.put(INDEX_FILE, text.as_bytes())
    }
}

fn walk(dir: &Path, rel: &str, out: &mut Vec<String>) -> io::Result<()> {
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(()),
        Err(e) => return Err(e),
    };
    for entry in entries {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with(PARTIAL_PREFIX) {
            continue;
        }
        let key = if rel.is_empty() { name } else { format!("{rel}/{name}") };
        if entry.file_type()?.is_dir() {
            walk(&entry.path(), &key, out)?;
        } else {
            out.push(key);
        }
    }
    Ok(())
}

static PARTIAL_COUNTER: AtomicU64 = AtomicU64::new(0);

impl RemoteBackend for DirRemote {
    fn list(&self, prefix: &str) -> Result<Vec<String>, RemoteError> {
        let mut keys = Vec::new();
        walk(&self.root, "", &mut keys)?;
        keys.retain(|k| k.starts_with(prefix) && k != INDEX_FILE);
        keys.sort();
        Ok(keys)
    }

    fn get(&self, key: &str) -> Result<Vec<u8>, RemoteError> {
        check_key(key)?;
        fs::read(self.root.join(key)).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => RemoteError::NotFound(key.to_string()),
            _ => RemoteError::Io(e),
        })
    }

    fn put(&self, key: &str, bytes: &[u8]) -> Result<(), RemoteError> {
        check_key(key)?;
        let dest = self.root.join(key);
        let parent = dest.parent().expect("joined key has a parent");
        fs::create_dir_all(parent)?;
        let tmp = parent.join(format!(
            "{PARTIAL_PREFIX}{}-{}",
            std::process::id(),
            PARTIAL_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &dest).inspect_err(|_| {
            let _ = fs::remove_file(&tmp);
        })?;
        Ok(())
    }

    fn describe(&self) -> String {
        self.root.display().to_string()
    }

    fn refresh_index(&self) -> Result<(), RemoteError> {
        self.write_index()
    }
}

/// In-process remote, mostly for tests.
#[derive(Debug, Default)]
pub struct MemoryRemote {
    objects: Mutex<BTreeMap<String, Vec<u8>>>,
}

impl MemoryRemote {
    pub fn new() -> Self {
        MemoryRemote::default()
    }
}

impl RemoteBackend for MemoryRemote {
    fn list(&self, prefix: &str) -> Result<Vec<String>, RemoteError> {
        let objects = self.objects.lock().unwrap();
        Ok(objects
            .keys()
            .filter(|k| k.starts_with(prefix))
            .cloned()
            .collect())
    }

    fn get(&self, key: &str) -> Result<Vec<u8>, RemoteError> {
        self.objects
            .lock()
            .unwrap()
            .get(key)
            .cloned()
            .ok_or_else(|| RemoteError::NotFound(key.to_string()))
    }

    fn put(&self, key: &str, bytes: &[u8]) -> Result<(), RemoteError> {
        check_key(key)?;
        self.objects
            .lock()
            .unwrap()
            .insert(key.to_string(), bytes.to_vec());
        Ok(())
    }

    fn describe(&self) -> String {
        "memory".to_string()
    }
}

/// Read-only mirror over HTTP(S): objects are fetched with `GET <base>/<key>`
/// and listing reads `<base>/index.txt`. A directory remote served by any
/// static file server works once its index has been written.
#[derive(Debug, Clone)]
pub struct HttpRemote {
    base: String,
}

impl HttpRemote {
    pub fn new(base: &str) -> Self {
        HttpRemote {
            base: base.trim_end_matches('/').to_string(),
        }
    }

    fn fetch(&self, key: &str) -> Result<Vec<u8>, RemoteError> {
        let url = format!("{}/{}", self.base, key);
        let mut response = ureq::get(&url).call().map_err(|e| match e {
            ureq::Error::StatusCode(404) => RemoteError::NotFound(key.to_string()),
            other => RemoteError::Http(format!("GET {url}: {other}")),
        })?;
        response
            .body_mut()
            .with_config()
            .limit(HTTP_BODY_LIMIT)
            .read_to_vec()
            .map_err(|e| RemoteError::Http(format!("GET {url}: {e}")))
    }
}

impl RemoteBackend for HttpRemote {
    fn list(&self, prefix: &str) -> Result<Vec<String>, RemoteError> {
        let index = match self.fetch(INDEX_FILE) {
            Ok(bytes) => bytes,
            Err(RemoteError::NotFound(_)) => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        let text = String::from_utf8_lossy(&index);
        let mut keys: Vec<String> = text
            .lines()
            .map(str::trim)
            .filter(|k| !k.is_empty() && k.starts_with(prefix))
            .map(str::to_string)
            .collect();
        keys.sort();
        keys.dedup();
        Ok(keys)
    }

    fn get(&self, key: &str) -> Result<Vec<u8>, RemoteError> {
        check_key(key)?;
        self.fetch(key)
    }

    fn put(&self, _key: &str, _bytes: &[u8]) -> Result<(), RemoteError> {
        Err(RemoteError::Unsupported("uploads over http"))
    }

    fn describe(&self) -> String {
        self.base.clone()
    }
}

/// Interprets a `--remote` value: `http://` and `https://` URLs select the
/// HTTP mirror, `file://` URLs and plain paths a directory remote.
pub fn open_remote(location: &str) -> Box<dyn RemoteBackend> {
    if location.starts_with("http://") || location.starts_with("https://") {
        Box::new(HttpRemote::new(location))
    } else {
        let path = location.strip_prefix("file://").unwrap_or(location);
        Box::new(DirRemote::new(path))
    }
}
