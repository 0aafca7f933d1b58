//! Save a model version, push it to a directory hub, then fetch it into an
//! empty cache and check it byte for byte.

use std::fs;

use discokit::registry::ApplicationIdentifier;
use discokit::store::{DirRemote, ModelCache, RemoteBackend};

fn main() {
    let root = tempfile::tempdir().unwrap();
    let artifact = root.path().join("artifact");
    fs::create_dir_all(artifact.join("extra")).unwrap();
    fs::write(artifact.join("ngram_model.tsv"), "pretend model\n").unwrap();
    fs::write(artifact.join("extra/README"), "notes\n").unwrap();

    let id: ApplicationIdentifier = "generation/ngram_clm/v1".parse().unwrap();
    let cache = ModelCache::new(root.path().join("cache"));
    let manifest = cache.save_version(&id, &artifact).unwrap();
    for f in &manifest.files {
        println!("saved {:<16} {} bytes  {}", f.path, f.bytes, f.sha256);
    }

    let hub = DirRemote::new(root.path().join("hub"));
    cache.upload_version(&id, &hub).unwrap();
    println!("hub keys: {:?}", hub.list("").unwrap());

    let fresh = ModelCache::new(root.path().join("other-machine"));
    let dir = fresh.ensure_version(&id, Some(&hub)).unwrap();
    for f in &manifest.files {
        assert_eq!(fs::read(dir.join(&f.path)).unwrap(), fs::read(artifact.join(&f.path)).unwrap());
    }
    println!("fetched into {} and verified", dir.display());

    fs::write(dir.join("ngram_model.tsv"), "tampered\n").unwrap();
    println!("after tampering: {}", fresh.verify(&id).unwrap_err());
}
