//! On-disk cache of cohomology tables.
//!
//! Entries are keyed by a hash of the canonical ring, the probe box and the
//! engine version, and carry a checksum of their payload. A corrupted entry
//! is evicted; any I/O failure turns the cache off for the rest of the run.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wallcross_core::ring::ValidatedRing;
use wallcross_core::table::{CohomologyTable, ProbeBox};

pub const ENGINE_VERSION: &str = concat!("wallcross-core ", env!("CARGO_PKG_VERSION"));

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Ring data in a form independent of how the input was spelled.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalRing {
    pub field: String,
    pub variables: Vec<String>,
    pub fine_degrees: Vec<Vec<i64>>,
    pub lambda: Vec<i64>,
    pub relations: Vec<String>,
    pub complete_intersection: bool,
}

impl CanonicalRing {
    pub fn of(ring: &ValidatedRing) -> Self {
        Self {
            field: ring.field().to_string(),
            variables: ring.names().to_vec(),
            fine_degrees: ring.degrees().to_vec(),
            lambda: ring.lambda().to_vec(),
            relations: ring.relations().iter().map(|g| g.display(ring.names()).to_string()).collect(),
            complete_intersection: ring.spec().complete_intersection,
        }
    }
}

pub fn cache_key(ring: &ValidatedRing, probe: &ProbeBox) -> String {
    #[derive(Serialize)]
    struct Key<'a> {
        ring: CanonicalRing,
        probe: &'a ProbeBox,
        engine: &'a str,
    }
    let key = Key { ring: CanonicalRing::of(ring), probe, engine: ENGINE_VERSION };
    sha256_hex(&serde_json::to_vec(&key).expect("key serializes"))
}

#[derive(Serialize, Deserialize)]
struct Entry {
    checksum: String,
    payload: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    Evicted,
    Off,
}

pub struct TableCache {
    dir: Option<PathBuf>,
    warnings: Vec<String>,
}

impl TableCache {
    pub fn new(dir: Option<&Path>) -> Self {
        let mut cache = Self { dir: None, warnings: Vec::new() };
        if let Some(d) = dir {
            match fs::create_dir_all(d) {
                Ok(()) => cache.dir = Some(d.to_path_buf()),
                Err(e) => cache.warn(format!("cache disabled: cannot create {}: {e}", d.display())),
            }
        }
        cache
    }

    pub fn enabled(&self) -> bool {
        self.dir.is_some()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn warn(&mut self, message: String) {
        self.warnings.push(message);
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn lookup(&mut self, ring: &ValidatedRing, probe: &ProbeBox) -> (Lookup, Option<CohomologyTable>) {
        let Some(path) = self.path(&cache_key(ring, probe)) else {
            return (Lookup::Off, None);
        };
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return (Lookup::Miss, None),
            Err(e) => {
                self.warn(format!("cache disabled: cannot read {}: {e}", path.display()));
                self.dir = None;
                return (Lookup::Off, None);
            }
        };
        let table = serde_json::from_slice::<Entry>(&bytes)
            .ok()
            .filter(|e| sha256_hex(e.payload.as_bytes()) == e.checksum)
            .and_then(|e| serde_json::from_str::<CohomologyTable>(&e.payload).ok())
            .filter(|t| t.probe == *probe);
        match table {
            Some(mut t) => {
                t.reindex(ring);
                (Lookup::Hit, Some(t))
            }
            None => {
                self.warn(format!("evicting corrupted cache entry {}", path.display()));
                if let Err(e) = fs::remove_file(&path) {
                    self.warn(format!("cache disabled: cannot evict {}: {e}", path.display()));
                    self.dir = None;
                }
                (Lookup::Evicted, None)
            }
        }
    }

    /// Writes through a temporary file so readers never see a partial entry.
    pub fn store(&mut self, ring: &ValidatedRing, table: &CohomologyTable) {
        let Some(path) = self.path(&cache_key(ring, &table.probe)) else {
            return;
        };
        let payload = serde_json::to_string(table).expect("tables serialize");
        let entry = Entry { checksum: sha256_hex(payload.as_bytes()), payload };
        let tmp = path.with_extension("tmp");
        let result = fs::write(&tmp, serde_json::to_vec(&entry).expect("entries serialize"))
            .and_then(|()| fs::rename(&tmp, &path));
        if let Err(e) = result {
            self.warn(format!("cache disabled: cannot write {}: {e}", path.display()));
            self.dir = None;
        }
    }
}
