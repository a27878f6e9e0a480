//! Persistent store of solved eigenvalues.
//!
//! Records are keyed by `(ν, n, κ)` rounded to 12 significant digits. A hit
//! is never trusted blindly: the mode is rebuilt from the stored eigenvalue,
//! which re-runs the shooting pass and rejects the value if it misses the
//! eigencondition.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::{solve_eigen, LameMode, LameProblem, Parity};
use crate::error::Result;

pub const SOLVER_VERSION: &str = "peanut-lame-1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub nu: f64,
    pub n: usize,
    pub kappa: f64,
    pub lambda: f64,
    pub norm_constant: f64,
    pub frobenius_a0: f64,
    pub parity: Parity,
    pub solver_version: String,
}

impl CacheRecord {
    pub fn from_mode(mode: &LameMode) -> Self {
        Self {
            nu: mode.problem.nu,
            n: mode.problem.n,
            kappa: mode.problem.kappa.k(),
            lambda: mode.lambda,
            norm_constant: mode.norm_constant,
            frobenius_a0: mode.frobenius_a0,
            parity: mode.parity,
            solver_version: SOLVER_VERSION.to_string(),
        }
    }
}

type Key = (String, usize, String);

fn key(nu: f64, n: usize, kappa: f64) -> Key {
    (format!("{nu:.11e}"), n, format!("{kappa:.11e}"))
}

#[derive(Debug, Default)]
pub struct ModeCache {
    path: Option<PathBuf>,
    records: BTreeMap<Key, CacheRecord>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl ModeCache {
    /// An empty cache that is never written.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// `PEANUT_CACHE` if set, otherwise `peanut-cache.json` in the working directory.
    pub fn default_path() -> PathBuf {
        std::env::var_os("PEANUT_CACHE").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("peanut-cache.json"))
    }

    /// Loads the cache at `path`; a missing file gives an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut records = BTreeMap::new();
        if path.exists() {
            let text = fs::read_to_string(&path)?;
            if !text.trim().is_empty() {
                let list: Vec<CacheRecord> = serde_json::from_str(&text)?;
                for r in list {
                    if r.solver_version == SOLVER_VERSION {
                        records.insert(key(r.nu, r.n, r.kappa), r);
                    }
                }
            }
        }
        Ok(Self { path: Some(path), records, ..Self::default() })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn records(&self) -> impl Iterator<Item = &CacheRecord> {
        self.records.values()
    }

    pub fn lookup(&self, p: &LameProblem) -> Option<&CacheRecord> {
        self.records.get(&key(p.nu, p.n, p.kappa.k()))
    }

    /// Solves `p`, starting from the cached eigenvalue when there is one.
    /// Safe to call from several threads; new results must be
    /// [`insert`](Self::insert)ed afterwards.
    pub fn solve(&self, p: &LameProblem) -> Result<LameMode> {
        if let Some(r) = self.lookup(p) {
            match LameMode::from_eigenvalue(p, r.lambda) {
                Ok(mode) if (mode.norm_constant - r.norm_constant).abs() <= 1e-9 * r.norm_constant.abs() => {
                    self.hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(mode);
                }
                Ok(_) | Err(_) => {
                    log::warn!("stale cache entry for nu = {}, n = {}, kappa = {}", p.nu, p.n, p.kappa.k());
                }
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        solve_eigen(p)
    }

    pub fn insert(&mut self, mode: &LameMode) {
        let r = CacheRecord::from_mode(mode);
        self.records.insert(key(r.nu, r.n, r.kappa), r);
    }

    pub fn clear(&mut self) {
        self.records.clear();
    }

    /// Writes the cache with a temporary file and an atomic rename.
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let list: Vec<&CacheRecord> = self.records.values().collect();
        let text = serde_json::to_string_pretty(&list)?;
        let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{}.tmp{}", path.file_name().and_then(|s| s.to_str()).unwrap_or("cache"), std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::Modulus;

    #[test]
    fn round_trip_is_bit_exact_and_hits_revalidate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("modes.json");
        let p = LameProblem::new(0.5, 2, Modulus::new(0.6).unwrap()).unwrap();
        let mut cache = ModeCache::open(&path).unwrap();
        let mode = cache.solve(&p).unwrap();
        assert_eq!(cache.misses(), 1);
        cache.insert(&mode);
        cache.save().unwrap();

        let again = ModeCache::open(&path).unwrap();
        let rec = again.lookup(&p).unwrap();
        assert_eq!(rec.lambda.to_bits(), mode.lambda.to_bits());
        assert_eq!(rec.norm_constant.to_bits(), mode.norm_constant.to_bits());
        let warm = again.solve(&p).unwrap();
        assert_eq!(again.hits(), 1);
        assert_eq!(warm.lambda, mode.lambda);
    }

    #[test]
    fn corrupted_eigenvalue_is_rejected() {
        let p = LameProblem::new(1.5, 1, Modulus::new(0.5).unwrap()).unwrap();
        let mut cache = ModeCache::in_memory();
        let mode = solve_eigen(&p).unwrap();
        cache.insert(&mode);
        let k = key(p.nu, p.n, p.kappa.k());
        cache.records.get_mut(&k).unwrap().lambda *= 1.001;
        let fixed = cache.solve(&p).unwrap();
        assert_eq!(cache.hits(), 0);
        assert!((fixed.lambda - mode.lambda).abs() < 1e-12 * mode.lambda);
    }
}
