//! On-disk sieve cache.
//!
//! Layout (all integers little-endian):
//!
//! | bytes | content                          |
//! |-------|----------------------------------|
//! | 4     | magic `SPL1`                     |
//! | 4     | format version (`u32`)           |
//! | 8     | limit (`u64`)                    |
//! | 8·w   | bitset words (`u64`), `w = limit/64 + 1` |

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::primes::SieveCache;

pub const MAGIC: &[u8; 4] = b"SPL1";
pub const FORMAT_VERSION: u32 = 1;
/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "SPL_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = "./cache";
pub const SIEVE_FILE_NAME: &str = "sieve.spl";

/// Cache directory from `SPL_CACHE_DIR`, falling back to `./cache`.
pub fn cache_dir_from_env() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

pub fn write_sieve<W: Write>(mut out: W, sieve: &SieveCache) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&sieve.limit().to_le_bytes())?;
    for w in sieve.words() {
        out.write_all(&w.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_sieve<R: Read>(mut input: R) -> Result<SieveCache> {
    let mut header = [0u8; 16];
    input
        .read_exact(&mut header)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    if &header[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let limit = u64::from_le_bytes(header[8..16].try_into().unwrap());
    let words = usize::try_from(limit / 64 + 1)
        .map_err(|_| Error::Format(format!("limit {limit} too large")))?;
    let mut raw = vec![0u8; words * 8];
    input
        .read_exact(&mut raw)
        .map_err(|e| Error::Format(format!("truncated bitset: {e}")))?;
    let mut trailing = [0u8; 1];
    if input.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after bitset".into()));
    }
    let bits = raw
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    SieveCache::from_words(limit, bits)
}

/// Writes to a temporary sibling and renames over `path`.
pub fn save_atomic(path: &Path, sieve: &SieveCache) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    {
        let file = File::create(&tmp)?;
        let mut out = BufWriter::new(file);
        write_sieve(&mut out, sieve)?;
        out.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<SieveCache> {
    read_sieve(BufReader::new(File::open(path)?))
}

/// Loads the cached sieve from `dir` if it covers `limit`; otherwise builds
/// a sieve to `limit` and replaces the cache file.
pub fn load_or_build(dir: &Path, limit: u64) -> Result<SieveCache> {
    let path = dir.join(SIEVE_FILE_NAME);
    if let Ok(cached) = load(&path) {
        if cached.limit() >= limit {
            return Ok(cached);
        }
    }
    let sieve = SieveCache::build(limit)?;
    save_atomic(&path, &sieve)?;
    Ok(sieve)
}
