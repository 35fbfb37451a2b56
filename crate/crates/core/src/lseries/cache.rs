//! On-disk coefficient cache: a header line
//! `# family=<f> twist=<T> power=<n> level=<L> weight=<w>` followed by
//! `n<TAB>a_n` records. Writes go to a temporary file that is renamed into
//! place while holding a lock file.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use super::{CoefficientTable, Origin};
use crate::cm_curves::Family;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheKey {
    pub family: Family,
    pub twist: i128,
    pub power: u32,
}

impl CacheKey {
    fn file_name(&self) -> String {
        format!("f{}_t{}_n{}.tsv", self.family.order(), self.twist, self.power)
    }
}

/// `$CYARITH_CACHE`, else `~/.cyarith`.
pub fn default_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os("CYARITH_CACHE") {
        return PathBuf::from(dir);
    }
    let home = std::env::var_os("HOME").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    home.join(".cyarith")
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

fn cache_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Cache { path: path.display().to_string(), message: message.into() }
}

/// Reads a cached table if present and long enough.
pub fn load(dir: &Path, key: &CacheKey, bound: usize) -> Result<Option<CoefficientTable>> {
    let path = dir.join(key.file_name());
    let file = match File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(io_err(&path, e)),
    };
    let mut lines = BufReader::new(file).lines();
    let header = match lines.next() {
        Some(h) => h.map_err(|e| io_err(&path, e))?,
        None => return Err(cache_err(&path, "empty file")),
    };
    let mut level = None;
    let mut weight = None;
    for field in header.trim_start_matches('#').split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| cache_err(&path, "malformed header"))?;
        let bad = |_| cache_err(&path, format!("bad header value {field}"));
        match k {
            "level" => level = Some(v.parse::<u64>().map_err(bad)?),
            "weight" => weight = Some(v.parse::<u32>().map_err(bad)?),
            "family" if v != key.family.order().to_string() => return Err(cache_err(&path, "family mismatch")),
            "twist" if v != key.twist.to_string() => return Err(cache_err(&path, "twist mismatch")),
            "power" if v != key.power.to_string() => return Err(cache_err(&path, "power mismatch")),
            _ => {}
        }
    }
    let (level, weight) = match (level, weight) {
        (Some(l), Some(w)) => (l, w),
        _ => return Err(cache_err(&path, "header lacks level or weight")),
    };
    let mut coefficients = vec![0i128];
    for line in lines {
        let line = line.map_err(|e| io_err(&path, e))?;
        let (n, a) = line.split_once('\t').ok_or_else(|| cache_err(&path, format!("bad record {line:?}")))?;
        let n: usize = n.parse().map_err(|_| cache_err(&path, format!("bad index {n:?}")))?;
        if n != coefficients.len() {
            return Err(cache_err(&path, format!("records out of order at {n}")));
        }
        coefficients.push(a.parse().map_err(|_| cache_err(&path, format!("bad coefficient {a:?}")))?);
    }
    if coefficients.len() <= bound {
        return Ok(None);
    }
    let table = CoefficientTable { weight, level, coefficients, origin: Origin::Cache };
    Ok(Some(table.truncated(bound)))
}

struct Lock(PathBuf);

impl Lock {
    fn acquire(path: PathBuf) -> Result<Lock> {
        for _ in 0..600 {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(_) => return Ok(Lock(path)),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    thread::sleep(Duration::from_millis(50))
                }
                Err(e) => return Err(io_err(&path, e)),
            }
        }
        Err(cache_err(&path, "timed out waiting for lock"))
    }
}

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

pub fn store(dir: &Path, key: &CacheKey, table: &CoefficientTable) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(key.file_name());
    let _lock = Lock::acquire(dir.join(format!("{}.lock", key.file_name())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", key.file_name(), std::process::id()));
    {
        let mut out = std::io::BufWriter::new(File::create(&tmp).map_err(|e| io_err(&tmp, e))?);
        let mut body = format!(
            "# family={} twist={} power={} level={} weight={}\n",
            key.family.order(),
            key.twist,
            key.power,
            table.level,
            table.weight
        );
        for (n, a) in table.iter() {
            body.push_str(&format!("{n}\t{a}\n"));
        }
        out.write_all(body.as_bytes()).map_err(|e| io_err(&tmp, e))?;
        out.flush().map_err(|e| io_err(&tmp, e))?;
    }
    fs::rename(&tmp, &path).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Cached table of length at least `bound`, computing and storing on a miss.
pub fn get_or_compute<F>(dir: &Path, key: &CacheKey, bound: usize, compute: F) -> Result<CoefficientTable>
where
    F: FnOnce(usize) -> Result<CoefficientTable>,
{
    if let Some(t) = load(dir, key, bound)? {
        return Ok(t);
    }
    let table = compute(bound)?;
    store(dir, key, &table)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let key = CacheKey { family: Family::Four, twist: -3, power: 3 };
        let table = CoefficientTable { weight: 3, level: 288, coefficients: vec![0, 1, 0, -5, 12], origin: Origin::PointCount };
        let path = store(dir.path(), &key, &table).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert!(text.starts_with("# family=4 twist=-3 power=3 level=288 weight=3\n1\t1\n"));
        let back = load(dir.path(), &key, 4).unwrap().unwrap();
        assert_eq!(back.coefficients, table.coefficients);
        assert_eq!(back.level, 288);
        assert!(load(dir.path(), &key, 5).unwrap().is_none());
        assert_eq!(load(dir.path(), &key, 2).unwrap().unwrap().len(), 2);
        let other = CacheKey { family: Family::Four, twist: 1, power: 3 };
        assert!(load(dir.path(), &other, 1).unwrap().is_none());
    }

    #[test]
    fn corrupt_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let key = CacheKey { family: Family::Three, twist: 1, power: 1 };
        fs::write(dir.path().join(key.file_name()), "# family=3 twist=1 power=1 level=144 weight=1\n1\tx\n").unwrap();
        assert!(matches!(load(dir.path(), &key, 1), Err(Error::Cache { .. })));
    }
}
