//! On-disk cache of enumerated isomorphism classes.
//!
//! File layout: a `count=<int> n=<int>` header, then one canonical code per
//! line. Files are named by order and format version.

use std::fs;
use std::path::{Path, PathBuf};

use crate::enumeration::{canonical_form, enumerate_classes, CanonicalForm};
use crate::error::{Error, Result};

pub const CACHE_DIR_ENV: &str = "TTPACK_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = "./cache";
pub const FORMAT_VERSION: u32 = 1;

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

pub fn cache_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("classes-n{n}.v{FORMAT_VERSION}.txt"))
}

pub fn render(n: usize, classes: &[CanonicalForm]) -> String {
    let mut s = format!("count={} n={}\n", classes.len(), n);
    for c in classes {
        s.push_str(&c.to_string());
        s.push('\n');
    }
    s
}

/// Parses a cache file, rejecting codes that are not canonical for `n`.
pub fn parse(text: &str) -> Result<(usize, Vec<CanonicalForm>)> {
    let mut lines = text.split('\n');
    let header = lines.next().unwrap_or_default();
    let (count, n) = parse_header(header).ok_or_else(|| Error::parse(0, "expected \"count=<int> n=<int>\""))?;
    let mut offset = header.len() + 1;
    let mut classes = Vec::with_capacity(count);
    for line in lines.take(count) {
        // n = 1 has an empty code.
        let code: CanonicalForm = if n == 1 && line.is_empty() {
            canonical_form(&crate::Tournament::transitive(1)?)?
        } else {
            line.parse().map_err(|e| match e {
                Error::Parse { offset: o, message } => Error::parse(offset + o, message),
                e => e,
            })?
        };
        if code.n() != n || canonical_form(&code.to_tournament())? != code {
            return Err(Error::parse(offset, "not a canonical code of the declared order"));
        }
        classes.push(code);
        offset += line.len() + 1;
    }
    if classes.len() != count {
        return Err(Error::parse(offset.min(text.len()), format!("expected {count} codes, found {}", classes.len())));
    }
    Ok((n, classes))
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut parts = line.split_whitespace();
    let count = parts.next()?.strip_prefix("count=")?.parse().ok()?;
    let n = parts.next()?.strip_prefix("n=")?.parse().ok()?;
    parts.next().is_none().then_some((count, n))
}

/// Reads the class list for `n` from `dir`, building and writing it on a miss.
/// An unreadable or inconsistent file is rebuilt.
pub fn load_or_build(dir: &Path, n: usize) -> Result<Vec<CanonicalForm>> {
    let path = cache_path(dir, n);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok((m, classes)) = parse(&text) {
            if m == n {
                return Ok(classes);
            }
        }
    }
    let classes = enumerate_classes(n)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, render(n, &classes))?;
    fs::rename(&tmp, &path)?;
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_reuse() {
        let dir = tempfile::tempdir().unwrap();
        let built = load_or_build(dir.path(), 5).unwrap();
        let text = fs::read_to_string(cache_path(dir.path(), 5)).unwrap();
        assert!(text.starts_with("count=12 n=5\n"));
        assert_eq!(parse(&text).unwrap(), (5, built.clone()));
        assert_eq!(load_or_build(dir.path(), 5).unwrap(), built);
        let one = load_or_build(dir.path(), 1).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn corrupt_files_are_rejected_or_rebuilt() {
        assert!(parse("count=2 n=3\n000\n").is_err());
        assert!(parse("count=1 n=3\n111\n").is_err()); // not minimal
        let dir = tempfile::tempdir().unwrap();
        fs::write(cache_path(dir.path(), 4), "garbage").unwrap();
        assert_eq!(load_or_build(dir.path(), 4).unwrap().len(), 4);
    }
}
