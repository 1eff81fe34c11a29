//! Coefficient tables: `<index> <p/q>` lines under a `# table <name>` header.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exact::{parse_rational, Rational};

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("{table}: line {line}: malformed entry {text:?}")]
    Malformed { table: String, line: usize, text: String },
    #[error("{table}: duplicate index {index}")]
    Duplicate { table: String, index: usize },
    #[error("{table}: expected {expected} entries (indices 0..{expected}), found {found}")]
    Count { table: String, expected: usize, found: usize },
    #[error("{table}: header names table {found:?}")]
    Header { table: String, found: String },
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub const F0_LEN: usize = 15;
pub const W0_LEN: usize = 45;
pub const W1_LEN: usize = 36;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checksums {
    pub f0: String,
    pub w0: String,
    pub w1: String,
}

#[derive(Debug, Clone)]
pub struct Tables {
    pub f0: Vec<Rational>,
    pub w0: Vec<Rational>,
    /// Stored entries only; the two tail coefficients are solved for.
    pub w1: Vec<Rational>,
    pub checksums: Checksums,
}

fn sha_hex(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses one table. Comment lines start with `#`; the first one must be
/// `# table <name>...` when present.
pub fn parse_table(name: &str, text: &str, expected: usize) -> Result<Vec<Rational>, TableError> {
    let mut entries = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            let c = c.trim();
            if let Some(rest) = c.strip_prefix("table ") {
                let found = rest.split(|ch: char| ch == ':' || ch.is_whitespace()).next().unwrap_or("");
                if found != name {
                    return Err(TableError::Header { table: name.into(), found: found.into() });
                }
            }
            continue;
        }
        let bad = || TableError::Malformed { table: name.into(), line: ln + 1, text: raw.to_string() };
        let mut it = line.split_whitespace();
        let (Some(i), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(bad());
        };
        let index: usize = i.parse().map_err(|_| bad())?;
        let value = parse_rational(v).map_err(|_| bad())?;
        if entries.insert(index, value).is_some() {
            return Err(TableError::Duplicate { table: name.into(), index });
        }
    }
    let contiguous = entries.keys().copied().eq(0..entries.len());
    if entries.len() != expected || !contiguous {
        return Err(TableError::Count { table: name.into(), expected, found: entries.len() });
    }
    Ok(entries.into_values().collect())
}

fn from_texts(f0: &str, w0: &str, w1: &str) -> Result<Tables, TableError> {
    Ok(Tables {
        f0: parse_table("f0", f0, F0_LEN)?,
        w0: parse_table("w0", w0, W0_LEN)?,
        w1: parse_table("w1", w1, W1_LEN)?,
        checksums: Checksums { f0: sha_hex(f0), w0: sha_hex(w0), w1: sha_hex(w1) },
    })
}

/// Reads `f0.tab`, `w0.tab`, `w1.tab` from `dir`.
pub fn ingest_tables(dir: &Path) -> Result<Tables, TableError> {
    let read = |f: &str| {
        let p = dir.join(f);
        std::fs::read_to_string(&p).map_err(|source| TableError::Io { path: p.display().to_string(), source })
    };
    from_texts(&read("f0.tab")?, &read("w0.tab")?, &read("w1.tab")?)
}

/// The tables shipped with the crate.
pub fn builtin_tables() -> Tables {
    from_texts(
        include_str!("../data/f0.tab"),
        include_str!("../data/w0.tab"),
        include_str!("../data/w1.tab"),
    )
    .expect("bundled tables are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn builtin_entries() {
        let t = builtin_tables();
        assert_eq!(t.f0[0], rat(268245, 72878));
        assert_eq!(t.w1[0], rat(4607589, 9727120));
        assert_eq!((t.f0.len(), t.w0.len(), t.w1.len()), (15, 45, 36));
        assert_eq!(t.checksums.f0.len(), 64);
    }

    #[test]
    fn count_and_format_errors() {
        let short: String = (0..14).map(|i| format!("{i} 1/2\n")).collect();
        assert!(matches!(parse_table("f0", &short, 15), Err(TableError::Count { found: 14, .. })));
        assert!(matches!(parse_table("f0", "0 1/2\n0 1/3\n", 2), Err(TableError::Duplicate { index: 0, .. })));
        assert!(matches!(parse_table("f0", "0 1/0x\n", 1), Err(TableError::Malformed { line: 1, .. })));
        assert!(matches!(parse_table("f0", "# table w0\n0 1\n", 1), Err(TableError::Header { .. })));
        assert!(matches!(parse_table("f0", "0 1\n2 1\n", 2), Err(TableError::Count { .. })));
    }
}
