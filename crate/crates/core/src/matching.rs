//! Offline sequence lookup against OEIS b-files and the oracle registry.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracles::OracleId;

/// Records shorter than this are not admitted to a [`Database`].
pub const MIN_RECORD_TERMS: usize = 8;

/// Number of terms materialized for each oracle record.
pub const ORACLE_RECORD_TERMS: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordSource {
    BFile(PathBuf),
    Oracle(OracleId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRecord {
    pub id: String,
    pub terms: Vec<(i64, BigInt)>,
    pub source: RecordSource,
}

impl SequenceRecord {
    pub fn from_oracle(id: OracleId, count: usize) -> Self {
        let offset = id.offset();
        let terms = id
            .terms(count)
            .into_iter()
            .enumerate()
            .map(|(i, v)| (offset + i as i64, v))
            .collect();
        Self { id: format!("oracle:{}", id.name()), terms, source: RecordSource::Oracle(id) }
    }

    pub fn values(&self) -> Vec<BigInt> {
        self.terms.iter().map(|(_, v)| v.clone()).collect()
    }
}

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{path}: line {line}: index {found} does not follow {previous}")]
    NonContiguousIndices { path: PathBuf, line: usize, previous: i64, found: i64 },
    #[error("{path}: no terms")]
    Empty { path: PathBuf },
    #[error("record {id} has {len} terms, fewer than {min}")]
    TooShort { id: String, len: usize, min: usize },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Parses an OEIS b-file: `index value` per line, `#` comments and blanks skipped.
pub fn parse_bfile(text: &str, path: &Path) -> Result<Vec<(i64, BigInt)>, MatchError> {
    let mut terms: Vec<(i64, BigInt)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: &str| MatchError::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message: message.to_string(),
        };
        let mut fields = line.split_whitespace();
        let (Some(idx), Some(val)) = (fields.next(), fields.next()) else {
            return Err(parse_err("expected 'index value'"));
        };
        if fields.next().is_some() {
            return Err(parse_err("trailing fields"));
        }
        let idx: i64 = idx.parse().map_err(|_| parse_err("bad index"))?;
        let val: BigInt = val.parse().map_err(|_| parse_err("bad value"))?;
        if let Some(&(prev, _)) = terms.last() {
            if idx != prev + 1 {
                return Err(MatchError::NonContiguousIndices {
                    path: path.to_path_buf(),
                    line: line_no,
                    previous: prev,
                    found: idx,
                });
            }
        }
        terms.push((idx, val));
    }
    if terms.is_empty() {
        return Err(MatchError::Empty { path: path.to_path_buf() });
    }
    Ok(terms)
}

/// Loads a b-file. The record id is `Annnnnn` for files named `bnnnnnn.txt`,
/// otherwise the file stem.
pub fn load_bfile(path: &Path) -> Result<SequenceRecord, MatchError> {
    let text = fs::read_to_string(path)
        .map_err(|source| MatchError::Io { path: path.to_path_buf(), source })?;
    let terms = parse_bfile(&text, path)?;
    Ok(SequenceRecord { id: record_id(path), terms, source: RecordSource::BFile(path.to_path_buf()) })
}

fn record_id(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("unknown");
    match stem.strip_prefix('b') {
        Some(digits) if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => {
            format!("A{digits:0>6}")
        }
        _ => stem.to_string(),
    }
}

#[derive(Debug, Clone, Default)]
pub struct Database {
    records: Vec<SequenceRecord>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    /// All registered oracles.
    pub fn with_oracles() -> Self {
        let mut db = Self::new();
        for id in OracleId::ALL {
            db.add(SequenceRecord::from_oracle(id, ORACLE_RECORD_TERMS)).expect("oracle records are long");
        }
        db
    }

    /// Oracles plus every `*.txt` b-file in `dir`, in file-name order.
    pub fn load(dir: Option<&Path>) -> Result<Self, MatchError> {
        let mut db = Self::with_oracles();
        if let Some(dir) = dir {
            let io = |source| MatchError::Io { path: dir.to_path_buf(), source };
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(io)?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<_, _>>()
                .map_err(io)?;
            paths.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"));
            paths.sort();
            for p in paths {
                db.add(load_bfile(&p)?)?;
            }
        }
        Ok(db)
    }

    pub fn add(&mut self, record: SequenceRecord) -> Result<(), MatchError> {
        if record.terms.len() < MIN_RECORD_TERMS {
            return Err(MatchError::TooShort {
                id: record.id,
                len: record.terms.len(),
                min: MIN_RECORD_TERMS,
            });
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[SequenceRecord] {
        &self.records
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOptions {
    pub max_shift: i64,
    pub allow_sign: bool,
    pub min_overlap: usize,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self { max_shift: 4, allow_sign: true, min_overlap: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub record: String,
    pub shift: i64,
    pub sign: i8,
    pub overlap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchReport {
    pub candidate_length: usize,
    pub matches: Vec<Match>,
}

/// Overlap length if `a[i] = sign · b[i + shift]` on every position where
/// both are defined; `None` on any disagreement.
pub fn align(a: &[BigInt], b: &[BigInt], shift: i64, sign: i8) -> Option<usize> {
    let lo = 0.max(-shift);
    let hi = (a.len() as i64).min(b.len() as i64 - shift);
    if hi <= lo {
        return Some(0);
    }
    let agree = (lo..hi).all(|i| {
        let (x, y) = (&a[i as usize], &b[(i + shift) as usize]);
        if sign < 0 {
            *x == -y
        } else {
            x == y
        }
    });
    agree.then_some((hi - lo) as usize)
}

pub fn match_sequence(candidate: &[BigInt], db: &Database, opts: &MatchOptions) -> MatchReport {
    let signs: &[i8] = if opts.allow_sign { &[1, -1] } else { &[1] };
    let mut matches = Vec::new();
    for record in db.records() {
        let values = record.values();
        for shift in -opts.max_shift..=opts.max_shift {
            for &sign in signs {
                let Some(overlap) = align(candidate, &values, shift, sign) else {
                    continue;
                };
                // Zero on the whole overlap matches with either sign; keep only +1.
                if overlap < opts.min_overlap
                    || (sign < 0 && overlap_is_zero(candidate, shift, values.len()))
                {
                    continue;
                }
                matches.push(Match { record: record.id.clone(), shift, sign, overlap });
            }
        }
    }
    matches.sort_by(|a, b| (&a.record, a.shift, a.sign).cmp(&(&b.record, b.shift, b.sign)));
    MatchReport { candidate_length: candidate.len(), matches }
}

fn overlap_is_zero(candidate: &[BigInt], shift: i64, record_len: usize) -> bool {
    let lo = 0.max(-shift) as usize;
    let hi = (candidate.len() as i64).min(record_len as i64 - shift).max(0) as usize;
    candidate[lo.min(hi)..hi].iter().all(Zero::is_zero)
}
