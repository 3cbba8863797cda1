//! Append-only text store of search records, one per line:
//! `q N c best-size method certified members...`.
//!
//! A polynomial is written as its coefficients from degree 0 upward, one hex
//! digit each when `q <= 16`, otherwise decimal digits joined by `:`.
//! Coefficients of `c` are joined by `,`. The empty set is written `-`.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use super::count::Solver;
use super::search::{SearchMethod, SearchRecord};
use super::{EquationSpec, Triviality};
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::group::PointSet;
use crate::poly::GPoly;

pub fn encode_poly(x: &GPoly, q: u32) -> String {
    if q <= 16 {
        x.coeffs().iter().map(|&d| char::from_digit(d, 16).expect("digit < 16")).collect()
    } else {
        x.coeffs().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(":")
    }
}

pub fn decode_poly(s: &str, q: u32) -> Result<GPoly> {
    let digits: Vec<u32> = if q <= 16 {
        s.chars()
            .map(|ch| ch.to_digit(16).ok_or_else(|| Error::Parse(format!("bad digit {ch:?}"))))
            .collect::<Result<_>>()?
    } else {
        s.split(':')
            .map(|d| d.parse().map_err(|_| Error::Parse(format!("bad digit {d:?}"))))
            .collect::<Result<_>>()?
    };
    if digits.is_empty() || digits.iter().any(|&d| d >= q) {
        return Err(Error::Parse(format!("bad polynomial {s:?} for q = {q}")));
    }
    Ok(GPoly::from_coeffs(digits))
}

pub fn encode_record(r: &SearchRecord) -> String {
    let c = r.c.iter().map(|x| encode_poly(x, r.q)).collect::<Vec<_>>().join(",");
    let members = if r.best_set.is_empty() {
        "-".to_string()
    } else {
        r.members_poly()
            .iter()
            .map(|x| encode_poly(x, r.q))
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!(
        "{} {} {} {} {} {} {}",
        r.q,
        r.n,
        c,
        r.best_size,
        r.method.as_str(),
        r.certified,
        members
    )
}

/// Parses a line and re-verifies that the set is solution-free.
pub fn decode_record(line: &str) -> Result<SearchRecord> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() < 7 {
        return Err(Error::Parse(format!("expected at least 7 fields: {line:?}")));
    }
    let num = |s: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))
    };
    let q = num(parts[0])? as u32;
    let n = num(parts[1])?;
    let ctx = Arc::new(FieldCtx::of_order(q)?);
    let c = parts[2]
        .split(',')
        .map(|s| decode_poly(s, q))
        .collect::<Result<Vec<_>>>()?;
    let best_size = num(parts[3])?;
    let method = SearchMethod::parse(parts[4])
        .ok_or_else(|| Error::Parse(format!("bad method {:?}", parts[4])))?;
    let certified: bool = parts[5]
        .parse()
        .map_err(|_| Error::Parse(format!("bad flag {:?}", parts[5])))?;
    if certified != (method == SearchMethod::Exhaustive) {
        return Err(Error::Store("certified flag disagrees with method".into()));
    }
    let eq = EquationSpec::new(ctx, c)?;
    let solver = Solver::new(&eq, n)?;
    let g = solver.group();
    let mut best_set = Vec::new();
    if parts[6..] != ["-"] {
        for s in &parts[6..] {
            best_set.push(g.index(&decode_poly(s, q)?)?);
        }
    }
    best_set.sort_unstable();
    best_set.dedup();
    if best_set.len() != best_size {
        return Err(Error::Store(format!(
            "record claims size {best_size} but lists {} distinct members",
            best_set.len()
        )));
    }
    let set = PointSet::from_members(g.size(), best_set.iter().copied());
    if let Some(w) = solver.nontrivial(&set, Triviality::Lenient) {
        return Err(Error::Store(format!("stored set has non-trivial solution {w:?}")));
    }
    Ok(SearchRecord {
        q,
        n,
        c: eq.coeffs().to_vec(),
        best_set,
        best_size,
        method,
        certified,
    })
}

pub fn append(path: &Path, r: &SearchRecord) -> Result<()> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::Store(e.to_string()))?;
    writeln!(f, "{}", encode_record(r)).map_err(|e| Error::Store(e.to_string()))
}

/// Loads every record; blank lines and `#` comments are skipped.
pub fn load(path: &Path) -> Result<Vec<SearchRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::Store(e.to_string()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::Store(e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(decode_record(t).map_err(|e| Error::Store(format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}
