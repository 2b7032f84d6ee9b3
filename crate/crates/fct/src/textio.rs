//! Plain-text index sets and expansions.
//!
//! An index set is a header line `D d s count` (`s` is `1`, `2` or `inf`)
//! followed by `count` lines of `D` space-separated exponents. An expansion
//! appends `count` coefficient lines in the same order, written in shortest
//! round-trip decimal form.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use fct_core::{ChebExpansion, IndexSet, Norm};

use crate::error::{Error, Result};

pub fn write_index_set<W: Write>(set: &IndexSet, out: &mut W) -> Result<()> {
    let mut buf = String::new();
    writeln!(buf, "{} {} {} {}", set.dim(), set.degree(), set.norm(), set.len()).unwrap();
    for m in set.iter() {
        let mut first = true;
        for v in m {
            if !first {
                buf.push(' ');
            }
            first = false;
            write!(buf, "{v}").unwrap();
        }
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

pub fn write_expansion<W: Write>(e: &ChebExpansion, out: &mut W) -> Result<()> {
    write_index_set(e.index_set(), out)?;
    let mut buf = String::new();
    for c in e.coefficients() {
        writeln!(buf, "{c:?}").unwrap();
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

struct Lines<R> {
    inner: R,
    line: String,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    /// Next non-blank line, trimmed.
    fn next(&mut self) -> Result<Option<&str>> {
        loop {
            self.line.clear();
            if self.inner.read_line(&mut self.line)? == 0 {
                return Ok(None);
            }
            self.number += 1;
            if !self.line.trim().is_empty() {
                return Ok(Some(self.line.trim()));
            }
        }
    }

    fn expect(&mut self, what: &str) -> Result<&str> {
        let number = self.number + 1;
        self.next()?
            .ok_or_else(|| Error::Format(format!("line {number}: expected {what}, found end of file")))
    }

    fn bad(&self, msg: impl std::fmt::Display) -> Error {
        Error::Format(format!("line {}: {msg}", self.number))
    }
}

struct Header {
    dim: usize,
    degree: u32,
    norm: Norm,
    count: usize,
}

fn read_header<R: BufRead>(lines: &mut Lines<R>) -> Result<Header> {
    let header = lines.expect("header `D d s count`")?.to_string();
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(lines.bad("header must be `D d s count`"));
    }
    Ok(Header {
        dim: fields[0].parse().map_err(|_| lines.bad("bad dimension"))?,
        degree: fields[1].parse().map_err(|_| lines.bad("bad degree"))?,
        norm: Norm::parse(fields[2]).ok_or_else(|| lines.bad("norm must be 1, 2 or inf"))?,
        count: fields[3].parse().map_err(|_| lines.bad("bad count"))?,
    })
}

fn read_members<R: BufRead>(lines: &mut Lines<R>, count: usize) -> Result<Vec<Vec<u32>>> {
    let mut members = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let line = lines.expect("a multi-index")?;
        let m: std::result::Result<Vec<u32>, _> =
            line.split_whitespace().map(str::parse::<u32>).collect();
        members.push(m.map_err(|_| lines.bad("exponents must be non-negative integers"))?);
    }
    Ok(members)
}

fn lines<R: BufRead>(input: R) -> Lines<R> {
    Lines {
        inner: input,
        line: String::new(),
        number: 0,
    }
}

pub fn read_index_set<R: BufRead>(input: R) -> Result<IndexSet> {
    let mut lines = lines(input);
    let h = read_header(&mut lines)?;
    let members = read_members(&mut lines, h.count)?;
    if lines.next()?.is_some() {
        return Err(lines.bad("unexpected trailing content"));
    }
    Ok(IndexSet::from_indices(h.dim, h.degree, h.norm, &members)?)
}

/// Reads an expansion. Coefficients are matched to the members in file order,
/// so a file whose members are not in canonical order still round-trips.
pub fn read_expansion<R: BufRead>(input: R) -> Result<ChebExpansion> {
    let mut lines = lines(input);
    let h = read_header(&mut lines)?;
    let members = read_members(&mut lines, h.count)?;
    let mut coefs = Vec::with_capacity(members.len());
    for _ in 0..h.count {
        let line = lines.expect("a coefficient")?;
        let c: f64 = line.parse().map_err(|_| lines.bad("bad coefficient"))?;
        coefs.push(c);
    }
    if lines.next()?.is_some() {
        return Err(lines.bad("unexpected trailing content"));
    }
    let set = IndexSet::from_indices(h.dim, h.degree, h.norm, &members)?;
    let mut aligned = vec![0.0; h.count];
    for (m, c) in members.iter().zip(coefs) {
        let pos = set.position_of(m)?.expect("member of its own set");
        aligned[pos] = c;
    }
    Ok(ChebExpansion::new(Arc::new(set), aligned)?)
}

pub fn load_index_set(path: &Path) -> Result<IndexSet> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_index_set(std::io::BufReader::new(file))
}

pub fn load_expansion(path: &Path) -> Result<ChebExpansion> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_expansion(std::io::BufReader::new(file))
}

pub fn save_expansion(e: &ChebExpansion, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_expansion(e, &mut buf)?;
    crate::atomic_write(path, &buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_set_round_trip() {
        let set = IndexSet::enumerate(3, 4, Norm::Two).unwrap();
        let mut buf = Vec::new();
        write_index_set(&set, &mut buf).unwrap();
        assert!(buf.starts_with(b"3 4 2 "));
        let back = read_index_set(buf.as_slice()).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn expansion_round_trip_is_exact() {
        let set = Arc::new(IndexSet::enumerate(2, 3, Norm::Max).unwrap());
        let coefs: Vec<f64> = (0..set.len()).map(|i| (i as f64 + 0.1).sqrt() / 7.0 - 0.3).collect();
        let e = ChebExpansion::new(set, coefs).unwrap();
        let mut buf = Vec::new();
        write_expansion(&e, &mut buf).unwrap();
        let back = read_expansion(buf.as_slice()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn reads_members_in_any_order() {
        let text = "2 3 1 3\n1 0\n0 0\n0 1\n0.5\n1.5\n-2\n";
        let e = read_expansion(text.as_bytes()).unwrap();
        assert_eq!(e.coefficient(&[0, 0]).unwrap(), 1.5);
        assert_eq!(e.coefficient(&[1, 0]).unwrap(), 0.5);
        assert_eq!(e.coefficient(&[0, 1]).unwrap(), -2.0);
    }

    #[test]
    fn rejects_malformed_input() {
        for text in [
            "",
            "2 3 1",
            "2 3 7 1\n0 0\n",
            "2 3 1 2\n0 0\n",
            "2 3 1 1\n0 4\n",
            "2 3 1 2\n0 0\n0 0\n",
            "2 3 1 1\n0 0\nextra\n",
            "2 3 1 1\n0 -1\n",
        ] {
            assert!(read_index_set(text.as_bytes()).is_err(), "{text:?}");
        }
        assert!(read_expansion("1 1 1 1\n1\nabc\n".as_bytes()).is_err());
    }
}
