//! Measure files (`measure d k` then `x1 ... xd : w` lines) and interval
//! files (`intervals k [lo hi]` then `a b` lines).

use super::discrete::DiscreteMeasure;
use super::intervals::IntervalSet;
use crate::error::{Error, Result};
use crate::polyjet::text::{content_lines, fmt_f64};

fn parse_f64(ln: usize, t: &str) -> Result<f64> {
    t.parse::<f64>().map_err(|_| Error::parse(ln, format!("bad number `{t}`")))
}

pub fn write_measure(mu: &DiscreteMeasure) -> String {
    let mut out = format!("measure {} {}\n", mu.dim(), mu.num_atoms());
    for (x, w) in mu.atoms() {
        let xs: Vec<String> = x.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&format!("{} : {}\n", xs.join(" "), fmt_f64(w)));
    }
    out
}

pub fn parse_measure(text: &str) -> Result<DiscreteMeasure> {
    let lines = content_lines(text);
    let &(ln, header) = lines.first().ok_or_else(|| Error::parse(1, "empty measure file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != "measure" {
        return Err(Error::parse(ln, "expected `measure d k`"));
    }
    let d: usize = toks[1].parse().map_err(|_| Error::parse(ln, "bad dimension"))?;
    let k: usize = toks[2].parse().map_err(|_| Error::parse(ln, "bad atom count"))?;
    if lines.len() - 1 != k {
        return Err(Error::parse(ln, format!("header declares {k} atoms, found {}", lines.len() - 1)));
    }
    let mut atoms = Vec::with_capacity(k);
    for &(ln, line) in &lines[1..] {
        let (lhs, rhs) = line.split_once(':').ok_or_else(|| Error::parse(ln, "expected `x1 ... xd : w`"))?;
        let x = lhs.split_whitespace().map(|t| parse_f64(ln, t)).collect::<Result<Vec<_>>>()?;
        let w = parse_f64(ln, rhs.trim())?;
        if x.len() != d {
            return Err(Error::parse(ln, format!("atom has {} coordinates, expected {d}", x.len())));
        }
        atoms.push((x, w));
    }
    DiscreteMeasure::new(d, atoms).map_err(|e| Error::parse(ln, e.to_string()))
}

pub fn write_intervals(s: &IntervalSet) -> String {
    let (lo, hi) = s.ambient();
    let mut out = format!("intervals {} {} {}\n", s.len(), fmt_f64(lo), fmt_f64(hi));
    for &(a, b) in s.intervals() {
        out.push_str(&format!("{} {}\n", fmt_f64(a), fmt_f64(b)));
    }
    out
}

/// Without an explicit ambient on the header line, the ambient is the hull
/// of the listed intervals (`[0, 1]` for an empty list).
pub fn parse_intervals(text: &str) -> Result<IntervalSet> {
    let lines = content_lines(text);
    let &(ln, header) = lines.first().ok_or_else(|| Error::parse(1, "empty interval file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if !(toks.len() == 2 || toks.len() == 4) || toks[0] != "intervals" {
        return Err(Error::parse(ln, "expected `intervals k [lo hi]`"));
    }
    let k: usize = toks[1].parse().map_err(|_| Error::parse(ln, "bad interval count"))?;
    if lines.len() - 1 != k {
        return Err(Error::parse(ln, format!("header declares {k} intervals, found {}", lines.len() - 1)));
    }
    let mut raw = Vec::with_capacity(k);
    for &(ln, line) in &lines[1..] {
        let v: Vec<f64> = line.split_whitespace().map(|t| parse_f64(ln, t)).collect::<Result<_>>()?;
        if v.len() != 2 || !(v[0] < v[1]) {
            return Err(Error::parse(ln, "expected `a b` with a < b"));
        }
        raw.push((v[0], v[1]));
    }
    let ambient = if toks.len() == 4 {
        (parse_f64(ln, toks[2])?, parse_f64(ln, toks[3])?)
    } else if raw.is_empty() {
        (0.0, 1.0)
    } else {
        let lo = raw.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let hi = raw.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    IntervalSet::from_intervals(ambient, raw).map_err(|e| Error::parse(ln, e.to_string()))
}
