//! Line-oriented text format for polynomial maps.
//!
//! ```text
//! poly n m
//! e1 e2 ... en : c1 c2 ... cm
//! ```
//!
//! One monomial per line. Coefficients are printed with the shortest
//! decimal representation that reads back to the same `f64`, so a
//! write/read cycle is bit-exact. Blank lines and `#` comments are ignored.

use super::poly::{MultiIndex, PolyMap};
use crate::error::{Error, Result};

/// Shortest round-trip decimal form of a float.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Serializes `p` under header keyword `kind` (`poly`, `family`, ...).
pub fn write_poly_body(kind: &str, p: &PolyMap) -> String {
    let mut out = format!("{kind} {} {}\n", p.domain_dim(), p.range_dim());
    for (alpha, c) in p.terms() {
        let exps: Vec<String> = alpha.exponents().iter().map(u32::to_string).collect();
        let coeffs: Vec<String> = c.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&exps.join(" "));
        out.push_str(" : ");
        out.push_str(&coeffs.join(" "));
        out.push('\n');
    }
    out
}

/// Content lines with 1-based line numbers, comments and blanks removed.
pub(crate) fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            (!l.is_empty()).then_some((i + 1, l))
        })
        .collect()
}

pub(crate) fn is_header(line: &str) -> bool {
    line.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
}

/// Reads one polynomial block starting at `lines[*pos]`, advancing `pos`
/// past the block. The header must be `<kind> n m`.
pub(crate) fn read_poly_block(lines: &[(usize, &str)], pos: &mut usize, kind: &str) -> Result<PolyMap> {
    let (lineno, header) = *lines
        .get(*pos)
        .ok_or_else(|| Error::parse(lines.last().map_or(1, |l| l.0), format!("missing `{kind}` header")))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != kind {
        return Err(Error::parse(lineno, format!("expected `{kind} n m`, found `{header}`")));
    }
    let n: usize = toks[1].parse().map_err(|_| Error::parse(lineno, "bad domain dimension"))?;
    let m: usize = toks[2].parse().map_err(|_| Error::parse(lineno, "bad range dimension"))?;
    let mut p = PolyMap::zero(n, m).map_err(|e| Error::parse(lineno, e.to_string()))?;
    *pos += 1;
    while let Some(&(ln, line)) = lines.get(*pos) {
        if is_header(line) {
            break;
        }
        let (lhs, rhs) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(ln, "expected `exponents : coefficients`"))?;
        let exps = lhs
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| Error::parse(ln, format!("bad exponent `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        let coeffs = rhs
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::parse(ln, format!("bad coefficient `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        p.add_term(MultiIndex::new(exps), &coeffs)
            .map_err(|e| Error::parse(ln, e.to_string()))?;
        *pos += 1;
    }
    Ok(p)
}

/// Parses a complete `poly n m` document.
pub fn parse_poly(text: &str) -> Result<PolyMap> {
    parse_single(text, "poly")
}

/// Parses a document holding a single block with header keyword `kind`.
pub fn parse_single(text: &str, kind: &str) -> Result<PolyMap> {
    let lines = content_lines(text);
    let mut pos = 0;
    let p = read_poly_block(&lines, &mut pos, kind)?;
    if let Some(&(ln, _)) = lines.get(pos) {
        return Err(Error::parse(ln, "trailing content after polynomial"));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_basic() {
        let p = parse_poly("# x - x^2\npoly 1 1\n1 : 1\n2 : -1\n").unwrap();
        assert_eq!(p.eval(&[2.0]).unwrap(), vec![-2.0]);
        assert!(parse_poly("poly 1 1\n1 2 : 1\n").is_err());
        assert!(parse_poly("poly 1 1\n1 : 1 2\n").is_err());
        assert!(parse_poly("poly 1\n").is_err());
        assert!(parse_poly("family 1 1\n").is_err());
    }

    #[test]
    fn parse_error_carries_line() {
        match parse_poly("poly 2 1\n\n1 0 : x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn text_round_trip_is_bit_exact(
            terms in proptest::collection::vec(
                ((0u32..4, 0u32..4), (any::<f64>(), -1e300f64..1e300)), 0..12)
        ) {
            let mut p = PolyMap::zero(2, 2).unwrap();
            for ((a, b), (c0, c1)) in terms {
                let c0 = if c0.is_finite() { c0 } else { 0.5 };
                p.add_term(MultiIndex::new(vec![a, b]), &[c0, c1]).unwrap();
            }
            let back = parse_poly(&write_poly_body("poly", &p)).unwrap();
            for ((ka, va), (kb, vb)) in p.terms().zip(back.terms()) {
                prop_assert_eq!(ka, kb);
                for (x, y) in va.iter().zip(vb) {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
            }
            prop_assert_eq!(p.num_terms(), back.num_terms());
        }
    }
}
