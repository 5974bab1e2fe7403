//! `probe q R ambient` followed by `q` basis elements, each either a
//! `poly n m` block or a single `seq N v1 ... vN` line.

use super::{Ambient, Element, Probe};
use crate::error::{Error, Result};
use crate::polyjet::text::{content_lines, fmt_f64, read_poly_block, write_poly_body};

pub fn write_probe(p: &Probe) -> String {
    let mut out = format!("probe {} {} {}\n", p.dim(), fmt_f64(p.box_radius()), p.ambient());
    for b in p.basis() {
        match b {
            Element::Poly(poly) => out.push_str(&write_poly_body("poly", poly)),
            Element::Sequence(s) => {
                let vals: Vec<String> = s.iter().map(|&v| fmt_f64(v)).collect();
                out.push_str(&format!("seq {} {}\n", s.len(), vals.join(" ")));
            }
        }
    }
    out
}

pub fn parse_probe(text: &str) -> Result<Probe> {
    let lines = content_lines(text);
    let &(ln, header) = lines.first().ok_or_else(|| Error::parse(1, "empty probe file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "probe" {
        return Err(Error::parse(ln, "expected `probe q R ambient`"));
    }
    let q: usize = toks[1].parse().map_err(|_| Error::parse(ln, "bad basis count"))?;
    let r: f64 = toks[2].parse().map_err(|_| Error::parse(ln, "bad box radius"))?;
    let ambient: Ambient = toks[3].parse().map_err(|e: Error| Error::parse(ln, e.to_string()))?;

    let mut pos = 1;
    let mut basis = Vec::with_capacity(q);
    while pos < lines.len() {
        let (ln, line) = lines[pos];
        if line.starts_with("seq") {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let len: usize = toks
                .get(1)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(ln, "bad sequence length"))?;
            let vals = toks[2..]
                .iter()
                .map(|t| t.parse::<f64>().map_err(|_| Error::parse(ln, format!("bad value `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != len {
                return Err(Error::parse(ln, format!("sequence declares {len} values, has {}", vals.len())));
            }
            basis.push(Element::Sequence(vals));
            pos += 1;
        } else {
            basis.push(Element::Poly(read_poly_block(&lines, &mut pos, "poly")?));
        }
    }
    if basis.len() != q {
        return Err(Error::parse(ln, format!("header declares {q} basis elements, found {}", basis.len())));
    }
    Probe::new(ambient, basis)?.with_box_radius(r)
}
