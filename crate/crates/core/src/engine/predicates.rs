use std::collections::BTreeMap;

use crate::dynamics::{find_periodic_orbits, hyperbolicity, SeedSpec, Verdict};
use crate::error::{Error, Result};
use crate::probes::Element;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Holds,
    Fails,
    Undecided,
}

/// A property of function-space elements, judged at the perturbed element
/// `f + sum lambda_i g_i` (with `lambda` passed along for predicates
/// defined directly on probe coordinates).
///
/// Implementations must be total and pure: the same input gives the same
/// outcome on any thread.
pub trait PropertyPredicate: Send + Sync {
    fn name(&self) -> String;

    fn evaluate(&self, element: &Element, lambda: &[f64]) -> Outcome;

    /// Whether the failure set meets the open box `(lo, hi)` of probe
    /// coordinates, when the predicate can decide it exactly.
    fn fails_somewhere_in(&self, _lo: &[f64], _hi: &[f64]) -> Option<bool> {
        None
    }
}

pub struct AlwaysHolds;
pub struct AlwaysFails;

impl PropertyPredicate for AlwaysHolds {
    fn name(&self) -> String {
        "always-holds".into()
    }
    fn evaluate(&self, _: &Element, _: &[f64]) -> Outcome {
        Outcome::Holds
    }
    fn fails_somewhere_in(&self, _: &[f64], _: &[f64]) -> Option<bool> {
        Some(false)
    }
}

impl PropertyPredicate for AlwaysFails {
    fn name(&self) -> String {
        "always-fails".into()
    }
    fn evaluate(&self, _: &Element, _: &[f64]) -> Outcome {
        Outcome::Fails
    }
    fn fails_somewhere_in(&self, _: &[f64], _: &[f64]) -> Option<bool> {
        Some(true)
    }
}

/// Fails where `lambda[coord] > 0`.
pub struct HalfSpace {
    pub coord: usize,
}

impl PropertyPredicate for HalfSpace {
    fn name(&self) -> String {
        format!("half-space(coord={})", self.coord)
    }
    fn evaluate(&self, _: &Element, lambda: &[f64]) -> Outcome {
        match lambda.get(self.coord) {
            Some(&v) if v > 0.0 => Outcome::Fails,
            _ => Outcome::Holds,
        }
    }
    fn fails_somewhere_in(&self, _lo: &[f64], hi: &[f64]) -> Option<bool> {
        Some(hi.get(self.coord).is_some_and(|&h| h > 0.0))
    }
}

/// Holds where `|int_0^1 f| > tol`, by composite Simpson on `nodes` points
/// for scalar polynomials on `R`, or the trapezoid rule on an equally
/// spaced grid for sequences.
pub struct IntegralNonzero {
    pub tol: f64,
    pub nodes: usize,
}

impl Default for IntegralNonzero {
    fn default() -> Self {
        IntegralNonzero { tol: 1e-10, nodes: 101 }
    }
}

impl IntegralNonzero {
    fn integral(&self, e: &Element) -> Option<f64> {
        match e {
            Element::Poly(p) if p.domain_dim() == 1 && p.range_dim() == 1 => {
                let k = (self.nodes.max(3) - 1) / 2 * 2;
                let h = 1.0 / k as f64;
                let s: f64 = (0..=k)
                    .map(|i| {
                        let w = if i == 0 || i == k { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                        w * p.eval_unchecked(&[i as f64 * h])[0]
                    })
                    .sum();
                Some(s * h / 3.0)
            }
            Element::Sequence(v) if v.len() >= 2 => {
                let h = 1.0 / (v.len() - 1) as f64;
                let inner: f64 = v[1..v.len() - 1].iter().sum();
                Some(h * (inner + 0.5 * (v[0] + v[v.len() - 1])))
            }
            _ => None,
        }
    }
}

impl PropertyPredicate for IntegralNonzero {
    fn name(&self) -> String {
        "integral-nonzero".into()
    }
    fn evaluate(&self, e: &Element, _: &[f64]) -> Outcome {
        match self.integral(e) {
            Some(v) if v.abs() > self.tol => Outcome::Holds,
            Some(_) => Outcome::Fails,
            None => Outcome::Undecided,
        }
    }
}

/// Holds when every period-`period` orbit found inside `[lo, hi]^n` is
/// hyperbolic; any undecided orbit makes the outcome undecided.
pub struct OrbitsHyperbolic {
    pub lo: f64,
    pub hi: f64,
    pub period: usize,
    pub seeds_per_axis: usize,
}

impl Default for OrbitsHyperbolic {
    fn default() -> Self {
        OrbitsHyperbolic { lo: -2.0, hi: 2.0, period: 1, seeds_per_axis: 41 }
    }
}

impl PropertyPredicate for OrbitsHyperbolic {
    fn name(&self) -> String {
        format!("fixed-points-hyperbolic(lo={},hi={},period={})", self.lo, self.hi, self.period)
    }
    fn evaluate(&self, e: &Element, _: &[f64]) -> Outcome {
        let Element::Poly(f) = e else { return Outcome::Undecided };
        let n = f.domain_dim();
        let seeds = SeedSpec::grid(vec![self.lo; n], vec![self.hi; n], self.seeds_per_axis);
        let Ok(search) = find_periodic_orbits(f, self.period, &seeds) else { return Outcome::Undecided };
        let mut out = Outcome::Holds;
        for o in &search.orbits {
            if !o.points.iter().flatten().all(|v| (self.lo..=self.hi).contains(v)) {
                continue;
            }
            match hyperbolicity(o).verdict {
                Verdict::Nonhyperbolic => return Outcome::Fails,
                Verdict::Undecided => out = Outcome::Undecided,
                Verdict::Hyperbolic => {}
            }
        }
        out
    }
}

/// Fails where `lambda[0]` lies in `V_m`, the union over `n > m` of the
/// intervals `(k 2^-n, k 2^-n + 2^-2n)`.
pub struct InBinaryShift {
    pub m: u32,
}

/// Levels beyond this are below double resolution.
const BINARY_SHIFT_LEVELS: u32 = 52;

impl PropertyPredicate for InBinaryShift {
    fn name(&self) -> String {
        format!("in-binary-shift(m={})", self.m)
    }
    fn evaluate(&self, _: &Element, lambda: &[f64]) -> Outcome {
        let x = lambda[0];
        for n in self.m + 1..=BINARY_SHIFT_LEVELS {
            let t = x * 2f64.powi(n as i32);
            let frac = t - t.floor();
            if frac > 0.0 && frac < 2f64.powi(-(n as i32)) {
                return Outcome::Fails;
            }
        }
        Outcome::Holds
    }
    fn fails_somewhere_in(&self, lo: &[f64], hi: &[f64]) -> Option<bool> {
        let (a, b) = (lo[0], hi[0]);
        for n in self.m + 1..=BINARY_SHIFT_LEVELS {
            let s = 2f64.powi(n as i32);
            // some integer k with a 2^n - 2^-n < k < b 2^n
            let k = (a * s - 1.0 / s).floor() + 1.0;
            if k < b * s {
                return Some(true);
            }
        }
        Some(false)
    }
}

/// Predicates by id, with `key=value` parameters.
pub fn predicate_from_spec(id: &str, params: &BTreeMap<String, String>) -> Result<Box<dyn PropertyPredicate>> {
    let get = |k: &str| params.get(k).map(String::as_str);
    let num = |k: &str, default: f64| -> Result<f64> {
        get(k).map_or(Ok(default), |v| v.parse().map_err(|_| Error::input(format!("bad value for {k}: `{v}`"))))
    };
    Ok(match id {
        "always-holds" => Box::new(AlwaysHolds),
        "always-fails" => Box::new(AlwaysFails),
        "half-space" => Box::new(HalfSpace { coord: num("coord", 0.0)? as usize }),
        "integral-nonzero" => {
            let d = IntegralNonzero::default();
            Box::new(IntegralNonzero { tol: num("tol", d.tol)?, nodes: num("nodes", d.nodes as f64)? as usize })
        }
        "fixed-points-hyperbolic" => {
            let d = OrbitsHyperbolic::default();
            Box::new(OrbitsHyperbolic {
                lo: num("lo", d.lo)?,
                hi: num("hi", d.hi)?,
                period: num("period", 1.0)? as usize,
                seeds_per_axis: num("seeds", d.seeds_per_axis as f64)? as usize,
            })
        }
        "in-binary-shift" => Box::new(InBinaryShift { m: num("m", 5.0)? as u32 }),
        _ => return Err(Error::input(format!("unknown predicate `{id}`"))),
    })
}

pub const PREDICATE_IDS: &[&str] =
    &["always-holds", "always-fails", "half-space", "integral-nonzero", "fixed-points-hyperbolic", "in-binary-shift"];
