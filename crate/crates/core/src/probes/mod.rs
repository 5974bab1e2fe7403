//! Probe subspaces: finite sets of function-space directions along which
//! Lebesgue measure is used to test whether a failure set is small.

mod hermite;
mod text;

pub use hermite::{hermite_basis, hermite_interpolate, HermiteBasis, MIN_POINT_SEPARATION};
pub use text::{parse_probe, write_probe};

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::polyjet::{MultiIndex, PolyMap, MAX_DEGREE};

/// Function space a probe lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ambient {
    /// Polynomial maps `R^n -> R^m`.
    Poly { n: usize, m: usize },
    /// Real sequences truncated to `len` terms.
    Sequence { len: usize },
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Poly { n, m } => write!(f, "poly({n},{m})"),
            Ambient::Sequence { len } => write!(f, "sequence({len})"),
        }
    }
}

impl std::str::FromStr for Ambient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::input(format!("unrecognized ambient `{s}`"));
        let (tag, rest) = s.split_once('(').ok_or_else(bad)?;
        let args: Vec<usize> = rest
            .strip_suffix(')')
            .ok_or_else(bad)?
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (tag, args.as_slice()) {
            ("poly", [n, m]) => Ok(Ambient::Poly { n: *n, m: *m }),
            ("sequence", [len]) => Ok(Ambient::Sequence { len: *len }),
            _ => Err(bad()),
        }
    }
}

/// A point of the ambient function space.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Poly(PolyMap),
    Sequence(Vec<f64>),
}

impl Element {
    pub fn ambient(&self) -> Ambient {
        match self {
            Element::Poly(p) => Ambient::Poly { n: p.domain_dim(), m: p.range_dim() },
            Element::Sequence(s) => Ambient::Sequence { len: s.len() },
        }
    }

    pub fn as_poly(&self) -> Option<&PolyMap> {
        match self {
            Element::Poly(p) => Some(p),
            Element::Sequence(_) => None,
        }
    }

    pub fn as_sequence(&self) -> Option<&[f64]> {
        match self {
            Element::Sequence(s) => Some(s),
            Element::Poly(_) => None,
        }
    }

    /// The zero element of an ambient space.
    pub fn zero(ambient: &Ambient) -> Result<Element> {
        Ok(match ambient {
            Ambient::Poly { n, m } => Element::Poly(PolyMap::zero(*n, *m)?),
            Ambient::Sequence { len } => Element::Sequence(vec![0.0; *len]),
        })
    }
}

/// Ordered basis of a finite-dimensional subspace plus the sampling box
/// `[-R, R]^q` for its coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    ambient: Ambient,
    basis: Vec<Element>,
    box_radius: f64,
}

/// Relative singular-value cutoff for the independence check.
pub const INDEPENDENCE_TOL: f64 = 1e-10;

impl Probe {
    /// Validates the basis (nonempty, matching ambient, linearly
    /// independent) and builds the probe with box radius 1.
    pub fn new(ambient: Ambient, basis: Vec<Element>) -> Result<Probe> {
        if basis.is_empty() {
            return Err(Error::input("a probe needs at least one basis element"));
        }
        if let Some(i) = basis.iter().position(|b| b.ambient() != ambient) {
            return Err(Error::input(format!("basis element {i} is not in {ambient}")));
        }
        let probe = Probe { ambient, basis, box_radius: 1.0 };
        probe.check_independent()?;
        Ok(probe)
    }

    pub fn with_box_radius(mut self, r: f64) -> Result<Probe> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::input(format!("box radius must be positive, got {r}")));
        }
        self.box_radius = r;
        Ok(self)
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn basis(&self) -> &[Element] {
        &self.basis
    }

    /// Number of basis elements.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn box_radius(&self) -> f64 {
        self.box_radius
    }

    /// Polynomial basis elements, if this is a polynomial probe.
    pub fn poly_basis(&self) -> Option<Vec<&PolyMap>> {
        self.basis.iter().map(Element::as_poly).collect()
    }

    /// Rank test on the evaluation matrix (rows = basis elements).
    fn check_independent(&self) -> Result<()> {
        let rows: Vec<Vec<f64>> = match &self.ambient {
            Ambient::Sequence { .. } => self
                .basis
                .iter()
                .map(|b| b.as_sequence().map(<[f64]>::to_vec).unwrap_or_default())
                .collect(),
            Ambient::Poly { n, .. } => {
                let q = self.basis.len();
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_9e0be);
                let pts: Vec<Vec<f64>> = (0..q + 4)
                    .map(|_| (0..*n).map(|_| rng.random_range(-1.0..1.0)).collect())
                    .collect();
                self.basis
                    .iter()
                    .map(|b| {
                        let p = b.as_poly().expect("ambient checked");
                        pts.iter().flat_map(|x| p.eval_unchecked(x)).collect()
                    })
                    .collect()
            }
        };
        let r = linalg::rank(&linalg::from_rows(&rows), INDEPENDENCE_TOL);
        if r < self.basis.len() {
            return Err(Error::input(format!(
                "probe basis is linearly dependent (rank {r} < {})",
                self.basis.len()
            )));
        }
        Ok(())
    }

    /// Uniform draw of coefficients from `[-R, R]^q`.
    pub fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let r = self.box_radius;
        (0..self.dim()).map(|_| rng.random_range(-r..=r)).collect()
    }

    /// `f + sum_i lambda_i g_i`.
    pub fn perturb(&self, base: &Element, lambda: &[f64]) -> Result<Element> {
        if base.ambient() != self.ambient {
            return Err(Error::input(format!(
                "base element lives in {}, probe in {}",
                base.ambient(),
                self.ambient
            )));
        }
        if lambda.len() != self.dim() {
            return Err(Error::input("coefficient vector length differs from probe dimension"));
        }
        match base {
            Element::Poly(f) => {
                let basis: Vec<PolyMap> = self.basis.iter().filter_map(|b| b.as_poly().cloned()).collect();
                Ok(Element::Poly(f.add_combination(lambda, &basis)?))
            }
            Element::Sequence(s) => {
                let mut out = s.clone();
                for (l, b) in lambda.iter().zip(&self.basis) {
                    for (o, v) in out.iter_mut().zip(b.as_sequence().unwrap_or_default()) {
                        *o += l * v;
                    }
                }
                Ok(Element::Sequence(out))
            }
        }
    }
}

/// The `m` constant maps `e_1, ..., e_m` on `R^1`.
pub fn constant_probe(m: usize) -> Result<Probe> {
    constant_probe_on(1, m)
}

/// Constant maps `e_1, ..., e_m` on `R^n`.
pub fn constant_probe_on(n: usize, m: usize) -> Result<Probe> {
    if m == 0 {
        return Err(Error::input("constant probe needs m >= 1"));
    }
    let basis = (0..m)
        .map(|i| {
            let mut c = vec![0.0; m];
            c[i] = 1.0;
            PolyMap::constant(n, &c).map(Element::Poly)
        })
        .collect::<Result<Vec<_>>>()?;
    Probe::new(Ambient::Poly { n, m }, basis)
}

/// The single sequence `(1, 1/2, ..., 1/N)`.
pub fn harmonic_probe(len: usize) -> Result<Probe> {
    if len == 0 {
        return Err(Error::input("harmonic probe needs N >= 1"));
    }
    let seq = (1..=len).map(|i| 1.0 / i as f64).collect();
    Probe::new(Ambient::Sequence { len }, vec![Element::Sequence(seq)])
}

/// Monomial basis of polynomials `R^n -> R^m` of degree at most `k`.
pub fn polynomial_probe(n: usize, m: usize, k: u32) -> Result<Probe> {
    if k > MAX_DEGREE {
        return Err(Error::input(format!("degree {k} exceeds cap {MAX_DEGREE}")));
    }
    if m == 0 {
        return Err(Error::input("range dimension must be at least 1"));
    }
    PolyMap::zero(n, m)?;
    let mut basis = Vec::new();
    for alpha in MultiIndex::all_up_to(n, k) {
        for i in 0..m {
            let mut c = vec![0.0; m];
            c[i] = 1.0;
            basis.push(Element::Poly(PolyMap::from_terms(n, m, [(alpha.exponents().to_vec(), c)])?));
        }
    }
    Probe::new(Ambient::Poly { n, m }, basis)
}

/// The `n*m` linear maps `x -> x_j e_i`, ordered by `i` then `j`.
pub fn linear_probe(n: usize, m: usize) -> Result<Probe> {
    if n == 0 || m == 0 {
        return Err(Error::input("linear probe needs n, m >= 1"));
    }
    let mut basis = Vec::with_capacity(n * m);
    for i in 0..m {
        for j in 0..n {
            let mut c = vec![0.0; m];
            c[i] = 1.0;
            basis.push(Element::Poly(PolyMap::from_terms(n, m, [(MultiIndex::unit(n, j, 1).exponents().to_vec(), c)])?));
        }
    }
    Probe::new(Ambient::Poly { n, m }, basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_probe_examples() {
        let p = constant_probe(1).unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.basis()[0].as_poly().unwrap().eval(&[0.37]).unwrap(), vec![1.0]);
        let p2 = constant_probe(2).unwrap();
        let vals: Vec<Vec<f64>> = p2.basis().iter().map(|b| b.as_poly().unwrap().eval(&[5.0]).unwrap()).collect();
        assert_eq!(vals, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn constant_perturbation_shifts_integral() {
        let f = PolyMap::coordinate(1, 0).unwrap();
        let p = constant_probe(1).unwrap();
        for lambda in [-0.7, 0.0, 0.25, 3.0] {
            let g = p.perturb(&Element::Poly(f.clone()), &[lambda]).unwrap();
            let i = g.as_poly().unwrap().integrate_unit_cube()[0];
            assert!((i - (0.5 + lambda)).abs() < 1e-15);
        }
    }

    #[test]
    fn harmonic_probe_examples() {
        let p = harmonic_probe(3).unwrap();
        let s = p.basis()[0].as_sequence().unwrap();
        assert_eq!(s[0], 1.0);
        assert_eq!(s[1], 0.5);
        assert!((s[2] - 1.0 / 3.0).abs() < 1e-16);

        let long = harmonic_probe(100_000).unwrap();
        let s = long.basis()[0].as_sequence().unwrap();
        for lambda in [0.1, 1.0, 2.5] {
            let mut partial = 0.0;
            for (i, v) in s.iter().enumerate() {
                partial += lambda * v;
                let n = (i + 1) as f64;
                if i > 0 {
                    assert!(partial > lambda * n.ln());
                }
            }
        }
        let l2: f64 = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(l2 <= std::f64::consts::PI / 6f64.sqrt());
    }

    #[test]
    fn polynomial_probe_counts() {
        assert_eq!(polynomial_probe(1, 1, 2).unwrap().dim(), 3);
        assert_eq!(polynomial_probe(2, 1, 1).unwrap().dim(), 3);
        assert_eq!(polynomial_probe(2, 2, 1).unwrap().dim(), 6);
        assert_eq!(polynomial_probe(3, 1, 3).unwrap().dim(), 20);
        assert!(polynomial_probe(1, 1, 17).is_err());
        assert!(polynomial_probe(9, 1, 1).is_err());
        let p = polynomial_probe(1, 1, 2).unwrap();
        let degs: Vec<u32> = p.basis().iter().map(|b| b.as_poly().unwrap().degree()).collect();
        assert_eq!(degs, vec![0, 1, 2]);
    }

    #[test]
    fn linear_probe_counts_and_rank() {
        assert_eq!(linear_probe(2, 1).unwrap().dim(), 2);
        assert_eq!(linear_probe(3, 7).unwrap().dim(), 21);
        let shapes = [(2usize, 3usize), (3, 2), (3, 3), (4, 1)];
        for seed in 0..100u64 {
            let (n, m) = shapes[(seed % 4) as usize];
            let probe = linear_probe(n, m).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lambda = probe.sample_lambda(&mut rng);
            let zero = Element::zero(probe.ambient()).unwrap();
            let map = probe.perturb(&zero, &lambda).unwrap();
            let jac = map.as_poly().unwrap().jacobian(&vec![0.0; n]).unwrap();
            assert_eq!(linalg::rank(&linalg::from_rows(&jac), 1e-10), n.min(m));
        }
    }

    #[test]
    fn duplicated_basis_rejected() {
        let x = Element::Poly(PolyMap::coordinate(1, 0).unwrap());
        assert!(Probe::new(Ambient::Poly { n: 1, m: 1 }, vec![x.clone(), x.clone()]).is_err());
        let s = Element::Sequence(vec![1.0, 2.0]);
        assert!(Probe::new(Ambient::Sequence { len: 2 }, vec![s.clone(), s]).is_err());
        let twice = Element::Poly(PolyMap::coordinate(1, 0).unwrap().scale(2.0));
        assert!(Probe::new(Ambient::Poly { n: 1, m: 1 }, vec![x, twice]).is_err());
    }

    #[test]
    fn ambient_mismatch_rejected() {
        let p = constant_probe(1).unwrap();
        let base = Element::Poly(PolyMap::zero(2, 1).unwrap());
        assert!(p.perturb(&base, &[1.0]).is_err());
        assert!(p.clone().with_box_radius(0.0).is_err());
        assert_eq!("poly(2,3)".parse::<Ambient>().unwrap(), Ambient::Poly { n: 2, m: 3 });
        assert!("poly(2)".parse::<Ambient>().is_err());
    }

    #[test]
    fn lambda_in_box() {
        let p = polynomial_probe(1, 1, 3).unwrap().with_box_radius(2.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            assert!(p.sample_lambda(&mut rng).iter().all(|v| v.abs() <= 2.5));
        }
    }
}
