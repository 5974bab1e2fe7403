use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest total degree a [`PolyMap`] may carry.
pub const MAX_DEGREE: u32 = 16;
/// Largest number of domain variables.
pub const MAX_VARS: usize = 8;

/// Exponent vector of a monomial `x_1^{e_1} ... x_n^{e_n}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `e_i` scaled by `order`: the index of `d^order / dx_i^order`.
    pub fn unit(n: usize, i: usize, order: u32) -> Self {
        let mut e = vec![0; n];
        e[i] = order;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `alpha! = prod alpha_i!`
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&e| (1..=e).map(f64::from).product::<f64>())
            .product()
    }

    fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All multi-indices of length `n` with degree at most `k`, in graded
    /// lexicographic order (degree first, then descending exponents).
    pub fn all_up_to(n: usize, k: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for d in 0..=k {
            let mut cur = vec![0u32; n];
            compositions(n, d, 0, &mut cur, &mut out);
        }
        out
    }
}

fn compositions(n: usize, remaining: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e;
        compositions(n, remaining - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// Polynomial map `R^n -> R^m` stored as a sparse table from monomial to
/// coefficient vector. Zero vectors are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    domain_dim: usize,
    range_dim: usize,
    terms: BTreeMap<MultiIndex, Vec<f64>>,
}

impl PolyMap {
    /// The zero map.
    pub fn zero(domain_dim: usize, range_dim: usize) -> Result<Self> {
        if domain_dim > MAX_VARS {
            return Err(Error::input(format!(
                "domain dimension {domain_dim} exceeds cap {MAX_VARS}"
            )));
        }
        if range_dim == 0 {
            return Err(Error::input("range dimension must be at least 1"));
        }
        Ok(PolyMap { domain_dim, range_dim, terms: BTreeMap::new() })
    }

    /// Builds a map from `(exponents, coefficients)` pairs; repeated
    /// monomials are summed.
    pub fn from_terms<I>(domain_dim: usize, range_dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Vec<f64>)>,
    {
        let mut p = PolyMap::zero(domain_dim, range_dim)?;
        for (e, c) in terms {
            p.add_term(MultiIndex(e), &c)?;
        }
        Ok(p)
    }

    /// Constant map with value `c`.
    pub fn constant(domain_dim: usize, c: &[f64]) -> Result<Self> {
        PolyMap::from_terms(domain_dim, c.len(), [(vec![0; domain_dim], c.to_vec())])
    }

    /// The scalar coordinate function `x_i` on `R^n`.
    pub fn coordinate(domain_dim: usize, i: usize) -> Result<Self> {
        if i >= domain_dim {
            return Err(Error::input(format!("coordinate {i} out of range for n={domain_dim}")));
        }
        PolyMap::from_terms(domain_dim, 1, [(MultiIndex::unit(domain_dim, i, 1).0, vec![1.0])])
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn range_dim(&self) -> usize {
        self.range_dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Maximum monomial degree; 0 for the zero map.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &[f64])> {
        self.terms.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Coefficient vector of a monomial (zeros if absent).
    pub fn coefficient(&self, alpha: &MultiIndex) -> Vec<f64> {
        self.terms.get(alpha).cloned().unwrap_or_else(|| vec![0.0; self.range_dim])
    }

    /// Adds `c * x^alpha` to the map.
    pub fn add_term(&mut self, alpha: MultiIndex, c: &[f64]) -> Result<()> {
        if alpha.len() != self.domain_dim {
            return Err(Error::input(format!(
                "monomial has {} exponents, expected {}",
                alpha.len(),
                self.domain_dim
            )));
        }
        if c.len() != self.range_dim {
            return Err(Error::input(format!(
                "coefficient has {} entries, expected {}",
                c.len(),
                self.range_dim
            )));
        }
        if alpha.degree() > MAX_DEGREE {
            return Err(Error::input(format!(
                "monomial degree {} exceeds cap {MAX_DEGREE}",
                alpha.degree()
            )));
        }
        if c.iter().all(|&v| v == 0.0) {
            return Ok(());
        }
        let zeroed = {
            let entry = self.terms.entry(alpha.clone()).or_insert_with(|| vec![0.0; c.len()]);
            for (e, v) in entry.iter_mut().zip(c) {
                *e += v;
            }
            entry.iter().all(|&v| v == 0.0)
        };
        if zeroed {
            self.terms.remove(&alpha);
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &PolyMap) -> Result<()> {
        if self.domain_dim != other.domain_dim || self.range_dim != other.range_dim {
            return Err(Error::input(format!(
                "shape mismatch: ({}, {}) vs ({}, {})",
                self.domain_dim, self.range_dim, other.domain_dim, other.range_dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyMap) -> Result<PolyMap> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolyMap) -> Result<PolyMap> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> PolyMap {
        let terms = if s == 0.0 {
            BTreeMap::new()
        } else {
            self.terms
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|c| c * s).collect()))
                .collect()
        };
        PolyMap { domain_dim: self.domain_dim, range_dim: self.range_dim, terms }
    }

    /// `self + sum_i lambda[i] * basis[i]`.
    pub fn add_combination(&self, lambda: &[f64], basis: &[PolyMap]) -> Result<PolyMap> {
        if lambda.len() != basis.len() {
            return Err(Error::input("coefficient count differs from basis length"));
        }
        let mut out = self.clone();
        for (l, g) in lambda.iter().zip(basis) {
            out.check_same_shape(g)?;
            for (k, v) in &g.terms {
                let c: Vec<f64> = v.iter().map(|x| x * l).collect();
                out.add_term(k.clone(), &c)?;
            }
        }
        Ok(out)
    }

    /// Product `s(x) * self(x)` with a scalar polynomial `s`.
    pub fn mul_scalar_poly(&self, s: &PolyMap) -> Result<PolyMap> {
        if s.range_dim != 1 || s.domain_dim != self.domain_dim {
            return Err(Error::input("scalar factor must map R^n -> R"));
        }
        if self.degree() + s.degree() > MAX_DEGREE && !self.is_zero() && !s.is_zero() {
            return Err(Error::input(format!(
                "product degree {} exceeds cap {MAX_DEGREE}",
                self.degree() + s.degree()
            )));
        }
        let mut out = PolyMap::zero(self.domain_dim, self.range_dim)?;
        for (ka, va) in &s.terms {
            for (kb, vb) in &self.terms {
                let c: Vec<f64> = vb.iter().map(|x| x * va[0]).collect();
                out.add_term(ka.add(kb), &c)?;
            }
        }
        Ok(out)
    }

    /// Coordinate function `i` as a scalar polynomial.
    pub fn component(&self, i: usize) -> Result<PolyMap> {
        if i >= self.range_dim {
            return Err(Error::input(format!("component {i} out of range")));
        }
        let mut out = PolyMap::zero(self.domain_dim, 1)?;
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &[v[i]])?;
        }
        Ok(out)
    }

    /// Stacks scalar polynomials into a vector-valued map.
    pub fn from_components(components: &[PolyMap]) -> Result<PolyMap> {
        let first = components
            .first()
            .ok_or_else(|| Error::input("at least one component required"))?;
        let n = first.domain_dim;
        let m = components.len();
        let mut out = PolyMap::zero(n, m)?;
        for (i, c) in components.iter().enumerate() {
            if c.range_dim != 1 || c.domain_dim != n {
                return Err(Error::input("components must be scalar maps on a common domain"));
            }
            for (k, v) in &c.terms {
                let mut coeff = vec![0.0; m];
                coeff[i] = v[0];
                out.add_term(k.clone(), &coeff)?;
            }
        }
        Ok(out)
    }

    /// Evaluates the map at `x` by direct monomial summation.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.domain_dim {
            return Err(Error::input(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.domain_dim
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let deg = self.degree() as usize;
        // powers[i][e] = x_i^e
        let powers: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(deg + 1);
                let mut acc = 1.0;
                for _ in 0..=deg {
                    p.push(acc);
                    acc *= xi;
                }
                p
            })
            .collect();
        let mut out = vec![0.0; self.range_dim];
        for (k, v) in &self.terms {
            let mono: f64 = k.0.iter().enumerate().map(|(i, &e)| powers[i][e as usize]).product();
            for (o, c) in out.iter_mut().zip(v) {
                *o += c * mono;
            }
        }
        out
    }

    /// Exact partial derivative `d^alpha self`.
    pub fn partial(&self, alpha: &MultiIndex) -> Result<PolyMap> {
        if alpha.len() != self.domain_dim {
            return Err(Error::input(format!(
                "derivative index has {} entries, expected {}",
                alpha.len(),
                self.domain_dim
            )));
        }
        let mut out = PolyMap::zero(self.domain_dim, self.range_dim)?;
        'terms: for (k, v) in &self.terms {
            let mut factor = 1.0;
            let mut e = k.0.clone();
            for (ei, &ai) in e.iter_mut().zip(&alpha.0) {
                if ai > *ei {
                    continue 'terms;
                }
                for j in 0..ai {
                    factor *= f64::from(*ei - j);
                }
                *ei -= ai;
            }
            let c: Vec<f64> = v.iter().map(|x| x * factor).collect();
            out.add_term(MultiIndex(e), &c)?;
        }
        Ok(out)
    }

    /// Partial derivative with respect to one variable.
    pub fn d(&self, var: usize) -> Result<PolyMap> {
        if var >= self.domain_dim {
            return Err(Error::input(format!("variable {var} out of range")));
        }
        self.partial(&MultiIndex::unit(self.domain_dim, var, 1))
    }

    /// Jacobian `Df(x)` as `m` rows of `n` entries.
    pub fn jacobian(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        if x.len() != self.domain_dim {
            return Err(Error::input("point dimension mismatch"));
        }
        let mut rows = vec![vec![0.0; self.domain_dim]; self.range_dim];
        for j in 0..self.domain_dim {
            let col = self.d(j)?.eval_unchecked(x);
            for (i, v) in col.into_iter().enumerate() {
                rows[i][j] = v;
            }
        }
        Ok(rows)
    }

    /// Substitutes `x = offset + matrix * w` with `matrix` of shape
    /// `n x n_new` (given as `n` rows), producing a map on `R^{n_new}`.
    pub fn compose_affine(&self, offset: &[f64], matrix: &[Vec<f64>]) -> Result<PolyMap> {
        if offset.len() != self.domain_dim || matrix.len() != self.domain_dim {
            return Err(Error::input("affine substitution has the wrong number of rows"));
        }
        let new_dim = matrix.first().map_or(0, Vec::len);
        if matrix.iter().any(|r| r.len() != new_dim) {
            return Err(Error::input("affine substitution rows differ in length"));
        }
        // Each old variable as a degree-1 scalar polynomial in the new ones.
        let mut linear = Vec::with_capacity(self.domain_dim);
        for (i, row) in matrix.iter().enumerate() {
            let mut p = PolyMap::constant(new_dim, &[offset[i]])?;
            for (j, &a) in row.iter().enumerate() {
                if a != 0.0 {
                    p.add_term(MultiIndex::unit(new_dim, j, 1), &[a])?;
                }
            }
            linear.push(p);
        }
        let deg = self.degree();
        // cache[i][e] = (offset_i + row_i . w)^e
        let mut cache: Vec<Vec<PolyMap>> = Vec::with_capacity(self.domain_dim);
        for lin in &linear {
            let mut pw = vec![PolyMap::constant(new_dim, &[1.0])?];
            for e in 1..=deg as usize {
                let next = pw[e - 1].mul_scalar_poly(lin)?;
                pw.push(next);
            }
            cache.push(pw);
        }
        let mut out = PolyMap::zero(new_dim, self.range_dim)?;
        for (k, v) in &self.terms {
            let mut mono = PolyMap::constant(new_dim, &[1.0])?;
            for (i, &e) in k.0.iter().enumerate() {
                if e > 0 {
                    mono = mono.mul_scalar_poly(&cache[i][e as usize])?;
                }
            }
            for (mk, mv) in &mono.terms {
                let c: Vec<f64> = v.iter().map(|x| x * mv[0]).collect();
                out.add_term(mk.clone(), &c)?;
            }
        }
        Ok(out)
    }

    /// Applies a linear map to the range: `x -> A * self(x)` with `A` given
    /// as rows of length `m`.
    pub fn map_range(&self, a: &[Vec<f64>]) -> Result<PolyMap> {
        if a.iter().any(|r| r.len() != self.range_dim) || a.is_empty() {
            return Err(Error::input("range map has the wrong shape"));
        }
        let mut out = PolyMap::zero(self.domain_dim, a.len())?;
        for (k, v) in &self.terms {
            let c: Vec<f64> = a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect();
            out.add_term(k.clone(), &c)?;
        }
        Ok(out)
    }

    /// The homogeneous part of degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> PolyMap {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.degree() == d)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        PolyMap { domain_dim: self.domain_dim, range_dim: self.range_dim, terms }
    }

    /// Drops every monomial of degree above `k`.
    pub fn truncate(&self, k: u32) -> PolyMap {
        let terms = self
            .terms
            .iter()
            .filter(|(key, _)| key.degree() <= k)
            .map(|(key, v)| (key.clone(), v.clone()))
            .collect();
        PolyMap { domain_dim: self.domain_dim, range_dim: self.range_dim, terms }
    }

    /// Exact integral over the unit cube `[0,1]^n`.
    pub fn integrate_unit_cube(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.range_dim];
        for (k, v) in &self.terms {
            let w: f64 = k.0.iter().map(|&e| 1.0 / f64::from(e + 1)).product();
            for (o, c) in out.iter_mut().zip(v) {
                *o += c * w;
            }
        }
        out
    }

    /// Largest coefficient magnitude; 0 for the zero map.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().flatten().fold(0.0_f64, |a, c| a.max(c.abs()))
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::write_poly_body("poly", self))
    }
}
