use super::poly::{MultiIndex, PolyMap};
use crate::error::{Error, Result};

/// A k-jet: base point plus the Taylor polynomial of degree k there.
///
/// `tensors[i]` is the homogeneous degree-i Taylor term in the shifted
/// variable `h = x - base`, stored as monomial coefficients
/// `d^alpha f(base) / alpha!`. True derivatives are recovered through
/// [`Jet::derivative`] and [`Jet::tensor_entry`], which apply the
/// factorial scaling. Because each coefficient is keyed by a multi-index,
/// the represented forms are symmetric by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    order: u32,
    base: Vec<f64>,
    tensors: Vec<PolyMap>,
}

/// k-jet of `f` at `x`.
pub fn jet(f: &PolyMap, x: &[f64], k: i64) -> Result<Jet> {
    if k < 0 {
        return Err(Error::input(format!("jet order must be nonnegative, got {k}")));
    }
    if x.len() != f.domain_dim() {
        return Err(Error::input("base point dimension mismatch"));
    }
    let n = f.domain_dim();
    let identity: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let shifted = f.compose_affine(x, &identity)?;
    let k = k as u32;
    let tensors = (0..=k).map(|d| shifted.homogeneous_part(d)).collect();
    Ok(Jet { order: k, base: x.to_vec(), tensors })
}

impl Jet {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn base_point(&self) -> &[f64] {
        &self.base
    }

    pub fn domain_dim(&self) -> usize {
        self.base.len()
    }

    pub fn range_dim(&self) -> usize {
        self.tensors[0].range_dim()
    }

    /// Homogeneous Taylor terms, degree 0 through `order`.
    pub fn tensors(&self) -> &[PolyMap] {
        &self.tensors
    }

    /// `f(base)`.
    pub fn value(&self) -> Vec<f64> {
        self.tensors[0].coefficient(&MultiIndex::zero(self.domain_dim()))
    }

    /// `d^alpha f(base)`, for `|alpha| <= order`.
    pub fn derivative(&self, alpha: &MultiIndex) -> Result<Vec<f64>> {
        if alpha.len() != self.domain_dim() {
            return Err(Error::input("derivative index dimension mismatch"));
        }
        let d = alpha.degree();
        if d > self.order {
            return Err(Error::input(format!("derivative order {d} exceeds jet order {}", self.order)));
        }
        let fact = alpha.factorial();
        Ok(self.tensors[d as usize].coefficient(alpha).into_iter().map(|c| c * fact).collect())
    }

    /// `D^i f(base)[e_{j_1}, ..., e_{j_i}]` for `i = indices.len()`.
    pub fn tensor_entry(&self, indices: &[usize]) -> Result<Vec<f64>> {
        let n = self.domain_dim();
        let mut e = vec![0u32; n];
        for &j in indices {
            if j >= n {
                return Err(Error::input(format!("tensor index {j} out of range")));
            }
            e[j] += 1;
        }
        self.derivative(&MultiIndex::new(e))
    }

    /// The Taylor polynomial rewritten in the original variable `x`.
    pub fn taylor_polynomial(&self) -> Result<PolyMap> {
        let n = self.domain_dim();
        let mut sum = PolyMap::zero(n, self.range_dim())?;
        for t in &self.tensors {
            sum = sum.add(t)?;
        }
        let identity: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let neg: Vec<f64> = self.base.iter().map(|v| -v).collect();
        sum.compose_affine(&neg, &identity)
    }

    /// Splits `j^k f(x)` into `(j^{k-1} f(x), D^k f(x))`.
    pub fn decompose(&self) -> Result<(Jet, PolyMap)> {
        if self.order == 0 {
            return Err(Error::input("cannot decompose a 0-jet"));
        }
        let lower = Jet {
            order: self.order - 1,
            base: self.base.clone(),
            tensors: self.tensors[..self.order as usize].to_vec(),
        };
        Ok((lower, self.tensors[self.order as usize].clone()))
    }

    /// Inverse of [`Jet::decompose`].
    pub fn recompose(lower: &Jet, top: &PolyMap) -> Result<Jet> {
        if top.domain_dim() != lower.domain_dim() || top.range_dim() != lower.range_dim() {
            return Err(Error::input("top tensor shape does not match the jet"));
        }
        let k = lower.order + 1;
        if top.terms().any(|(a, _)| a.degree() != k) {
            return Err(Error::input(format!("top tensor must be homogeneous of degree {k}")));
        }
        let mut tensors = lower.tensors.clone();
        tensors.push(top.clone());
        Ok(Jet { order: k, base: lower.base.clone(), tensors })
    }

    /// Componentwise sum of jets sharing base point and order.
    pub fn add(&self, other: &Jet) -> Result<Jet> {
        if self.order != other.order || self.base != other.base {
            return Err(Error::input("jets must share base point and order"));
        }
        let tensors = self
            .tensors
            .iter()
            .zip(&other.tensors)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Jet { order: self.order, base: self.base.clone(), tensors })
    }

    /// Largest coefficient difference between two jets at the same point.
    pub fn max_abs_diff(&self, other: &Jet) -> Result<f64> {
        if self.order != other.order || self.base != other.base {
            return Err(Error::input("jets must share base point and order"));
        }
        let mut worst = 0.0_f64;
        for (a, b) in self.tensors.iter().zip(&other.tensors) {
            worst = worst.max(a.sub(b)?.max_abs_coefficient());
        }
        Ok(worst)
    }
}
