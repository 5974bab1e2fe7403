use std::cmp::Ordering;

use rayon::prelude::*;

use super::region::Region;
use crate::error::{Error, Result};

/// Atoms closer than this in every coordinate are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// Tolerance on `total_mass = 1` for normalized inputs.
pub const MASS_TOL: f64 = 1e-12;

/// Finitely many weighted point masses in `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    total_mass: f64,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::input("a measure needs at least one atom"));
        }
        let mut points = Vec::with_capacity(atoms.len());
        let mut weights = Vec::with_capacity(atoms.len());
        for (i, (x, w)) in atoms.into_iter().enumerate() {
            if x.len() != dim {
                return Err(Error::input(format!("atom {i} has dimension {}, expected {dim}", x.len())));
            }
            if !(w.is_finite() && w >= 0.0) || x.iter().any(|v| !v.is_finite()) {
                return Err(Error::input(format!("atom {i} has an invalid point or weight")));
            }
            points.push(x);
            weights.push(w);
        }
        let total_mass = weights.iter().sum();
        Ok(DiscreteMeasure { dim, points, weights, total_mass })
    }

    /// Unit point mass at `x`.
    pub fn dirac(x: Vec<f64>) -> Self {
        let dim = x.len();
        DiscreteMeasure { dim, points: vec![x], weights: vec![1.0], total_mass: 1.0 }
    }

    /// Equal weights `1/k` on the given points.
    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let w = 1.0 / points.len() as f64;
        DiscreteMeasure::new(dim, points.into_iter().map(|x| (x, w)).collect())
    }

    /// `k` equally spaced atoms on `[lo, hi]` with equal weights.
    pub fn uniform_grid_1d(lo: f64, hi: f64, k: usize) -> Result<Self> {
        if k < 2 || !(hi > lo) {
            return Err(Error::input("uniform grid needs k >= 2 and lo < hi"));
        }
        let h = (hi - lo) / (k - 1) as f64;
        DiscreteMeasure::uniform((0..k).map(|i| vec![lo + h * i as f64]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_atoms(&self) -> usize {
        self.points.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.points.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass - 1.0).abs() <= MASS_TOL
    }

    /// Largest coordinatewise-Euclidean distance between two atoms.
    pub fn support_diameter(&self) -> f64 {
        let mut d = 0.0_f64;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                d = d.max(dist(a, b));
            }
        }
        d
    }

    /// Sorted, merged copy: atoms ordered lexicographically and runs that
    /// agree within [`MERGE_TOL`] in every coordinate collapsed onto the
    /// first atom of the run.
    pub fn canonical(&self) -> DiscreteMeasure {
        let atoms: Vec<(Vec<f64>, f64)> = self.points.iter().cloned().zip(self.weights.iter().copied()).collect();
        from_unsorted(self.dim, atoms)
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn lex_cmp(a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)) -> Ordering {
    for (x, y) in a.0.iter().zip(&b.0) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.1.total_cmp(&b.1)
}

fn from_unsorted(dim: usize, mut atoms: Vec<(Vec<f64>, f64)>) -> DiscreteMeasure {
    atoms.par_sort_by(lex_cmp);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(atoms.len());
    let mut weights: Vec<f64> = Vec::with_capacity(atoms.len());
    for (x, w) in atoms {
        let merge = points
            .last()
            .is_some_and(|p: &Vec<f64>| p.iter().zip(&x).all(|(a, b)| (a - b).abs() <= MERGE_TOL));
        if merge {
            *weights.last_mut().expect("nonempty") += w;
        } else {
            points.push(x);
            weights.push(w);
        }
    }
    let total_mass = weights.iter().sum();
    DiscreteMeasure { dim, points, weights, total_mass }
}

/// `mu * nu`: atoms at all sums `x + y` with weight `w_x w_y`, merged.
pub fn convolve(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if mu.dim != nu.dim {
        return Err(Error::input(format!("dimension mismatch: {} vs {}", mu.dim, nu.dim)));
    }
    let atoms: Vec<(Vec<f64>, f64)> = mu
        .points
        .par_iter()
        .zip(mu.weights.par_iter())
        .flat_map_iter(|(x, wx)| {
            nu.points
                .iter()
                .zip(&nu.weights)
                .map(move |(y, wy)| (x.iter().zip(y).map(|(a, b)| a + b).collect(), wx * wy))
        })
        .collect();
    Ok(from_unsorted(mu.dim, atoms))
}

/// `mu(S)`.
pub fn measure_of(mu: &DiscreteMeasure, s: &dyn Region) -> f64 {
    mu.atoms().filter(|(x, _)| s.contains(x)).map(|(_, w)| w).sum()
}

/// `mu(S + v)`: atoms `x` with `x - v` in `S`.
pub fn measure_of_translate(mu: &DiscreteMeasure, s: &dyn Region, v: &[f64]) -> f64 {
    let mut buf = vec![0.0; mu.dim];
    let mut total = 0.0;
    for (x, w) in mu.atoms() {
        for ((b, xi), vi) in buf.iter_mut().zip(x).zip(v) {
            *b = xi - vi;
        }
        if s.contains(&buf) {
            total += w;
        }
    }
    total
}

/// Result of [`convolve_sequence`].
#[derive(Clone, Debug)]
pub struct TruncatedConvolution {
    pub measure: DiscreteMeasure,
    /// The omitted factors displace support by at most `2^{-N}`.
    pub tail_bound: f64,
}

/// Convolution of the first `count` measures of a sequence whose `j`-th
/// member (1-based) is a probability measure with an atom at the origin
/// and support diameter at most `2^{-j}`.
pub fn convolve_sequence(measures: &[DiscreteMeasure], count: usize) -> Result<TruncatedConvolution> {
    if count == 0 || count > measures.len() {
        return Err(Error::input(format!("count must be in 1..={}, got {count}", measures.len())));
    }
    let dim = measures[0].dim;
    for (i, m) in measures[..count].iter().enumerate() {
        let j = i + 1;
        if m.dim != dim {
            return Err(Error::input(format!("measure {j} has dimension {}, expected {dim}", m.dim)));
        }
        if !m.is_normalized() {
            return Err(Error::input(format!("measure {j} has mass {}, expected 1", m.total_mass)));
        }
        let bound = (-(j as f64)).exp2();
        if m.support_diameter() > bound + MERGE_TOL {
            return Err(Error::input(format!("measure {j} has support diameter above 2^-{j}")));
        }
        if !m.points.iter().any(|x| x.iter().all(|v| v.abs() <= MERGE_TOL)) {
            return Err(Error::input(format!("measure {j} has no atom at the origin")));
        }
    }
    let mut acc = measures[0].canonical();
    for m in &measures[1..count] {
        acc = convolve(&acc, m)?;
    }
    Ok(TruncatedConvolution { measure: acc, tail_bound: (-(count as f64)).exp2() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::region::{BoxRegion, FullSpace};

    #[test]
    fn dirac_convolution() {
        let c = convolve(&DiscreteMeasure::dirac(vec![0.25, -1.0]), &DiscreteMeasure::dirac(vec![0.5, 3.0])).unwrap();
        assert_eq!(c.num_atoms(), 1);
        assert_eq!(c.atoms().next().unwrap(), (&[0.75, 2.0][..], 1.0));
    }

    #[test]
    fn two_point_self_convolution() {
        let mu = DiscreteMeasure::uniform(vec![vec![0.0], vec![1.0]]).unwrap();
        let c = convolve(&mu, &mu).unwrap();
        let atoms: Vec<(f64, f64)> = c.atoms().map(|(x, w)| (x[0], w)).collect();
        assert_eq!(atoms, vec![(0.0, 0.25), (1.0, 0.5), (2.0, 0.25)]);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(convolve(&DiscreteMeasure::dirac(vec![0.0]), &DiscreteMeasure::dirac(vec![0.0, 1.0])).is_err());
        assert!(DiscreteMeasure::new(1, vec![]).is_err());
        assert!(DiscreteMeasure::new(1, vec![(vec![0.0], -1.0)]).is_err());
    }

    #[test]
    fn measure_of_examples() {
        let mu = DiscreteMeasure::new(1, vec![(vec![0.0], 0.3), (vec![1.5], 0.2)]).unwrap();
        assert_eq!(measure_of(&mu, &FullSpace), mu.total_mass());
        let s = BoxRegion { lo: vec![1.0], hi: vec![2.0] };
        assert_eq!(measure_of(&DiscreteMeasure::dirac(vec![0.0]), &s), 0.0);
        assert_eq!(measure_of_translate(&DiscreteMeasure::dirac(vec![0.0]), &s, &[-1.5]), 1.0);
    }

    #[test]
    fn sequence_of_diracs() {
        let seq: Vec<DiscreteMeasure> = (0..8).map(|_| DiscreteMeasure::dirac(vec![0.0])).collect();
        let r = convolve_sequence(&seq, 8).unwrap();
        assert_eq!(r.measure.num_atoms(), 1);
        assert_eq!(r.measure.total_mass(), 1.0);
        assert_eq!(r.tail_bound, 1.0 / 256.0);
    }

    #[test]
    fn dyadic_sequence_spans_geometric_sum() {
        let seq: Vec<DiscreteMeasure> = (1..=12)
            .map(|j| DiscreteMeasure::uniform(vec![vec![0.0], vec![(-(j as f64)).exp2()]]).unwrap())
            .collect();
        for count in 1..=12 {
            let r = convolve_sequence(&seq, count).unwrap();
            let xs: Vec<f64> = r.measure.atoms().map(|(x, _)| x[0]).collect();
            assert_eq!(xs.len(), 1 << count);
            assert_eq!(xs[0], 0.0);
            assert!((xs[xs.len() - 1] - (1.0 - (-(count as f64)).exp2())).abs() < 1e-15);
            assert!((r.measure.total_mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sequence_preconditions_name_index() {
        let good = DiscreteMeasure::uniform(vec![vec![0.0], vec![0.5]]).unwrap();
        let wide = DiscreteMeasure::uniform(vec![vec![0.0], vec![0.5]]).unwrap();
        let err = convolve_sequence(&[good.clone(), wide], 2).unwrap_err();
        assert!(err.to_string().contains("measure 2"), "{err}");
        let off = DiscreteMeasure::uniform(vec![vec![0.1], vec![0.2]]).unwrap();
        let err = convolve_sequence(&[good.clone(), off], 2).unwrap_err();
        assert!(err.to_string().contains("origin"));
        let heavy = DiscreteMeasure::new(1, vec![(vec![0.0], 2.0)]).unwrap();
        assert!(convolve_sequence(&[heavy], 1).is_err());
        assert!(convolve_sequence(&[good], 2).is_err());
    }

    #[test]
    fn canonical_merges_close_atoms() {
        let mu = DiscreteMeasure::new(1, vec![(vec![1.0], 0.5), (vec![1.0 + 1e-13], 0.25), (vec![0.0], 0.25)]).unwrap();
        let c = mu.canonical();
        assert_eq!(c.num_atoms(), 2);
        assert_eq!(c.atoms().nth(1).unwrap().1, 0.75);
    }
}
