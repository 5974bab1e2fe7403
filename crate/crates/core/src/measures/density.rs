//! Lower and upper relative-prevalence densities over a finite family of
//! probability measures and a finite translation grid.
//!
//! The true quantities take the sup/inf over all compactly supported
//! probability measures and all translations; the values here are
//! heuristic brackets computed over the supplied family and grid only.

use rayon::prelude::*;

use super::discrete::{measure_of_translate, DiscreteMeasure};
use super::region::Region;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct DensityReport {
    /// `max_mu min_v mu(S + v)`.
    pub lower: f64,
    /// `min_mu max_v mu(S + v)`.
    pub upper: f64,
    /// Family index attaining `lower`.
    pub lower_witness: usize,
    /// Family index attaining `upper`.
    pub upper_witness: usize,
    /// `values[i][g] = family[i](S + grid[g])`.
    pub values: Vec<Vec<f64>>,
    pub family_size: usize,
    pub grid_size: usize,
}

impl DensityReport {
    /// `(min_v, max_v)` for each family member.
    pub fn per_measure_range(&self) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .map(|row| row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v))))
            .collect()
    }
}

/// Computes both densities.
///
/// In exact arithmetic over all translations the lower density never
/// exceeds the upper one. A finite grid can break that only when it misses
/// translations that matter; in that case an error is returned rather than
/// an inconsistent bracket.
pub fn densities(s: &dyn Region, family: &[DiscreteMeasure], grid: &[Vec<f64>]) -> Result<DensityReport> {
    if family.is_empty() || grid.is_empty() {
        return Err(Error::input("family and translation grid must be nonempty"));
    }
    let d = family[0].dim();
    for (i, mu) in family.iter().enumerate() {
        if mu.dim() != d {
            return Err(Error::input(format!("family member {i} has dimension {}, expected {d}", mu.dim())));
        }
        if !mu.is_normalized() {
            return Err(Error::input(format!("family member {i} has mass {}, expected 1", mu.total_mass())));
        }
    }
    if let Some(g) = grid.iter().position(|v| v.len() != d) {
        return Err(Error::input(format!("translation {g} has the wrong dimension")));
    }
    let values: Vec<Vec<f64>> = family
        .par_iter()
        .map(|mu| grid.iter().map(|v| measure_of_translate(mu, s, v)).collect())
        .collect();
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let (mut lw, mut uw) = (0, 0);
    for (i, row) in values.iter().enumerate() {
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo > lower {
            lower = lo;
            lw = i;
        }
        if hi < upper {
            upper = hi;
            uw = i;
        }
    }
    if lower > upper + 1e-12 {
        return Err(Error::degenerate(format!(
            "translation grid misses relevant translates: lower bracket {lower} (measure {lw}) exceeds upper {upper} (measure {uw})"
        )));
    }
    Ok(DensityReport {
        lower,
        upper,
        lower_witness: lw,
        upper_witness: uw,
        values,
        family_size: family.len(),
        grid_size: grid.len(),
    })
}

pub fn lower_density(s: &dyn Region, family: &[DiscreteMeasure], grid: &[Vec<f64>]) -> Result<f64> {
    densities(s, family, grid).map(|r| r.lower)
}

pub fn upper_density(s: &dyn Region, family: &[DiscreteMeasure], grid: &[Vec<f64>]) -> Result<f64> {
    densities(s, family, grid).map(|r| r.upper)
}

/// Evenly spaced one-dimensional translations `lo, lo + step, ...` up to `hi`.
pub fn translation_grid_1d(lo: f64, hi: f64, step: f64) -> Result<Vec<Vec<f64>>> {
    if !(step > 0.0 && hi >= lo) {
        return Err(Error::input("grid needs step > 0 and hi >= lo"));
    }
    let k = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=k).map(|i| vec![lo + step * i as f64]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::intervals::IntervalSet;
    use crate::measures::region::{EmptySet, FullSpace};

    fn family() -> Vec<DiscreteMeasure> {
        [1.0, 10.0, 100.0]
            .iter()
            .map(|&w| DiscreteMeasure::uniform_grid_1d(-w, w, 4001).unwrap())
            .collect()
    }

    #[test]
    fn trivial_sets() {
        let grid = translation_grid_1d(-5.0, 5.0, 0.5).unwrap();
        let r = densities(&FullSpace, &family(), &grid).unwrap();
        assert!((r.lower - 1.0).abs() < 1e-12 && (r.upper - 1.0).abs() < 1e-12);
        let r = densities(&EmptySet, &family(), &grid).unwrap();
        assert_eq!((r.lower, r.upper), (0.0, 0.0));
    }

    #[test]
    fn bounded_set_has_small_upper_density() {
        let s = IntervalSet::full((0.0, 1.0)).unwrap();
        let grid = translation_grid_1d(-120.0, 120.0, 0.01).unwrap();
        let r = densities(&s, &family(), &grid).unwrap();
        assert_eq!(r.upper_witness, 2);
        assert!(r.upper <= 0.011, "upper {}", r.upper);
        assert!(r.upper <= 1.0 / 100.0);
        assert_eq!(r.lower, 0.0);
        let ranges = r.per_measure_range();
        assert!(ranges[0].1 > ranges[1].1 && ranges[1].1 > ranges[2].1);
    }

    #[test]
    fn unnormalized_member_rejected() {
        let bad = DiscreteMeasure::new(1, vec![(vec![0.0], 0.5)]).unwrap();
        let grid = vec![vec![0.0]];
        assert!(densities(&FullSpace, &[bad], &grid).is_err());
    }

    #[test]
    fn inadequate_grid_is_reported() {
        let s = IntervalSet::full((0.0, 1.0)).unwrap();
        let fam = vec![DiscreteMeasure::dirac(vec![0.5]), DiscreteMeasure::dirac(vec![5.0])];
        let err = densities(&s, &fam, &[vec![0.0]]).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }
}
