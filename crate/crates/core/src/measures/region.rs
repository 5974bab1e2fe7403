use super::intervals::IntervalSet;

/// Indicator of a subset of `R^d`. Must be total: every point is either in
/// or out.
pub trait Region: Sync {
    fn contains(&self, x: &[f64]) -> bool;
}

/// All of `R^d`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullSpace;

impl Region for FullSpace {
    fn contains(&self, _: &[f64]) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EmptySet;

impl Region for EmptySet {
    fn contains(&self, _: &[f64]) -> bool {
        false
    }
}

/// Closed axis-aligned box `prod [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region for BoxRegion {
    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lo.len() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| *l <= *v && *v <= *h)
    }
}

/// One-dimensional interval set, open-interval membership on `x[0]`.
impl Region for IntervalSet {
    fn contains(&self, x: &[f64]) -> bool {
        x.len() == 1 && self.contains_point(x[0])
    }
}

/// `{x : x[0] >= threshold}`.
#[derive(Clone, Copy, Debug)]
pub struct HalfLine {
    pub threshold: f64,
}

impl Region for HalfLine {
    fn contains(&self, x: &[f64]) -> bool {
        x.first().is_some_and(|v| *v >= self.threshold)
    }
}

/// `base + period * Z`, with `base` a subset of `[0, period)`.
#[derive(Clone, Debug)]
pub struct Periodic {
    pub base: IntervalSet,
    pub period: f64,
}

impl Region for Periodic {
    fn contains(&self, x: &[f64]) -> bool {
        x.len() == 1 && self.base.contains_point(x[0].rem_euclid(self.period))
    }
}

/// Adapter for closures.
pub struct FnRegion<F>(pub F);

impl<F: Fn(&[f64]) -> bool + Sync> Region for FnRegion<F> {
    fn contains(&self, x: &[f64]) -> bool {
        (self.0)(x)
    }
}
