//! Lifts of the circle maps `x -> x + omega + eps sin x` and mode locking.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seeding;

/// Coupling `eps` must lie in `[0, MAX_EPS)` for the map to be a circle
/// diffeomorphism.
pub const MAX_EPS: f64 = 1.0;
/// A `p/q` orbit counts as locked when its multiplier is below `1 - LOCK_MARGIN`.
pub const LOCK_MARGIN: f64 = 1e-6;

#[inline]
fn step(x: f64, omega: f64, eps: f64) -> f64 {
    x + omega + eps * x.sin()
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..MAX_EPS).contains(&eps) {
        return Err(Error::input(format!("need 0 <= eps < 1, got {eps}")));
    }
    Ok(())
}

/// Mean advance per iterate of the lift (radians), measured over `iters`
/// steps after `burn_in` steps from `x = 0`.
pub fn rotation_number(omega: f64, eps: f64, iters: usize, burn_in: usize) -> Result<f64> {
    check_eps(eps)?;
    if !(0.0..=TAU).contains(&omega) {
        return Err(Error::input(format!("need 0 <= omega <= 2 pi, got {omega}")));
    }
    if iters == 0 {
        return Err(Error::input("need iters > 0"));
    }
    let mut x = 0.0;
    for _ in 0..burn_in {
        x = step(x, omega, eps);
    }
    let x0 = x;
    for _ in 0..iters {
        x = step(x, omega, eps);
    }
    Ok((x - x0) / iters as f64)
}

#[derive(Clone, Debug)]
pub struct TongueSpec {
    pub eps: f64,
    pub grid: usize,
    pub q_max: u32,
    pub burn_in: usize,
    pub seed: u64,
}

impl TongueSpec {
    pub fn new(eps: f64, grid: usize, seed: u64) -> Self {
        TongueSpec { eps, grid, q_max: 32, burn_in: 2000, seed }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TonguePoint {
    pub omega: f64,
    pub locked: bool,
    /// Period of the attracting orbit, 0 if none.
    pub period: u32,
    /// Multiplier of the attracting orbit, NaN if none.
    pub multiplier: f64,
    /// A period-`q` orbit was found but its multiplier lies within
    /// `LOCK_MARGIN` of 1.
    pub undecided: bool,
}

#[derive(Clone, Debug)]
pub struct TongueReport {
    pub eps: f64,
    pub q_max: u32,
    pub points: Vec<TonguePoint>,
    pub locked_fraction: f64,
    pub undecided: usize,
}

impl TongueReport {
    /// `omega,locked,period,multiplier` rows, one per grid point.
    pub fn csv_rows(&self) -> Vec<String> {
        self.points
            .iter()
            .map(|p| format!("{:?},{},{},{:?}", p.omega, u8::from(p.locked), p.period, p.multiplier))
            .collect()
    }
}

/// Newton on `f^q(x) - x - 2 pi p`. Returns the orbit point and multiplier.
fn lock_orbit(x0: f64, omega: f64, eps: f64, q: u32, p: f64) -> Option<(f64, f64)> {
    let mut x = x0;
    for _ in 0..60 {
        let mut y = x;
        let mut deriv = 1.0;
        for _ in 0..q {
            deriv *= 1.0 + eps * y.cos();
            y = step(y, omega, eps);
        }
        let g = y - x - TAU * p;
        if g.abs() < 1e-12 * (1.0 + x.abs()) {
            return Some((x, deriv.abs()));
        }
        let dg = deriv - 1.0;
        if dg == 0.0 {
            return None;
        }
        let dx = (-g / dg).clamp(-1.0, 1.0);
        x += dx;
        if !x.is_finite() {
            return None;
        }
    }
    None
}

fn classify_point(omega: f64, x0: f64, spec: &TongueSpec) -> TonguePoint {
    let eps = spec.eps;
    let mut x = x0;
    for _ in 0..spec.burn_in {
        x = step(x, omega, eps);
    }
    x = x.rem_euclid(TAU);
    let mut undecided = false;
    for q in 1..=spec.q_max {
        let mut y = x;
        for _ in 0..q {
            y = step(y, omega, eps);
        }
        let p = ((y - x) / TAU).round();
        if let Some((_, mult)) = lock_orbit(x, omega, eps, q, p) {
            if mult < 1.0 - LOCK_MARGIN {
                return TonguePoint { omega, locked: true, period: q, multiplier: mult, undecided: false };
            }
            if mult <= 1.0 + LOCK_MARGIN {
                undecided = true;
            }
        }
    }
    TonguePoint { omega, locked: false, period: 0, multiplier: f64::NAN, undecided }
}

/// Fraction of `omega in [0, 2 pi)` found locked to an attracting orbit of
/// period at most `q_max`, one stratified sample per grid cell. Tongues of
/// period above `q_max` are missed, so the fraction is biased low.
pub fn tongue_measure(spec: &TongueSpec) -> Result<TongueReport> {
    check_eps(spec.eps)?;
    if spec.grid < 1000 || spec.q_max < 1 {
        return Err(Error::input("need grid >= 1000 and q_max >= 1"));
    }
    let points: Vec<TonguePoint> = (0..spec.grid)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeding::task_rng(spec.seed, "tongue", i as u64);
            let u: f64 = rng.random();
            let omega = TAU * (i as f64 + u) / spec.grid as f64;
            let x0 = rng.random_range(0.0..TAU);
            classify_point(omega, x0, spec)
        })
        .collect();
    let locked = points.iter().filter(|p| p.locked).count();
    let undecided = points.iter().filter(|p| !p.locked && p.undecided).count();
    Ok(TongueReport {
        eps: spec.eps,
        q_max: spec.q_max,
        locked_fraction: locked as f64 / spec.grid as f64,
        undecided,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rigid_rotation_number() {
        for &w in &[0.0, 0.3, 1.0, PI, 5.9] {
            let r = rotation_number(w, 0.0, 1000, 10).unwrap();
            assert!((r - w).abs() < 1.0 / 1000.0);
        }
    }

    #[test]
    fn zero_omega_is_fixed() {
        for eps in [0.0, 0.3, 0.99] {
            assert_eq!(rotation_number(0.0, eps, 500, 50).unwrap(), 0.0);
        }
    }

    #[test]
    fn rigid_error_shrinks_with_iters() {
        // inexact omega accumulates rounding only, far below 1/iters
        for iters in [10, 100, 1000, 10000] {
            let r = rotation_number(2.0_f64.sqrt(), 0.0, iters, 0).unwrap();
            assert!((r - 2.0_f64.sqrt()).abs() < 1.0 / iters as f64);
        }
    }

    #[test]
    fn half_tongue_plateau() {
        let delta = 0.01;
        for w in [PI - delta, PI, PI + delta] {
            let r = rotation_number(w, 0.5, 20000, 2000).unwrap();
            assert!((r - PI).abs() < 1e-3, "omega {w}: {r}");
        }
        let r = rotation_number(PI + delta, 0.0, 20000, 0).unwrap();
        assert!((r - PI).abs() > 0.5 * delta);
    }

    #[test]
    fn no_locking_without_coupling() {
        let r = tongue_measure(&TongueSpec::new(0.0, 1000, 1)).unwrap();
        assert_eq!(r.locked_fraction, 0.0);
    }

    #[test]
    fn zero_omega_locks_to_attracting_fixed_point() {
        let spec = TongueSpec::new(0.5, 1, 0);
        let p = classify_point(0.0, 1.0, &spec);
        assert!(p.locked && p.period == 1);
        assert!((p.multiplier - 0.5).abs() < 1e-9);
    }

    #[test]
    fn measure_grows_with_eps_and_is_deterministic() {
        let a = tongue_measure(&TongueSpec::new(0.2, 1000, 9)).unwrap();
        let b = tongue_measure(&TongueSpec::new(0.6, 1000, 9)).unwrap();
        assert!(a.locked_fraction > 0.0 && a.locked_fraction < b.locked_fraction);
        let c = seeding::with_workers(1, || tongue_measure(&TongueSpec::new(0.6, 1000, 9)).unwrap());
        assert_eq!(b.csv_rows(), c.csv_rows());
        assert_eq!(b.csv_rows().len(), 1000);
    }

    #[test]
    fn eps_bounds() {
        assert!(rotation_number(0.0, 1.0, 10, 0).is_err());
        assert!(rotation_number(7.0, 0.1, 10, 0).is_err());
        assert!(tongue_measure(&TongueSpec::new(-0.5, 1000, 0)).is_err());
        assert!(tongue_measure(&TongueSpec::new(0.5, 999, 0)).is_err());
    }
}
