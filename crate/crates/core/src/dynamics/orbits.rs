use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::polyjet::PolyMap;
use crate::seeding;

/// Largest orbit residual `max_i |f(x_i) - x_{i+1}|` accepted.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Distance under which orbit points, or whole orbits, are identified.
pub const DEDUP_TOL: f64 = 1e-6;
pub const MAX_NEWTON_ITERS: usize = 50;
const MAX_HALVINGS: usize = 30;
const DIVERGENCE_BOUND: f64 = 1e8;

/// A period-`p` orbit of a polynomial self-map, stored in canonical
/// rotation (the cyclic shift whose rounded points are lexicographically
/// smallest).
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbit {
    pub period: usize,
    pub points: Vec<Vec<f64>>,
    /// `Df(x_p) ... Df(x_1)`, applied in orbit order.
    pub multiplier_matrix: Vec<Vec<f64>>,
    pub residual: f64,
}

/// Seeds for the Newton search: a tensor grid over a box plus uniformly
/// drawn extra starts. Remaining orbit points of each seed come from the
/// forward trajectory of its first point.
#[derive(Clone, Debug)]
pub struct SeedSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub per_axis: usize,
    pub random: usize,
    pub seed: u64,
}

impl SeedSpec {
    pub fn grid(lo: Vec<f64>, hi: Vec<f64>, per_axis: usize) -> Self {
        SeedSpec { lo, hi, per_axis, random: 0, seed: 0 }
    }

    fn starts(&self) -> Vec<Vec<f64>> {
        let n = self.lo.len();
        let k = self.per_axis;
        let mut out = Vec::new();
        if k > 0 {
            let total = k.pow(n as u32);
            for idx in 0..total {
                let mut rem = idx;
                let mut x = Vec::with_capacity(n);
                for d in 0..n {
                    let i = rem % k;
                    rem /= k;
                    let t = if k == 1 { 0.5 } else { i as f64 / (k - 1) as f64 };
                    x.push(self.lo[d] + t * (self.hi[d] - self.lo[d]));
                }
                out.push(x);
            }
        }
        for r in 0..self.random {
            let mut rng = seeding::task_rng(self.seed, "orbit-seed", r as u64);
            out.push((0..n).map(|d| rng.random_range(self.lo[d]..=self.hi[d])).collect());
        }
        out
    }
}

/// Outcome of [`find_periodic_orbits`], with bookkeeping on failed seeds.
#[derive(Clone, Debug, Default)]
pub struct OrbitSearch {
    pub orbits: Vec<PeriodicOrbit>,
    pub seeds_tried: usize,
    /// Seeds abandoned because the Newton Jacobian became singular.
    pub singular: usize,
    /// Seeds that diverged or stalled above the residual tolerance.
    pub not_converged: usize,
    /// Converged solutions discarded for having a smaller exact period.
    pub lower_period: usize,
}

enum SeedOutcome {
    Converged(Vec<Vec<f64>>, f64),
    Singular,
    NotConverged,
}

fn orbit_residual(f: &PolyMap, pts: &[Vec<f64>]) -> f64 {
    let p = pts.len();
    let mut r = 0.0_f64;
    for i in 0..p {
        let fx = f.eval_unchecked(&pts[i]);
        for (a, b) in fx.iter().zip(&pts[(i + 1) % p]) {
            r = r.max((a - b).abs());
        }
    }
    r
}

fn newton(f: &PolyMap, jac: &[PolyMap], mut pts: Vec<Vec<f64>>) -> SeedOutcome {
    let p = pts.len();
    let n = f.domain_dim();
    let dim = n * p;
    let mut res = orbit_residual(f, &pts);
    if !res.is_finite() {
        return SeedOutcome::NotConverged;
    }
    for _ in 0..MAX_NEWTON_ITERS {
        if res == 0.0 {
            break;
        }
        let mut g = vec![0.0; dim];
        let mut j = linalg::Matrix::zeros(dim, dim);
        for i in 0..p {
            let fx = f.eval_unchecked(&pts[i]);
            let next = (i + 1) % p;
            for r in 0..n {
                g[i * n + r] = fx[r] - pts[next][r];
            }
            for (c, dc) in jac.iter().enumerate() {
                let col = dc.eval_unchecked(&pts[i]);
                for r in 0..n {
                    j[(i * n + r, i * n + c)] += col[r];
                }
            }
            for r in 0..n {
                j[(i * n + r, next * n + r)] -= 1.0;
            }
        }
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        let Some(step) = linalg::solve(&j, &neg) else {
            return if res <= RESIDUAL_TOL { SeedOutcome::Converged(pts, res) } else { SeedOutcome::Singular };
        };
        let scale = pts.iter().flatten().fold(1.0_f64, |m, v| m.max(v.abs()));
        let step_norm = step.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<Vec<f64>> = (0..p)
                .map(|i| (0..n).map(|r| pts[i][r] + t * step[i * n + r]).collect())
                .collect();
            let trial_res = orbit_residual(f, &trial);
            if trial_res < res {
                pts = trial;
                res = trial_res;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || step_norm <= 1e-15 * scale {
            break;
        }
        if pts.iter().flatten().any(|v| v.abs() > DIVERGENCE_BOUND) {
            return SeedOutcome::NotConverged;
        }
    }
    if res <= RESIDUAL_TOL {
        SeedOutcome::Converged(pts, res)
    } else {
        SeedOutcome::NotConverged
    }
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

fn rounded(x: &[f64]) -> Vec<i64> {
    x.iter().map(|v| (v / DEDUP_TOL).round() as i64).collect()
}

/// Rotation index giving the lexicographically smallest rounded sequence.
fn canonical_shift(pts: &[Vec<f64>]) -> usize {
    let keys: Vec<Vec<i64>> = pts.iter().map(|x| rounded(x)).collect();
    let p = pts.len();
    (0..p)
        .min_by(|&a, &b| {
            let ka = (0..p).map(|i| &keys[(a + i) % p]);
            let kb = (0..p).map(|i| &keys[(b + i) % p]);
            ka.cmp(kb)
        })
        .unwrap_or(0)
}

fn has_smaller_period(pts: &[Vec<f64>]) -> bool {
    let p = pts.len();
    for d in 1..p {
        if p % d == 0 && (0..p).all(|i| max_dist(&pts[i], &pts[(i + d) % p]) <= DEDUP_TOL) {
            return true;
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            if max_dist(&pts[i], &pts[j]) <= DEDUP_TOL {
                return true;
            }
        }
    }
    false
}

fn same_orbit(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    let p = a.len();
    (0..p).any(|s| (0..p).all(|i| max_dist(&a[i], &b[(i + s) % p]) <= DEDUP_TOL))
}

/// `Df(x_p) ... Df(x_1)`.
pub fn orbit_multiplier(f: &PolyMap, pts: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = f.domain_dim();
    let mut m = linalg::Matrix::identity(n, n);
    for x in pts {
        m = linalg::from_rows(&f.jacobian(x)?) * m;
    }
    Ok(linalg::to_rows(&m))
}

/// Finds period-`p` orbits of `f: R^n -> R^n` by Newton iteration on
/// `G(x_1, ..., x_p) = (f(x_1) - x_2, ..., f(x_p) - x_1)` from every seed,
/// keeping converged orbits of exact period `p`, deduplicated up to cyclic
/// rotation and returned in canonical order.
pub fn find_periodic_orbits(f: &PolyMap, p: usize, seeds: &SeedSpec) -> Result<OrbitSearch> {
    let n = f.domain_dim();
    if f.range_dim() != n {
        return Err(Error::input("periodic orbits need a self-map R^n -> R^n"));
    }
    if !(1..=4).contains(&n) || !(1..=6).contains(&p) {
        return Err(Error::input(format!("need n <= 4 and 1 <= p <= 6, got n={n}, p={p}")));
    }
    if seeds.lo.len() != n || seeds.hi.len() != n {
        return Err(Error::input("seed box dimension differs from the map"));
    }
    let jac: Vec<PolyMap> = (0..n).map(|c| f.d(c)).collect::<Result<_>>()?;
    let starts = seeds.starts();
    let outcomes: Vec<SeedOutcome> = starts
        .par_iter()
        .map(|x0| {
            let mut pts = vec![x0.clone()];
            for _ in 1..p {
                let next = f.eval_unchecked(pts.last().expect("nonempty"));
                pts.push(next);
            }
            if pts.iter().flatten().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
                return SeedOutcome::NotConverged;
            }
            newton(f, &jac, pts)
        })
        .collect();

    let mut search = OrbitSearch { seeds_tried: starts.len(), ..Default::default() };
    let mut found: Vec<(Vec<Vec<f64>>, f64)> = Vec::new();
    for o in outcomes {
        match o {
            SeedOutcome::Singular => search.singular += 1,
            SeedOutcome::NotConverged => search.not_converged += 1,
            SeedOutcome::Converged(pts, res) => {
                if p > 1 && has_smaller_period(&pts) {
                    search.lower_period += 1;
                    continue;
                }
                let s = canonical_shift(&pts);
                let pts: Vec<Vec<f64>> = (0..p).map(|i| pts[(s + i) % p].clone()).collect();
                match found.iter_mut().find(|(q, _)| same_orbit(q, &pts)) {
                    Some(existing) if res < existing.1 => *existing = (pts, res),
                    Some(_) => {}
                    None => found.push((pts, res)),
                }
            }
        }
    }
    found.sort_by(|a, b| {
        let ka: Vec<Vec<i64>> = a.0.iter().map(|x| rounded(x)).collect();
        let kb: Vec<Vec<i64>> = b.0.iter().map(|x| rounded(x)).collect();
        ka.cmp(&kb)
    });
    for (pts, _) in found {
        let residual = orbit_residual(f, &pts);
        debug_assert!(residual <= RESIDUAL_TOL);
        let multiplier_matrix = orbit_multiplier(f, &pts)?;
        search.orbits.push(PeriodicOrbit { period: p, points: pts, multiplier_matrix, residual });
    }
    Ok(search)
}
