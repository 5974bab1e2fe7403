//! Monte Carlo shyness estimates: the share of a probe's coefficient box on
//! which a property fails.
//!
//! A fraction statistically indistinguishable from 0 at the chosen sample
//! size and box is all a run can certify; it is never a proof of measure
//! zero.

mod predicates;

pub use predicates::{
    predicate_from_spec, AlwaysFails, AlwaysHolds, HalfSpace, InBinaryShift, IntegralNonzero, Outcome,
    OrbitsHyperbolic, PropertyPredicate, PREDICATE_IDS,
};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::probes::{Element, Probe};
use crate::seeding;

pub const MIN_SAMPLES: usize = 100;
pub const DEFAULT_SAMPLES: usize = 10_000;
/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `k` successes in `n` trials at 95%.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShynessReport {
    pub predicate: String,
    pub probe: String,
    pub samples: usize,
    pub holds: usize,
    pub fails: usize,
    pub undecided: usize,
    /// `fails / samples`; undecided samples are not counted as failures.
    pub failure_fraction: f64,
    pub confidence_interval: (f64, f64),
    pub seed: u64,
    pub box_radius: f64,
}

pub const SHYNESS_CSV_HEADER: &str =
    "predicate,probe,samples,holds,fails,undecided,failure_fraction,ci_lo,ci_hi,seed,box_radius";

impl ShynessReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:?},{:?},{:?},{},{:?}",
            self.predicate.replace(',', ";"),
            self.probe.replace(',', ";"),
            self.samples,
            self.holds,
            self.fails,
            self.undecided,
            self.failure_fraction,
            self.confidence_interval.0,
            self.confidence_interval.1,
            self.seed,
            self.box_radius
        )
    }

    pub fn write_text(&self) -> String {
        format!(
            "predicate {}\nprobe {}\nbox_radius {:?}\nseed {}\nsamples {}\nholds {}\nfails {}\nundecided {}\n\
             failure_fraction {:?}\nwilson95 {:?} {:?}\n\
             # a zero failure count certifies only that the failure measure is statistically\n\
             # indistinguishable from 0 at this sample size and box\n",
            self.predicate,
            self.probe,
            self.box_radius,
            self.seed,
            self.samples,
            self.holds,
            self.fails,
            self.undecided,
            self.failure_fraction,
            self.confidence_interval.0,
            self.confidence_interval.1
        )
    }
}

fn probe_id(p: &Probe) -> String {
    format!("{}[q={}]", p.ambient(), p.dim())
}

/// Draws `n` coefficient vectors uniformly from `[-R, R]^q` and evaluates the
/// predicate at `base + sum lambda_i g_i`. Sample `i` uses its own
/// sub-seed, so counts do not depend on the worker count.
pub fn estimate_failure_measure(
    base: &Element,
    probe: &Probe,
    pred: &dyn PropertyPredicate,
    n: usize,
    seed: u64,
) -> Result<ShynessReport> {
    if n < MIN_SAMPLES {
        return Err(Error::input(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    if base.ambient() != *probe.ambient() {
        return Err(Error::input(format!("base element lives in {}, probe in {}", base.ambient(), probe.ambient())));
    }
    let outcomes: Vec<Outcome> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeding::task_rng(seed, "shyness", i as u64);
            let lambda = probe.sample_lambda(&mut rng);
            let e = probe.perturb(base, &lambda).expect("ambient checked");
            pred.evaluate(&e, &lambda)
        })
        .collect();
    let count = |o: Outcome| outcomes.iter().filter(|&&x| x == o).count();
    let (holds, fails, undecided) = (count(Outcome::Holds), count(Outcome::Fails), count(Outcome::Undecided));
    Ok(ShynessReport {
        predicate: pred.name(),
        probe: probe_id(probe),
        samples: n,
        holds,
        fails,
        undecided,
        failure_fraction: fails as f64 / n as f64,
        confidence_interval: wilson_interval(fails, n),
        seed,
        box_radius: probe.box_radius(),
    })
}

#[derive(Clone, Debug)]
pub struct TranslateScan {
    pub rows: Vec<ShynessReport>,
    pub max_fraction: f64,
}

/// One estimate per base element, base `j` using sub-seed `(seed, j)`.
pub fn translate_scan(
    pred: &dyn PropertyPredicate,
    probe: &Probe,
    bases: &[Element],
    n: usize,
    seed: u64,
) -> Result<TranslateScan> {
    let rows = bases
        .iter()
        .enumerate()
        .map(|(j, b)| estimate_failure_measure(b, probe, pred, n, seeding::sub_seed(seed, "translate", j as u64)))
        .collect::<Result<Vec<_>>>()?;
    let max_fraction = rows.iter().map(|r| r.failure_fraction).fold(0.0, f64::max);
    Ok(TranslateScan { rows, max_fraction })
}

#[derive(Clone, Debug)]
pub struct ProfileSpec {
    /// Parameter box; defaults to the probe box `[-R, R]^q`.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub levels: Vec<u32>,
    pub samples_per_cell: usize,
    pub seed: u64,
}

impl ProfileSpec {
    pub fn for_probe(probe: &Probe, levels: Vec<u32>, seed: u64) -> Self {
        let r = probe.box_radius();
        ProfileSpec { lo: vec![-r; probe.dim()], hi: vec![r; probe.dim()], levels, samples_per_cell: 16, seed }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileLevel {
    pub level: u32,
    pub cells: usize,
    pub samples: usize,
    pub fails: usize,
    pub undecided: usize,
    pub fraction: f64,
    pub covered_cells: usize,
    /// Share of cells meeting the failure set.
    pub coverage: f64,
    /// Coverage decided exactly by the predicate rather than by samples.
    pub coverage_exact: bool,
}

pub const PROFILE_CSV_HEADER: &str = "level,cells,samples,fails,undecided,fraction,covered_cells,coverage,coverage_exact";

impl ProfileLevel {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:?},{},{:?},{}",
            self.level,
            self.cells,
            self.samples,
            self.fails,
            self.undecided,
            self.fraction,
            self.covered_cells,
            self.coverage,
            u8::from(self.coverage_exact)
        )
    }
}

/// Largest number of cells per level.
pub const MAX_PROFILE_CELLS: usize = 1 << 22;

/// Failure fraction and cell coverage on nested grids with `2^l` cells per
/// axis, `samples_per_cell` jittered samples per cell.
pub fn failure_density_profile(
    pred: &dyn PropertyPredicate,
    probe: &Probe,
    base: &Element,
    spec: &ProfileSpec,
) -> Result<Vec<ProfileLevel>> {
    let q = probe.dim();
    if q == 0 || q > 2 {
        return Err(Error::input(format!("profile needs probe dimension 1 or 2, got {q}")));
    }
    if spec.lo.len() != q || spec.hi.len() != q || (0..q).any(|i| !(spec.lo[i] < spec.hi[i])) {
        return Err(Error::input("profile box must have lo < hi in every probe coordinate"));
    }
    if spec.samples_per_cell == 0 {
        return Err(Error::input("need at least one sample per cell"));
    }
    if base.ambient() != *probe.ambient() {
        return Err(Error::input(format!("base element lives in {}, probe in {}", base.ambient(), probe.ambient())));
    }
    let mut out = Vec::with_capacity(spec.levels.len());
    for &l in &spec.levels {
        let per_axis = 1usize.checked_shl(l).filter(|&k| k.checked_pow(q as u32).is_some_and(|c| c <= MAX_PROFILE_CELLS));
        let per_axis = per_axis.ok_or_else(|| Error::input(format!("level {l} exceeds {MAX_PROFILE_CELLS} cells")))?;
        let cells = per_axis.pow(q as u32);
        let label = format!("profile-{l}");
        let rows: Vec<(usize, usize, bool, Option<bool>)> = (0..cells)
            .into_par_iter()
            .map(|c| {
                let idx = [c % per_axis, c / per_axis];
                let lo: Vec<f64> = (0..q)
                    .map(|d| spec.lo[d] + (spec.hi[d] - spec.lo[d]) * idx[d] as f64 / per_axis as f64)
                    .collect();
                let hi: Vec<f64> = (0..q)
                    .map(|d| spec.lo[d] + (spec.hi[d] - spec.lo[d]) * (idx[d] + 1) as f64 / per_axis as f64)
                    .collect();
                let mut rng = seeding::task_rng(spec.seed, &label, c as u64);
                let (mut fails, mut und) = (0, 0);
                for _ in 0..spec.samples_per_cell {
                    let lambda: Vec<f64> = (0..q).map(|d| lo[d] + (hi[d] - lo[d]) * rng.random::<f64>()).collect();
                    let e = probe.perturb(base, &lambda).expect("ambient checked");
                    match pred.evaluate(&e, &lambda) {
                        Outcome::Fails => fails += 1,
                        Outcome::Undecided => und += 1,
                        Outcome::Holds => {}
                    }
                }
                (fails, und, fails > 0, pred.fails_somewhere_in(&lo, &hi))
            })
            .collect();
        let samples = cells * spec.samples_per_cell;
        let fails: usize = rows.iter().map(|r| r.0).sum();
        let undecided: usize = rows.iter().map(|r| r.1).sum();
        let exact = rows.iter().all(|r| r.3.is_some());
        let covered = rows.iter().filter(|r| if exact { r.3 == Some(true) } else { r.2 }).count();
        out.push(ProfileLevel {
            level: l,
            cells,
            samples,
            fails,
            undecided,
            fraction: fails as f64 / samples as f64,
            covered_cells: covered,
            coverage: covered as f64 / cells as f64,
            coverage_exact: exact,
        });
    }
    Ok(out)
}
