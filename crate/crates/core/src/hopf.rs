//! Nondegeneracy of Andronov-Hopf points in one-parameter families of planar
//! polynomial vector fields `f(mu, x, y) = (g, h)`.
//!
//! A candidate is a zero of `f` where `D_x f` has zero trace and positive
//! determinant. It is nondegenerate when the trace of `D_x f` along the
//! curve of equilibria has nonzero `mu`-derivative and the cubic Lyapunov
//! quantity, taken in coordinates where `D_x f = [[0, -w], [w, 0]]`, is
//! nonzero.
//!
//! Naming: a negative Lyapunov quantity means the bifurcating periodic
//! orbits attract (supercritical), a positive one that they repel
//! (subcritical). The sign of the trace derivative only says on which side
//! of `mu0` the equilibrium is unstable.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::polyjet::{MultiIndex, PolyMap};

/// `|f|` and `|trace D_x f|` tolerance for accepting a candidate.
pub const CANDIDATE_TOL: f64 = 1e-10;
/// Candidates need `det D_x f` above this.
pub const MIN_DET: f64 = 1e-8;
/// Conditions (trace derivative, Lyapunov quantity) count as degenerate
/// below this magnitude.
pub const DEGENERACY_TOL: f64 = 1e-8;
const DEDUP: f64 = 1e-6;

/// `f(mu, x, y) = (g, h)` as a polynomial map `R^3 -> R^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarFamily {
    f: PolyMap,
}

fn pd(f: &PolyMap, e: [u32; 3], pt: &[f64; 3]) -> [f64; 2] {
    let v = f.partial(&MultiIndex::new(e.to_vec())).expect("valid index").eval_unchecked(pt);
    [v[0], v[1]]
}

impl PlanarFamily {
    pub fn new(f: PolyMap) -> Result<Self> {
        if f.domain_dim() != 3 || f.range_dim() != 2 {
            return Err(Error::input("a planar family is a map R^3 -> R^2 in (mu, x, y)"));
        }
        Ok(PlanarFamily { f })
    }

    pub fn map(&self) -> &PolyMap {
        &self.f
    }

    pub fn eval(&self, mu: f64, x: [f64; 2]) -> [f64; 2] {
        let v = self.f.eval_unchecked(&[mu, x[0], x[1]]);
        [v[0], v[1]]
    }

    /// `D_x f` at `(mu, x)`, rows `(g_x, g_y)`, `(h_x, h_y)`.
    pub fn dx(&self, mu: f64, x: [f64; 2]) -> [[f64; 2]; 2] {
        let p = [mu, x[0], x[1]];
        let a = pd(&self.f, [0, 1, 0], &p);
        let b = pd(&self.f, [0, 0, 1], &p);
        [[a[0], b[0]], [a[1], b[1]]]
    }

    /// `D_mu f` at `(mu, x)`.
    pub fn dmu(&self, mu: f64, x: [f64; 2]) -> [f64; 2] {
        pd(&self.f, [1, 0, 0], &[mu, x[0], x[1]])
    }

    /// `f -> c f`.
    pub fn scale(&self, c: f64) -> PlanarFamily {
        PlanarFamily { f: self.f.scale(c) }
    }

    /// The family seen in rotated state coordinates: `R f(mu, R^T x')`.
    pub fn rotate(&self, theta: f64) -> Result<PlanarFamily> {
        let (s, c) = theta.sin_cos();
        let rt = vec![vec![1.0, 0.0, 0.0], vec![0.0, c, s], vec![0.0, -s, c]];
        let f = self.f.compose_affine(&[0.0; 3], &rt)?.map_range(&[vec![c, -s], vec![s, c]])?;
        PlanarFamily::new(f)
    }
}

fn det2(a: &[[f64; 2]; 2]) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn solve2(a: &[[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let d = det2(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([(b[0] * a[1][1] - a[0][1] * b[1]) / d, (a[0][0] * b[1] - a[1][0] * b[0]) / d])
}

/// Seeds `per_axis^3` Newton starts on a grid over `[lo, hi]` in `(mu, x, y)`.
#[derive(Clone, Debug)]
pub struct SearchBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub per_axis: usize,
}

impl SearchBox {
    pub fn cube(r: f64, per_axis: usize) -> Self {
        SearchBox { lo: [-r; 3], hi: [r; 3], per_axis }
    }
}

/// Solutions `(mu0, x0)` of `g = h = trace D_x f = 0` with
/// `det D_x f > MIN_DET`, sorted and deduplicated.
pub fn find_hopf_candidates(fam: &PlanarFamily, sb: &SearchBox) -> Result<Vec<(f64, [f64; 2])>> {
    if sb.per_axis == 0 || (0..3).any(|i| !(sb.lo[i] <= sb.hi[i])) {
        return Err(Error::input("search box needs lo <= hi and per_axis >= 1"));
    }
    let f = &fam.f;
    let tr = f.component(0)?.d(1)?.add(&f.component(1)?.d(2)?)?;
    let sys = PolyMap::from_components(&[f.component(0)?, f.component(1)?, tr])?;
    let jac: Vec<PolyMap> = (0..3).map(|c| sys.d(c)).collect::<Result<_>>()?;
    let k = sb.per_axis;
    let seeds: Vec<[f64; 3]> = (0..k * k * k)
        .map(|i| {
            let idx = [i % k, (i / k) % k, i / (k * k)];
            let mut x = [0.0; 3];
            for d in 0..3 {
                let t = if k == 1 { 0.5 } else { idx[d] as f64 / (k - 1) as f64 };
                x[d] = sb.lo[d] + t * (sb.hi[d] - sb.lo[d]);
            }
            x
        })
        .collect();
    let norm = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let solved: Vec<Option<[f64; 3]>> = seeds
        .par_iter()
        .map(|s| {
            let mut x = s.to_vec();
            let mut r = norm(&sys.eval_unchecked(&x));
            for _ in 0..50 {
                if r <= 1e-15 {
                    break;
                }
                let g = sys.eval_unchecked(&x);
                let mut j = linalg::Matrix::zeros(3, 3);
                for (c, dc) in jac.iter().enumerate() {
                    for (row, v) in dc.eval_unchecked(&x).into_iter().enumerate() {
                        j[(row, c)] = v;
                    }
                }
                let step = linalg::solve(&j, &g.iter().map(|v| -v).collect::<Vec<_>>())?;
                let mut t = 1.0;
                let mut moved = false;
                for _ in 0..30 {
                    let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + t * b).collect();
                    let tr = norm(&sys.eval_unchecked(&trial));
                    if tr < r {
                        x = trial;
                        r = tr;
                        moved = true;
                        break;
                    }
                    t *= 0.5;
                }
                if !moved || x.iter().any(|v| v.abs() > 1e8) {
                    break;
                }
            }
            (r <= CANDIDATE_TOL).then(|| [x[0], x[1], x[2]])
        })
        .collect();
    let mut out: Vec<[f64; 3]> = Vec::new();
    for s in solved.into_iter().flatten() {
        if det2(&fam.dx(s[0], [s[1], s[2]])) <= MIN_DET {
            continue;
        }
        if !out.iter().any(|o| (0..3).all(|i| (o[i] - s[i]).abs() <= DEDUP)) {
            out.push(s);
        }
    }
    out.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out.into_iter().map(|s| (s[0], [s[1], s[2]])).collect())
}

#[derive(Clone, Debug)]
pub struct FixedCurve {
    /// `(mu, x(mu))`, ascending in `mu`.
    pub samples: Vec<(f64, [f64; 2])>,
    /// `dx/dmu` at `mu0`, i.e. `(y'(mu0), z'(mu0))`.
    pub slope: [f64; 2],
    /// Set when continuation stopped early because `det D_x f` got too small.
    pub diagnostic: Option<String>,
}

const CURVE_DET_MIN: f64 = 1e-10;

fn curve_slope(fam: &PlanarFamily, mu: f64, x: [f64; 2]) -> Option<[f64; 2]> {
    let a = fam.dx(mu, x);
    if det2(&a).abs() < CURVE_DET_MIN {
        return None;
    }
    let b = fam.dmu(mu, x);
    solve2(&a, [-b[0], -b[1]])
}

fn correct(fam: &PlanarFamily, mu: f64, mut x: [f64; 2]) -> Option<[f64; 2]> {
    for _ in 0..30 {
        let r = fam.eval(mu, x);
        if r[0].abs().max(r[1].abs()) < 1e-13 {
            return Some(x);
        }
        let a = fam.dx(mu, x);
        if det2(&a).abs() < CURVE_DET_MIN {
            return None;
        }
        let d = solve2(&a, [-r[0], -r[1]])?;
        x = [x[0] + d[0], x[1] + d[1]];
    }
    let r = fam.eval(mu, x);
    (r[0].abs().max(r[1].abs()) < 1e-9).then_some(x)
}

/// Continues the equilibrium through `(mu0, x0)` over `[mu0 - dmu, mu0 + dmu]`
/// in `steps` steps each way, with tangent predictor and Newton corrector.
pub fn track_fixed_curve(fam: &PlanarFamily, mu0: f64, x0: [f64; 2], dmu: f64, steps: usize) -> Result<FixedCurve> {
    let slope = curve_slope(fam, mu0, x0)
        .ok_or_else(|| Error::degenerate("det D_x f vanishes at the starting point"))?;
    if !(dmu >= 0.0) || steps == 0 {
        return Err(Error::input("need dmu >= 0 and steps >= 1"));
    }
    let h = dmu / steps as f64;
    let mut diagnostic = None;
    let mut sides: Vec<Vec<(f64, [f64; 2])>> = Vec::new();
    for dir in [-1.0, 1.0] {
        let mut side = Vec::new();
        let (mut mu, mut x, mut s) = (mu0, x0, slope);
        for _ in 0..steps {
            let next_mu = mu + dir * h;
            let guess = [x[0] + dir * h * s[0], x[1] + dir * h * s[1]];
            let Some(nx) = correct(fam, next_mu, guess) else {
                diagnostic = Some(format!("continuation stopped near mu = {next_mu}: det D_x f below {CURVE_DET_MIN}"));
                break;
            };
            let Some(ns) = curve_slope(fam, next_mu, nx) else {
                diagnostic = Some(format!("continuation stopped at mu = {next_mu}: det D_x f below {CURVE_DET_MIN}"));
                break;
            };
            side.push((next_mu, nx));
            (mu, x, s) = (next_mu, nx, ns);
        }
        sides.push(side);
    }
    let mut samples: Vec<(f64, [f64; 2])> = sides[0].iter().rev().copied().collect();
    samples.push((mu0, x0));
    samples.extend(sides[1].iter().copied());
    Ok(FixedCurve { samples, slope, diagnostic })
}

/// `d/dmu trace D_x f(mu, x(mu))` at `mu0`, from exact second partials:
/// `g_{mu x} + x' g_{xx} + y' g_{xy} + h_{mu y} + x' h_{xy} + y' h_{yy}`.
pub fn trace_mu_derivative(fam: &PlanarFamily, mu0: f64, x0: [f64; 2], slope: [f64; 2]) -> f64 {
    let p = [mu0, x0[0], x0[1]];
    let f = &fam.f;
    let (yp, zp) = (slope[0], slope[1]);
    pd(f, [1, 1, 0], &p)[0]
        + yp * pd(f, [0, 2, 0], &p)[0]
        + zp * pd(f, [0, 1, 1], &p)[0]
        + pd(f, [1, 0, 1], &p)[1]
        + yp * pd(f, [0, 1, 1], &p)[1]
        + zp * pd(f, [0, 0, 2], &p)[1]
}

/// For `A` with zero trace and positive determinant, returns `T` (rows) and
/// `w = sqrt(det A)` with `T^-1 A T = [[0, -w], [w, 0]]`.
///
/// `T = [e1, A e1 / w]` scaled to unit determinant; any other choice with
/// unit determinant differs by a rotation.
pub fn antisymmetric_coords(a: [[f64; 2]; 2]) -> Result<([[f64; 2]; 2], f64)> {
    let trace = a[0][0] + a[1][1];
    let det = det2(&a);
    if trace.abs() >= 1e-8 {
        return Err(Error::input(format!("trace {trace} is not zero")));
    }
    if !(det > 1e-10) {
        return Err(Error::input(format!("determinant {det} is not positive")));
    }
    let w = det.sqrt();
    let col = [a[0][0] / w, a[1][0] / w];
    let s = 1.0 / col[1].abs().sqrt();
    let t = [[s, s * col[0]], [0.0, s * col[1]]];
    Ok((t, w))
}

fn inv2(t: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let d = det2(t);
    [[t[1][1] / d, -t[0][1] / d], [-t[1][0] / d, t[0][0] / d]]
}

/// The condition-(d) quantity
/// `w (g_uuu + g_uvv + h_uuv + h_vvv) + g_uv (g_uu + g_vv) - h_uv (h_uu + h_vv) - g_uu h_uu + g_vv h_vv`
/// in the coordinates of [`antisymmetric_coords`].
pub fn lyapunov_quantity(fam: &PlanarFamily, mu0: f64, x0: [f64; 2]) -> Result<f64> {
    check_point(fam, mu0, x0)?;
    let (t, w) = antisymmetric_coords(fam.dx(mu0, x0))?;
    let sub = vec![vec![0.0, 0.0], vec![t[0][0], t[0][1]], vec![t[1][0], t[1][1]]];
    let ti = inv2(&t);
    let hat = fam
        .f
        .compose_affine(&[mu0, x0[0], x0[1]], &sub)?
        .map_range(&[ti[0].to_vec(), ti[1].to_vec()])?;
    let at = |e: [u32; 2]| {
        let alpha = MultiIndex::new(e.to_vec());
        let c = hat.coefficient(&alpha);
        let k = alpha.factorial();
        (c[0] * k, c[1] * k)
    };
    let (guuu, _) = at([3, 0]);
    let (guvv, _) = at([1, 2]);
    let (_, huuv) = at([2, 1]);
    let (_, hvvv) = at([0, 3]);
    let (guu, huu) = at([2, 0]);
    let (guv, huv) = at([1, 1]);
    let (gvv, hvv) = at([0, 2]);
    Ok(w * (guuu + guvv + huuv + hvvv) + guv * (guu + gvv) - huv * (huu + hvv) - guu * huu + gvv * hvv)
}

fn check_point(fam: &PlanarFamily, mu0: f64, x0: [f64; 2]) -> Result<()> {
    let r = fam.eval(mu0, x0);
    if r[0].abs().max(r[1].abs()) > 1e-8 {
        return Err(Error::input(format!("f({mu0}, {x0:?}) = {r:?} is not zero")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Supercritical,
    Subcritical,
    DegenerateC,
    DegenerateD,
    NotHopf,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Supercritical => "nondegenerate-supercritical",
            Classification::Subcritical => "nondegenerate-subcritical",
            Classification::DegenerateC => "degenerate-c",
            Classification::DegenerateD => "degenerate-d",
            Classification::NotHopf => "not-hopf",
        })
    }
}

#[derive(Clone, Debug)]
pub struct HopfReport {
    pub mu0: f64,
    pub x0: [f64; 2],
    pub omega: f64,
    /// Eigenvalues of `D_x f` as `(re, im)`.
    pub eigenvalues: [(f64, f64); 2],
    pub curve_slope: [f64; 2],
    pub trace_mu_derivative: f64,
    pub lyapunov_quantity: f64,
    /// `min(|trace derivative|, |Lyapunov quantity|)`, compared against
    /// `DEGENERACY_TOL`.
    pub margin: f64,
    pub classification: Classification,
}

pub const CSV_HEADER: &str = "mu0,x,y,omega,trace_mu_deriv,lyapunov,classification";

impl HopfReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{:?},{:?},{:?},{:?},{:?},{:?},{}",
            self.mu0,
            self.x0[0],
            self.x0[1],
            self.omega,
            self.trace_mu_derivative,
            self.lyapunov_quantity,
            self.classification
        )
    }
}

/// Classifies one point. Points failing `f = 0`, `trace = 0` or
/// `det > MIN_DET` are reported as not-hopf with zero quantities.
pub fn classify_point(fam: &PlanarFamily, mu0: f64, x0: [f64; 2]) -> Result<HopfReport> {
    let a = fam.dx(mu0, x0);
    let trace = a[0][0] + a[1][1];
    let det = det2(&a);
    let disc = trace * trace / 4.0 - det;
    let eigenvalues = if disc < 0.0 {
        [(trace / 2.0, -(-disc).sqrt()), (trace / 2.0, (-disc).sqrt())]
    } else {
        [(trace / 2.0 - disc.sqrt(), 0.0), (trace / 2.0 + disc.sqrt(), 0.0)]
    };
    let r = fam.eval(mu0, x0);
    let mut rep = HopfReport {
        mu0,
        x0,
        omega: 0.0,
        eigenvalues,
        curve_slope: [0.0; 2],
        trace_mu_derivative: 0.0,
        lyapunov_quantity: 0.0,
        margin: 0.0,
        classification: Classification::NotHopf,
    };
    if r[0].abs().max(r[1].abs()) > 1e-8 || trace.abs() >= 1e-8 || det <= MIN_DET {
        return Ok(rep);
    }
    rep.omega = det.sqrt();
    rep.curve_slope = curve_slope(fam, mu0, x0).ok_or_else(|| Error::degenerate("singular D_x f"))?;
    rep.trace_mu_derivative = trace_mu_derivative(fam, mu0, x0, rep.curve_slope);
    rep.lyapunov_quantity = lyapunov_quantity(fam, mu0, x0)?;
    rep.margin = rep.trace_mu_derivative.abs().min(rep.lyapunov_quantity.abs());
    rep.classification = if rep.trace_mu_derivative.abs() < DEGENERACY_TOL {
        Classification::DegenerateC
    } else if rep.lyapunov_quantity.abs() < DEGENERACY_TOL {
        Classification::DegenerateD
    } else if rep.lyapunov_quantity < 0.0 {
        Classification::Supercritical
    } else {
        Classification::Subcritical
    };
    Ok(rep)
}

pub fn hopf_classify(fam: &PlanarFamily, sb: &SearchBox) -> Result<Vec<HopfReport>> {
    find_hopf_candidates(fam, sb)?.into_iter().map(|(mu, x)| classify_point(fam, mu, x)).collect()
}

/// Plain-text report, one block per candidate.
pub fn write_report(reports: &[HopfReport]) -> String {
    let mut out = String::from(
        "# hopf classification\n\
         # supercritical: lyapunov < 0 (attracting periodic orbits); subcritical: lyapunov > 0\n",
    );
    out.push_str(&format!("# degeneracy threshold {DEGENERACY_TOL:e}\ncandidates {}\n", reports.len()));
    for r in reports {
        out.push_str(&format!(
            "mu0 {:?} x {:?} y {:?}\n  omega {:?}\n  eigenvalues {:?}{:+?}i {:?}{:+?}i\n  curve_slope {:?} {:?}\n  trace_mu_deriv {:?}\n  lyapunov {:?}\n  margin {:?}\n  classification {}\n",
            r.mu0, r.x0[0], r.x0[1], r.omega, r.eigenvalues[0].0, r.eigenvalues[0].1, r.eigenvalues[1].0,
            r.eigenvalues[1].1, r.curve_slope[0], r.curve_slope[1], r.trace_mu_derivative, r.lyapunov_quantity,
            r.margin, r.classification
        ));
    }
    out
}
