use crate::error::{Error, Result};
use crate::linalg;

use super::orbits::PeriodicOrbit;

/// Margins below this are declared nonhyperbolic.
pub const TOL_LO: f64 = 1e-8;
/// Margins above this are declared hyperbolic; between the two is undecided.
pub const TOL_HI: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Hyperbolic,
    Nonhyperbolic,
    Undecided,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Hyperbolic => "hyperbolic",
            Verdict::Nonhyperbolic => "nonhyperbolic",
            Verdict::Undecided => "undecided",
        })
    }
}

#[derive(Clone, Debug)]
pub struct HyperbolicityVerdict {
    pub eigenvalue_moduli: Vec<f64>,
    /// `min_j | |lambda_j| - 1 |`; NaN when the eigensolver failed.
    pub margin: f64,
    pub verdict: Verdict,
    pub diagnostic: Option<String>,
}

fn band(margin: f64) -> Verdict {
    if margin > TOL_HI {
        Verdict::Hyperbolic
    } else if margin < TOL_LO {
        Verdict::Nonhyperbolic
    } else {
        Verdict::Undecided
    }
}

/// Classifies a square matrix by the distance of its spectrum from the unit
/// circle.
pub fn classify_matrix(m: &[Vec<f64>]) -> HyperbolicityVerdict {
    match linalg::eigenvalues(&linalg::from_rows(m)) {
        Ok(eig) => {
            let mut moduli: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
            moduli.sort_by(f64::total_cmp);
            let margin = moduli.iter().map(|r| (r - 1.0).abs()).fold(f64::INFINITY, f64::min);
            HyperbolicityVerdict { eigenvalue_moduli: moduli, margin, verdict: band(margin), diagnostic: None }
        }
        Err(e) => HyperbolicityVerdict {
            eigenvalue_moduli: Vec::new(),
            margin: f64::NAN,
            verdict: Verdict::Undecided,
            diagnostic: Some(e.to_string()),
        },
    }
}

pub fn hyperbolicity(orbit: &PeriodicOrbit) -> HyperbolicityVerdict {
    classify_matrix(&orbit.multiplier_matrix)
}

/// Scalars `t > 0` at which the product `(t M_p) ... (t M_1)` has an
/// eigenvalue on the unit circle, ascending and deduplicated.
///
/// Eigenvalues of the product scale as `t^p`, so each nonzero eigenvalue
/// `lambda` of `M_p ... M_1` contributes `t = |lambda|^(-1/p)`.
pub fn ray_unit_circle_hits(matrices: &[Vec<Vec<f64>>]) -> Result<Vec<f64>> {
    let p = matrices.len();
    let n = matrices.first().map_or(0, |m| m.len());
    if p == 0 || n == 0 {
        return Err(Error::input("need at least one nonempty matrix"));
    }
    if p * n * n > 64 {
        return Err(Error::input(format!("p n^2 = {} exceeds 64", p * n * n)));
    }
    if matrices.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
        return Err(Error::input("matrices must all be n x n"));
    }
    let mut prod = linalg::Matrix::identity(n, n);
    for m in matrices {
        prod = linalg::from_rows(m) * prod;
    }
    let scale = prod.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    let eig = linalg::eigenvalues(&prod)?;
    let mut ts: Vec<f64> = eig
        .iter()
        .map(|z| z.norm())
        .filter(|&r| r > 1e-12 * scale)
        .map(|r| r.powf(-1.0 / p as f64))
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    Ok(ts)
}
