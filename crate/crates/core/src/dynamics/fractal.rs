//! Box-counting dimension and near-collision checks for linear images of
//! point clouds.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 1000;
pub const MIN_SCALES: usize = 4;
pub const MAX_CLOUD: usize = 100_000;
pub const MAX_DIM: usize = 10;

#[derive(Clone, Debug)]
pub struct BoxCount {
    pub dimension: f64,
    /// `(delta, N(delta))` in the order supplied.
    pub counts: Vec<(f64, usize)>,
}

fn cell(x: &[f64], size: f64) -> Vec<i64> {
    x.iter().map(|v| (v / size).floor() as i64).collect()
}

/// Least-squares slope of `log N(delta)` against `log(1/delta)`.
pub fn box_counting_dimension(points: &[Vec<f64>], scales: &[f64]) -> Result<BoxCount> {
    if points.len() < MIN_POINTS {
        return Err(Error::input(format!("need at least {MIN_POINTS} points, got {}", points.len())));
    }
    if scales.len() < MIN_SCALES {
        return Err(Error::input(format!("need at least {MIN_SCALES} scales")));
    }
    if scales.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::input("scales must be positive"));
    }
    let (smin, smax) = scales.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &s| (a.min(s), b.max(s)));
    if smax / smin < 10.0 {
        return Err(Error::input("scales must span at least a decade"));
    }
    let n = points[0].len();
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::input("points have mixed dimensions"));
    }
    let counts: Vec<(f64, usize)> = scales
        .iter()
        .map(|&s| (s, points.iter().map(|p| cell(p, s)).collect::<HashSet<_>>().len()))
        .collect();
    if counts.iter().all(|c| c.1 == counts[0].1) {
        return Err(Error::degenerate("all box counts are equal"));
    }
    let xs: Vec<f64> = counts.iter().map(|c| -c.0.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (c.1 as f64).ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(BoxCount { dimension: sxy / sxx, counts })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InjectivityVerdict {
    pub collision_free: bool,
    /// Near-collisions found, counting stops at `MAX_REPORTED`.
    pub collisions: usize,
    /// Indices of the first near-collision found.
    pub example: Option<(usize, usize)>,
}

const MAX_REPORTED: usize = 1000;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Looks for pairs with `|x - y| > delta` but `|Lx - Ly| <= delta / 100`,
/// hashing images on a grid of the first (at most three) image coordinates.
/// `l` is given as `m` rows of length `n`.
pub fn injectivity_check(points: &[Vec<f64>], l: &[Vec<f64>], delta: f64) -> Result<InjectivityVerdict> {
    let m = l.len();
    let n = l.first().map_or(0, |r| r.len());
    if m == 0 || n == 0 || m > MAX_DIM || n > MAX_DIM || l.iter().any(|r| r.len() != n) {
        return Err(Error::input("L must be m x n with 1 <= m, n <= 10"));
    }
    if points.len() > MAX_CLOUD {
        return Err(Error::input(format!("cloud exceeds {MAX_CLOUD} points")));
    }
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::input("point dimension differs from the domain of L"));
    }
    if !(delta > 0.0) {
        return Err(Error::input("need delta > 0"));
    }
    let images: Vec<Vec<f64>> =
        points.iter().map(|x| l.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()).collect();
    let eta = delta / 100.0;
    let h = m.min(3);
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, y) in images.iter().enumerate() {
        buckets.entry(cell(&y[..h], eta)).or_default().push(i);
    }
    let mut offsets: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..h {
        offsets = offsets.into_iter().flat_map(|o| (-1..=1).map(move |d| [o.clone(), vec![d]].concat())).collect();
    }
    let mut verdict = InjectivityVerdict { collision_free: true, collisions: 0, example: None };
    for (i, y) in images.iter().enumerate() {
        let c = cell(&y[..h], eta);
        for off in &offsets {
            let key: Vec<i64> = c.iter().zip(off).map(|(a, b)| a + b).collect();
            let Some(bucket) = buckets.get(&key) else { continue };
            for &j in bucket {
                if j <= i || dist(y, &images[j]) > eta || dist(&points[i], &points[j]) <= delta {
                    continue;
                }
                verdict.collision_free = false;
                verdict.collisions += 1;
                verdict.example.get_or_insert((i, j));
                if verdict.collisions >= MAX_REPORTED {
                    return Ok(verdict);
                }
            }
        }
    }
    Ok(verdict)
}

/// One point per row, comma separated; `#` lines and blank lines skipped.
pub fn parse_point_cloud(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row = t
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::parse(i + 1, format!("bad number `{}`", s.trim()))))
            .collect::<Result<Vec<f64>>>();
        let row = match row {
            Ok(r) => r,
            // a single non-numeric leading line is a header
            Err(_) if out.is_empty() && i == first_content_line(text) => continue,
            Err(e) => return Err(e),
        };
        if let Some(first) = out.first() {
            if first.len() != row.len() {
                return Err(Error::parse(i + 1, format!("expected {} columns, got {}", first.len(), row.len())));
            }
        }
        out.push(row);
    }
    Ok(out)
}

fn first_content_line(text: &str) -> usize {
    text.lines().position(|l| !l.trim().is_empty() && !l.trim().starts_with('#')).unwrap_or(0)
}

pub fn write_point_cloud(points: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for p in points {
        let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Midpoints of the `2^depth` intervals left after `depth` middle-third
/// removals.
pub fn cantor_midpoints(depth: u32) -> Vec<f64> {
    let mut left = vec![0.0_f64];
    let mut len = 1.0;
    for _ in 0..depth {
        len /= 3.0;
        left = left.iter().flat_map(|&a| [a, a + 2.0 * len]).collect();
    }
    left.into_iter().map(|a| a + len / 2.0).collect()
}
