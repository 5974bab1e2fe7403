use crate::error::{Error, Result};
use crate::polyjet::PolyMap;

/// Points closer than this are treated as coincident.
pub const MIN_POINT_SEPARATION: f64 = 1e-9;

/// Residual bound for [`hermite_interpolate`], relative to the data scale.
const RESIDUAL_TOL: f64 = 1e-8;

/// The interpolation basis attached to `p` distinct points in `R^n`:
/// `P_j(x) = prod_{i != j} |x - x_i|^2` and `P_jk`, the `k`-th coordinate of
/// `x -> P_j(x) (x - x_j)`.
#[derive(Clone, Debug)]
pub struct HermiteBasis {
    points: Vec<Vec<f64>>,
    values: Vec<PolyMap>,
    gradients: Vec<Vec<PolyMap>>,
}

impl HermiteBasis {
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// `P_j`, degree `2p - 2`.
    pub fn value_poly(&self, j: usize) -> &PolyMap {
        &self.values[j]
    }

    /// `P_jk`, degree `2p - 1`.
    pub fn gradient_poly(&self, j: usize, k: usize) -> &PolyMap {
        &self.gradients[j][k]
    }

    /// All `p + p n` basis polynomials: every `P_j`, then `P_jk` in
    /// `(j, k)` order.
    pub fn all(&self) -> Vec<PolyMap> {
        self.values.iter().cloned().chain(self.gradients.iter().flatten().cloned()).collect()
    }
}

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let n = points.first().ok_or_else(|| Error::input("at least one point required"))?.len();
    if points.iter().any(|x| x.len() != n) {
        return Err(Error::input("points have differing dimensions"));
    }
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate().skip(i + 1) {
            let d = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            if d <= MIN_POINT_SEPARATION {
                return Err(Error::input(format!("points {i} and {j} coincide (distance {d:e})")));
            }
        }
    }
    Ok(n)
}

/// `|x - c|^2` as a scalar polynomial.
fn squared_distance(c: &[f64]) -> Result<PolyMap> {
    let n = c.len();
    let mut terms = vec![(vec![0; n], vec![c.iter().map(|v| v * v).sum::<f64>()])];
    for (k, &ck) in c.iter().enumerate() {
        let mut e2 = vec![0; n];
        e2[k] = 2;
        terms.push((e2, vec![1.0]));
        let mut e1 = vec![0; n];
        e1[k] = 1;
        terms.push((e1, vec![-2.0 * ck]));
    }
    PolyMap::from_terms(n, 1, terms)
}

pub fn hermite_basis(points: &[Vec<f64>]) -> Result<HermiteBasis> {
    let n = check_points(points)?;
    let sq: Vec<PolyMap> = points.iter().map(|c| squared_distance(c)).collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(points.len());
    let mut gradients = Vec::with_capacity(points.len());
    for (j, xj) in points.iter().enumerate() {
        let mut pj = PolyMap::constant(n, &[1.0])?;
        for (i, s) in sq.iter().enumerate() {
            if i != j {
                pj = pj.mul_scalar_poly(s)?;
            }
        }
        let mut row = Vec::with_capacity(n);
        for (k, &xjk) in xj.iter().enumerate() {
            let shift = PolyMap::from_terms(n, 1, [(unit(n, k), vec![1.0]), (vec![0; n], vec![-xjk])])?;
            row.push(pj.mul_scalar_poly(&shift)?);
        }
        values.push(pj);
        gradients.push(row);
    }
    Ok(HermiteBasis { points: points.to_vec(), values, gradients })
}

fn unit(n: usize, k: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[k] = 1;
    e
}

const REFINE_STEPS: usize = 3;

/// `P_j(x_j)`, `D P_j(x_j)` and the basis flattened as `P_j, P_j1..P_jn`.
struct Prepared {
    at: Vec<f64>,
    dk: Vec<Vec<f64>>,
    flat: Vec<PolyMap>,
}

fn prepare(basis: &HermiteBasis) -> Result<Prepared> {
    let n = basis.points[0].len();
    let mut prep = Prepared { at: Vec::new(), dk: Vec::new(), flat: Vec::new() };
    for (j, xj) in basis.points.iter().enumerate() {
        let pj = &basis.values[j];
        prep.at.push(pj.eval_unchecked(xj)[0]);
        prep.dk.push((0..n).map(|k| pj.d(k).map(|d| d.eval_unchecked(xj)[0])).collect::<Result<_>>()?);
        prep.flat.push(pj.clone());
        prep.flat.extend(basis.gradients[j].iter().cloned());
    }
    Ok(prep)
}

/// Coefficients of the scalar interpolant in the `{P_j, P_jk}` basis:
/// values first, then the gradient corrections.
fn triangular_solve(prep: &Prepared, vals: &[f64], grads: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(prep.flat.len());
    for (j, &at) in prep.at.iter().enumerate() {
        let a = vals[j] / at;
        out.push(a);
        out.extend(grads[j].iter().zip(&prep.dk[j]).map(|(g, d)| (g - a * d) / at));
    }
    out
}

/// Max residual, and the value and gradient residuals per point.
fn component_residual(
    h: &PolyMap,
    points: &[Vec<f64>],
    vals: &[f64],
    grads: &[Vec<f64>],
) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>)> {
    let mut worst = 0.0_f64;
    let mut rv = Vec::with_capacity(points.len());
    let mut rg = Vec::with_capacity(points.len());
    for (j, x) in points.iter().enumerate() {
        let v = vals[j] - h.eval_unchecked(x)[0];
        let dv = h.jacobian(x)?;
        let g: Vec<f64> = grads[j].iter().zip(&dv[0]).map(|(want, have)| want - have).collect();
        worst = g.iter().fold(worst.max(v.abs()), |w, e| w.max(e.abs()));
        rv.push(v);
        rg.push(g);
    }
    Ok((worst, rv, rg))
}

/// Polynomial `h: R^n -> R^m` of degree at most `2p - 1` with
/// `h(x_i) = values[i]` and `Dh(x_i) = gradients[i]` (an `m x n` matrix given
/// as `m` rows).
///
/// In the `{P_j, P_jk}` basis the system is block triangular: at `x_j`
/// every other basis element vanishes to second order and `P_jk` vanishes
/// with gradient `P_j(x_j) e_k`. Each range coordinate is solved
/// independently, refined against its node residuals and checked by
/// re-evaluation.
pub fn hermite_interpolate(
    points: &[Vec<f64>],
    values: &[Vec<f64>],
    gradients: &[Vec<Vec<f64>>],
) -> Result<PolyMap> {
    let basis = hermite_basis(points)?;
    let n = points[0].len();
    let p = points.len();
    if values.len() != p || gradients.len() != p {
        return Err(Error::input("need one value and one gradient per point"));
    }
    let m = values[0].len();
    if m == 0 || values.iter().any(|v| v.len() != m) {
        return Err(Error::input("values must share a nonzero length"));
    }
    if gradients.iter().any(|g| g.len() != m || g.iter().any(|r| r.len() != n)) {
        return Err(Error::input(format!("gradients must be {m} x {n} matrices")));
    }

    let scale = values
        .iter()
        .flatten()
        .chain(gradients.iter().flatten().flatten())
        .fold(1.0_f64, |s, v| s.max(v.abs()));
    let prep = prepare(&basis)?;
    let mut comps = Vec::with_capacity(m);
    let mut residual = 0.0_f64;
    for c in 0..m {
        let vals: Vec<f64> = values.iter().map(|v| v[c]).collect();
        let grads: Vec<Vec<f64>> = gradients.iter().map(|g| g[c].clone()).collect();
        let mut h = PolyMap::zero(n, 1)?.add_combination(&triangular_solve(&prep, &vals, &grads), &prep.flat)?;
        let mut r = component_residual(&h, points, &vals, &grads)?;
        // iterative refinement against the rounding of the first pass
        for _ in 0..REFINE_STEPS {
            if r.0 == 0.0 {
                break;
            }
            let candidate = h.add_combination(&triangular_solve(&prep, &r.1, &r.2), &prep.flat)?;
            let next = component_residual(&candidate, points, &vals, &grads)?;
            if !(next.0 < r.0) {
                break;
            }
            (h, r) = (candidate, next);
        }
        residual = residual.max(r.0);
        comps.push(h);
    }
    let h = PolyMap::from_components(&comps)?;
    if !(residual <= RESIDUAL_TOL * scale) {
        return Err(Error::degenerate(format!("interpolation residual {residual:e} exceeds tolerance")));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(rng: &mut ChaCha8Rng, p: usize, n: usize) -> Vec<Vec<f64>> {
        (0..p).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
    }

    #[test]
    fn single_point_basis() {
        let b = hermite_basis(&[vec![0.5, -2.0]]).unwrap();
        assert_eq!(b.value_poly(0), &PolyMap::constant(2, &[1.0]).unwrap());
        let expect = PolyMap::from_terms(2, 1, [(vec![0, 1], vec![1.0]), (vec![0, 0], vec![2.0])]).unwrap();
        assert_eq!(b.gradient_poly(0, 1), &expect);
    }

    #[test]
    fn two_points_on_line() {
        let b = hermite_basis(&[vec![0.0], vec![1.0]]).unwrap();
        // P_1(x) = (x - 1)^2
        let expect = PolyMap::from_terms(1, 1, [(vec![2], vec![1.0]), (vec![1], vec![-2.0]), (vec![0], vec![1.0])]).unwrap();
        assert_eq!(b.value_poly(0), &expect);
        assert_eq!(b.value_poly(0).eval(&[0.0]).unwrap(), vec![1.0]);
        assert_eq!(b.value_poly(0).eval(&[1.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn coincident_points_rejected() {
        assert!(hermite_basis(&[vec![0.0, 0.0], vec![0.0, 1e-12]]).is_err());
        assert!(hermite_basis(&[]).is_err());
    }

    #[test]
    fn evaluation_matrix_nonsingular_p3_n2() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts = random_points(&mut rng, 3, 2);
        let b = hermite_basis(&pts).unwrap();
        let rows: Vec<Vec<f64>> = b
            .all()
            .iter()
            .map(|q| {
                pts.iter()
                    .flat_map(|x| {
                        let mut r = q.eval(x).unwrap();
                        r.extend(q.jacobian(x).unwrap()[0].iter().copied());
                        r
                    })
                    .collect()
            })
            .collect();
        let mat = linalg::from_rows(&rows);
        assert_eq!(mat.nrows(), 9);
        assert_eq!(mat.ncols(), 9);
        assert_eq!(linalg::rank(&mat, 1e-12), 9);
    }

    #[test]
    fn basis_postconditions_and_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..100 {
            let p = 1 + trial % 5;
            let n = 1 + (trial / 5) % 3;
            let pts = random_points(&mut rng, p, n);
            let b = hermite_basis(&pts).unwrap();
            for j in 0..p {
                assert_eq!(b.value_poly(j).degree() as usize, 2 * p - 2);
                for (i, x) in pts.iter().enumerate() {
                    let v = b.value_poly(j).eval(x).unwrap()[0];
                    if i == j {
                        assert!(v.abs() > 1e-10);
                    } else {
                        assert!(v.abs() < 1e-10);
                    }
                }
                for k in 0..n {
                    let q = b.gradient_poly(j, k);
                    assert_eq!(q.degree() as usize, 2 * p - 1);
                    for (i, x) in pts.iter().enumerate() {
                        assert!(q.eval(x).unwrap()[0].abs() < 1e-10);
                        let grad = &q.jacobian(x).unwrap()[0];
                        for (l, g) in grad.iter().enumerate() {
                            if i == j && l == k {
                                assert!(g.abs() > 1e-10);
                            } else {
                                assert!(g.abs() < 1e-10, "dP_{j}{k}/dx_{l} at x_{i} = {g}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn affine_case() {
        let x1 = vec![0.3, -0.2];
        let v = vec![1.5];
        let a = vec![vec![2.0, -1.0]];
        let h = hermite_interpolate(&[x1.clone()], &[v], &[a]).unwrap();
        for pt in [[0.0, 0.0], [1.0, 2.0], [-0.5, 0.7]] {
            let expect = 1.5 + 2.0 * (pt[0] - x1[0]) - (pt[1] - x1[1]);
            assert!((h.eval(&pt).unwrap()[0] - expect).abs() < 1e-14);
        }
        assert!(h.degree() <= 1);
    }

    #[test]
    fn zero_jets_give_zero_map() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![-0.3, 0.9]];
        let h = hermite_interpolate(&pts, &vec![vec![0.0; 2]; 3], &vec![vec![vec![0.0; 2]; 2]; 3]).unwrap();
        assert!(h.is_zero());
    }

    #[test]
    fn three_points_random_jets_reproduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let pts = random_points(&mut rng, 3, 2);
        let vals: Vec<Vec<f64>> = (0..3).map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let grads: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|_| (0..2).map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect()).collect())
            .collect();
        let h = hermite_interpolate(&pts, &vals, &grads).unwrap();
        for (i, x) in pts.iter().enumerate() {
            let v = h.eval(x).unwrap();
            let j = h.jacobian(x).unwrap();
            for c in 0..2 {
                assert!((v[c] - vals[i][c]).abs() < 1e-9);
                for k in 0..2 {
                    assert!((j[c][k] - grads[i][c][k]).abs() < 1e-9);
                }
            }
        }
        assert!(h.degree() <= 5);
    }

    #[test]
    fn interpolation_is_linear_in_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = random_points(&mut rng, 3, 2);
        let draw = |rng: &mut ChaCha8Rng| {
            let v: Vec<Vec<f64>> = (0..3).map(|_| vec![rng.random_range(-1.0..1.0)]).collect();
            let g: Vec<Vec<Vec<f64>>> = (0..3).map(|_| vec![(0..2).map(|_| rng.random_range(-1.0..1.0)).collect()]).collect();
            (v, g)
        };
        let (v1, g1) = draw(&mut rng);
        let (v2, g2) = draw(&mut rng);
        let s = 0.7;
        let vs: Vec<Vec<f64>> = v1.iter().zip(&v2).map(|(a, b)| vec![a[0] + s * b[0]]).collect();
        let gs: Vec<Vec<Vec<f64>>> = g1
            .iter()
            .zip(&g2)
            .map(|(a, b)| vec![a[0].iter().zip(&b[0]).map(|(x, y)| x + s * y).collect()])
            .collect();
        let h1 = hermite_interpolate(&pts, &v1, &g1).unwrap();
        let h2 = hermite_interpolate(&pts, &v2, &g2).unwrap();
        let hs = hermite_interpolate(&pts, &vs, &gs).unwrap();
        let diff = hs.sub(&h1.add(&h2.scale(s)).unwrap()).unwrap();
        assert!(diff.max_abs_coefficient() < 1e-10);
    }

    #[test]
    fn gradient_shape_checked() {
        assert!(hermite_interpolate(&[vec![0.0]], &[vec![1.0]], &[vec![vec![1.0, 2.0]]]).is_err());
    }
}
