//! Small dense vector helpers for points in low dimension.
//!
//! Points are plain `Vec<f64>`; everything here is O(n) or O(n^3) with n <= 4,
//! so nothing tries to be clever.

use nalgebra::{DMatrix, DVector};

pub type Point = Vec<f64>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(t: f64, a: &[f64]) -> Point {
    a.iter().map(|x| t * x).collect()
}

/// `a + t * b`
pub fn axpy(a: &[f64], t: f64, b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}

pub fn neg(a: &[f64]) -> Point {
    a.iter().map(|x| -x).collect()
}

pub fn normalize(a: &[f64]) -> Option<Point> {
    let r = norm(a);
    (r > 0.0 && r.is_finite()).then(|| scale(1.0 / r, a))
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn unit(n: usize, i: usize) -> Point {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Flip `v` so its first entry with magnitude above `tol` is positive.
pub fn sign_canonical(v: &[f64], tol: f64) -> Point {
    match v.iter().find(|x| x.abs() > tol) {
        Some(&x) if x < 0.0 => neg(v),
        _ => v.to_vec(),
    }
}

pub fn determinant(rows: &[Point]) -> f64 {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant()
}

/// Vector orthogonal to the `n - 1` given vectors in R^n, by cofactor
/// expansion. Its length is the (n-1)-volume of the parallelotope they span,
/// so a zero result means the vectors are dependent.
pub fn generalized_cross(vectors: &[Point]) -> Point {
    let n = vectors.len() + 1;
    if n == 1 {
        return vec![1.0];
    }
    let mut out = vec![0.0; n];
    let mut minor = vec![vec![0.0; n - 1]; n - 1];
    for (k, o) in out.iter_mut().enumerate() {
        for (r, v) in vectors.iter().enumerate() {
            let mut c = 0;
            for (j, x) in v.iter().enumerate() {
                if j != k {
                    minor[r][c] = *x;
                    c += 1;
                }
            }
        }
        let sign = if (k + n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        *o = sign * determinant(&minor);
    }
    out
}

/// Numerical rank via singular values, relative threshold `tol`.
pub fn rank(vectors: &[Point], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let n = vectors[0].len();
    let m = DMatrix::from_fn(vectors.len(), n, |i, j| vectors[i][j]);
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * smax).count()
}

/// Solve the square system `rows * x = rhs`, `None` when singular.
pub fn solve(rows: &[Point], rhs: &[f64]) -> Option<Point> {
    let n = rows.len();
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(rhs);
    let lu = a.lu();
    let x = lu.solve(&b)?;
    x.iter().all(|v| v.is_finite()).then(|| x.iter().cloned().collect())
}

/// Orthonormal basis of the orthogonal complement of `u` (n - 1 vectors).
pub fn complement_basis(u: &[f64]) -> Vec<Point> {
    let n = u.len();
    let u = normalize(u).expect("complement of a zero vector");
    let mut basis: Vec<Point> = Vec::with_capacity(n - 1);
    // Gram-Schmidt over the coordinate axes, least aligned with u first.
    let mut axes: Vec<usize> = (0..n).collect();
    axes.sort_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()));
    for &k in &axes {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = unit(n, k);
        v = axpy(&v, -dot(&v, &u), &u);
        for b in &basis {
            v = axpy(&v, -dot(&v, b), b);
        }
        if let Some(v) = normalize(&v) {
            if norm(&v) > 0.5 {
                basis.push(v);
            }
        }
    }
    basis
}

/// An affine chart: `origin + sum_k y_k * basis[k]` with orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFrame {
    pub origin: Point,
    pub basis: Vec<Point>,
}

impl AffineFrame {
    /// Frame of the affine hull of `points`, dimension taken from their rank.
    pub fn spanning(points: &[Point], tol: f64) -> Option<Self> {
        let origin = points.first()?.clone();
        let scale = points
            .iter()
            .map(|p| dist(p, &origin))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut basis: Vec<Point> = Vec::new();
        for p in &points[1..] {
            let mut v = sub(p, &origin);
            for _ in 0..2 {
                for b in &basis {
                    v = axpy(&v, -dot(&v, b), b);
                }
            }
            if norm(&v) > tol * scale {
                basis.push(normalize(&v)?);
            }
        }
        Some(Self { origin, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn to_local(&self, x: &[f64]) -> Point {
        let d = sub(x, &self.origin);
        self.basis.iter().map(|b| dot(&d, b)).collect()
    }

    pub fn to_ambient(&self, y: &[f64]) -> Point {
        let mut x = self.origin.clone();
        for (c, b) in y.iter().zip(&self.basis) {
            x = axpy(&x, *c, b);
        }
        x
    }
}

/// k-dimensional volume of the simplex with the given k + 1 vertices,
/// in any ambient dimension (QR of the edge matrix; a Gram determinant
/// would square the conditioning of thin simplices).
pub fn simplex_volume(vertices: &[Point]) -> f64 {
    let k = vertices.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let n = vertices[0].len();
    if k > n {
        return 0.0;
    }
    let edges = DMatrix::from_fn(n, k, |r, c| vertices[c + 1][r] - vertices[0][r]);
    let r = edges.qr().r();
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    r.diagonal().iter().map(|x| x.abs()).product::<f64>() / fact
}

/// Signed volume of a full-dimensional simplex (n + 1 vertices in R^n).
pub fn signed_simplex_volume(vertices: &[Point]) -> f64 {
    let k = vertices.len() - 1;
    let edges: Vec<Point> = vertices[1..].iter().map(|v| sub(v, &vertices[0])).collect();
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    determinant(&edges) / fact
}
