//! Facets and vertices of origin-symmetric zonotopes `sum_i [-g_i, g_i]`.
//!
//! Every facet normal is orthogonal to a rank-(d-1) subset of generators. The
//! facet with outer normal `nu` is the translate `sum_{<g,nu> != 0} sign(<g,nu>) g`
//! of the lower-dimensional zonotope spanned by the generators parallel to it,
//! so vertices come out recursively without a hull computation.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{self, dot, Point};

/// Relative size of `<g, nu>` under which a generator is parallel to a facet.
const PARALLEL_TOL: f64 = 1e-10;

pub fn support(generators: &[Point], u: &[f64]) -> f64 {
    generators.iter().map(|g| dot(g, u).abs()).sum()
}

fn scale_of(generators: &[Point]) -> f64 {
    generators
        .iter()
        .map(|g| linalg::norm(g))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
}

/// Sign-canonical unit facet normals, one per antipodal pair.
pub fn facet_normals(generators: &[Point]) -> Result<Vec<Point>> {
    let d = generators
        .first()
        .ok_or_else(|| Error::Degenerate("zonotope without generators".into()))?
        .len();
    if linalg::rank(generators, 1e-10) < d {
        return Err(Error::Degenerate(format!("zonotope generators do not span R^{d}")));
    }
    if d == 1 {
        return Ok(vec![vec![1.0]]);
    }
    let scale = scale_of(generators);
    let mut normals: Vec<Point> = Vec::new();
    for combo in (0..generators.len()).combinations(d - 1) {
        let rows: Vec<Point> = combo.iter().map(|&i| generators[i].clone()).collect();
        let raw = linalg::generalized_cross(&rows);
        if linalg::norm(&raw) <= 1e-12 * scale.powi(d as i32 - 1) {
            continue;
        }
        let nu = linalg::sign_canonical(&linalg::normalize(&raw).unwrap(), 1e-9);
        if !normals.iter().any(|m| linalg::dist(m, &nu) < 1e-9) {
            normals.push(nu);
        }
    }
    Ok(normals)
}

/// Split generators at a facet normal: the facet's centre and the generators
/// parallel to the facet.
pub fn facet_split(generators: &[Point], normal: &[f64]) -> (Point, Vec<Point>) {
    let d = normal.len();
    let mut center = vec![0.0; d];
    let mut parallel = Vec::new();
    for g in generators {
        let s = dot(g, normal);
        if s.abs() <= PARALLEL_TOL * linalg::norm(g) {
            parallel.push(g.clone());
        } else {
            center = linalg::axpy(&center, s.signum(), g);
        }
    }
    (center, parallel)
}

/// Vertices of the zonotope. Generators must span R^d.
pub fn vertices(generators: &[Point]) -> Result<Vec<Point>> {
    let d = generators[0].len();
    if d == 1 {
        let s = support(generators, &[1.0]);
        if s <= 0.0 {
            return Err(Error::Degenerate("zero zonotope".into()));
        }
        return Ok(vec![vec![-s], vec![s]]);
    }
    let tol = 1e-12 * scale_of(generators);
    let mut out: Vec<Point> = Vec::new();
    for nu in facet_normals(generators)? {
        let basis = linalg::complement_basis(&nu);
        for sign in [1.0, -1.0] {
            let dir = linalg::scale(sign, &nu);
            let (center, parallel) = facet_split(generators, &dir);
            let local: Vec<Point> = parallel
                .iter()
                .map(|g| basis.iter().map(|b| dot(g, b)).collect())
                .collect();
            for y in vertices(&local)? {
                let mut x = center.clone();
                for (c, b) in y.iter().zip(&basis) {
                    x = linalg::axpy(&x, *c, b);
                }
                if !out.iter().any(|q| linalg::dist(q, &x) <= tol) {
                    out.push(x);
                }
            }
        }
    }
    Ok(out)
}

/// Outer halfspaces `(nu, h_Z(nu))`, both orientations of every normal.
pub fn halfspaces(generators: &[Point]) -> Result<Vec<(Point, f64)>> {
    let mut out = Vec::new();
    for nu in facet_normals(generators)? {
        let h = support(generators, &nu);
        out.push((linalg::neg(&nu), h));
        out.push((nu, h));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_zonotope() {
        let g = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let v = vertices(&g).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(halfspaces(&g).unwrap().len(), 4);
    }

    #[test]
    fn zonogon_has_2m_edges() {
        let g = vec![vec![1.0, 0.0], vec![0.3, 1.0], vec![-0.7, 0.4]];
        assert_eq!(halfspaces(&g).unwrap().len(), 6);
        assert_eq!(vertices(&g).unwrap().len(), 6);
    }

    #[test]
    fn parallel_generators_merge() {
        let g = vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(halfspaces(&g).unwrap().len(), 4);
        let v = vertices(&g).unwrap();
        assert_eq!(v.len(), 4);
        assert!(v.iter().any(|p| linalg::dist(p, &[3.0, 1.0]) < 1e-12));
    }

    #[test]
    fn generic_3d_counts() {
        // m generic generators in R^3: 2*C(m,2) facets, 2*(1 + (m-1) + C(m-1,2)) vertices.
        let g = vec![
            vec![1.0, 0.1, 0.2],
            vec![0.2, 1.0, -0.3],
            vec![-0.1, 0.3, 1.0],
            vec![0.5, -0.6, 0.7],
        ];
        assert_eq!(halfspaces(&g).unwrap().len(), 12);
        assert_eq!(vertices(&g).unwrap().len(), 14);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let g = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(facet_normals(&g), Err(Error::Degenerate(_))));
    }
}
