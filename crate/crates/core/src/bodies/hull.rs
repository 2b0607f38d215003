//! Brute-force convex hulls and pulling triangulations in dimension <= 4.
//!
//! Every d-subset of the input spans a candidate hyperplane; it is a facet when
//! all points lie on one side. This is O(N^(d+1)) but N stays in the low
//! hundreds for the bodies this crate builds, and the result does not depend
//! on insertion order, which keeps degenerate inputs (coplanar points, points
//! on edges) simple to reason about.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm, AffineFrame, Point};

/// Relative threshold below which a candidate normal is treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Relative distance under which a point counts as lying on a hyperplane.
pub const PLANE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    /// Outer unit normal.
    pub normal: Point,
    /// Support value: the facet lies in `<normal, x> = offset`.
    pub offset: f64,
    /// Indices into the owning polytope's vertex list.
    pub vertices: Vec<usize>,
}

/// A full-dimensional polytope in R^d holding both representations.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    extent: f64,
}

fn extent_of(points: &[Point]) -> f64 {
    let d = points[0].len();
    let mut ext: f64 = 0.0;
    for k in 0..d {
        let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p[k]), hi.max(p[k]))
        });
        ext = ext.max(hi - lo);
    }
    let mag = points.iter().map(|p| linalg::max_abs(p)).fold(0.0, f64::max);
    ext.max(1e-3 * mag).max(f64::MIN_POSITIVE)
}

fn dedup_points(points: &[Point], tol: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| linalg::dist(p, q) <= tol) {
            out.push(p.clone());
        }
    }
    out
}

impl Polytope {
    /// Convex hull of a point set that affinely spans R^d.
    pub fn hull(points: &[Point]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Degenerate("empty point set".into()))?;
        let d = first.len();
        if d == 0 {
            return Err(Error::Degenerate("zero-dimensional point set".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("non-finite coordinate".into()));
        }
        let extent = extent_of(points);
        let pts = dedup_points(points, DEGENERACY_TOL * extent);

        if d == 1 {
            let (imin, imax) = pts.iter().enumerate().fold((0, 0), |(a, b), (i, p)| {
                (
                    if p[0] < pts[a][0] { i } else { a },
                    if p[0] > pts[b][0] { i } else { b },
                )
            });
            if pts[imax][0] - pts[imin][0] <= DEGENERACY_TOL * extent {
                return Err(Error::Degenerate("segment of zero length".into()));
            }
            let vertices = vec![pts[imin].clone(), pts[imax].clone()];
            let facets = vec![
                Facet {
                    normal: vec![-1.0],
                    offset: -vertices[0][0],
                    vertices: vec![0],
                },
                Facet {
                    normal: vec![1.0],
                    offset: vertices[1][0],
                    vertices: vec![1],
                },
            ];
            return Ok(Self {
                dim: 1,
                vertices,
                facets,
                extent,
            });
        }

        let origin = pts[0].clone();
        let diffs: Vec<Point> = pts.iter().map(|p| linalg::sub(p, &origin)).collect();
        if linalg::rank(&diffs, 1e-10) < d {
            return Err(Error::Degenerate(format!(
                "points do not span R^{d} (affine rank too low)"
            )));
        }

        let plane_tol = PLANE_TOL * extent;
        let normal_tol = DEGENERACY_TOL * extent.powi(d as i32 - 1);
        let mut found: Vec<(Point, f64, Vec<usize>)> = Vec::new();
        for combo in (0..pts.len()).combinations(d) {
            let base = &pts[combo[0]];
            let edges: Vec<Point> = combo[1..].iter().map(|&i| linalg::sub(&pts[i], base)).collect();
            let raw = linalg::generalized_cross(&edges);
            let len = norm(&raw);
            if len <= normal_tol {
                continue;
            }
            let mut nu = linalg::scale(1.0 / len, &raw);
            let mut h = dot(&nu, base);
            let seen = found.iter().any(|(m, o, _)| {
                let same = linalg::dist(m, &nu) < 1e-9 && (o - h).abs() <= plane_tol;
                let opp = linalg::dist(m, &linalg::neg(&nu)) < 1e-9 && (o + h).abs() <= plane_tol;
                same || opp
            });
            if seen {
                continue;
            }
            let (mut pos, mut negs) = (false, false);
            for p in &pts {
                let s = dot(&nu, p) - h;
                if s > plane_tol {
                    pos = true;
                } else if s < -plane_tol {
                    negs = true;
                }
                if pos && negs {
                    break;
                }
            }
            if pos && negs {
                continue;
            }
            if pos {
                nu = linalg::neg(&nu);
                h = -h;
            }
            let on: Vec<usize> = (0..pts.len())
                .filter(|&i| (dot(&nu, &pts[i]) - h).abs() <= plane_tol)
                .collect();
            found.push((nu, h, on));
        }

        // A point is a vertex when the normals of its incident facets span R^d.
        let mut is_vertex = vec![false; pts.len()];
        for (i, flag) in is_vertex.iter_mut().enumerate() {
            let normals: Vec<Point> = found
                .iter()
                .filter(|(_, _, on)| on.contains(&i))
                .map(|(n, _, _)| n.clone())
                .collect();
            *flag = normals.len() >= d && linalg::rank(&normals, 1e-9) == d;
        }
        let mut remap = vec![usize::MAX; pts.len()];
        let mut vertices = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            if is_vertex[i] {
                remap[i] = vertices.len();
                vertices.push(p.clone());
            }
        }
        let facets = found
            .into_iter()
            .map(|(normal, offset, on)| Facet {
                normal,
                offset,
                vertices: on.into_iter().filter(|&i| is_vertex[i]).map(|i| remap[i]).collect(),
            })
            .collect();
        Ok(Self {
            dim: d,
            vertices,
            facets,
            extent,
        })
    }

    /// Assemble from known vertices and facet halfspaces; facet incidences
    /// are recomputed from the plane equations.
    pub(crate) fn from_parts(vertices: Vec<Point>, halfspaces: Vec<(Point, f64)>) -> Self {
        let dim = vertices[0].len();
        let extent = extent_of(&vertices);
        let tol = 1e-9 * extent;
        let facets = halfspaces
            .into_iter()
            .map(|(normal, offset)| {
                let on = (0..vertices.len())
                    .filter(|&i| (dot(&normal, &vertices[i]) - offset).abs() <= tol)
                    .collect();
                Facet {
                    normal,
                    offset,
                    vertices: on,
                }
            })
            .collect();
        Self {
            dim,
            vertices,
            facets,
            extent,
        }
    }

    /// Vertices of `{x : <a_i, x> <= b_i}`; fails on empty or unbounded input.
    pub fn from_halfspaces(normals: &[Point], offsets: &[f64]) -> Result<Self> {
        if normals.len() != offsets.len() {
            return Err(Error::Invalid(format!(
                "{} normals but {} offsets",
                normals.len(),
                offsets.len()
            )));
        }
        let d = normals
            .first()
            .ok_or_else(|| Error::Invalid("no halfspaces".into()))?
            .len();
        if let Some(a) = normals.iter().find(|a| a.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.len(),
            });
        }
        if linalg::rank(normals, 1e-12) < d {
            return Err(Error::Unbounded);
        }
        // Bounded iff no extreme ray of the recession cone {A r <= 0}.
        for combo in (0..normals.len()).combinations(d - 1) {
            let rows: Vec<Point> = combo.iter().map(|&i| normals[i].clone()).collect();
            let r = linalg::generalized_cross(&rows);
            if norm(&r) < 1e-12 {
                continue;
            }
            let r = linalg::normalize(&r).unwrap_or(r);
            for dir in [r.clone(), linalg::neg(&r)] {
                if normals.iter().all(|a| dot(a, &dir) <= 1e-12 * norm(a)) {
                    return Err(Error::Unbounded);
                }
            }
        }
        let scale = offsets.iter().fold(1.0f64, |m, b| m.max(b.abs()));
        let mut candidates = Vec::new();
        for combo in (0..normals.len()).combinations(d) {
            let rows: Vec<Point> = combo.iter().map(|&i| normals[i].clone()).collect();
            let rhs: Vec<f64> = combo.iter().map(|&i| offsets[i]).collect();
            if linalg::rank(&rows, 1e-12) < d {
                continue;
            }
            let Some(x) = linalg::solve(&rows, &rhs) else {
                continue;
            };
            let feasible = normals
                .iter()
                .zip(offsets)
                .all(|(a, b)| dot(a, &x) <= b + 1e-9 * scale * norm(a).max(1.0));
            if feasible {
                candidates.push(x);
            }
        }
        if candidates.is_empty() {
            return Err(Error::Empty);
        }
        Self::hull(&candidates)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Bounding-box scale used for relative tolerances.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.facets.iter().all(|f| dot(&f.normal, x) - f.offset <= tol)
    }

    pub fn facet_points(&self, facet: &Facet) -> Vec<Point> {
        facet.vertices.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    /// Chart of a facet's hyperplane: origin on the facet, orthonormal
    /// tangent basis.
    pub fn facet_frame(&self, facet: &Facet) -> AffineFrame {
        AffineFrame {
            origin: linalg::scale(facet.offset, &facet.normal),
            basis: linalg::complement_basis(&facet.normal),
        }
    }

    /// Pulling triangulation from the first vertex, recursing into facets.
    /// Every simplex is returned as its d + 1 vertices in R^d.
    pub fn triangulate(&self) -> Result<Vec<Vec<Point>>> {
        if self.dim == 1 {
            return Ok(vec![self.vertices.clone()]);
        }
        let apex = &self.vertices[0];
        let mut out = Vec::new();
        for facet in &self.facets {
            if facet.vertices.contains(&0) {
                continue;
            }
            if (dot(&facet.normal, apex) - facet.offset).abs() <= PLANE_TOL * self.extent {
                continue;
            }
            for simplex in triangulate_flat(&self.facet_points(facet), &self.facet_frame(facet))? {
                let mut s = Vec::with_capacity(self.dim + 1);
                s.push(apex.clone());
                s.extend(simplex);
                out.push(s);
            }
        }
        Ok(out)
    }

    pub fn volume(&self) -> Result<f64> {
        Ok(self.triangulate()?.iter().map(|s| linalg::simplex_volume(s)).sum())
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| linalg::scale(t, v)).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal.clone(),
                    offset: t * f.offset,
                    vertices: f.vertices.clone(),
                })
                .collect(),
            extent: t * self.extent,
        }
    }
}

/// Triangulate a flat convex polytope given by points in the chart `frame`
/// (which must span the points' affine hull). Simplices come back in
/// ambient coordinates.
pub fn triangulate_flat(points: &[Point], frame: &AffineFrame) -> Result<Vec<Vec<Point>>> {
    if frame.dim() == 0 {
        return Ok(vec![vec![points[0].clone()]]);
    }
    let local: Vec<Point> = points.iter().map(|p| frame.to_local(p)).collect();
    let poly = Polytope::hull(&local)?;
    Ok(poly
        .triangulate()?
        .into_iter()
        .map(|s| s.iter().map(|y| frame.to_ambient(y)).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(d: usize) -> Vec<Point> {
        (0..1usize << d)
            .map(|m| (0..d).map(|k| ((m >> k) & 1) as f64).collect())
            .collect()
    }

    #[test]
    fn square_has_four_facets() {
        let p = Polytope::hull(&cube(2)).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().len(), 4);
        assert_eq!(p.triangulate().unwrap().len(), 2);
        assert!((p.volume().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cube_volume_and_facets() {
        let p = Polytope::hull(&cube(3)).unwrap();
        assert_eq!(p.facets().len(), 6);
        for f in p.facets() {
            assert_eq!(f.vertices.len(), 4);
        }
        let simplices = p.triangulate().unwrap();
        assert!(simplices.len() == 5 || simplices.len() == 6);
        assert!((p.volume().unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn tesseract_volume() {
        let pts: Vec<Point> = cube(4).iter().map(|p| linalg::scale(2.0, p)).collect();
        let p = Polytope::hull(&pts).unwrap();
        assert_eq!(p.facets().len(), 8);
        assert!((p.volume().unwrap() - 16.0).abs() < 1e-11);
    }

    #[test]
    fn interior_and_edge_points_are_dropped() {
        let mut pts = cube(2);
        pts.push(vec![0.5, 0.5]);
        pts.push(vec![0.5, 0.0]);
        pts.push(vec![1.0, 0.0]);
        let p = Polytope::hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().len(), 4);
    }

    #[test]
    fn simplex_triangulates_to_itself() {
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let p = Polytope::hull(&pts).unwrap();
        let t = p.triangulate().unwrap();
        assert_eq!(t.len(), 1);
        assert!((p.volume().unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn flat_input_is_degenerate() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(Polytope::hull(&pts), Err(Error::Degenerate(_))));
    }

    #[test]
    fn halfspace_square() {
        let normals = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let offsets = vec![1.0, 0.0, 2.0, 0.0];
        let p = Polytope::from_halfspaces(&normals, &offsets).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert!((p.volume().unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn halfspace_unbounded_and_empty() {
        let normals = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]];
        assert!(matches!(
            Polytope::from_halfspaces(&normals, &[1.0, 0.0, 1.0]),
            Err(Error::Unbounded)
        ));
        let normals = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        assert!(matches!(
            Polytope::from_halfspaces(&normals, &[-1.0, -1.0, 1.0, 1.0]),
            Err(Error::Empty)
        ));
    }
}
