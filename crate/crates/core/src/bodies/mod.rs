//! Convex bodies: polytopes in vertex or halfspace form, zonotopes and
//! parallelepipeds, plus their faces and projections.
//!
//! Every body eagerly builds a [`Polytope`] holding both vertices and facet
//! halfspaces, so values are immutable and freely shareable across threads.

mod face;
pub mod hull;
pub mod zonotope;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, AffineFrame, Point};

pub use face::Face;
pub use hull::{Facet, Polytope};

/// Additive tolerance on halfspace residuals for membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Serialized description of a body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Vpolytope {
        vertices: Vec<Point>,
    },
    Hpolytope {
        normals: Vec<Point>,
        offsets: Vec<f64>,
    },
    Zonotope {
        generators: Vec<Point>,
    },
    /// `sum_i alphas[i] * [-basis[i], basis[i]]` for an orthonormal basis.
    Box {
        basis: Vec<Point>,
        alphas: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodySpec", into = "BodySpec")]
pub struct ConvexBody {
    spec: BodySpec,
    poly: Polytope,
}

impl TryFrom<BodySpec> for ConvexBody {
    type Error = Error;

    fn try_from(spec: BodySpec) -> Result<Self> {
        Self::new(spec)
    }
}

impl From<ConvexBody> for BodySpec {
    fn from(body: ConvexBody) -> Self {
        body.spec
    }
}

fn check_dims(points: &[Point]) -> Result<usize> {
    let d = points
        .first()
        .ok_or_else(|| Error::Invalid("empty point list".into()))?
        .len();
    if d == 0 {
        return Err(Error::Invalid("zero-dimensional points".into()));
    }
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("non-finite coordinate".into()));
        }
    }
    Ok(d)
}

impl ConvexBody {
    pub fn new(spec: BodySpec) -> Result<Self> {
        let poly = match &spec {
            BodySpec::Vpolytope { vertices } => {
                check_dims(vertices)?;
                Polytope::hull(vertices)?
            }
            BodySpec::Hpolytope { normals, offsets } => {
                check_dims(normals)?;
                Polytope::from_halfspaces(normals, offsets)?
            }
            BodySpec::Zonotope { generators } => {
                check_dims(generators)?;
                let gens: Vec<Point> = generators.iter().filter(|g| linalg::norm(g) > 0.0).cloned().collect();
                if gens.is_empty() {
                    return Err(Error::Degenerate("all generators are zero".into()));
                }
                Polytope::from_parts(zonotope::vertices(&gens)?, zonotope::halfspaces(&gens)?)
            }
            BodySpec::Box { basis, alphas } => {
                let n = check_dims(basis)?;
                if basis.len() != n {
                    return Err(Error::Invalid(format!(
                        "box basis needs {n} vectors, got {}",
                        basis.len()
                    )));
                }
                if alphas.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: alphas.len(),
                    });
                }
                if alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
                    return Err(Error::Invalid("box half-lengths must be positive".into()));
                }
                for (i, u) in basis.iter().enumerate() {
                    for (j, v) in basis.iter().enumerate() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        if (dot(u, v) - want).abs() > 1e-9 {
                            return Err(Error::Invalid("box basis is not orthonormal".into()));
                        }
                    }
                }
                let gens = box_generators(basis, alphas);
                Polytope::from_parts(zonotope::vertices(&gens)?, zonotope::halfspaces(&gens)?)
            }
        };
        Ok(Self { spec, poly })
    }

    pub fn from_vertices(vertices: Vec<Point>) -> Result<Self> {
        Self::new(BodySpec::Vpolytope { vertices })
    }

    pub fn zonotope(generators: Vec<Point>) -> Result<Self> {
        Self::new(BodySpec::Zonotope { generators })
    }

    pub fn parallelepiped(basis: Vec<Point>, alphas: Vec<f64>) -> Result<Self> {
        Self::new(BodySpec::Box { basis, alphas })
    }

    /// Axis-aligned box `[lo_1, hi_1] x ... x [lo_n, hi_n]` in vertex form.
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let n = lo.len();
        let vertices = (0..1usize << n)
            .map(|m| (0..n).map(|k| if (m >> k) & 1 == 1 { hi[k] } else { lo[k] }).collect())
            .collect();
        Self::from_vertices(vertices)
    }

    pub fn spec(&self) -> &BodySpec {
        &self.spec
    }

    pub fn polytope(&self) -> &Polytope {
        &self.poly
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn vertices(&self) -> &[Point] {
        self.poly.vertices()
    }

    /// Zonotope generators, when the body is a zonotope or parallelepiped.
    pub fn generators(&self) -> Option<Vec<Point>> {
        match &self.spec {
            BodySpec::Zonotope { generators } => Some(generators.clone()),
            BodySpec::Box { basis, alphas } => Some(box_generators(basis, alphas)),
            _ => None,
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.poly.contains(x, tol)
    }

    pub fn support_function(&self, u: &[f64]) -> f64 {
        match self.generators() {
            Some(g) => zonotope::support(&g, u),
            None => self.poly.support(u),
        }
    }

    pub fn volume(&self) -> Result<f64> {
        self.poly.volume()
    }

    pub fn triangulate(&self) -> Result<Vec<Vec<Point>>> {
        self.poly.triangulate()
    }

    /// `t K`, keeping the representation kind.
    pub fn scale(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Invalid(format!("scale factor must be positive, got {t}")));
        }
        let spec = match &self.spec {
            BodySpec::Vpolytope { vertices } => BodySpec::Vpolytope {
                vertices: vertices.iter().map(|v| linalg::scale(t, v)).collect(),
            },
            BodySpec::Hpolytope { normals, offsets } => BodySpec::Hpolytope {
                normals: normals.clone(),
                offsets: offsets.iter().map(|b| t * b).collect(),
            },
            BodySpec::Zonotope { generators } => BodySpec::Zonotope {
                generators: generators.iter().map(|g| linalg::scale(t, g)).collect(),
            },
            BodySpec::Box { basis, alphas } => BodySpec::Box {
                basis: basis.clone(),
                alphas: alphas.iter().map(|a| t * a).collect(),
            },
        };
        Ok(Self {
            spec,
            poly: self.poly.scaled(t),
        })
    }

    /// `A + t B`. Zonotopes stay zonotopes; anything else goes to vertex form.
    pub fn minkowski_sum(&self, other: &Self, t: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        if let (Some(a), Some(b)) = (self.generators(), other.generators()) {
            let mut gens = a;
            gens.extend(b.iter().map(|g| linalg::scale(t, g)));
            return Self::zonotope(gens);
        }
        // One segment at a time keeps the hull inputs small.
        if let Some(b) = other.generators() {
            return b.iter().try_fold(self.clone(), |acc, g| acc.add_segment(g, t));
        }
        if let (Some(a), true) = (self.generators(), t > 0.0) {
            return a.iter().try_fold(other.scale(t)?, |acc, g| acc.add_segment(g, 1.0));
        }
        let mut pts = Vec::with_capacity(self.vertices().len() * other.vertices().len());
        for a in self.vertices() {
            for b in other.vertices() {
                pts.push(linalg::axpy(a, t, b));
            }
        }
        Self::from_vertices(pts)
    }

    /// `lambda A + (1 - lambda) B`.
    pub fn minkowski_combination(lambda: f64, a: &Self, b: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Invalid(format!("lambda {lambda} outside [0, 1]")));
        }
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        if lambda == 1.0 {
            return Ok(a.clone());
        }
        if lambda == 0.0 {
            return Ok(b.clone());
        }
        a.scale(lambda)?.minkowski_sum(b, 1.0 - lambda)
    }

    /// `K + eps [-u, u]`.
    pub fn add_segment(&self, u: &[f64], eps: f64) -> Result<Self> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        if eps == 0.0 {
            return Ok(self.clone());
        }
        if let Some(mut gens) = self.generators() {
            gens.push(linalg::scale(eps, u));
            return Self::zonotope(gens);
        }
        let mut pts = Vec::with_capacity(2 * self.vertices().len());
        for v in self.vertices() {
            pts.push(linalg::axpy(v, eps, u));
            pts.push(linalg::axpy(v, -eps, u));
        }
        Self::from_vertices(pts)
    }

    /// All facets as flat faces.
    pub fn faces(&self) -> Vec<Face> {
        self.poly
            .facets()
            .iter()
            .map(|f| Face::from_facet(&self.poly, f))
            .collect()
    }

    /// Facets of a zonotope or parallelepiped. Enumeration is exponential in
    /// the dimension, so inputs are capped at n <= 4 and m <= 10.
    pub fn zonotope_facets(&self) -> Result<Vec<Face>> {
        let gens = self
            .generators()
            .ok_or_else(|| Error::Unsupported("zonotope_facets on a non-zonotope".into()))?;
        if self.dim() > 4 || gens.len() > 10 {
            return Err(Error::Unsupported(format!(
                "facet enumeration capped at n <= 4, m <= 10 (got n = {}, m = {})",
                self.dim(),
                gens.len()
            )));
        }
        Ok(self.faces())
    }

    /// Orthogonal projection onto `u`'s orthogonal complement, as a body in
    /// R^(n-1) together with the chart of the hyperplane (origin 0).
    pub fn project_body(&self, u: &[f64]) -> Result<(ConvexBody, AffineFrame)> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::Unsupported("projection of a one-dimensional body".into()));
        }
        if u.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.len(),
            });
        }
        let u = linalg::normalize(u).ok_or_else(|| Error::Invalid("zero direction".into()))?;
        let frame = AffineFrame {
            origin: vec![0.0; n],
            basis: linalg::complement_basis(&u),
        };
        let body = match self.generators() {
            Some(gens) => {
                let local: Vec<Point> = gens
                    .iter()
                    .map(|g| frame.to_local(g))
                    .filter(|g| linalg::norm(g) > 1e-14)
                    .collect();
                ConvexBody::zonotope(local)?
            }
            None => ConvexBody::from_vertices(self.vertices().iter().map(|v| frame.to_local(v)).collect())?,
        };
        Ok((body, frame))
    }
}

pub(crate) fn box_generators(basis: &[Point], alphas: &[f64]) -> Vec<Point> {
    basis.iter().zip(alphas).map(|(u, a)| linalg::scale(*a, u)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexBody {
        ConvexBody::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap()
    }

    fn box2() -> ConvexBody {
        ConvexBody::zonotope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn contains_examples() {
        assert!(unit_square().contains(&[0.5, 0.5], MEMBERSHIP_TOL));
        assert!(!unit_square().contains(&[1.5, 0.5], MEMBERSHIP_TOL));
        assert!(box2().contains(&[1.0, 1.0], MEMBERSHIP_TOL));
    }

    #[test]
    fn support_examples() {
        assert!((unit_square().support_function(&[1.0, 0.0]) - 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((box2().support_function(&[s, s]) - 2f64.sqrt()).abs() < 1e-14);
        let k = unit_square();
        let w = [0.3, -0.8];
        assert!((k.support_function(&[0.6, -1.6]) - 2.0 * k.support_function(&w)).abs() < 1e-14);
    }

    #[test]
    fn scale_examples() {
        let k = unit_square().scale(2.0).unwrap();
        assert!((k.volume().unwrap() - 4.0).abs() < 1e-13);
        let z = box2().scale(3.0).unwrap();
        assert_eq!(z.generators().unwrap()[0], vec![3.0, 0.0]);
        assert_eq!(unit_square().scale(1.0).unwrap(), unit_square());
        assert!(unit_square().scale(0.0).is_err());
    }

    #[test]
    fn combination_examples() {
        let a = unit_square();
        let b = ConvexBody::axis_box(&[0.0, 0.0], &[2.0, 2.0]).unwrap();
        assert_eq!(ConvexBody::minkowski_combination(1.0, &a, &b).unwrap(), a);
        let same = ConvexBody::minkowski_combination(0.5, &a, &a).unwrap();
        assert!((same.volume().unwrap() - 1.0).abs() < 1e-13);
        let mid = ConvexBody::minkowski_combination(0.5, &a, &b).unwrap();
        assert_eq!(mid.vertices().len(), 4);
        for v in mid.vertices() {
            assert!(v.iter().all(|x| x.abs() < 1e-12 || (x - 1.5).abs() < 1e-12));
        }
        let c = ConvexBody::axis_box(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            ConvexBody::minkowski_combination(0.5, &a, &c),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn add_segment_examples() {
        let k = unit_square();
        let wide = k.add_segment(&[1.0, 0.0], 0.25).unwrap();
        assert_eq!(wide.vertices().len(), 4);
        assert_eq!(wide.polytope().facets().len(), 4);
        assert!((wide.volume().unwrap() - 1.5).abs() < 1e-13);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let hex = k.add_segment(&[s, s], 0.1).unwrap();
        assert_eq!(hex.vertices().len(), 6);
        assert_eq!(k.add_segment(&[1.0, 0.0], 0.0).unwrap(), k);
    }

    #[test]
    fn parallelepiped_faces() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = ConvexBody::parallelepiped(vec![vec![s, s], vec![-s, s]], vec![1.0, 2.0]).unwrap();
        let faces = z.zonotope_facets().unwrap();
        assert_eq!(faces.len(), 4);
        let top = faces.iter().find(|f| linalg::dist(&f.normal, &[s, s]) < 1e-12).unwrap();
        assert!((top.offset - 1.0).abs() < 1e-12);
        assert!((top.measure_lebesgue().unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zonogon_facet_count() {
        let z = ConvexBody::zonotope(vec![vec![1.0, 0.0], vec![0.4, 1.0], vec![-0.6, 0.5]]).unwrap();
        assert_eq!(z.zonotope_facets().unwrap().len(), 6);
        let bad = ConvexBody::zonotope(vec![vec![1.0, 0.0], vec![2.0, 0.0]]);
        assert!(matches!(bad, Err(Error::Degenerate(_))));
    }

    #[test]
    fn projections() {
        let (seg, _) = box2().project_body(&[0.0, 1.0]).unwrap();
        assert_eq!(seg.dim(), 1);
        assert!((seg.volume().unwrap() - 2.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (seg, _) = unit_square().project_body(&[s, s]).unwrap();
        assert!((seg.volume().unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let src = r#"{"type":"box","basis":[[1,0],[0,1]],"alphas":[1,2]}"#;
        let k: ConvexBody = serde_json::from_str(src).unwrap();
        assert!((k.volume().unwrap() - 8.0).abs() < 1e-13);
        let back: ConvexBody = serde_json::from_str(&serde_json::to_string(&k).unwrap()).unwrap();
        assert_eq!(back, k);
        let bad = r#"{"type":"zonotope","generators":[[1,1],[2,2]]}"#;
        assert!(serde_json::from_str::<ConvexBody>(bad).is_err());
    }
}
