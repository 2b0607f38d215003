use crate::error::Result;
use crate::linalg::{self, AffineFrame, Point};

use super::hull::{Facet, Polytope};

/// A flat (n-1)-dimensional convex polygon/polytope embedded in R^n.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// Chart of the face's hyperplane.
    pub frame: AffineFrame,
    /// Vertices in face coordinates.
    pub vertices: Vec<Point>,
    /// Outer unit normal of the supporting hyperplane.
    pub normal: Point,
    /// Signed distance of the hyperplane from the origin.
    pub offset: f64,
}

impl Face {
    pub(crate) fn from_facet(poly: &Polytope, facet: &Facet) -> Self {
        let frame = poly.facet_frame(facet);
        let vertices = poly.facet_points(facet).iter().map(|p| frame.to_local(p)).collect();
        Self {
            frame,
            vertices,
            normal: facet.normal.clone(),
            offset: facet.offset,
        }
    }

    /// The face `{ alpha_i s u_i + sum_{j != i} beta_j u_j : |beta_j| <= alpha_j }`
    /// of the parallelepiped `sum_j alpha_j [-u_j, u_j]`, with `s = +1` or `-1`.
    pub fn parallelepiped_face(basis: &[Point], alphas: &[f64], i: usize, sign: f64) -> Self {
        let normal = linalg::scale(sign, &basis[i]);
        let tangents: Vec<Point> = (0..basis.len()).filter(|&j| j != i).map(|j| basis[j].clone()).collect();
        let half: Vec<f64> = (0..basis.len()).filter(|&j| j != i).map(|j| alphas[j]).collect();
        let k = tangents.len();
        let vertices = (0..1usize << k)
            .map(|m| {
                (0..k)
                    .map(|t| if (m >> t) & 1 == 1 { half[t] } else { -half[t] })
                    .collect()
            })
            .collect();
        Self {
            frame: AffineFrame {
                origin: linalg::scale(alphas[i], &normal),
                basis: tangents,
            },
            vertices,
            normal,
            offset: alphas[i],
        }
    }

    /// A flat set given in a chart, e.g. a projected body.
    pub fn in_frame(frame: AffineFrame, vertices: Vec<Point>, normal: Point) -> Self {
        let offset = linalg::dot(&frame.origin, &normal);
        Self {
            frame,
            vertices,
            normal,
            offset,
        }
    }

    pub fn ambient_vertices(&self) -> Vec<Point> {
        self.vertices.iter().map(|y| self.frame.to_ambient(y)).collect()
    }

    /// Simplices covering the face, in ambient coordinates.
    pub fn simplices(&self) -> Result<Vec<Vec<Point>>> {
        if self.frame.dim() == 0 {
            return Ok(vec![vec![self.frame.origin.clone()]]);
        }
        let local = Polytope::hull(&self.vertices)?;
        Ok(local
            .triangulate()?
            .into_iter()
            .map(|s| s.iter().map(|y| self.frame.to_ambient(y)).collect())
            .collect())
    }

    /// Plain (n-1)-dimensional area.
    pub fn measure_lebesgue(&self) -> Result<f64> {
        Ok(self.simplices()?.iter().map(|s| linalg::simplex_volume(s)).sum())
    }
}
