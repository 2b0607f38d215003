//! Built-in scenarios: the reference instances and the identity suite.

use crate::bodies::ConvexBody;
use crate::densities::Density;
use crate::error::Result;
use crate::frames::WeightedFrame;
use crate::linalg::Point;

use super::scenario::{CheckKind, Scenario};

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn unit_square() -> Result<ConvexBody> {
    ConvexBody::from_vertices(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]])
}

fn y_density() -> Result<Density> {
    Density::directional(vec![0.0, 1.0], 1.0)
}

fn rotated_basis() -> Vec<Point> {
    vec![vec![S, S], vec![-S, S]]
}

/// `g = y_+`, `K = [0, 1]^2`, coordinate directions.
pub fn t1() -> Result<Scenario> {
    let mut s = Scenario::new(
        "t1",
        y_density()?,
        unit_square()?,
        vec![
            CheckKind::SelfMixed,
            CheckKind::ZonotopeExpansion,
            CheckKind::ProjectionRoutes,
            CheckKind::SegmentRoutes,
            CheckKind::ConeDecomposition,
            CheckKind::MinkowskiFirst,
            CheckKind::Borell,
        ],
    );
    s.second_body = Some(ConvexBody::zonotope(vec![vec![1.0, 0.0], vec![0.0, 1.0]])?);
    s.directions = Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    Ok(s)
}

/// `g = y_+`, `K = [0, 1]^2`, basis rotated by 45 degrees.
pub fn t3() -> Result<Scenario> {
    let mut s = Scenario::new(
        "t3",
        y_density()?,
        unit_square()?,
        vec![
            CheckKind::TheoremLw,
            CheckKind::FaceBound,
            CheckKind::ZonotopeBound,
            CheckKind::TheoremBall,
            CheckKind::RatioInvariance,
            CheckKind::ProjectionBound,
            CheckKind::LebesgueLimit,
        ],
    );
    s.basis = Some(rotated_basis());
    s.alphas = Some(vec![1.0, 1.0]);
    s.p_list = Some(vec![1.0, 10.0, 100.0, 1000.0]);
    Ok(s)
}

/// `g = y_+`, `K = [0, 1]^2`, three unit vectors 120 degrees apart.
pub fn triple() -> Result<Scenario> {
    let mut s = Scenario::new(
        "triple",
        y_density()?,
        unit_square()?,
        vec![
            CheckKind::FrameIsotropic,
            CheckKind::GammaTrace,
            CheckKind::ZonotopeBound,
            CheckKind::TheoremBall,
            CheckKind::ProjectionBound,
        ],
    );
    s.frame = Some(WeightedFrame::planar_regular(3, 105f64.to_radians())?);
    s.alphas = Some(vec![1.0, 0.5, 2.0]);
    Ok(s)
}

pub fn demo_scenarios() -> Result<Vec<Scenario>> {
    Ok(vec![t1()?, t3()?, triple()?])
}

fn zonotope(gens: &[&[f64]]) -> Result<ConvexBody> {
    ConvexBody::zonotope(gens.iter().map(|g| g.to_vec()).collect())
}

fn polytope(vertices: &[&[f64]]) -> Result<ConvexBody> {
    ConvexBody::from_vertices(vertices.iter().map(|v| v.to_vec()).collect())
}

/// Twenty scenarios for the mixed-measure identities, over n in {2, 3} and
/// p in {0.5, 1, 2, 1000}.
pub fn identity_scenarios() -> Result<Vec<Scenario>> {
    let checks = vec![
        CheckKind::SelfMixed,
        CheckKind::ZonotopeExpansion,
        CheckKind::Linearity,
        CheckKind::ProjectionRoutes,
        CheckKind::ConeDecomposition,
    ];
    let ps = [0.5, 1.0, 2.0, 1000.0];

    let planar_bodies = [
        polytope(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]])?,
        polytope(&[&[-0.5, 0.2], &[1.0, 0.1], &[0.8, 1.3], &[-0.2, 0.9]])?,
        polytope(&[&[0.0, 0.5], &[1.0, -0.5], &[0.4, 1.5]])?,
        zonotope(&[&[1.0, 0.2], &[-0.3, 0.7], &[0.4, 0.4]])?,
        ConvexBody::axis_box(&[-1.0, 0.2], &[0.5, 1.1])?,
    ];
    let planar_densities = |p: f64| -> Result<Vec<Density>> {
        Ok(vec![
            Density::directional(vec![0.0, 1.0], p)?,
            Density::directional(vec![0.3, 1.0], p)?,
            Density::min_linear(vec![vec![0.4, 1.0], vec![-0.6, 1.0]], p)?,
        ])
    };
    let planar_z = [
        zonotope(&[&[1.0, 0.0], &[0.0, 1.0]])?,
        zonotope(&[&[0.6, 0.3], &[-0.2, 0.9], &[0.5, -0.4]])?,
    ];
    let planar_f = zonotope(&[&[0.2, 0.7], &[0.9, -0.1]])?;

    let spatial_bodies = [
        ConvexBody::axis_box(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0])?,
        polytope(&[&[0.0, 0.0, 0.2], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.1], &[0.3, 0.3, 1.2]])?,
        zonotope(&[&[1.0, 0.0, 0.2], &[0.0, 0.8, 0.1], &[0.2, 0.1, 0.7]])?,
    ];
    let spatial_densities = |p: f64| -> Result<Vec<Density>> {
        Ok(vec![
            Density::directional(vec![0.1, 0.2, 1.0], p)?,
            Density::min_linear(vec![vec![0.3, 0.0, 1.0], vec![-0.2, 0.4, 1.0]], p)?,
        ])
    };
    let spatial_z = zonotope(&[&[0.7, 0.0, 0.0], &[0.0, 0.6, 0.2], &[0.1, -0.2, 0.5]])?;
    let spatial_f = zonotope(&[&[0.3, 0.5, 0.0], &[0.0, 0.2, 0.6], &[0.4, 0.0, 0.3]])?;

    let mut out = Vec::with_capacity(20);
    for i in 0..14 {
        let p = ps[i % ps.len()];
        let d = planar_densities(p)?.swap_remove(i % 3);
        let mut s = Scenario::new(
            &format!("identity_2d_{i:02}"),
            d,
            planar_bodies[i % 5].clone(),
            checks.clone(),
        );
        s.second_body = Some(planar_z[i % 2].clone());
        s.third_body = Some(planar_f.clone());
        s.directions = Some(vec![vec![1.0, 0.0], vec![0.6, 0.8]]);
        out.push(s);
    }
    for i in 0..6 {
        let p = ps[(i + 1) % ps.len()];
        let d = spatial_densities(p)?.swap_remove(i % 2);
        let mut s = Scenario::new(
            &format!("identity_3d_{i:02}"),
            d,
            spatial_bodies[i % 3].clone(),
            checks.clone(),
        );
        s.second_body = Some(spatial_z.clone());
        s.third_body = Some(spatial_f.clone());
        s.directions = Some(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.6, 0.8]]);
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for s in demo_scenarios()
            .unwrap()
            .into_iter()
            .chain(identity_scenarios().unwrap())
        {
            s.validate().unwrap_or_else(|e| panic!("{}: {e}", s.name));
        }
        assert_eq!(identity_scenarios().unwrap().len(), 20);
    }

    #[test]
    fn demo_passes() {
        for s in demo_scenarios().unwrap() {
            for r in s.run() {
                assert!(r.pass, "{}: {r:?}", s.name);
            }
        }
    }
}
