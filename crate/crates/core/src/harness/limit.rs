//! Behaviour of the Loomis-Whitney type bound as `p -> infinity`, where the
//! density tends to the indicator of the half-space `<x, theta> > 0`.

use crate::bodies::ConvexBody;
use crate::densities::Density;
use crate::error::{Error, Result};
use crate::linalg::{self, Point};
use crate::measure::clip_simplex;
use crate::report::CheckReport;

use super::checks;

/// Allowed relative gap between the ratio at the largest `p` and its limit.
pub const LIMIT_TOLERANCE: f64 = 0.25;

fn clipped_volume(simplices: &[Vec<Point>], theta: &[f64]) -> f64 {
    let minus = linalg::neg(theta);
    simplices
        .iter()
        .flat_map(|s| clip_simplex(s, &minus, 0.0))
        .map(|s| linalg::simplex_volume(&s))
        .sum()
}

/// `(|K|^(n-1), prod_i |K | u_i^perp|)` for Lebesgue measure, restricted to
/// the half-space `<x, theta> >= 0` when `theta` is given.
fn loomis_whitney_sides(k: &ConvexBody, basis: &[Point], theta: Option<&[f64]>) -> Result<(f64, f64)> {
    let n = k.dim() as f64;
    let volume_of = |simplices: &[Vec<Point>]| match theta {
        Some(t) => clipped_volume(simplices, t),
        None => simplices.iter().map(|s| linalg::simplex_volume(s)).sum(),
    };
    let volume = volume_of(&k.triangulate()?);
    let scale = k.polytope().extent().max(1.0);
    let faces = k
        .faces()
        .into_iter()
        // The open half-space misses a face lying in its boundary.
        .filter(|f| match theta {
            Some(t) => f
                .ambient_vertices()
                .iter()
                .any(|v| linalg::dot(v, t).abs() > 1e-12 * scale),
            None => true,
        })
        .map(|f| Ok((volume_of(&f.simplices()?), f.normal)))
        .collect::<Result<Vec<_>>>()?;
    let mut product = 1.0;
    for u in basis {
        let projection: f64 = faces.iter().map(|(a, nu)| a * linalg::dot(nu, u).abs()).sum::<f64>() / 2.0;
        product *= projection;
    }
    Ok((volume.powf(n - 1.0), product))
}

/// `|K|^(n-1) <= prod_i |K | u_i^perp|`, equality for boxes aligned with the basis.
pub fn check_classical_loomis_whitney(k: &ConvexBody, basis: &[Point]) -> Result<CheckReport> {
    let (lhs, rhs) = loomis_whitney_sides(k, basis, None)?;
    Ok(CheckReport::at_most(
        "classical_loomis_whitney",
        lhs,
        rhs,
        checks::INEQUALITY_SLACK,
    ))
}

/// The `p -> infinity` value of the `theorem_lw` ratio rhs / lhs:
/// `2^n prod_i P_inf(u_i) / |K cap H|^(n-1)`, with `P_inf(u)` half the
/// first variation of `|(K + eps [-u, u]) cap H|`.
pub fn limit_ratio(k: &ConvexBody, basis: &[Point], theta: &[f64]) -> Result<f64> {
    let n = k.dim() as i32;
    let (lhs, rhs) = loomis_whitney_sides(k, basis, Some(theta))?;
    Ok(2f64.powi(n) * rhs / lhs)
}

/// Runs `theorem_lw` for each `p`, then compares the last ratio with its limit.
pub fn lebesgue_limit_study(
    k: &ConvexBody,
    basis: &[Point],
    p_list: &[f64],
    theta: &[f64],
) -> Result<Vec<CheckReport>> {
    if p_list.is_empty() || p_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("p values must be increasing".into()));
    }
    let theta = linalg::normalize(theta).ok_or_else(|| Error::Invalid("zero direction".into()))?;
    if basis
        .iter()
        .any(|u| linalg::dot(u, &theta).abs() <= checks::SUPPORT_FLOOR)
    {
        return Err(Error::Invalid("theta orthogonal to a basis vector".into()));
    }
    let n = k.dim() as f64;
    let limit = limit_ratio(k, basis, &theta)?;
    let mut reports = Vec::with_capacity(p_list.len() + 2);
    let mut last_ratio = f64::NAN;
    for &p in p_list {
        let d = Density::directional(theta.clone(), p)?;
        let r = checks::check_theorem_lw(&d, k, basis)?;
        last_ratio = r.ratio.unwrap_or(f64::NAN);
        let constant = 2f64.powf(n + 1.0 / p) * (1.0 + 1.0 / (p * n)).powf(n);
        reports.push(
            r.with_value("p", p)
                .with_value("constant", constant)
                .with_value("limit_ratio", limit)
                .with_description(format!("p = {p}")),
        );
    }
    reports.push(
        CheckReport::equal("lw_limit_trend", last_ratio, limit, LIMIT_TOLERANCE, 0.0)
            .with_value("p", *p_list.last().unwrap()),
    );
    reports.push(check_classical_loomis_whitney(k, basis)?);
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn t3_limit() {
        let k = ConvexBody::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let basis = vec![vec![S, S], vec![-S, S]];
        let limit = limit_ratio(&k, &basis, &[0.0, 1.0]).unwrap();
        assert!((limit - 4.5).abs() < 1e-12, "{limit}");
        let reports = lebesgue_limit_study(&k, &basis, &[1.0, 10.0, 100.0, 1000.0], &[0.0, 1.0]).unwrap();
        assert!(reports.iter().all(|r| r.pass), "{reports:#?}");
        let constants: Vec<f64> = reports[..4].iter().map(|r| r.values["constant"]).collect();
        assert!(constants.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn aligned_box_is_equality() {
        let k = ConvexBody::axis_box(&[0.0, -1.0, 0.5], &[2.0, 0.5, 1.0]).unwrap();
        let basis: Vec<Point> = (0..3).map(|i| linalg::unit(3, i)).collect();
        let r = check_classical_loomis_whitney(&k, &basis).unwrap();
        assert!((r.ratio.unwrap() - 1.0).abs() < 1e-12);
    }
}
