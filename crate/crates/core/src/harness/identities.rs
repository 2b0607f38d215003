//! Identities and intermediate inequalities used along the way.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bodies::{ConvexBody, Face};
use crate::densities::Density;
use crate::error::Result;
use crate::linalg::{self, Point};
use crate::measure::{self, HomogeneityExponent};
use crate::mixed::{self, default_schedule};
use crate::report::{CheckReport, Relation};

use super::checks::{self, INEQUALITY_SLACK, SUPPORT_FLOOR};

/// Relative tolerance for identities that go through finite differences.
pub const FD_TOLERANCE: f64 = 1e-3;
/// Relative tolerance for identities evaluated by quadrature only.
pub const ROUTE_TOLERANCE: f64 = 1e-6;

/// `mu_1(Z, Z) = mu(Z) / q`, with the left side by finite differences.
pub fn check_self_mixed(d: &Density, z: &ConvexBody) -> Result<CheckReport> {
    let h = HomogeneityExponent::of(d);
    let fd = mixed::mixed_measure_fd(d, z, z, &default_schedule())?;
    let mu = measure::measure(d, z)?;
    Ok(
        CheckReport::equal("self_mixed", fd.value, mu * h.one_over_q, FD_TOLERANCE, 1e-12)
            .with_value("fd_error_estimate", fd.error_estimate)
            .with_value("fd_monotone", f64::from(u8::from(fd.monotone))),
    )
}

/// `mu_1(K, Z) = (2 / (n q)) sum_i alpha_i P(u_i)` for a zonotope `Z`.
pub fn check_zonotope_expansion(d: &Density, k: &ConvexBody, z: &ConvexBody) -> Result<CheckReport> {
    mixed::mixed_zonotope_expansion(d, k, z)
}

/// `mu_1(K, E + t F) = mu_1(K, E) + t mu_1(K, F)`, all by finite differences.
pub fn check_linearity(d: &Density, k: &ConvexBody, e: &ConvexBody, f: &ConvexBody, t: f64) -> Result<CheckReport> {
    let schedule = default_schedule();
    let sum = e.minkowski_sum(f, t)?;
    let lhs = mixed::mixed_measure_fd(d, k, &sum, &schedule)?;
    let me = mixed::mixed_measure_fd(d, k, e, &schedule)?;
    let mf = mixed::mixed_measure_fd(d, k, f, &schedule)?;
    Ok(
        CheckReport::equal("linearity", lhs.value, me.value + t * mf.value, FD_TOLERANCE, 1e-12)
            .with_value("mixed_e", me.value)
            .with_value("mixed_f", mf.value)
            .with_value("t", t),
    )
}

/// Closed form of the projection functional against its defining integral.
pub fn check_projection_routes(d: &Density, k: &ConvexBody, theta: &[f64]) -> Result<CheckReport> {
    let pv = mixed::projection_functional(d, k, theta)?;
    let r = CheckReport::equal(
        "projection_routes",
        pv.value,
        pv.definition_route,
        ROUTE_TOLERANCE,
        1e-12,
    )
    .with_value("scaling_residual", pv.scaling_residual)
    .with_value("mixed", pv.mixed);
    Ok(if pv.scaling_residual > ROUTE_TOLERANCE {
        r.fail(format!(
            "mu_1(tK, .) does not scale as t^(1/q - 1): {:.3e}",
            pv.scaling_residual
        ))
    } else {
        r
    })
}

/// `mu(K) = q sum_F h_K(nu_F) mu_{n-1}(F)`: the cone decomposition from
/// the origin, exact for any polytope by the divergence theorem.
pub fn check_cone_decomposition(d: &Density, k: &ConvexBody) -> Result<CheckReport> {
    let h = HomogeneityExponent::of(d);
    let mu = measure::measure(d, k)?;
    let mut sum = 0.0;
    for face in k.faces() {
        sum += face.offset * measure::measure_face(d, &face)?.value;
    }
    Ok(CheckReport::equal("cone_decomposition", mu, h.q * sum, 1e-8, 1e-12))
}

/// `mu_1(K, [-u, u]) >= mu_{n-1}(P_u K)`, the projection measured in `u^perp`
/// with the restricted density.
pub fn check_projection_bound(d: &Density, k: &ConvexBody, u: &[f64]) -> Result<CheckReport> {
    const NAME: &str = "projection_bound";
    let mut reasons = Vec::new();
    if k.dim() < 2 {
        reasons.push("projection needs n >= 2".to_string());
    } else if d.symmetrized_power(u) <= SUPPORT_FLOOR {
        reasons.push(format!("[-u, u] misses the support for u = {u:?}"));
    }
    if !reasons.is_empty() {
        return Ok(CheckReport::skipped(NAME, Relation::LhsGeRhs, reasons));
    }
    let u = linalg::normalize(u).expect("checked nonzero above");
    let lhs = mixed::mixed_measure_segment(d, k, &u)?.value;
    let (projected, frame) = k.project_body(&u)?;
    let face = Face::in_frame(frame, projected.vertices().to_vec(), u);
    let rhs = measure::measure_face(d, &face)?.value;
    Ok(CheckReport::at_least(NAME, lhs, rhs, INEQUALITY_SLACK))
}

/// `g(w + t1 u) >= g(w + t2 u)` for `t1 >= t2 >= 0` and `u` in the support,
/// on random `w`. Reports the worst margin.
pub fn check_directional_monotonicity(d: &Density, u: &[f64], samples: usize, seed: u64) -> CheckReport {
    const NAME: &str = "directional_monotonicity";
    let u = if d.eval(u) > 0.0 { u.to_vec() } else { linalg::neg(u) };
    if d.base(&u) <= SUPPORT_FLOOR {
        return CheckReport::skipped(
            NAME,
            Relation::LhsGeRhs,
            vec![format!("neither u nor -u in the support: {u:?}")],
        )
        .with_seed(seed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = u.len();
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let w: Point = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let t2 = rng.random_range(0.0..2.0);
        let t1 = t2 + rng.random_range(0.0..2.0);
        let hi = d.eval(&linalg::axpy(&w, t1, &u));
        let lo = d.eval(&linalg::axpy(&w, t2, &u));
        worst = worst.min((hi - lo) / hi.max(1.0));
    }
    CheckReport::at_least(NAME, worst, -1e-12, 0.0)
        .with_seed(seed)
        .with_value("samples", samples as f64)
}

/// The Loomis-Whitney ratio is invariant under `K -> tK`.
pub fn check_ratio_invariance(d: &Density, k: &ConvexBody, basis: &[Point], t: f64) -> Result<CheckReport> {
    const NAME: &str = "ratio_invariance";
    let base = checks::check_theorem_lw(d, k, basis)?;
    if !base.hypothesis_ok {
        return Ok(CheckReport::skipped(NAME, Relation::Equal, base.reasons));
    }
    let scaled = checks::check_theorem_lw(d, &k.scale(t)?, basis)?;
    let (a, b) = (base.rhs / base.lhs, scaled.rhs / scaled.lhs);
    Ok(CheckReport::equal(NAME, a, b, ROUTE_TOLERANCE, 1e-300).with_value("t", t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y_density() -> Density {
        Density::directional(vec![0.0, 1.0], 1.0).unwrap()
    }

    #[test]
    fn t1_identities() {
        let d = y_density();
        let k = ConvexBody::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let z = ConvexBody::zonotope(vec![vec![1.0, 0.0], vec![0.3, 0.8]]).unwrap();
        for r in [
            check_self_mixed(&d, &z).unwrap(),
            check_zonotope_expansion(&d, &k, &z).unwrap(),
            check_projection_routes(&d, &k, &[1.0, 0.0]).unwrap(),
            check_cone_decomposition(&d, &k).unwrap(),
            check_cone_decomposition(&d, &z).unwrap(),
            check_linearity(
                &d,
                &k,
                &z,
                &ConvexBody::zonotope(vec![vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap(),
                0.5,
            )
            .unwrap(),
        ] {
            assert!(r.pass, "{r:?}");
            assert!(r.residual <= 1e-3, "{r:?}");
        }
    }

    #[test]
    fn projection_bound_on_zonotopes() {
        let d = Density::directional(vec![0.2, 1.0], 2.0).unwrap();
        let z = ConvexBody::zonotope(vec![vec![1.0, 0.0], vec![0.3, 0.8], vec![-0.5, 0.4]]).unwrap();
        for u in [[1.0, 0.0], [0.6, 0.8], [0.0, 1.0]] {
            let r = check_projection_bound(&d, &z, &u).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn monotone_along_support() {
        let d = Density::min_linear(vec![vec![0.3, 1.0], vec![-0.5, 1.0]], 0.5).unwrap();
        let r = check_directional_monotonicity(&d, &[0.0, -1.0], 2000, 3);
        assert!(r.pass, "{r:?}");
        assert!(!check_directional_monotonicity(&d, &[1.0, 0.0], 10, 3).hypothesis_ok);
    }

    #[test]
    fn ratio_invariance_t3() {
        let d = y_density();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let k = ConvexBody::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        for t in [0.5, 2.0] {
            let r = check_ratio_invariance(&d, &k, &[vec![s, s], vec![-s, s]], t).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
