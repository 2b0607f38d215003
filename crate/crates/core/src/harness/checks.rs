//! Both sides of each inequality, with hypothesis validation up front.

use crate::bodies::{ConvexBody, Face};
use crate::densities::Density;
use crate::error::Result;
use crate::frames::{self, WeightedFrame};
use crate::linalg::{self, Point};
use crate::measure::{self, HomogeneityExponent};
use crate::mixed;
use crate::report::{CheckReport, Relation};

/// Relative slack for inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-4;
/// `g~^p(u)` at or below this counts as `u` lying on the boundary of the support.
pub const SUPPORT_FLOOR: f64 = 1e-12;
/// Orthonormality / isotropy tolerance for hypothesis validation.
pub const FRAME_TOL: f64 = 1e-9;

pub(crate) fn orthonormality_defect(basis: &[Point]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((linalg::dot(a, b) - target).abs());
        }
    }
    worst
}

/// Reasons why `basis` is not an orthonormal basis of R^n.
fn basis_reasons(basis: &[Point], n: usize) -> Vec<String> {
    let mut reasons = Vec::new();
    if basis.len() != n || basis.iter().any(|u| u.len() != n) {
        reasons.push(format!("basis must have {n} vectors in R^{n}"));
        return reasons;
    }
    let defect = orthonormality_defect(basis);
    if defect > FRAME_TOL {
        reasons.push(format!("basis not orthonormal (defect {defect:.3e})"));
    }
    reasons
}

fn support_reasons(d: &Density, vectors: &[Point], what: &str) -> Vec<String> {
    vectors
        .iter()
        .filter(|u| d.symmetrized_power(u) <= SUPPORT_FLOOR)
        .map(|u| format!("[-u, u] misses the support for {what} u = {u:?}"))
        .collect()
}

/// `mu(lambda E + (1 - lambda) F) >= (lambda mu(E)^q + (1 - lambda) mu(F)^q)^(1/q)`.
pub fn check_borell(d: &Density, e: &ConvexBody, f: &ConvexBody, lambda: f64) -> Result<CheckReport> {
    const NAME: &str = "borell";
    if !(0.0..=1.0).contains(&lambda) {
        return Ok(CheckReport::skipped(
            NAME,
            Relation::LhsGeRhs,
            vec![format!("lambda = {lambda} outside [0, 1]")],
        ));
    }
    let h = HomogeneityExponent::of(d);
    let mu_e = measure::measure(d, e)?;
    let mu_f = measure::measure(d, f)?;
    let combo = ConvexBody::minkowski_combination(lambda, e, f)?;
    let lhs = measure::measure(d, &combo)?;
    let rhs = (lambda * mu_e.powf(h.q) + (1.0 - lambda) * mu_f.powf(h.q)).powf(h.one_over_q);
    Ok(CheckReport::at_least(NAME, lhs, rhs, INEQUALITY_SLACK)
        .with_value("mu_e", mu_e)
        .with_value("mu_f", mu_f)
        .with_value("lambda", lambda)
        .with_value("q", h.q))
}

/// `mu(A)^(1-q) mu(B)^q <= q mu_1(A, B)`, with `mu_1` by the facet sum.
pub fn check_minkowski_first(d: &Density, a: &ConvexBody, b: &ConvexBody) -> Result<CheckReport> {
    let h = HomogeneityExponent::of(d);
    let mu_a = measure::measure(d, a)?;
    let mu_b = measure::measure(d, b)?;
    let mixed = mixed::mixed_measure_facet(d, a, b)?.value;
    let lhs = mu_a.powf(1.0 - h.q) * mu_b.powf(h.q);
    let rhs = h.q * mixed;
    Ok(CheckReport::at_most("minkowski_first", lhs, rhs, INEQUALITY_SLACK)
        .with_value("mu_a", mu_a)
        .with_value("mu_b", mu_b)
        .with_value("mixed", mixed))
}

/// `(pn/(pn+1))^n (1 + s_i/(pS)) S^(1/p) alpha_i^-1 prod_j alpha_j^(1 + s_j/(pS))`
/// with `s_j = g~^p(u_j)`, `S = sum s_j`.
pub fn face_bound_rhs(d: &Density, basis: &[Point], alphas: &[f64], i: usize) -> f64 {
    let n = basis.len() as f64;
    let p = d.p();
    let s: Vec<f64> = basis.iter().map(|u| d.symmetrized_power(u)).collect();
    let total: f64 = s.iter().sum();
    let mut log = n * (p * n / (p * n + 1.0)).ln() + (1.0 + s[i] / (p * total)).ln() + total.ln() / p - alphas[i].ln();
    for (a, sj) in alphas.iter().zip(&s) {
        log += (1.0 + sj / (p * total)) * a.ln();
    }
    log.exp()
}

/// Lower bound for the measure of the face of `sum alpha_j [-u_j, u_j]`
/// through `alpha_i u_i`, oriented towards the support.
pub fn check_face_bound(d: &Density, basis: &[Point], alphas: &[f64], i: usize) -> Result<CheckReport> {
    const NAME: &str = "face_bound";
    let n = d.dim();
    let mut reasons = basis_reasons(basis, n);
    if alphas.len() != n || alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        reasons.push("alphas must be n positive numbers".into());
    }
    if i >= n {
        reasons.push(format!("face index {i} out of range"));
    }
    if reasons.is_empty() {
        reasons.extend(support_reasons(d, basis, "basis vector"));
    }
    if !reasons.is_empty() {
        return Ok(CheckReport::skipped(NAME, Relation::LhsGeRhs, reasons));
    }
    let sign = if d.eval(&basis[i]) > 0.0 { 1.0 } else { -1.0 };
    let face = Face::parallelepiped_face(basis, alphas, i, sign);
    let lhs = measure::measure_face(d, &face)?.value;
    let rhs = face_bound_rhs(d, basis, alphas, i);
    Ok(CheckReport::at_least(NAME, lhs, rhs, INEQUALITY_SLACK)
        .with_value("face", i as f64)
        .with_value("orientation", sign))
}

/// `inf_{u in P} g~(u) prod_k k/(k + 1/p) prod_i (alpha_i / c_i)^(c_i (1 + 1/(pn)))`.
pub fn zonotope_bound_rhs(d: &Density, frame: &WeightedFrame, alphas: &[f64], inf: f64) -> f64 {
    let n = frame.dim();
    let p = d.p();
    let mut log = inf.ln();
    for k in 1..=n {
        let k = k as f64;
        log += (k / (k + 1.0 / p)).ln();
    }
    for (a, c) in alphas.iter().zip(frame.weights()) {
        log += c * (1.0 + 1.0 / (p * n as f64)) * (a / c).ln();
    }
    log.exp()
}

/// Hypotheses shared by the frame-based checks: isotropy and the support
/// condition on the whole projection family. Returns the infimum of `g~`.
fn frame_hypotheses(d: &Density, frame: &WeightedFrame) -> std::result::Result<(f64, usize), Vec<String>> {
    let mut reasons = Vec::new();
    if frame.dim() != d.dim() {
        reasons.push(format!("frame in R^{}, density in R^{}", frame.dim(), d.dim()));
        return Err(reasons);
    }
    let (matrix, trace) = frame.isotropy_deviation();
    if matrix > FRAME_TOL || trace > FRAME_TOL {
        reasons.push(format!(
            "frame not isotropic (matrix deviation {matrix:.3e}, trace deviation {trace:.3e})"
        ));
        return Err(reasons);
    }
    let family = frames::projection_family(frame, frames::DEGENERACY_TOL);
    reasons.extend(support_reasons(d, &family.members, "projection family member"));
    if !reasons.is_empty() {
        return Err(reasons);
    }
    let (inf, _) = family.infimum(d);
    Ok((inf, family.members.len()))
}

/// Lower bound for `mu(Z)`, `Z = sum alpha_i [-u_i, u_i]`, over an isotropic frame.
pub fn check_zonotope_bound(d: &Density, frame: &WeightedFrame, alphas: &[f64]) -> Result<CheckReport> {
    const NAME: &str = "zonotope_bound";
    if alphas.len() != frame.len() || alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Ok(CheckReport::skipped(
            NAME,
            Relation::LhsGeRhs,
            vec!["alphas must be positive, one per frame vector".into()],
        ));
    }
    let (inf, family_size) = match frame_hypotheses(d, frame) {
        Ok(v) => v,
        Err(reasons) => return Ok(CheckReport::skipped(NAME, Relation::LhsGeRhs, reasons)),
    };
    let gens = frame
        .vectors()
        .iter()
        .zip(alphas)
        .map(|(u, a)| linalg::scale(*a, u))
        .collect();
    let z = ConvexBody::zonotope(gens)?;
    let lhs = measure::measure(d, &z)?;
    let rhs = zonotope_bound_rhs(d, frame, alphas, inf);
    Ok(CheckReport::at_least(NAME, lhs, rhs, INEQUALITY_SLACK)
        .with_value("inf_g_tilde", inf)
        .with_value("family_size", family_size as f64))
}

/// `2^(n+1/p) (1 + 1/(pn))^n (sum_k s_k)^(-1/p) prod_i P(u_i)^(1 + s_i/(p S))`.
pub fn theorem_lw_rhs(d: &Density, projections: &[f64], basis: &[Point]) -> f64 {
    let n = basis.len() as f64;
    let p = d.p();
    let s: Vec<f64> = basis.iter().map(|u| d.symmetrized_power(u)).collect();
    let total: f64 = s.iter().sum();
    let mut log = (n + 1.0 / p) * 2f64.ln() + n * (1.0 + 1.0 / (p * n)).ln() - total.ln() / p;
    for (pr, si) in projections.iter().zip(&s) {
        log += (1.0 + si / (p * total)) * pr.ln();
    }
    log.exp()
}

/// Loomis-Whitney type upper bound for `mu(K)^(n + 1/p - 1)`.
pub fn check_theorem_lw(d: &Density, k: &ConvexBody, basis: &[Point]) -> Result<CheckReport> {
    const NAME: &str = "theorem_lw";
    let n = d.dim();
    let mut reasons = basis_reasons(basis, n);
    if k.dim() != n {
        reasons.push(format!("body in R^{}, density in R^{n}", k.dim()));
    }
    if reasons.is_empty() {
        reasons.extend(support_reasons(d, basis, "basis vector"));
    }
    if !reasons.is_empty() {
        return Ok(CheckReport::skipped(NAME, Relation::LhsLeRhs, reasons));
    }
    let h = HomogeneityExponent::of(d);
    let mu = measure::measure(d, k)?;
    let projections = basis
        .iter()
        .map(|u| Ok(mixed::projection_functional(d, k, u)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let lhs = mu.powf(h.one_over_q - 1.0);
    let rhs = theorem_lw_rhs(d, &projections, basis);
    let mut r = CheckReport::at_most(NAME, lhs, rhs, INEQUALITY_SLACK).with_value("mu", mu);
    for (i, pr) in projections.iter().enumerate() {
        r = r.with_value(&format!("projection_{i}"), *pr);
    }
    Ok(r)
}

/// `2^(n+1/p) inf^-1 prod_k (1 + 1/(kp)) prod_i P(u_i)^(c_i (1 + 1/(pn)))`.
pub fn theorem_ball_rhs(d: &Density, frame: &WeightedFrame, projections: &[f64], inf: f64) -> f64 {
    let n = frame.dim() as f64;
    let p = d.p();
    let mut log = (n + 1.0 / p) * 2f64.ln() - inf.ln();
    for k in 1..=frame.dim() {
        log += (1.0 + 1.0 / (k as f64 * p)).ln();
    }
    for (pr, c) in projections.iter().zip(frame.weights()) {
        log += c * (1.0 + 1.0 / (p * n)) * pr.ln();
    }
    log.exp()
}

/// Ball type upper bound for `mu(K)^(n + 1/p - 1)` over an isotropic frame.
pub fn check_theorem_ball(d: &Density, k: &ConvexBody, frame: &WeightedFrame) -> Result<CheckReport> {
    const NAME: &str = "theorem_ball";
    if k.dim() != d.dim() {
        return Ok(CheckReport::skipped(
            NAME,
            Relation::LhsLeRhs,
            vec![format!("body in R^{}, density in R^{}", k.dim(), d.dim())],
        ));
    }
    let (inf, family_size) = match frame_hypotheses(d, frame) {
        Ok(v) => v,
        Err(reasons) => return Ok(CheckReport::skipped(NAME, Relation::LhsLeRhs, reasons)),
    };
    let h = HomogeneityExponent::of(d);
    let mu = measure::measure(d, k)?;
    let projections = frame
        .vectors()
        .iter()
        .map(|u| Ok(mixed::projection_functional(d, k, u)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let lhs = mu.powf(h.one_over_q - 1.0);
    let rhs = theorem_ball_rhs(d, frame, &projections, inf);
    let mut r = CheckReport::at_most(NAME, lhs, rhs, INEQUALITY_SLACK)
        .with_value("mu", mu)
        .with_value("inf_g_tilde", inf)
        .with_value("family_size", family_size as f64);
    for (i, pr) in projections.iter().enumerate() {
        r = r.with_value(&format!("projection_{i}"), *pr);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn y_density() -> Density {
        Density::directional(vec![0.0, 1.0], 1.0).unwrap()
    }

    fn rotated() -> Vec<Point> {
        vec![vec![S, S], vec![-S, S]]
    }

    fn unit_square() -> ConvexBody {
        ConvexBody::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn borell_examples() {
        let d = y_density();
        let e = unit_square();
        let f = ConvexBody::axis_box(&[0.0, 0.0], &[2.0, 2.0]).unwrap();
        let r = check_borell(&d, &e, &f, 0.5).unwrap();
        assert!(r.pass);
        assert!((r.lhs - 1.6875).abs() < 1e-12);
        assert!((r.rhs - 1.6875).abs() < 1e-12, "{}", r.rhs);
        let r = check_borell(&d, &e, &f, 0.0).unwrap();
        assert!(r.pass && (r.lhs - r.rhs).abs() < 1e-12);
        assert!(!check_borell(&d, &e, &f, 1.5).unwrap().hypothesis_ok);
    }

    #[test]
    fn minkowski_first_examples() {
        let d = y_density();
        let a = unit_square();
        let b = ConvexBody::zonotope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = check_minkowski_first(&d, &a, &b).unwrap();
        assert!(r.pass);
        assert!((r.lhs - 0.5f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((r.rhs - 2.0 / 3.0).abs() < 1e-12);
        let r = check_minkowski_first(&d, &a, &a).unwrap();
        assert!(r.pass && (r.lhs - r.rhs).abs() < 1e-12);
        // A homothetic copy through the origin gives equality by homogeneity.
        let r = check_minkowski_first(&d, &a, &a.scale(0.1).unwrap()).unwrap();
        assert!(r.pass && (r.ratio.unwrap() - 1.0).abs() < 1e-12);
        // A translated small copy does not.
        let b = ConvexBody::axis_box(&[0.3, 0.6], &[0.4, 0.7]).unwrap();
        let r = check_minkowski_first(&d, &a, &b).unwrap();
        assert!(r.pass && r.ratio.unwrap() > 1.01, "{r:?}");
    }

    #[test]
    fn face_bound_example() {
        let d = y_density();
        let r = check_face_bound(&d, &rotated(), &[1.0, 1.0], 0).unwrap();
        assert!(r.pass);
        assert!((r.lhs - 2f64.sqrt()).abs() < 1e-12);
        let expected = (4.0 / 9.0) * 1.5 * 2f64.sqrt();
        assert!((r.rhs - expected).abs() < 1e-12, "{}", r.rhs);
        let r2 = check_face_bound(&d, &rotated(), &[2.0, 2.0], 0).unwrap();
        assert!((r2.ratio.unwrap() / r.ratio.unwrap() - 1.0).abs() < 1e-6);
        let axes = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(!check_face_bound(&d, &axes, &[1.0, 1.0], 0).unwrap().hypothesis_ok);
    }

    #[test]
    fn zonotope_bound_base_case() {
        let d = Density::directional(vec![1.0], 1.0).unwrap();
        let frame = WeightedFrame::orthonormal(vec![vec![1.0]]).unwrap();
        for alpha in [0.5, 1.0, 3.0] {
            let r = check_zonotope_bound(&d, &frame, &[alpha]).unwrap();
            assert!((r.lhs - alpha * alpha / 2.0).abs() < 1e-12);
            assert!((r.rhs - r.lhs).abs() <= 1e-9 * r.lhs);
        }
    }

    #[test]
    fn zonotope_bound_rotated() {
        let d = y_density();
        let frame = WeightedFrame::orthonormal(rotated()).unwrap();
        let r = check_zonotope_bound(&d, &frame, &[1.0, 1.0]).unwrap();
        assert!(r.pass, "{r:?}");
        // Z is the square with vertices (0, +-sqrt 2), (+-sqrt 2, 0): mu = 2 sqrt 2 / 3.
        assert!((r.lhs - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
        // inf g~ = sqrt 2 / 2, constants 1/2 * 2/3.
        assert!((r.rhs - S / 3.0).abs() < 1e-12);
        let axes = WeightedFrame::orthonormal(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(!check_zonotope_bound(&d, &axes, &[1.0, 1.0]).unwrap().hypothesis_ok);
    }

    #[test]
    fn theorem_lw_t3() {
        let d = y_density();
        let r = check_theorem_lw(&d, &unit_square(), &rotated()).unwrap();
        assert!(r.pass);
        assert!((r.lhs - 0.25).abs() < 1e-12);
        assert!((r.rhs - 4.0 / 3.0).abs() < 1e-10, "{}", r.rhs);
        let axes = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(!check_theorem_lw(&d, &unit_square(), &axes).unwrap().hypothesis_ok);
        let big = check_theorem_lw(&d, &unit_square().scale(2.0).unwrap(), &rotated()).unwrap();
        assert!((big.ratio.unwrap() / r.ratio.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn theorem_ball_examples() {
        let d = y_density();
        let frame = WeightedFrame::orthonormal(rotated()).unwrap();
        let r = check_theorem_ball(&d, &unit_square(), &frame).unwrap();
        assert!(r.pass);
        let expected = 8.0 * 2f64.sqrt() * 3.0 * (2f64.sqrt() / 3.0).powi(3);
        assert!((r.rhs - expected).abs() < 1e-10, "{} vs {expected}", r.rhs);
        // Members of the family sit at multiples of 30 degrees from the
        // phase; 105 degrees keeps all of them off the x axis.
        let triple = WeightedFrame::planar_regular(3, 105f64.to_radians()).unwrap();
        let r = check_theorem_ball(&d, &unit_square(), &triple).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.values["family_size"], 6.0);
        let bad = WeightedFrame::new(rotated(), vec![2.0, 2.0]).unwrap();
        assert!(!check_theorem_ball(&d, &unit_square(), &bad).unwrap().hypothesis_ok);
    }
}
