//! Mixed measures `mu_1(A, B)` and the projection functional
//! `P_{mu,K}(theta) = (n/2) int_0^1 mu_1(tK, [-theta, theta]) dt`.
//!
//! Two independent routes are provided for `mu_1`:
//!
//! * finite differences of `mu(A + eps B)` with one level of Richardson
//!   extrapolation, which works for any pair of bodies;
//! * the facet sum `sum_F h_B(nu_F) mu_{n-1}(F)`, the first variation of
//!   `mu(A + eps B)` for a polytope `A` and a continuous density. For
//!   `B = [-u, u]` this is `sum_F |<nu_F, u>| mu_{n-1}(F)`.

use serde::{Deserialize, Serialize};

use crate::bodies::ConvexBody;
use crate::densities::Density;
use crate::error::{Error, Result};
use crate::linalg::{self, Point};
use crate::measure::{self, gauss_legendre, HomogeneityExponent};
use crate::report::CheckReport;

/// `eps = 2^-3, ..., 2^-10`.
pub fn default_schedule() -> Vec<f64> {
    (3..=10).map(|k| 0.5f64.powi(k)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    FiniteDifference,
    FacetSum,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdRow {
    pub eps: f64,
    pub quotient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedMeasureResult {
    pub value: f64,
    pub route: Route,
    pub error_estimate: f64,
    /// Difference quotients, largest `eps` first (finite-difference route).
    pub table: Vec<FdRow>,
    /// Whether the quotients decrease along the schedule, i.e. are
    /// nondecreasing in `eps`. Logged for auditing, never enforced.
    pub monotone: bool,
}

/// `mu_1(A, B)` by finite differences over a decreasing `eps` schedule.
pub fn mixed_measure_fd(d: &Density, a: &ConvexBody, b: &ConvexBody, schedule: &[f64]) -> Result<MixedMeasureResult> {
    finite_difference(d, a, schedule, |eps| a.minkowski_sum(b, eps))
}

/// `mu_1(A, [-u, u])` by finite differences; the segment need not be a body.
pub fn mixed_measure_fd_segment(
    d: &Density,
    a: &ConvexBody,
    u: &[f64],
    schedule: &[f64],
) -> Result<MixedMeasureResult> {
    finite_difference(d, a, schedule, |eps| a.add_segment(u, eps))
}

fn finite_difference<G>(d: &Density, a: &ConvexBody, schedule: &[f64], grow: G) -> Result<MixedMeasureResult>
where
    G: Fn(f64) -> Result<ConvexBody>,
{
    if schedule.len() < 2 {
        return Err(Error::Invalid("need at least two eps values".into()));
    }
    if schedule
        .windows(2)
        .any(|w| w[1].is_nan() || w[1] >= w[0] || w[1] <= 0.0)
    {
        return Err(Error::Invalid("eps schedule must be positive and decreasing".into()));
    }
    let base = measure::measure(d, a)?;
    let mut table = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let quotient = (measure::measure(d, &grow(eps)?)? - base) / eps;
        table.push(FdRow { eps, quotient });
    }
    // One Richardson level, first-order error model.
    let extrapolated: Vec<f64> = table
        .windows(2)
        .map(|w| {
            let r = w[0].eps / w[1].eps;
            (r * w[1].quotient - w[0].quotient) / (r - 1.0)
        })
        .collect();
    let value = *extrapolated.last().unwrap();
    let error_estimate = if extrapolated.len() >= 2 {
        (value - extrapolated[extrapolated.len() - 2]).abs()
    } else {
        (value - table.last().unwrap().quotient).abs()
    };
    let monotone = table
        .windows(2)
        .all(|w| w[1].quotient <= w[0].quotient + 1e-12 * w[0].quotient.abs());
    Ok(MixedMeasureResult {
        value,
        route: Route::FiniteDifference,
        error_estimate,
        table,
        monotone,
    })
}

/// `sum_F h_B(nu_F) mu_{n-1}(F)` over the facets of the polytope `a`.
pub fn mixed_measure_facet(d: &Density, a: &ConvexBody, b: &ConvexBody) -> Result<MixedMeasureResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    facet_sum(d, a, |normal| b.support_function(normal))
}

/// `mu_1(K, [-u, u])` by the facet sum.
pub fn mixed_measure_segment(d: &Density, k: &ConvexBody, u: &[f64]) -> Result<MixedMeasureResult> {
    if u.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: u.len(),
        });
    }
    facet_sum(d, k, |normal| linalg::dot(normal, u).abs())
}

fn facet_sum<F: Fn(&[f64]) -> f64>(d: &Density, k: &ConvexBody, weight: F) -> Result<MixedMeasureResult> {
    if k.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            got: k.dim(),
        });
    }
    let mut value = 0.0;
    let mut error_estimate = 0.0;
    for face in k.faces() {
        let w = weight(&face.normal);
        if w == 0.0 {
            continue;
        }
        let m = measure::measure_face(d, &face)?;
        value += w * m.value;
        error_estimate += w.abs() * m.error_estimate;
    }
    Ok(MixedMeasureResult {
        value,
        route: Route::FacetSum,
        error_estimate,
        table: Vec::new(),
        monotone: true,
    })
}

/// Facet-sum vs finite-difference agreement for `mu_1(K, [-u, u])`.
pub fn check_segment_routes(d: &Density, k: &ConvexBody, u: &[f64]) -> Result<CheckReport> {
    let facet = mixed_measure_segment(d, k, u)?;
    let fd = mixed_measure_fd_segment(d, k, u, &default_schedule())?;
    let tol = (1e-4f64).max(fd.error_estimate / facet.value.abs().max(f64::MIN_POSITIVE));
    Ok(
        CheckReport::equal("mixed_segment_routes", facet.value, fd.value, tol, 1e-12)
            .with_value("fd_error_estimate", fd.error_estimate)
            .with_value("fd_monotone", f64::from(u8::from(fd.monotone))),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionValue {
    /// Closed form `(q n / 2) mu_1(K, [-theta, theta])`.
    pub value: f64,
    /// `(n/2) int_0^1 mu_1(tK, [-theta, theta]) dt` by quadrature in `t`.
    pub definition_route: f64,
    /// Relative gap between the two routes.
    pub discrepancy: f64,
    /// Largest relative gap between `mu_1(tK, .)` computed directly and
    /// `t^(1/q - 1) mu_1(K, .)` over the sampled `t`.
    pub scaling_residual: f64,
    pub mixed: f64,
}

/// Sample points for validating the scaling of `mu_1(tK, .)` in `t`.
const SCALING_SAMPLES: [f64; 3] = [0.25, 0.5, 0.75];

/// `P_{mu,K}(theta)` computed by the closed form and by its definition.
pub fn projection_functional(d: &Density, k: &ConvexBody, theta: &[f64]) -> Result<ProjectionValue> {
    let theta = linalg::normalize(theta).ok_or_else(|| Error::Invalid("zero direction".into()))?;
    let n = k.dim() as f64;
    let h = HomogeneityExponent::of(d);
    let mixed = mixed_measure_segment(d, k, &theta)?.value;
    let value = 0.5 * h.q * n * mixed;

    let power = h.one_over_q - 1.0;
    let mut scaling_residual: f64 = 0.0;
    for t in SCALING_SAMPLES {
        let direct = mixed_measure_segment(d, &k.scale(t)?, &theta)?.value;
        let scaled = t.powf(power) * mixed;
        let scale = direct.abs().max(scaled.abs());
        if scale > 0.0 {
            scaling_residual = scaling_residual.max((direct - scaled).abs() / scale);
        }
    }

    // 16-point Gauss-Legendre on dyadic panels [2^-(j+1), 2^-j].
    let rule = gauss_legendre(16);
    let mut integral = 0.0;
    let mut hi: f64 = 1.0;
    for _ in 0..64 {
        let lo = 0.5 * hi;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        integral += half
            * rule
                .0
                .iter()
                .zip(&rule.1)
                .map(|(x, w)| w * (mid + half * x).powf(power))
                .sum::<f64>();
        hi = lo;
    }
    let definition_route = 0.5 * n * integral * mixed;
    let scale = value.abs().max(definition_route.abs());
    let discrepancy = if scale > 0.0 {
        (value - definition_route).abs() / scale
    } else {
        0.0
    };
    Ok(ProjectionValue {
        value,
        definition_route,
        discrepancy,
        scaling_residual,
        mixed,
    })
}

/// Compare `mu_1(K, Z)` (finite differences) with
/// `(2 / (n q)) sum_i alpha_i P_{mu,K}(u_i)` where `Z = sum_i alpha_i [-u_i, u_i]`.
pub fn mixed_zonotope_expansion(d: &Density, k: &ConvexBody, z: &ConvexBody) -> Result<CheckReport> {
    let gens: Vec<Point> = z
        .generators()
        .ok_or_else(|| Error::Invalid("second body must be a zonotope".into()))?;
    let n = k.dim() as f64;
    let h = HomogeneityExponent::of(d);
    let fd = mixed_measure_fd(d, k, z, &default_schedule())?;
    let mut sum = 0.0;
    for g in &gens {
        let alpha = linalg::norm(g);
        if alpha == 0.0 {
            continue;
        }
        sum += alpha * projection_functional(d, k, g)?.value;
    }
    let rhs = 2.0 / (n * h.q) * sum;
    let tol = (1e-3f64).max(fd.error_estimate / rhs.abs().max(f64::MIN_POSITIVE));
    Ok(
        CheckReport::equal("mixed_zonotope_expansion", fd.value, rhs, tol, 1e-12)
            .with_value("fd_error_estimate", fd.error_estimate),
    )
}
