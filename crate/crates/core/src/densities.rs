//! The admissible densities: nonnegative, `1/p`-homogeneous functions whose
//! `p`-th power is concave on an open convex cone and zero elsewhere.
//!
//! Two families are provided, both exactly evaluable:
//!
//! * `DirectionalPower`: `g(x) = <x, theta>_+^(1/p)`
//! * `MinLinearPower`: `g(x) = (min_i <x, theta_i>)_+^(1/p)`
//!
//! On the support the `p`-th power is a minimum of linear forms, hence
//! concave and 1-homogeneous.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, Point};
use crate::report::CheckReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    DirectionalPower { theta: Point, p: f64 },
    MinLinearPower { thetas: Vec<Point>, p: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensitySpec", into = "DensitySpec")]
pub struct Density {
    spec: DensitySpec,
}

impl TryFrom<DensitySpec> for Density {
    type Error = Error;

    fn try_from(spec: DensitySpec) -> Result<Self> {
        Self::new(spec)
    }
}

impl From<Density> for DensitySpec {
    fn from(d: Density) -> Self {
        d.spec
    }
}

/// A cell of the support on which `g = <form, x>^(1/p)`: the set where
/// `<form, x> >= 0` and `<c, x> <= 0` for every `c` in `cuts`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPiece {
    pub form: Point,
    pub cuts: Vec<Point>,
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("p must be finite and positive, got {p}")))
    }
}

fn check_vector(v: &[f64]) -> Result<()> {
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("vectors must be nonempty and finite".into()));
    }
    if linalg::norm(v) == 0.0 {
        return Err(Error::Invalid("zero direction".into()));
    }
    Ok(())
}

impl Density {
    /// Validates the spec. A directional `theta` is rescaled to unit length.
    pub fn new(spec: DensitySpec) -> Result<Self> {
        let spec = match spec {
            DensitySpec::DirectionalPower { theta, p } => {
                check_p(p)?;
                check_vector(&theta)?;
                let theta = linalg::normalize(&theta).expect("checked nonzero");
                DensitySpec::DirectionalPower { theta, p }
            }
            DensitySpec::MinLinearPower { thetas, p } => {
                check_p(p)?;
                let n = thetas
                    .first()
                    .ok_or_else(|| Error::Invalid("min_linear_power needs a form".into()))?
                    .len();
                for t in &thetas {
                    check_vector(t)?;
                    if t.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: t.len(),
                        });
                    }
                }
                DensitySpec::MinLinearPower { thetas, p }
            }
        };
        Ok(Self { spec })
    }

    pub fn directional(theta: Point, p: f64) -> Result<Self> {
        Self::new(DensitySpec::DirectionalPower { theta, p })
    }

    pub fn min_linear(thetas: Vec<Point>, p: f64) -> Result<Self> {
        Self::new(DensitySpec::MinLinearPower { thetas, p })
    }

    pub fn spec(&self) -> &DensitySpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        match &self.spec {
            DensitySpec::DirectionalPower { theta, .. } => theta.len(),
            DensitySpec::MinLinearPower { thetas, .. } => thetas[0].len(),
        }
    }

    pub fn p(&self) -> f64 {
        match &self.spec {
            DensitySpec::DirectionalPower { p, .. } | DensitySpec::MinLinearPower { p, .. } => *p,
        }
    }

    /// Homogeneity degree `1/p` of the density.
    pub fn exponent(&self) -> f64 {
        1.0 / self.p()
    }

    /// `g^p(x)`: the concave, 1-homogeneous base function (0 off the support).
    pub fn base(&self, x: &[f64]) -> f64 {
        let raw = match &self.spec {
            DensitySpec::DirectionalPower { theta, .. } => dot(x, theta),
            DensitySpec::MinLinearPower { thetas, .. } => {
                thetas.iter().map(|t| dot(x, t)).fold(f64::INFINITY, f64::min)
            }
        };
        if raw > 0.0 {
            raw
        } else {
            0.0
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let b = self.base(x);
        if b > 0.0 {
            b.powf(self.exponent())
        } else {
            0.0
        }
    }

    /// `g(x) + g(-x)`.
    pub fn eval_symmetrized(&self, x: &[f64]) -> f64 {
        self.eval(x) + self.eval(&linalg::neg(x))
    }

    /// `g~(x)^p`, i.e. `g^p(x) + g^p(-x)` (at most one term is nonzero).
    pub fn symmetrized_power(&self, x: &[f64]) -> f64 {
        self.base(x) + self.base(&linalg::neg(x))
    }

    /// Whether `[-u, u]` meets the open support `{g > 0}`. The support is a
    /// cone, so this is `g~(u) > 0`.
    pub fn segment_meets_support(&self, u: &[f64]) -> bool {
        self.eval_symmetrized(u) > 0.0
    }

    /// Cells covering the support on which `g` is a single linear form to
    /// the power `1/p`. Cells overlap only in measure zero.
    pub fn linear_pieces(&self) -> Vec<LinearPiece> {
        match &self.spec {
            DensitySpec::DirectionalPower { theta, .. } => vec![LinearPiece {
                form: theta.clone(),
                cuts: Vec::new(),
            }],
            DensitySpec::MinLinearPower { thetas, .. } => {
                let mut distinct: Vec<&Point> = Vec::new();
                for t in thetas {
                    if !distinct.iter().any(|s| linalg::dist(s, t) <= 1e-14 * linalg::norm(t)) {
                        distinct.push(t);
                    }
                }
                distinct
                    .iter()
                    .enumerate()
                    .map(|(i, t)| LinearPiece {
                        form: (*t).clone(),
                        cuts: distinct
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| *j != i)
                            .map(|(_, s)| linalg::sub(t, s))
                            .collect(),
                    })
                    .collect()
            }
        }
    }

    /// Draw a point of the open support (rejection from a Gaussian, with a
    /// sign flip that makes directional densities accept every draw).
    fn sample_support(&self, rng: &mut ChaCha8Rng) -> Option<Point> {
        for _ in 0..10_000 {
            let x: Point = (0..self.dim()).map(|_| rng.sample(StandardNormal)).collect();
            if self.base(&x) > 0.0 {
                return Some(x);
            }
            let y = linalg::neg(&x);
            if self.base(&y) > 0.0 {
                return Some(y);
            }
        }
        None
    }

    /// Random check of `g(a x) = a^(1/p) g(x)`: passes when every sample
    /// satisfies `|g(ax) - a^(1/p) g(x)| <= tol * max(1, a^(1/p) g(x))`.
    pub fn check_homogeneity(&self, sample_count: usize, scales: &[f64], tol: f64, seed: u64) -> CheckReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = self.exponent();
        let mut worst: f64 = 0.0;
        for k in 0..sample_count.max(1) {
            let x: Point = (0..self.dim())
                .map(|_| rng.sample::<f64, _>(StandardNormal) * 2.0)
                .collect();
            let a = if scales.is_empty() {
                rng.random_range(0.1..10.0)
            } else {
                scales[k % scales.len()]
            };
            let expect = a.powf(r) * self.eval(&x);
            let got = self.eval(&linalg::scale(a, &x));
            worst = worst.max((got - expect).abs() / expect.max(1.0));
        }
        CheckReport::at_most("density_homogeneity", worst, tol, 0.0)
            .with_value("max_violation", worst)
            .with_seed(seed)
    }

    /// Random check of `g(l x + (1-l) y) >= (l g^p(x) + (1-l) g^p(y))^(1/p) - tol`
    /// for support pairs; reports the worst margin.
    pub fn check_p_concavity(&self, sample_count: usize, tol: f64, seed: u64) -> CheckReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = self.p();
        let mut worst = f64::INFINITY;
        let mut evaluated = 0usize;
        for _ in 0..sample_count.max(1) {
            let (Some(x), Some(y)) = (self.sample_support(&mut rng), self.sample_support(&mut rng)) else {
                break;
            };
            let lambda: f64 = rng.random_range(0.0..1.0);
            let z = linalg::add(&linalg::scale(lambda, &x), &linalg::scale(1.0 - lambda, &y));
            let lhs = self.eval(&z);
            let rhs = (lambda * self.eval(&x).powf(p) + (1.0 - lambda) * self.eval(&y).powf(p)).powf(1.0 / p);
            worst = worst.min(lhs - rhs);
            evaluated += 1;
        }
        if evaluated == 0 {
            return CheckReport::skipped(
                "density_p_concavity",
                crate::report::Relation::LhsGeRhs,
                vec!["could not sample the support".into()],
            );
        }
        CheckReport::at_least("density_p_concavity", worst, -tol, 0.0)
            .with_value("worst_margin", worst)
            .with_value("samples", evaluated as f64)
            .with_seed(seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn e2(p: f64) -> Density {
        Density::directional(vec![0.0, 1.0], p).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert!((e2(1.0).eval(&[0.3, 0.7]) - 0.7).abs() < 1e-15);
        assert_eq!(e2(1.0).eval(&[0.3, -0.7]), 0.0);
        assert!((e2(2.0).eval(&[0.0, 4.0]) - 2.0).abs() < 1e-15);
        assert_eq!(e2(3.0).eval(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn symmetrized_examples() {
        assert!((e2(1.0).eval_symmetrized(&[0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert_eq!(e2(1.0).eval_symmetrized(&[1.0, 0.0]), 0.0);
        assert!((e2(1.0).eval_symmetrized(&[S, S]) - S).abs() < 1e-15);
    }

    #[test]
    fn support_segment_examples() {
        assert!(e2(1.0).segment_meets_support(&[0.0, 1.0]));
        assert!(!e2(1.0).segment_meets_support(&[1.0, 0.0]));
        assert!(e2(1.0).segment_meets_support(&[S, S]));
    }

    #[test]
    fn homogeneity_examples() {
        let d = e2(1.0);
        assert!((d.eval(&[2.0, 2.0]) - 2.0 * d.eval(&[1.0, 1.0])).abs() < 1e-15);
        let d = e2(2.0);
        assert!((d.eval(&[0.0, 4.0]) - 2.0 * d.eval(&[0.0, 1.0])).abs() < 1e-15);
        assert!(d.check_homogeneity(500, &[0.5, 2.0, 3.0], 1e-10, 7).pass);
    }

    #[test]
    fn concavity_examples() {
        let d = e2(1.0);
        let lhs = d.eval(&[0.5, 1.0]);
        let rhs = 0.5 * d.eval(&[0.0, 1.0]) + 0.5 * d.eval(&[1.0, 1.0]);
        assert!((lhs - rhs).abs() < 1e-15);
        let m = Density::min_linear(vec![vec![1.0, 0.0], vec![0.0, 1.0]], 1.0).unwrap();
        assert!((m.eval(&[1.5, 1.5]) - 1.5).abs() < 1e-15);
        assert!(m.eval(&[1.5, 1.5]) >= 0.5 * m.eval(&[2.0, 1.0]) + 0.5 * m.eval(&[1.0, 2.0]));
        assert!(m.check_p_concavity(2000, 1e-10, 3).pass);
        assert!(e2(0.5).check_p_concavity(2000, 1e-10, 4).pass);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Density::directional(vec![0.0, 1.0], -1.0).is_err());
        assert!(Density::directional(vec![0.0, 0.0], 1.0).is_err());
        assert!(Density::min_linear(vec![vec![1.0, 0.0], vec![1.0]], 1.0).is_err());
    }

    #[test]
    fn json_schema() {
        let d: Density = serde_json::from_str(r#"{"type":"directional_power","theta":[0,2],"p":1.0}"#).unwrap();
        assert_eq!(d, e2(1.0));
        let m: Density = serde_json::from_str(r#"{"type":"min_linear_power","thetas":[[1,0],[0,1]],"p":2}"#).unwrap();
        assert_eq!(m.dim(), 2);
        assert!(serde_json::from_str::<Density>(r#"{"type":"gaussian","p":1}"#).is_err());
    }

    #[test]
    fn pieces_drop_duplicates() {
        let m = Density::min_linear(vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], 1.0).unwrap();
        assert_eq!(m.linear_pieces().len(), 2);
    }
}
