//! Seeded random instances of the inequalities, with deterministic aggregation.

use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::ConvexBody;
use crate::densities::{Density, DensitySpec};
use crate::error::{Error, Result};
use crate::frames::{self, WeightedFrame};
use crate::linalg::{self, Point};
use crate::report::CheckReport;

use super::scenario::{CheckKind, Scenario};

/// A ratio below `1 - VIOLATION_SLACK` on a hypothesis-valid instance is a defect.
pub const VIOLATION_SLACK: f64 = 1e-3;
/// Generated instances need `g~^p >= MIN_SUPPORT` on every required direction.
pub const MIN_SUPPORT: f64 = 1e-6;
const MAX_ATTEMPTS: usize = 200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameFamily {
    /// Gaussian vectors pushed into isotropic position.
    Random,
    /// Three planar unit vectors 120 degrees apart, random phase (n = 2 only).
    Triple,
    /// Either of the above with equal probability.
    #[default]
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzConfig {
    pub checks: Vec<CheckKind>,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_p_values")]
    pub p_values: Vec<f64>,
    /// Frames have between `n` and `n + max_extra_vectors` vectors.
    #[serde(default = "default_extra")]
    pub max_extra_vectors: usize,
    #[serde(default)]
    pub frames: FrameFamily,
    /// Share of densities drawn as a minimum of two linear forms.
    #[serde(default = "default_min_linear_fraction")]
    pub min_linear_fraction: f64,
}

fn default_count() -> usize {
    100
}
fn default_dims() -> Vec<usize> {
    vec![2, 3]
}
fn default_p_values() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn default_extra() -> usize {
    2
}
fn default_min_linear_fraction() -> f64 {
    0.25
}

impl FuzzConfig {
    pub fn new(checks: Vec<CheckKind>, count: usize, seed: u64) -> Self {
        Self {
            checks,
            count,
            seed,
            dims: default_dims(),
            p_values: default_p_values(),
            max_extra_vectors: default_extra(),
            frames: FrameFamily::default(),
            min_linear_fraction: default_min_linear_fraction(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Invalid("count must be positive".into()));
        }
        if self.checks.is_empty() {
            return Err(Error::Invalid("no checks requested".into()));
        }
        if let Some(k) = self.checks.iter().find(|k| !k.is_theorem()) {
            return Err(Error::Invalid(format!("no instance generator for check {}", k.name())));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&n| !(1..=3).contains(&n)) {
            return Err(Error::Invalid("dims must be a nonempty subset of {1, 2, 3}".into()));
        }
        if self.p_values.is_empty() || self.p_values.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(Error::Invalid("p_values must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.min_linear_fraction) {
            return Err(Error::Invalid("min_linear_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of instance `index` of `kind`; independent of scheduling.
pub fn instance_seed(master: u64, kind: CheckKind, index: usize) -> u64 {
    let k = CheckKind::ALL.iter().position(|c| *c == kind).unwrap_or(0) as u64;
    splitmix64(splitmix64(master ^ splitmix64(k + 1)).wrapping_add(index as u64))
}

fn gaussian<R: Rng>(n: usize, rng: &mut R) -> Point {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn unit_vector<R: Rng>(n: usize, rng: &mut R) -> Point {
    loop {
        if let Some(u) = linalg::normalize(&gaussian(n, rng)) {
            return u;
        }
    }
}

fn random_density<R: Rng>(n: usize, p: f64, cfg: &FuzzConfig, rng: &mut R) -> Result<(Density, Point)> {
    let axis = unit_vector(n, rng);
    if n >= 2 && rng.random_bool(cfg.min_linear_fraction) {
        // Two forms tilted away from the axis: the support is a proper cone around it.
        let thetas = (0..2)
            .map(|_| {
                let tilt = linalg::scale(0.6, &gaussian(n, rng));
                linalg::normalize(&linalg::add(&axis, &tilt)).unwrap_or_else(|| axis.clone())
            })
            .collect();
        let d = Density::min_linear(thetas, p)?;
        // The tilted cone may not contain the axis; aim bodies at its mean direction.
        let DensitySpec::MinLinearPower { thetas, .. } = d.spec() else {
            unreachable!()
        };
        let mean = linalg::normalize(&linalg::add(&thetas[0], &thetas[1])).unwrap_or(axis);
        Ok((d, mean))
    } else {
        Ok((Density::directional(axis.clone(), p)?, axis))
    }
}

pub fn random_orthonormal<R: Rng>(n: usize, rng: &mut R) -> Vec<Point> {
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        if m.determinant().abs() < 1e-6 {
            continue;
        }
        let q = m.qr().q();
        return (0..n).map(|j| q.column(j).iter().cloned().collect()).collect();
    }
}

/// A rotated, translated box or the hull of points on a sphere, placed so
/// that it usually meets the support around `axis`.
fn random_body<R: Rng>(n: usize, axis: &[f64], rng: &mut R) -> Result<ConvexBody> {
    let shift = rng.random_range(0.2..1.2);
    let jitter = linalg::scale(0.3, &gaussian(n, rng));
    let center = linalg::add(&linalg::scale(shift, axis), &jitter);
    if n == 1 || rng.random_bool(0.5) {
        let basis = random_orthonormal(n, rng);
        let alphas: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
        let vertices = (0..1usize << n)
            .map(|mask| {
                let mut v = center.clone();
                for (j, (u, a)) in basis.iter().zip(&alphas).enumerate() {
                    let s = if (mask >> j) & 1 == 1 { *a } else { -*a };
                    v = linalg::axpy(&v, s, u);
                }
                v
            })
            .collect();
        ConvexBody::from_vertices(vertices)
    } else {
        let radius = rng.random_range(0.4..1.2);
        for _ in 0..MAX_ATTEMPTS {
            let count = n + 1 + rng.random_range(0..4usize);
            let vertices = (0..count)
                .map(|_| linalg::axpy(&center, radius, &unit_vector(n, rng)))
                .collect();
            if let Ok(body) = ConvexBody::from_vertices(vertices) {
                if body.volume()? > 1e-3 * radius.powi(n as i32) {
                    return Ok(body);
                }
            }
        }
        Err(Error::Degenerate("could not draw a full-dimensional polytope".into()))
    }
}

fn random_frame<R: Rng>(n: usize, cfg: &FuzzConfig, rng: &mut R) -> Result<WeightedFrame> {
    let triple = n == 2
        && match cfg.frames {
            FrameFamily::Triple => true,
            FrameFamily::Random => false,
            FrameFamily::Mixed => rng.random_bool(0.5),
        };
    if triple {
        WeightedFrame::planar_regular(3, rng.random_range(0.0..std::f64::consts::TAU))
    } else {
        let m = n + rng.random_range(0..=cfg.max_extra_vectors);
        WeightedFrame::random_isotropic(n, m, rng)
    }
}

fn supported(d: &Density, vectors: &[Point]) -> bool {
    vectors.iter().all(|u| d.symmetrized_power(u) >= MIN_SUPPORT)
}

fn random_alphas<R: Rng>(m: usize, rng: &mut R) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(0.3..2.0)).collect()
}

/// Draws one hypothesis-valid instance of `kind`, or `None` if none was found.
pub fn generate_instance(kind: CheckKind, cfg: &FuzzConfig, seed: u64) -> Result<Option<Scenario>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = *cfg.dims.choose(&mut rng).expect("validated");
    let p = *cfg.p_values.choose(&mut rng).expect("validated");
    for _ in 0..MAX_ATTEMPTS {
        let (d, axis) = random_density(n, p, cfg, &mut rng)?;
        let name = format!("{}#{seed:016x}", kind.name());
        let mut s = Scenario::new(&name, d.clone(), random_body(n, &axis, &mut rng)?, vec![kind]);
        s.seed = Some(seed);
        match kind {
            CheckKind::Borell => {
                s.second_body = Some(random_body(n, &axis, &mut rng)?);
                s.lambda = Some(rng.random_range(0.0..1.0));
            }
            CheckKind::MinkowskiFirst => {
                s.second_body = Some(random_body(n, &axis, &mut rng)?);
            }
            CheckKind::FaceBound | CheckKind::TheoremLw => {
                let basis = random_orthonormal(n, &mut rng);
                if !supported(&d, &basis) {
                    continue;
                }
                if kind == CheckKind::FaceBound {
                    s.alphas = Some(random_alphas(n, &mut rng));
                }
                s.basis = Some(basis);
            }
            CheckKind::ZonotopeBound | CheckKind::TheoremBall => {
                let frame = random_frame(n, cfg, &mut rng)?;
                let family = frames::projection_family(&frame, frames::DEGENERACY_TOL);
                if !supported(&d, &family.members) {
                    continue;
                }
                if kind == CheckKind::ZonotopeBound {
                    s.alphas = Some(random_alphas(frame.len(), &mut rng));
                }
                s.frame = Some(frame);
            }
            _ => {
                return Err(Error::Invalid(format!(
                    "no instance generator for check {}",
                    kind.name()
                )))
            }
        }
        return Ok(Some(s));
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzInstance {
    pub check: CheckKind,
    pub index: usize,
    pub seed: u64,
    /// The generated scenario; rerunning it reproduces `reports`.
    pub scenario: Option<Scenario>,
    pub reports: Vec<CheckReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub check: CheckKind,
    pub instances: usize,
    pub evaluated: usize,
    pub skipped: usize,
    pub failures: usize,
    /// Hypothesis-valid reports with ratio below `1 - VIOLATION_SLACK`.
    pub violations: usize,
    pub min_ratio: Option<f64>,
    pub min_ratio_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub count: usize,
    pub summaries: Vec<FuzzSummary>,
    pub instances: Vec<FuzzInstance>,
}

impl FuzzReport {
    pub fn clean(&self) -> bool {
        self.summaries.iter().all(|s| s.failures == 0 && s.violations == 0)
    }
}

fn run_instance(kind: CheckKind, index: usize, cfg: &FuzzConfig) -> FuzzInstance {
    let seed = instance_seed(cfg.seed, kind, index);
    let (scenario, reports) = match generate_instance(kind, cfg, seed) {
        Ok(Some(s)) => {
            let reports = s.run();
            (Some(s), reports)
        }
        Ok(None) => (
            None,
            vec![CheckReport::skipped(
                kind.name(),
                kind.relation(),
                vec!["no hypothesis-valid instance found".into()],
            )
            .with_seed(seed)],
        ),
        Err(e) => (
            None,
            vec![CheckReport::errored(kind.name(), kind.relation(), e).with_seed(seed)],
        ),
    };
    FuzzInstance {
        check: kind,
        index,
        seed,
        scenario,
        reports,
    }
}

fn summarize(kind: CheckKind, instances: &[FuzzInstance]) -> FuzzSummary {
    let mut s = FuzzSummary {
        check: kind,
        instances: 0,
        evaluated: 0,
        skipped: 0,
        failures: 0,
        violations: 0,
        min_ratio: None,
        min_ratio_seed: None,
    };
    for inst in instances.iter().filter(|i| i.check == kind) {
        s.instances += 1;
        for r in &inst.reports {
            if !r.hypothesis_ok {
                s.skipped += 1;
                continue;
            }
            s.evaluated += 1;
            if !r.pass {
                s.failures += 1;
            }
            if let Some(ratio) = r.ratio {
                if ratio < 1.0 - VIOLATION_SLACK {
                    s.violations += 1;
                }
                if s.min_ratio.is_none_or(|m| ratio < m) {
                    s.min_ratio = Some(ratio);
                    s.min_ratio_seed = Some(inst.seed);
                }
            }
        }
    }
    s
}

/// Runs `cfg.count` instances per check. Instances are evaluated in
/// parallel and collected in (check, index) order.
pub fn fuzz(cfg: &FuzzConfig) -> Result<FuzzReport> {
    cfg.validate()?;
    let jobs: Vec<(CheckKind, usize)> = cfg
        .checks
        .iter()
        .flat_map(|&k| (0..cfg.count).map(move |i| (k, i)))
        .collect();
    let instances: Vec<FuzzInstance> = jobs.par_iter().map(|&(k, i)| run_instance(k, i, cfg)).collect();
    let summaries = cfg.checks.iter().map(|&k| summarize(k, &instances)).collect();
    Ok(FuzzReport {
        seed: cfg.seed,
        count: cfg.count,
        summaries,
        instances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        let a = instance_seed(42, CheckKind::Borell, 0);
        assert_eq!(a, instance_seed(42, CheckKind::Borell, 0));
        assert_ne!(a, instance_seed(42, CheckKind::Borell, 1));
        assert_ne!(a, instance_seed(42, CheckKind::MinkowskiFirst, 0));
        assert_ne!(a, instance_seed(43, CheckKind::Borell, 0));
    }

    #[test]
    fn small_run_is_clean_and_repeatable() {
        let cfg = FuzzConfig::new(
            vec![CheckKind::MinkowskiFirst, CheckKind::TheoremLw, CheckKind::TheoremBall],
            4,
            42,
        );
        let a = fuzz(&cfg).unwrap();
        assert!(a.clean(), "{:#?}", a.summaries);
        let b = fuzz(&cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(fuzz(&FuzzConfig::new(vec![CheckKind::Borell], 0, 1)).is_err());
        assert!(fuzz(&FuzzConfig::new(vec![CheckKind::SelfMixed], 3, 1)).is_err());
    }
}
