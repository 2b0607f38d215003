//! Scenario descriptions (JSON) and their evaluation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::ConvexBody;
use crate::densities::{Density, DensitySpec};
use crate::error::{Error, Result};
use crate::frames::{self, WeightedFrame};
use crate::linalg::{self, Point};
use crate::mixed;
use crate::report::{CheckReport, Relation};

use super::{checks, identities, limit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Borell,
    MinkowskiFirst,
    FaceBound,
    ZonotopeBound,
    TheoremLw,
    TheoremBall,
    SelfMixed,
    ZonotopeExpansion,
    Linearity,
    ProjectionRoutes,
    SegmentRoutes,
    ConeDecomposition,
    ProjectionBound,
    DirectionalMonotonicity,
    RatioInvariance,
    FrameIsotropic,
    GammaTrace,
    DensityHomogeneity,
    DensityPConcavity,
    LebesgueLimit,
}

impl CheckKind {
    pub const ALL: [CheckKind; 20] = [
        CheckKind::Borell,
        CheckKind::MinkowskiFirst,
        CheckKind::FaceBound,
        CheckKind::ZonotopeBound,
        CheckKind::TheoremLw,
        CheckKind::TheoremBall,
        CheckKind::SelfMixed,
        CheckKind::ZonotopeExpansion,
        CheckKind::Linearity,
        CheckKind::ProjectionRoutes,
        CheckKind::SegmentRoutes,
        CheckKind::ConeDecomposition,
        CheckKind::ProjectionBound,
        CheckKind::DirectionalMonotonicity,
        CheckKind::RatioInvariance,
        CheckKind::FrameIsotropic,
        CheckKind::GammaTrace,
        CheckKind::DensityHomogeneity,
        CheckKind::DensityPConcavity,
        CheckKind::LebesgueLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Borell => "borell",
            CheckKind::MinkowskiFirst => "minkowski_first",
            CheckKind::FaceBound => "face_bound",
            CheckKind::ZonotopeBound => "zonotope_bound",
            CheckKind::TheoremLw => "theorem_lw",
            CheckKind::TheoremBall => "theorem_ball",
            CheckKind::SelfMixed => "self_mixed",
            CheckKind::ZonotopeExpansion => "zonotope_expansion",
            CheckKind::Linearity => "linearity",
            CheckKind::ProjectionRoutes => "projection_routes",
            CheckKind::SegmentRoutes => "segment_routes",
            CheckKind::ConeDecomposition => "cone_decomposition",
            CheckKind::ProjectionBound => "projection_bound",
            CheckKind::DirectionalMonotonicity => "directional_monotonicity",
            CheckKind::RatioInvariance => "ratio_invariance",
            CheckKind::FrameIsotropic => "frame_isotropic",
            CheckKind::GammaTrace => "gamma_trace",
            CheckKind::DensityHomogeneity => "density_homogeneity",
            CheckKind::DensityPConcavity => "density_p_concavity",
            CheckKind::LebesgueLimit => "lebesgue_limit",
        }
    }

    pub fn relation(self) -> Relation {
        match self {
            CheckKind::Borell
            | CheckKind::FaceBound
            | CheckKind::ZonotopeBound
            | CheckKind::ProjectionBound
            | CheckKind::DirectionalMonotonicity
            | CheckKind::DensityPConcavity => Relation::LhsGeRhs,
            CheckKind::MinkowskiFirst
            | CheckKind::TheoremLw
            | CheckKind::TheoremBall
            | CheckKind::FrameIsotropic
            | CheckKind::GammaTrace
            | CheckKind::DensityHomogeneity
            | CheckKind::LebesgueLimit => Relation::LhsLeRhs,
            _ => Relation::Equal,
        }
    }

    /// The checks that are inequalities from the theory (ratio >= 1 expected).
    pub fn is_theorem(self) -> bool {
        matches!(
            self,
            CheckKind::Borell
                | CheckKind::MinkowskiFirst
                | CheckKind::FaceBound
                | CheckKind::ZonotopeBound
                | CheckKind::TheoremLw
                | CheckKind::TheoremBall
        )
    }

    fn needs_seed(self) -> bool {
        matches!(
            self,
            CheckKind::DirectionalMonotonicity | CheckKind::DensityHomogeneity | CheckKind::DensityPConcavity
        )
    }
}

/// Samples drawn by the randomized density checks.
pub const DENSITY_SAMPLES: usize = 2000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub density: Density,
    pub body: ConvexBody,
    /// Orthonormal basis for the Loomis-Whitney type checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<WeightedFrame>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    /// `F` for `borell`, `B` for `minkowski_first`, the zonotope for the
    /// mixed-measure identities, `E` for `linearity`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_body: Option<ConvexBody>,
    /// `F` for `linearity`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub third_body: Option<ConvexBody>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Directions for the projection checks; defaults to the basis, then
    /// the frame, then the coordinate axes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_list: Option<Vec<f64>>,
    pub checks: Vec<CheckKind>,
    /// Per-check replacement for the default slack / tolerance.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<CheckKind, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn new(name: &str, density: Density, body: ConvexBody, checks: Vec<CheckKind>) -> Self {
        Self {
            name: name.to_string(),
            density,
            body,
            basis: None,
            frame: None,
            alphas: None,
            second_body: None,
            third_body: None,
            lambda: None,
            directions: None,
            p_list: None,
            checks,
            tolerances: BTreeMap::new(),
            seed: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    /// `q = 1 / (n + 1/p)`.
    pub fn q(&self) -> f64 {
        crate::measure::HomogeneityExponent::of(&self.density).q
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    /// Dimensions agree and every requested check has its inputs.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let same = |got: usize| {
            if got == n {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: n, got })
            }
        };
        same(self.body.dim())?;
        for b in [&self.second_body, &self.third_body].into_iter().flatten() {
            same(b.dim())?;
        }
        if let Some(f) = &self.frame {
            same(f.dim())?;
        }
        for vs in [&self.basis, &self.directions].into_iter().flatten() {
            for v in vs {
                same(v.len())?;
            }
        }
        if self.checks.is_empty() {
            return Err(Error::Invalid("no checks requested".into()));
        }
        for (kind, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(Error::Invalid(format!("tolerance for {} must be >= 0", kind.name())));
            }
        }
        let missing =
            |what: &str, kind: CheckKind| Err(Error::Invalid(format!("check {} needs `{what}`", kind.name())));
        for &kind in &self.checks {
            match kind {
                CheckKind::Borell | CheckKind::MinkowskiFirst | CheckKind::ZonotopeExpansion
                    if self.second_body.is_none() =>
                {
                    return missing("second_body", kind)
                }
                CheckKind::Linearity if self.second_body.is_none() || self.third_body.is_none() => {
                    return missing("second_body and third_body", kind)
                }
                CheckKind::FaceBound if self.basis.is_none() || self.alphas.is_none() => {
                    return missing("basis and alphas", kind)
                }
                CheckKind::TheoremLw | CheckKind::RatioInvariance if self.basis.is_none() => {
                    return missing("basis", kind)
                }
                CheckKind::LebesgueLimit => {
                    if self.basis.is_none() {
                        return missing("basis", kind);
                    }
                    if !matches!(self.density.spec(), DensitySpec::DirectionalPower { .. }) {
                        return Err(Error::Invalid(
                            "lebesgue_limit needs a directional_power density".into(),
                        ));
                    }
                }
                CheckKind::ZonotopeBound
                | CheckKind::TheoremBall
                | CheckKind::GammaTrace
                | CheckKind::FrameIsotropic
                    if self.frame.is_none() && self.basis.is_none() =>
                {
                    return missing("frame (or basis)", kind)
                }
                CheckKind::ZonotopeExpansion
                    if self.second_body.as_ref().and_then(ConvexBody::generators).is_none() =>
                {
                    return Err(Error::Invalid("zonotope_expansion needs a zonotope second_body".into()));
                }
                _ => {}
            }
            if kind.needs_seed() && self.seed.is_none() {
                return Err(Error::Invalid(format!(
                    "check {} is randomized and needs `seed`",
                    kind.name()
                )));
            }
        }
        if let Some(a) = &self.alphas {
            let want = match (&self.frame, &self.basis) {
                (Some(f), _) if self.checks.contains(&CheckKind::ZonotopeBound) => f.len(),
                (_, Some(b)) => b.len(),
                (Some(f), None) => f.len(),
                (None, None) => a.len(),
            };
            if a.len() != want {
                return Err(Error::DimensionMismatch {
                    expected: want,
                    got: a.len(),
                });
            }
        }
        Ok(())
    }

    fn frame_or_basis(&self) -> Result<WeightedFrame> {
        match (&self.frame, &self.basis) {
            (Some(f), _) => Ok(f.clone()),
            (None, Some(b)) => WeightedFrame::orthonormal(b.clone()),
            (None, None) => Err(Error::Invalid("no frame".into())),
        }
    }

    fn direction_list(&self) -> Vec<Point> {
        if let Some(d) = &self.directions {
            return d.clone();
        }
        if let Some(b) = &self.basis {
            return b.clone();
        }
        if let Some(f) = &self.frame {
            return f.vectors().to_vec();
        }
        (0..self.dim()).map(|i| linalg::unit(self.dim(), i)).collect()
    }

    fn evaluate(&self, kind: CheckKind) -> Result<Vec<CheckReport>> {
        let d = &self.density;
        let k = &self.body;
        let second = || self.second_body.as_ref().expect("validated");
        let seed = self.seed.unwrap_or(0);
        Ok(match kind {
            CheckKind::Borell => vec![checks::check_borell(d, k, second(), self.lambda.unwrap_or(0.5))?],
            CheckKind::MinkowskiFirst => vec![checks::check_minkowski_first(d, k, second())?],
            CheckKind::FaceBound => {
                let basis = self.basis.as_ref().expect("validated");
                let alphas = self.alphas.as_ref().expect("validated");
                (0..basis.len())
                    .map(|i| checks::check_face_bound(d, basis, alphas, i))
                    .collect::<Result<_>>()?
            }
            CheckKind::ZonotopeBound => {
                let frame = self.frame_or_basis()?;
                let alphas = self.alphas.clone().unwrap_or_else(|| vec![1.0; frame.len()]);
                vec![checks::check_zonotope_bound(d, &frame, &alphas)?]
            }
            CheckKind::TheoremLw => vec![checks::check_theorem_lw(d, k, self.basis.as_ref().expect("validated"))?],
            CheckKind::TheoremBall => vec![checks::check_theorem_ball(d, k, &self.frame_or_basis()?)?],
            CheckKind::SelfMixed => vec![identities::check_self_mixed(d, self.second_body.as_ref().unwrap_or(k))?],
            CheckKind::ZonotopeExpansion => vec![identities::check_zonotope_expansion(d, k, second())?],
            CheckKind::Linearity => vec![identities::check_linearity(
                d,
                k,
                second(),
                self.third_body.as_ref().expect("validated"),
                self.lambda.unwrap_or(0.5),
            )?],
            CheckKind::ProjectionRoutes => self
                .direction_list()
                .iter()
                .map(|u| identities::check_projection_routes(d, k, u))
                .collect::<Result<_>>()?,
            CheckKind::SegmentRoutes => self
                .direction_list()
                .iter()
                .map(|u| mixed::check_segment_routes(d, k, u))
                .collect::<Result<_>>()?,
            CheckKind::ConeDecomposition => vec![identities::check_cone_decomposition(d, k)?],
            CheckKind::ProjectionBound => self
                .direction_list()
                .iter()
                .map(|u| identities::check_projection_bound(d, self.second_body.as_ref().unwrap_or(k), u))
                .collect::<Result<_>>()?,
            CheckKind::DirectionalMonotonicity => self
                .direction_list()
                .iter()
                .enumerate()
                .map(|(i, u)| {
                    identities::check_directional_monotonicity(d, u, DENSITY_SAMPLES, seed.wrapping_add(i as u64))
                })
                .collect(),
            CheckKind::RatioInvariance => {
                let basis = self.basis.as_ref().expect("validated");
                [0.5, 2.0]
                    .iter()
                    .map(|&t| identities::check_ratio_invariance(d, k, basis, t))
                    .collect::<Result<_>>()?
            }
            CheckKind::FrameIsotropic => vec![frames::verify_isotropic(&self.frame_or_basis()?, 1e-9)],
            CheckKind::GammaTrace => vec![frames::gamma_table(&self.frame_or_basis()?).1],
            CheckKind::DensityHomogeneity => vec![d.check_homogeneity(DENSITY_SAMPLES, &[], 1e-9, seed)],
            CheckKind::DensityPConcavity => vec![d.check_p_concavity(DENSITY_SAMPLES, 1e-9, seed)],
            CheckKind::LebesgueLimit => {
                let DensitySpec::DirectionalPower { theta, .. } = d.spec() else {
                    unreachable!("validated")
                };
                let p_list = self.p_list.clone().unwrap_or_else(|| vec![1.0, 10.0, 100.0, 1000.0]);
                limit::lebesgue_limit_study(k, self.basis.as_ref().expect("validated"), &p_list, theta)?
            }
        })
    }

    /// Every requested check, in request order. Numerical errors become
    /// failing reports rather than aborting the scenario.
    pub fn run(&self) -> Vec<CheckReport> {
        let groups: Vec<Vec<CheckReport>> = self
            .checks
            .par_iter()
            .map(|&kind| {
                let reports = self
                    .evaluate(kind)
                    .unwrap_or_else(|e| vec![CheckReport::errored(kind.name(), kind.relation(), e)]);
                reports
                    .into_iter()
                    .map(|r| {
                        let r = match self.tolerances.get(&kind) {
                            Some(&tol) => r.with_tolerance(tol),
                            None => r,
                        };
                        let r = if r.description.is_empty() {
                            r.with_description(self.name.clone())
                        } else {
                            let desc = format!("{}: {}", self.name, r.description);
                            r.with_description(desc)
                        };
                        match self.seed {
                            Some(s) if r.seed.is_none() => r.with_seed(s),
                            _ => r,
                        }
                    })
                    .collect()
            })
            .collect();
        groups.into_iter().flatten().collect()
    }
}
