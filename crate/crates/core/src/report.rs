//! Structured outcome of evaluating one inequality or identity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Which way the evaluated relation is supposed to go.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs <= rhs`
    LhsLeRhs,
    /// `lhs >= rhs`
    LhsGeRhs,
    /// `lhs == rhs` up to a relative tolerance
    Equal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub relation: Relation,
    #[serde(with = "nan_as_null")]
    pub lhs: f64,
    #[serde(with = "nan_as_null")]
    pub rhs: f64,
    /// Larger side over smaller side for inequalities (>= 1 when the
    /// inequality holds), `rhs / lhs` for identities. `None` when the
    /// denominator vanishes.
    pub ratio: Option<f64>,
    /// Relative residual `|lhs - rhs| / max(|lhs|, |rhs|)`.
    #[serde(with = "nan_as_null")]
    pub residual: f64,
    pub hypothesis_ok: bool,
    pub reasons: Vec<String>,
    /// Relative slack (inequalities) or tolerance (identities) applied.
    pub tolerance: f64,
    pub pass: bool,
    pub description: String,
    pub seed: Option<u64>,
    /// Named intermediate quantities, for auditing.
    pub values: BTreeMap<String, f64>,
    /// Set by [`CheckReport::fail`]; survives re-tolerancing.
    #[serde(skip)]
    forced_failure: bool,
    #[serde(skip)]
    floor: f64,
}

/// JSON has no NaN; skipped checks carry `null` sides.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

fn relative_residual(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl CheckReport {
    fn base(check: &str, relation: Relation, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            check: check.to_string(),
            relation,
            lhs,
            rhs,
            ratio: None,
            residual: relative_residual(lhs, rhs),
            hypothesis_ok: true,
            reasons: Vec::new(),
            tolerance,
            pass: false,
            description: String::new(),
            seed: None,
            values: BTreeMap::new(),
            forced_failure: false,
            floor: 0.0,
        }
    }

    fn evaluate(&mut self) {
        let (lhs, rhs, tol) = (self.lhs, self.rhs, self.tolerance);
        self.pass = match self.relation {
            Relation::LhsLeRhs => lhs.is_finite() && !rhs.is_nan() && rhs >= lhs * (1.0 - tol),
            Relation::LhsGeRhs => rhs.is_finite() && !lhs.is_nan() && lhs >= rhs * (1.0 - tol),
            Relation::Equal => (lhs - rhs).abs() <= tol * lhs.abs().max(rhs.abs()).max(self.floor),
        };
    }

    /// `lhs <= rhs`, passing when `rhs >= lhs (1 - slack)`.
    pub fn at_most(check: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        let mut r = Self::base(check, Relation::LhsLeRhs, lhs, rhs, slack);
        r.ratio = if lhs > 0.0 { finite(rhs / lhs) } else { None };
        r.evaluate();
        r
    }

    /// `lhs >= rhs`, passing when `lhs >= rhs (1 - slack)`.
    pub fn at_least(check: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        let mut r = Self::base(check, Relation::LhsGeRhs, lhs, rhs, slack);
        r.ratio = if rhs > 0.0 { finite(lhs / rhs) } else { None };
        r.evaluate();
        r
    }

    /// `lhs == rhs` within relative tolerance `tol`; `floor` guards the
    /// scale when both sides are tiny.
    pub fn equal(check: &str, lhs: f64, rhs: f64, tol: f64, floor: f64) -> Self {
        let mut r = Self::base(check, Relation::Equal, lhs, rhs, tol);
        r.ratio = if lhs != 0.0 { finite(rhs / lhs) } else { None };
        r.floor = floor;
        r.evaluate();
        r
    }

    /// A check whose hypotheses failed: nothing was evaluated.
    pub fn skipped(check: &str, relation: Relation, reasons: Vec<String>) -> Self {
        let mut r = Self::base(check, relation, f64::NAN, f64::NAN, 0.0);
        r.residual = f64::NAN;
        r.hypothesis_ok = false;
        r.reasons = reasons;
        r
    }

    /// A check that could not be evaluated although its hypotheses hold.
    pub fn errored(check: &str, relation: Relation, error: impl std::fmt::Display) -> Self {
        let mut r = Self::base(check, relation, f64::NAN, f64::NAN, 0.0);
        r.residual = f64::NAN;
        r.forced_failure = true;
        r.reasons.push(format!("error: {error}"));
        r
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_value(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reasons.push(reason.into());
        self
    }

    /// Re-judge with a different slack or tolerance. Skipped and forced
    /// failures are left alone.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        if self.hypothesis_ok && !self.forced_failure {
            self.evaluate();
        }
        self
    }

    /// Force a failure (used when a sub-computation disagrees).
    pub fn fail(mut self, reason: impl Into<String>) -> Self {
        self.pass = false;
        self.forced_failure = true;
        self.reasons.push(reason.into());
        self
    }

    /// Either passed, or was skipped because its hypotheses do not hold.
    pub fn acceptable(&self) -> bool {
        self.pass || !self.hypothesis_ok
    }

    /// One-line human summary.
    pub fn summary_line(&self) -> String {
        let status = if !self.hypothesis_ok {
            "SKIP"
        } else if self.pass {
            "PASS"
        } else {
            "FAIL"
        };
        let ratio = self.ratio.map(|r| format!("{r:.6}")).unwrap_or_else(|| "-".into());
        format!(
            "[{status}] {:<28} lhs={:<14.8e} rhs={:<14.8e} ratio={ratio}",
            self.check, self.lhs, self.rhs
        )
    }
}
