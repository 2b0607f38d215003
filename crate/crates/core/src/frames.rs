//! Weighted frames `(u_i, c_i)` with `sum c_i u_i u_i^T = I_n`, the
//! recursive projection family built from them, and the `gamma_ji` table.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::densities::Density;
use crate::error::{Error, Result};
use crate::linalg::{self, Point};
use crate::report::CheckReport;

/// Tolerance for deduplicating projection-family members.
pub const DEDUP_TOL: f64 = 1e-9;
/// Default threshold below which `|u_i - <u_i, u_j> u_j|` counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Acceptance thresholds for `solve_weights`.
pub const WEIGHT_RESIDUAL_TOL: f64 = 1e-8;
pub const MIN_WEIGHT: f64 = 1e-10;

/// JSON form; missing weights are solved for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpec {
    pub vectors: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameSpec", into = "FrameSpec")]
pub struct WeightedFrame {
    vectors: Vec<Point>,
    weights: Vec<f64>,
}

impl TryFrom<FrameSpec> for WeightedFrame {
    type Error = Error;

    fn try_from(spec: FrameSpec) -> Result<Self> {
        match spec.weights {
            Some(w) => Self::new(spec.vectors, w),
            None => Self::with_solved_weights(spec.vectors),
        }
    }
}

impl From<WeightedFrame> for FrameSpec {
    fn from(f: WeightedFrame) -> Self {
        FrameSpec {
            vectors: f.vectors,
            weights: Some(f.weights),
        }
    }
}

fn unit_vectors(vectors: Vec<Point>) -> Result<Vec<Point>> {
    let n = vectors.first().map(Vec::len).ok_or(Error::Empty)?;
    if n == 0 {
        return Err(Error::Invalid("zero-dimensional frame".into()));
    }
    vectors
        .into_iter()
        .map(|v| {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invalid("frame vectors must be finite".into()));
            }
            linalg::normalize(&v).ok_or_else(|| Error::Invalid("zero frame vector".into()))
        })
        .collect()
}

impl WeightedFrame {
    /// Vectors are normalized; weights must be positive. Isotropy is not
    /// required here, see [`verify_isotropic`].
    pub fn new(vectors: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        let vectors = unit_vectors(vectors)?;
        if weights.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::Invalid("frame weights must be positive".into()));
        }
        Ok(Self { vectors, weights })
    }

    pub fn with_solved_weights(vectors: Vec<Point>) -> Result<Self> {
        let vectors = unit_vectors(vectors)?;
        let weights = solve_weights(&vectors)?;
        Ok(Self { vectors, weights })
    }

    /// Orthonormal basis with unit weights.
    pub fn orthonormal(basis: Vec<Point>) -> Result<Self> {
        let m = basis.len();
        Self::new(basis, vec![1.0; m])
    }

    /// `m` unit vectors in the plane at angles `phase + 2 pi k / m`, weights `2/m`.
    pub fn planar_regular(m: usize, phase: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Invalid("need at least two vectors".into()));
        }
        let vectors = (0..m)
            .map(|k| {
                let a = phase + std::f64::consts::TAU * k as f64 / m as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        Self::new(vectors, vec![2.0 / m as f64; m])
    }

    /// Random isotropic frame: `w_i` Gaussian, `v_i = S^(-1/2) w_i` with
    /// `S = sum w_i w_i^T`, then `u_i = v_i / |v_i|`, `c_i = |v_i|^2`.
    pub fn random_isotropic<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        if m < n || n == 0 {
            return Err(Error::Invalid(format!("need m >= n >= 1, got m={m}, n={n}")));
        }
        loop {
            let w: Vec<Point> = (0..m)
                .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
                .collect();
            let mut s = DMatrix::<f64>::zeros(n, n);
            for v in &w {
                let col = DVector::from_column_slice(v);
                s += &col * col.transpose();
            }
            let eig = SymmetricEigen::new(s);
            let min_ev = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            let max_ev = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
            if min_ev <= 1e-6 * max_ev {
                continue;
            }
            let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
            let t = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
            let mut vectors = Vec::with_capacity(m);
            let mut weights = Vec::with_capacity(m);
            for v in &w {
                let x = &t * DVector::from_column_slice(v);
                let c = x.norm_squared();
                vectors.push(x.iter().map(|e| e / c.sqrt()).collect());
                weights.push(c);
            }
            if weights.iter().all(|c| *c > MIN_WEIGHT) {
                return Ok(Self { vectors, weights });
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Point] {
        &self.vectors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(max entry of |sum c_i u_i u_i^T - I|, |sum c_i - n|)`.
    pub fn isotropy_deviation(&self) -> (f64, f64) {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let s: f64 = self
                    .vectors
                    .iter()
                    .zip(&self.weights)
                    .map(|(u, c)| c * u[a] * u[b])
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        let trace = (self.weights.iter().sum::<f64>() - n as f64).abs();
        (worst, trace)
    }

    pub fn is_isotropic(&self, tol: f64) -> bool {
        let (m, t) = self.isotropy_deviation();
        m <= tol && t <= tol
    }
}

/// Report on `sum c_i u_i u_i^T = I_n` and the trace identity `sum c_i = n`.
pub fn verify_isotropic(frame: &WeightedFrame, tol: f64) -> CheckReport {
    let (matrix, trace) = frame.isotropy_deviation();
    CheckReport::at_most("frame_isotropic", matrix.max(trace), tol, 0.0)
        .with_value("matrix_deviation", matrix)
        .with_value("trace_deviation", trace)
        .with_description(format!("n={}, m={}", frame.dim(), frame.len()))
}

/// Nonnegative weights solving `sum c_i u_i u_i^T = I_n`, or `Infeasible`.
pub fn solve_weights(vectors: &[Point]) -> Result<Vec<f64>> {
    let n = vectors.first().map(Vec::len).ok_or(Error::Empty)?;
    let m = vectors.len();
    if m < n {
        return Err(Error::Infeasible {
            residual: f64::INFINITY,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let a = DMatrix::from_fn(pairs.len(), m, |r, i| {
        let (p, q) = pairs[r];
        vectors[i][p] * vectors[i][q]
    });
    let b = DVector::from_fn(pairs.len(), |r, _| {
        let (p, q) = pairs[r];
        if p == q {
            1.0
        } else {
            0.0
        }
    });
    let x = nnls(&a, &b);
    let residual = (&a * &x - &b).amax();
    if residual > WEIGHT_RESIDUAL_TOL || x.iter().any(|c| *c <= MIN_WEIGHT) {
        return Err(Error::Infeasible { residual });
    }
    Ok(x.iter().cloned().collect())
}

/// Lawson-Hanson active set method for `min |Ax - b|` subject to `x >= 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let m = a.ncols();
    let tol = 1e-12 * a.amax().max(1.0) * b.amax().max(1.0) * (m as f64);
    let mut x = DVector::<f64>::zeros(m);
    let mut passive = vec![false; m];
    for _ in 0..(3 * m + 10) {
        let w = a.transpose() * (b - a * &x);
        let next = (0..m)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = next else { break };
        passive[j] = true;
        for _ in 0..(3 * m + 10) {
            let idx: Vec<usize> = (0..m).filter(|&k| passive[k]).collect();
            let sub = a.select_columns(&idx);
            let z_p = sub
                .svd(true, true)
                .solve(b, 1e-14)
                .unwrap_or_else(|_| DVector::zeros(idx.len()));
            if z_p.iter().all(|v| *v > 0.0) {
                x.fill(0.0);
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = z_p[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if z_p[k] <= 0.0 {
                    let d = x[i] - z_p[k];
                    if d > 0.0 {
                        alpha = alpha.min(x[i] / d);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += alpha * (z_p[k] - x[i]);
                if x[i] <= tol {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
    x
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedPair {
    /// Level the pair was drawn from (0 = the frame itself).
    pub level: usize,
    pub i: usize,
    pub j: usize,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionFamily {
    /// `levels[0]` is the frame as given; `levels[k + 1]` holds the normalized
    /// projections of level `k`, deduplicated up to sign.
    pub levels: Vec<Vec<Point>>,
    /// Union of all levels, deduplicated up to sign.
    pub members: Vec<Point>,
    pub skipped: Vec<SkippedPair>,
}

fn push_unique(set: &mut Vec<Point>, v: Point) -> bool {
    let c = linalg::sign_canonical(&v, DEDUP_TOL);
    if set.iter().any(|w| linalg::dist(w, &c) <= DEDUP_TOL) {
        false
    } else {
        set.push(c);
        true
    }
}

/// Closure of the frame vectors under `n - 1` rounds of
/// `u_ij = (u_i - <u_i, u_j> u_j) / |...|`, in R^n.
pub fn projection_family(frame: &WeightedFrame, degeneracy_tol: f64) -> ProjectionFamily {
    projection_family_of(frame.vectors(), degeneracy_tol)
}

pub fn projection_family_of(vectors: &[Point], degeneracy_tol: f64) -> ProjectionFamily {
    let n = vectors.first().map(Vec::len).unwrap_or(0);
    // Level 0 keeps the frame as given so skipped pairs refer to frame indices.
    let mut levels = vec![vectors.to_vec()];
    let mut skipped = Vec::new();
    for k in 0..n.saturating_sub(1) {
        let prev = &levels[k];
        let mut next = Vec::new();
        for (i, ui) in prev.iter().enumerate() {
            for (j, uj) in prev.iter().enumerate() {
                if i == j {
                    continue;
                }
                let r = linalg::axpy(ui, -linalg::dot(ui, uj), uj);
                let norm = linalg::norm(&r);
                if norm <= degeneracy_tol {
                    skipped.push(SkippedPair { level: k, i, j, norm });
                    continue;
                }
                push_unique(&mut next, linalg::scale(1.0 / norm, &r));
            }
        }
        levels.push(next);
    }
    let mut members = Vec::new();
    for level in &levels {
        for v in level {
            push_unique(&mut members, v.clone());
        }
    }
    ProjectionFamily {
        levels,
        members,
        skipped,
    }
}

impl ProjectionFamily {
    /// `inf_{u in P} g~(u)` and a minimizer.
    pub fn infimum(&self, d: &Density) -> (f64, Option<Point>) {
        self.members
            .iter()
            .map(|u| (d.eval_symmetrized(u), u))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(v, u)| (v, Some(u.clone())))
            .unwrap_or((f64::INFINITY, None))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaTable {
    /// `gamma[j][i] = |u_j - <u_i, u_j> u_i|`.
    pub gamma: Vec<Vec<f64>>,
}

/// The `gamma_ji` table and a report on `sum_i c_i gamma_ji^2 = n - 1` for every `j`.
pub fn gamma_table(frame: &WeightedFrame) -> (GammaTable, CheckReport) {
    let u = frame.vectors();
    let c = frame.weights();
    let n = frame.dim() as f64;
    let gamma: Vec<Vec<f64>> = u
        .iter()
        .map(|uj| {
            u.iter()
                .map(|ui| linalg::norm(&linalg::axpy(uj, -linalg::dot(ui, uj), ui)))
                .collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    let mut report_values = Vec::new();
    for (j, row) in gamma.iter().enumerate() {
        let s: f64 = row.iter().zip(c).map(|(g, ci)| ci * g * g).sum();
        let r = (s - (n - 1.0)).abs();
        worst = worst.max(r);
        report_values.push((format!("residual_{j}"), r));
    }
    let mut report = CheckReport::at_most("gamma_trace", worst, 1e-9, 0.0);
    for (k, v) in report_values {
        report = report.with_value(&k, v);
    }
    (GammaTable { gamma }, report)
}
