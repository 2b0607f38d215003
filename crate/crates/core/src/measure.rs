//! Integrals of a density over convex bodies and flat faces.
//!
//! The quadrature path never integrates across a kink. Each simplex is first
//! clipped into the cells of [`Density::linear_pieces`], so that on every
//! remaining simplex `g = l^s` for one linear form `l >= 0` and `s = 1/p`.
//! For such a ridge function the simplex integral collapses to one dimension:
//! if `l` takes values `l_0..l_k` at the vertices, the push-forward of the
//! uniform measure on the simplex under `l` is the Curry-Schoenberg B-spline
//! `M(t | l_0..l_k)`, so
//!
//! ```text
//! int_S l(x)^s dx = vol(S) * int t^s M(t) dt.
//! ```
//!
//! `M` is a polynomial between consecutive knots, and `t^s` is analytic away
//! from `t = 0`, so Gauss-Legendre panels that shrink geometrically towards
//! zero converge to rounding error.
//!
//! The Monte Carlo path is independent: rejection sampling in the bounding
//! box with per-chunk ChaCha streams merged in a fixed order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexBody, Face};
use crate::densities::Density;
use crate::error::{Error, Result};
use crate::linalg::{self, dot, Point};

pub const DEFAULT_ORDER: usize = 16;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
const MC_CHUNKS: usize = 64;
/// Panels between the smallest positive knot and zero.
const DYADIC_LEVELS: usize = 64;

/// `mu(tK) = t^(n + 1/p) mu(K)`; `q` is the concavity exponent of the measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityExponent {
    pub one_over_q: f64,
    pub q: f64,
}

impl HomogeneityExponent {
    pub fn new(n: usize, p: f64) -> Self {
        let one_over_q = n as f64 + 1.0 / p;
        Self {
            one_over_q,
            q: 1.0 / one_over_q,
        }
    }

    pub fn of(d: &Density) -> Self {
        Self::new(d.dim(), d.p())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    Quadrature,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Quadrature { order: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for Method {
    fn default() -> Self {
        Method::Quadrature { order: DEFAULT_ORDER }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    pub method: MethodTag,
    pub error_estimate: f64,
    /// Simplices integrated (quadrature) or points sampled (Monte Carlo).
    pub count: usize,
}

impl MeasureResult {
    fn quadrature(value: f64, error_estimate: f64, count: usize) -> Self {
        Self {
            value: value.max(0.0),
            method: MethodTag::Quadrature,
            error_estimate,
            count,
        }
    }
}

// --- Gauss-Legendre -------------------------------------------------------

/// Nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order.max(1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = x;
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    (nodes, weights)
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

// --- ridge integrals ------------------------------------------------------

/// Normalized B-spline of order `knots.len() - 1` (unit integral), evaluated
/// by the Cox-de Boor recursion. Knots must be sorted.
fn bspline_density(knots: &[f64], t: f64) -> f64 {
    let k = knots.len() - 1;
    let mut m: Vec<f64> = (0..k)
        .map(|i| {
            let w = knots[i + 1] - knots[i];
            if w > 0.0 && knots[i] <= t && t < knots[i + 1] {
                1.0 / w
            } else {
                0.0
            }
        })
        .collect();
    for r in 2..=k {
        for i in 0..=(k - r) {
            let w = knots[i + r] - knots[i];
            m[i] = if w > 0.0 {
                r as f64 * ((t - knots[i]) * m[i] + (knots[i + r] - t) * m[i + 1]) / ((r - 1) as f64 * w)
            } else {
                0.0
            };
        }
    }
    m[0]
}

/// `int t^s M(t | knots) dt` for nonnegative sorted knots.
fn ridge_moment(knots: &[f64], s: f64, order: usize) -> f64 {
    let top = knots[knots.len() - 1];
    if top <= 0.0 {
        return 0.0;
    }
    if knots.len() == 1 || top - knots[0] <= 1e-13 * top {
        let mean = knots.iter().sum::<f64>() / knots.len() as f64;
        return mean.powf(s);
    }
    let polynomial = s.fract() == 0.0;
    let rule = gauss_legendre(order);
    let f = |t: f64| {
        if t > 0.0 {
            t.powf(s) * bspline_density(knots, t)
        } else {
            0.0
        }
    };
    let mut distinct: Vec<f64> = Vec::with_capacity(knots.len());
    for &x in knots {
        if distinct.last().is_none_or(|&y| x > y) {
            distinct.push(x);
        }
    }
    let mut total = 0.0;
    for w in distinct.windows(2) {
        let (a, b) = (w[0], w[1]);
        if polynomial {
            total += gl_panel(&f, a, b, &rule);
        } else if a <= b * 0.5f64.powi(DYADIC_LEVELS as i32) {
            let mut hi = b;
            for _ in 0..DYADIC_LEVELS {
                let lo = 0.5 * hi;
                total += gl_panel(&f, lo, hi, &rule);
                hi = lo;
            }
        } else {
            let mut lo = a;
            while lo < b {
                let hi = (2.0 * lo).min(b);
                total += gl_panel(&f, lo, hi, &rule);
                lo = hi;
            }
        }
    }
    total
}

/// `int_S l^s` where `values` are the (nonnegative) values of the affine
/// function `l` at the vertices of a simplex with the given volume.
pub fn ridge_integral(values: &[f64], volume: f64, s: f64, order: usize) -> f64 {
    let mut knots: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    knots.sort_by(f64::total_cmp);
    // Merge knots closer than rounding so the recursion sees exact ties.
    let top = knots[knots.len() - 1];
    for i in 1..knots.len() {
        if knots[i] - knots[i - 1] <= 1e-14 * top {
            knots[i] = knots[i - 1];
        }
    }
    volume * ridge_moment(&knots, s, order)
}

// --- clipping -------------------------------------------------------------

/// Intersect a k-simplex (k + 1 points in R^n) with `<a, x> <= b`, returning
/// a triangulation of the kept part. Pieces may be degenerate.
///
/// The kept polytope is the cone from its deepest vertex over (i) the clipped
/// opposite facet and (ii) the cut section, which is a hyperplane section of
/// the simplex and gets the staircase triangulation of a product of simplices.
pub fn clip_simplex(simplex: &[Point], a: &[f64], b: f64) -> Vec<Vec<Point>> {
    let vals: Vec<f64> = simplex.iter().map(|v| dot(a, v) - b).collect();
    let scale = simplex.iter().map(|v| linalg::norm(v)).fold(0.0, f64::max) * linalg::norm(a) + b.abs();
    let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let vals: Vec<f64> = vals.into_iter().map(|s| if s.abs() <= tol { 0.0 } else { s }).collect();
    clip_recursive(simplex, &vals)
}

fn clip_recursive(simplex: &[Point], vals: &[f64]) -> Vec<Vec<Point>> {
    if vals.iter().all(|s| *s <= 0.0) {
        return vec![simplex.to_vec()];
    }
    if vals.iter().all(|s| *s >= 0.0) {
        return Vec::new();
    }
    let apex = (0..vals.len())
        .min_by(|&i, &j| vals[i].total_cmp(&vals[j]))
        .unwrap_or(0);
    let cone = |base: Vec<Point>| {
        let mut s = Vec::with_capacity(base.len() + 1);
        s.push(simplex[apex].clone());
        s.extend(base);
        s
    };
    let rest: Vec<usize> = (0..vals.len()).filter(|&i| i != apex).collect();
    let facet: Vec<Point> = rest.iter().map(|&i| simplex[i].clone()).collect();
    let facet_vals: Vec<f64> = rest.iter().map(|&i| vals[i]).collect();
    let mut out: Vec<Vec<Point>> = clip_recursive(&facet, &facet_vals).into_iter().map(cone).collect();

    let inside: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] <= 0.0).collect();
    let outside: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.0).collect();
    let cut = |i: usize, o: usize| {
        let t = vals[i] / (vals[i] - vals[o]);
        linalg::axpy(&simplex[i], t, &linalg::sub(&simplex[o], &simplex[i]))
    };
    // Monotone lattice paths from (0, 0) to (|I| - 1, |O| - 1).
    let (ni, no) = (inside.len() - 1, outside.len() - 1);
    for mask in 0u32..(1 << (ni + no)) {
        if mask.count_ones() as usize != ni {
            continue;
        }
        let (mut x, mut y) = (0, 0);
        let mut base = vec![cut(inside[0], outside[0])];
        for step in 0..ni + no {
            if mask >> step & 1 == 1 {
                x += 1;
            } else {
                y += 1;
            }
            base.push(cut(inside[x], outside[y]));
        }
        out.push(cone(base));
    }
    out
}

fn lies_in_hyperplane(simplex: &[Point], a: &[f64]) -> bool {
    let scale = simplex.iter().map(|v| linalg::norm(v)).fold(0.0, f64::max) * linalg::norm(a);
    let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    simplex.iter().all(|v| dot(a, v).abs() <= tol)
}

fn integrate_simplex(d: &Density, simplex: &[Point], order: usize) -> f64 {
    let s = d.exponent();
    let mut total = 0.0;
    for (i, piece) in d.linear_pieces().into_iter().enumerate() {
        let mut cells = clip_simplex(simplex, &linalg::neg(&piece.form), 0.0);
        for (k, cut) in piece.cuts.iter().enumerate() {
            // A flat cell inside a tie hyperplane belongs to the lower index only.
            cells = cells
                .iter()
                .filter(|c| k >= i || !lies_in_hyperplane(c, cut))
                .flat_map(|c| clip_simplex(c, cut, 0.0))
                .collect();
        }
        for cell in &cells {
            let vol = linalg::simplex_volume(cell);
            if vol <= 0.0 {
                continue;
            }
            let values: Vec<f64> = cell.iter().map(|v| dot(&piece.form, v)).collect();
            total += ridge_integral(&values, vol, s, order);
        }
    }
    total
}

fn integrate_simplices(d: &Density, simplices: &[Vec<Point>], order: usize) -> MeasureResult {
    let coarse = (order / 2).max(2);
    let parts: Vec<(f64, f64)> = simplices
        .par_iter()
        .map(|s| (integrate_simplex(d, s, order), integrate_simplex(d, s, coarse)))
        .collect();
    let value: f64 = parts.iter().map(|p| p.0).sum();
    let rough: f64 = parts.iter().map(|p| p.1).sum();
    MeasureResult::quadrature(value, (value - rough).abs(), simplices.len())
}

/// `int_S g` over a simplex of any dimension k <= n given by k + 1 vertices.
pub fn measure_simplex(d: &Density, simplex: &[Point], order: usize) -> Result<MeasureResult> {
    if order == 0 {
        return Err(Error::Invalid("quadrature order must be at least 1".into()));
    }
    let n = d.dim();
    if let Some(v) = simplex.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    let k = simplex.len().saturating_sub(1);
    if k > n || simplex.is_empty() {
        return Err(Error::Invalid(format!(
            "{} vertices do not form a simplex in R^{n}",
            simplex.len()
        )));
    }
    if k > 0 {
        let diam = simplex
            .iter()
            .flat_map(|a| simplex.iter().map(move |b| linalg::dist(a, b)))
            .fold(0.0, f64::max);
        let vol = linalg::simplex_volume(simplex);
        if vol.is_nan() || vol <= 1e-12 * diam.powi(k as i32) {
            return Err(Error::Degenerate("simplex has no volume".into()));
        }
    }
    Ok(integrate_simplices(d, &[simplex.to_vec()], order))
}

/// `mu(K) = int_K g`.
pub fn measure_body(d: &Density, body: &ConvexBody, method: Method) -> Result<MeasureResult> {
    if body.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            got: body.dim(),
        });
    }
    match method {
        Method::Quadrature { order } => {
            if order == 0 {
                return Err(Error::Invalid("quadrature order must be at least 1".into()));
            }
            Ok(integrate_simplices(d, &body.triangulate()?, order))
        }
        Method::MonteCarlo { samples, seed } => monte_carlo(d, body, samples, seed),
    }
}

/// Quadrature `mu(K)` with default order.
pub fn measure(d: &Density, body: &ConvexBody) -> Result<f64> {
    Ok(measure_body(d, body, Method::default())?.value)
}

/// `int_F g` with respect to (n-1)-dimensional Hausdorff measure.
pub fn measure_face(d: &Density, face: &Face) -> Result<MeasureResult> {
    if face.normal.len() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            got: face.normal.len(),
        });
    }
    let simplices = face.simplices()?;
    if simplices.is_empty() {
        return Err(Error::Degenerate("face has no simplices".into()));
    }
    Ok(integrate_simplices(d, &simplices, DEFAULT_ORDER))
}

// --- Monte Carlo ----------------------------------------------------------

#[derive(Clone, Copy, Debug, Default)]
struct Welford {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if other.count == 0.0 {
            return self;
        }
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Self {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}

fn monte_carlo(d: &Density, body: &ConvexBody, samples: usize, seed: u64) -> Result<MeasureResult> {
    if samples < 2 {
        return Err(Error::Invalid("Monte Carlo needs at least two samples".into()));
    }
    let n = body.dim();
    let (mut lo, mut hi) = (vec![f64::INFINITY; n], vec![f64::NEG_INFINITY; n]);
    for v in body.vertices() {
        for k in 0..n {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let poly = body.polytope();
    let chunks: Vec<Welford> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let quota = samples / MC_CHUNKS + usize::from(c < samples % MC_CHUNKS);
            let mut acc = Welford::default();
            let mut x = vec![0.0; n];
            for _ in 0..quota {
                for k in 0..n {
                    x[k] = rng.random_range(lo[k]..=hi[k]);
                }
                let f = if poly.contains(&x, 0.0) { d.eval(&x) } else { 0.0 };
                acc.push(f);
            }
            acc
        })
        .collect();
    let total = chunks.into_iter().fold(Welford::default(), Welford::merge);
    let variance = if total.count > 1.0 {
        total.m2 / (total.count - 1.0)
    } else {
        0.0
    };
    Ok(MeasureResult {
        value: box_volume * total.mean,
        method: MethodTag::MonteCarlo,
        error_estimate: box_volume * (variance / total.count).sqrt(),
        count: samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y_density(p: f64) -> Density {
        Density::directional(vec![0.0, 1.0], p).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(8);
        let v = gl_panel(&|x: f64| x.powi(15) + x.powi(14), 0.0, 1.0, &rule);
        assert!((v - (1.0 / 16.0 + 1.0 / 15.0)).abs() < 1e-14);
        let w: f64 = gauss_legendre(5).1.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn bspline_has_unit_mass() {
        for knots in [
            vec![0.0, 1.0, 3.0],
            vec![0.0, 0.0, 2.0, 5.0],
            vec![1.0, 1.0, 1.0, 4.0, 4.5],
        ] {
            let rule = gauss_legendre(12);
            let mut mass = 0.0;
            for w in knots.windows(2) {
                if w[1] > w[0] {
                    mass += gl_panel(&|t| bspline_density(&knots, t), w[0], w[1], &rule);
                }
            }
            assert!((mass - 1.0).abs() < 1e-13, "{knots:?}: {mass}");
        }
    }

    #[test]
    fn ridge_matches_brute_force_triangle() {
        // int over conv{(0,0),(1,0),(0,1)} of (x + 2y)^0.5 by a fine midpoint
        // grid on the unit square restricted to the triangle.
        let exact = ridge_integral(&[0.0, 1.0, 2.0], 0.5, 0.5, 16);
        let m = 2000;
        let h = 1.0 / m as f64;
        let mut brute = 0.0;
        for i in 0..m {
            for j in 0..m {
                let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                if x + y < 1.0 {
                    brute += (x + 2.0 * y).sqrt() * h * h;
                }
            }
        }
        assert!((exact - brute).abs() < 1e-3, "{exact} vs {brute}");
        // closed form by iterated integration: int_0^1 int_0^{1-x} (x+2y)^{1/2} dy dx
        //   = int_0^1 [(2-x)^{3/2} - x^{3/2}] / 3 dx = (2^{5/2} - 2) / 7.5
        let closed = (2f64.powf(2.5) - 2.0) / 7.5;
        assert!((exact - closed).abs() < 1e-13, "{exact} vs {closed}");
    }

    #[test]
    fn triangle_example() {
        let s = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let r = measure_simplex(&y_density(1.0), &s, DEFAULT_ORDER).unwrap();
        assert!((r.value - 1.0 / 6.0).abs() < 1e-15);
        let below = vec![vec![0.0, -1.0], vec![1.0, -1.0], vec![0.0, -2.0]];
        assert_eq!(measure_simplex(&y_density(1.0), &below, 8).unwrap().value, 0.0);
        let flat = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(
            measure_simplex(&y_density(1.0), &flat, 8),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn straddling_simplex_is_clipped() {
        // int over the triangle conv{(0,-1),(1,1),(-1,1)} of y_+ :
        // the part above y = 0 is the trapezoid between y = 0 and y = 1 whose
        // width is (y + 1), so the integral is int_0^1 y (y + 1) dy = 5/6.
        let s = vec![vec![0.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0]];
        let r = measure_simplex(&y_density(1.0), &s, DEFAULT_ORDER).unwrap();
        assert!((r.value - 5.0 / 6.0).abs() < 1e-14, "{}", r.value);
        // and with a half power: int_0^1 y^{1/2} (y + 1) dy = 2/5 + 2/3
        let r = measure_simplex(&y_density(2.0), &s, DEFAULT_ORDER).unwrap();
        assert!((r.value - (0.4 + 2.0 / 3.0)).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn unit_square_examples() {
        let k = ConvexBody::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let m = measure(&y_density(1.0), &k).unwrap();
        assert!((m - 0.5).abs() < 1e-15);
        let m2 = measure(&y_density(1.0), &k.scale(2.0).unwrap()).unwrap();
        assert!((m2 - 4.0).abs() < 1e-13);
    }

    #[test]
    fn one_dimensional_segment() {
        let d = Density::directional(vec![1.0], 1.0).unwrap();
        let k = ConvexBody::from_vertices(vec![vec![0.0], vec![3.0]]).unwrap();
        assert!((measure(&d, &k).unwrap() - 4.5).abs() < 1e-14);
        let z = ConvexBody::zonotope(vec![vec![3.0]]).unwrap();
        assert!((measure(&d, &z).unwrap() - 4.5).abs() < 1e-14);
    }

    #[test]
    fn min_linear_cells() {
        // g = min(x, y)_+ on [0,1]^2: int = 2 * int_0^1 int_0^x y dy dx = 1/3.
        let d = Density::min_linear(vec![vec![1.0, 0.0], vec![0.0, 1.0]], 1.0).unwrap();
        let k = ConvexBody::axis_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert!((measure(&d, &k).unwrap() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn faces_of_the_square() {
        let k = ConvexBody::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let d = y_density(1.0);
        for f in k.faces() {
            let m = measure_face(&d, &f).unwrap().value;
            if f.normal[1] > 0.5 {
                assert!((m - 1.0).abs() < 1e-15);
            } else if f.normal[1] < -0.5 {
                assert_eq!(m, 0.0);
            } else {
                assert!((m - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rotated_face_example() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f = Face::parallelepiped_face(&[vec![s, s], vec![-s, s]], &[1.0, 1.0], 0, 1.0);
        let m = measure_face(&y_density(1.0), &f).unwrap().value;
        assert!((m - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn monte_carlo_agrees() {
        let k = ConvexBody::axis_box(&[-0.5, 0.0], &[1.0, 1.5]).unwrap();
        let d = y_density(2.0);
        let q = measure(&d, &k).unwrap();
        let mc = measure_body(
            &d,
            &k,
            Method::MonteCarlo {
                samples: 200_000,
                seed: 1,
            },
        )
        .unwrap();
        assert!((mc.value - q).abs() < 4.0 * mc.error_estimate, "{} vs {q}", mc.value);
        let again = measure_body(
            &d,
            &k,
            Method::MonteCarlo {
                samples: 200_000,
                seed: 1,
            },
        )
        .unwrap();
        assert_eq!(mc.value.to_bits(), again.value.to_bits());
    }

    #[test]
    fn exponent_bookkeeping() {
        let h = HomogeneityExponent::new(2, 1.0);
        assert_eq!(h.one_over_q, 3.0);
        assert!((h.q * h.one_over_q - 1.0).abs() < 1e-15);
    }
}
