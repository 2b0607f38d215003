use homocone::frames::{self, WeightedFrame};
use homocone::harness::identities::check_cone_decomposition;
use homocone::measure::{self, clip_simplex};
use homocone::{linalg, ConvexBody, Density};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, n)
}

fn zonotope(n: usize) -> impl Strategy<Value = ConvexBody> {
    prop::collection::vec(point(n), n..n + 2).prop_filter_map("full-dimensional zonotope", |g| {
        let z = ConvexBody::zonotope(g).ok()?;
        (z.volume().ok()? > 1e-3).then_some(z)
    })
}

fn boxed(n: usize) -> impl Strategy<Value = ConvexBody> {
    (point(n), prop::collection::vec(0.2..2.0f64, n)).prop_map(|(lo, w)| {
        let hi: Vec<f64> = lo.iter().zip(&w).map(|(a, b)| a + b).collect();
        ConvexBody::axis_box(&lo, &hi).unwrap()
    })
}

fn theta(n: usize) -> impl Strategy<Value = Vec<f64>> {
    point(n).prop_filter("nonzero direction", |t| linalg::norm(t) > 0.1)
}

fn volume(simplices: &[Vec<Vec<f64>>]) -> f64 {
    simplices.iter().map(|s| linalg::simplex_volume(s)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clipping_splits_volume(s in prop::collection::vec(point(3), 4), a in theta(3), b in -1.0..1.0f64) {
        let whole = linalg::simplex_volume(&s);
        let below = volume(&clip_simplex(&s, &a, b));
        let above = volume(&clip_simplex(&s, &linalg::neg(&a), -b));
        prop_assert!((below + above - whole).abs() <= 1e-9 * (1.0 + whole));
    }

    #[test]
    fn measure_is_homogeneous(k in boxed(2), t in theta(2), p in 0.3..4.0f64, s in 0.2..3.0f64) {
        let d = Density::directional(t, p).unwrap();
        let m = measure::measure(&d, &k).unwrap();
        let ms = measure::measure(&d, &k.scale(s).unwrap()).unwrap();
        let expected = s.powf(2.0 + 1.0 / p) * m;
        prop_assert!((ms - expected).abs() <= 1e-9 * (1.0 + expected));
    }

    #[test]
    fn cone_decomposition_holds(k in boxed(3), t1 in theta(3), t2 in theta(3), p in 0.5..3.0f64) {
        let d = Density::min_linear(vec![t1, t2], p).unwrap();
        let r = check_cone_decomposition(&d, &k).unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn support_is_additive(k in boxed(3), z in zonotope(3), u in point(3), eps in 0.01..2.0f64) {
        let sum = k.minkowski_sum(&z, eps).unwrap();
        let expected = k.support_function(&u) + eps * z.support_function(&u);
        prop_assert!((sum.support_function(&u) - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
    }

    #[test]
    fn segmentwise_sum_matches_vertex_sum(k in boxed(3), z in zonotope(3), eps in 0.05..1.0f64) {
        let sum = k.minkowski_sum(&z, eps).unwrap();
        let mut pts = Vec::new();
        for a in k.vertices() {
            for b in z.vertices() {
                pts.push(linalg::axpy(a, eps, b));
            }
        }
        let direct = ConvexBody::from_vertices(pts).unwrap();
        let (v1, v2) = (sum.volume().unwrap(), direct.volume().unwrap());
        prop_assert!((v1 - v2).abs() <= 1e-9 * v2);
    }

    #[test]
    fn random_frames_are_isotropic(seed in any::<u64>(), n in 2..4usize, extra in 0..3usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = WeightedFrame::random_isotropic(n, n + extra, &mut rng).unwrap();
        prop_assert!(frames::verify_isotropic(&f, 1e-9).pass);
        let (_, gamma) = frames::gamma_table(&f);
        prop_assert!(gamma.pass);
    }
}
