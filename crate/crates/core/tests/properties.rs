use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use jl_lsh::families::{FamilyKind, MinhashFamily};
use jl_lsh::projections::{make_feature_hashing, make_gaussian, make_sign_dense, Projection};
use jl_lsh::seed::Seed;
use jl_lsh::vector::{distance, DistanceKind, RealVector};

fn vec_of(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, dim)
}

fn nonzero(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    vec_of(dim).prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projections_are_linear(x in vec_of(24), y in vec_of(24), a in -3.0f64..3.0, seed in any::<u64>()) {
        let combo: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| a * xi + yi).collect();
        let (x, y, combo) = (RealVector::new(x).unwrap(), RealVector::new(y).unwrap(), RealVector::new(combo).unwrap());
        let check = |p: &dyn Fn(&RealVector) -> RealVector| {
            let (px, py, pc) = (p(&x), p(&y), p(&combo));
            let expect: Vec<f64> = px.as_slice().iter().zip(py.as_slice()).map(|(u, v)| a * u + v).collect();
            close(pc.as_slice(), &expect, 1e-9)
        };
        let g = make_gaussian(24, 10, Seed(seed)).unwrap();
        let s = make_sign_dense(24, 10, Seed(seed)).unwrap();
        let f = make_feature_hashing(24, 10, 3, Seed(seed)).unwrap();
        prop_assert!(check(&|v| g.apply(v).unwrap()));
        prop_assert!(check(&|v| s.apply(v).unwrap()));
        prop_assert!(check(&|v| f.apply(v).unwrap()));
    }

    #[test]
    fn distances_are_symmetric(x in nonzero(12), y in nonzero(12)) {
        let (x, y) = (RealVector::new(x).unwrap(), RealVector::new(y).unwrap());
        let d1 = distance(&x, &y, DistanceKind::EuclideanRaw).unwrap();
        prop_assert_eq!(d1, distance(&y, &x, DistanceKind::EuclideanRaw).unwrap());
        let (x, y) = (x.normalize().unwrap(), y.normalize().unwrap());
        for kind in [DistanceKind::Angular, DistanceKind::EuclideanRaw, DistanceKind::EuclideanNormalizedUnitSphere] {
            let d1 = distance(&x, &y, kind).unwrap();
            let d2 = distance(&y, &x, kind).unwrap();
            prop_assert!((d1 - d2).abs() < 1e-12);
            prop_assert!(d1 >= 0.0);
        }
    }

    #[test]
    fn chord_is_twice_sine_of_half_angle(x in nonzero(12), y in nonzero(12)) {
        let x = RealVector::new(x).unwrap().normalize().unwrap();
        let y = RealVector::new(y).unwrap().normalize().unwrap();
        let alpha = distance(&x, &y, DistanceKind::Angular).unwrap();
        let chord = distance(&x, &y, DistanceKind::EuclideanRaw).unwrap();
        prop_assert!((chord - 2.0 * (alpha / 2.0).sin()).abs() < 1e-9);
        let kind = DistanceKind::EuclideanRaw;
        prop_assert!((kind.to_angle(chord).unwrap() - alpha).abs() < 1e-6);
    }

    #[test]
    fn hashes_ignore_positive_scaling(x in nonzero(16), c in 0.01f64..100.0, seed in any::<u64>(), which in 0usize..6) {
        let kind = FamilyKind::table1_defaults()[which];
        let family = MinhashFamily::new(kind, 16, Seed(seed)).unwrap();
        let x = RealVector::new(x).unwrap();
        let scaled = x.scale(c).unwrap();
        for i in 0..4 {
            prop_assert_eq!(family.hash(i, &x).unwrap(), family.hash(i, &scaled).unwrap());
        }
    }
}

#[test]
fn feature_hashing_targets_are_uniform() {
    // One input coordinate per draw; each draw is a fresh seeded mapping.
    let cols = 16;
    let draws = 100_000u64;
    let mut counts = vec![0u64; cols];
    let mut negative = 0u64;
    for s in 0..draws / 100 {
        let m = make_feature_hashing(100, cols, 1, Seed(s)).unwrap();
        for row in 0..100 {
            let (target, neg) = m.entry(row, 0);
            counts[target] += 1;
            negative += u64::from(neg);
        }
    }
    let expected = draws as f64 / cols as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((cols - 1) as f64).unwrap().cdf(stat);
    assert!(p > 0.001, "chi-square {stat:.2}, p = {p:.5}, counts {counts:?}");
    let sign_z = (negative as f64 - draws as f64 / 2.0) / (draws as f64 / 4.0).sqrt();
    assert!(sign_z.abs() < 4.0, "sign balance z = {sign_z:.2}");
}
