//! Property tests for the quadric model, the extremal extensions and the hull.

use adscmc::boundary::{extremal_extensions, BoundaryData};
use adscmc::exact::Side;
use adscmc::hull::{ch_boundary_value, convex_hull_build, DEFAULT_PLANE_BUDGET};
use adscmc::quadric::{
    classify_pair, hyperboloid_point, lorentzian_distance, split_embed, split_lift, CausalClass, SplitChart, SplitCoord,
};
use adscmc::sampling::{geodesic_pair, random_isometry, GeodesicKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn point(rho: f64, angle: f64) -> Vec<f64> {
    hyperboloid_point(rho, &[angle.cos(), angle.sin()])
}

fn smooth_data(a: f64, b: f64, c: f64) -> BoundaryData {
    BoundaryData::from_fn(48, |phi| a * phi.sin() + b * (2.0 * phi).cos() + c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn split_round_trip(rho in 0.0..4.0f64, angle in -PI..PI, t in -3.1..3.1f64) {
        let chart = SplitChart::standard(2);
        let c = SplitCoord::new(point(rho, angle), t).unwrap();
        let y = split_embed(&c, &chart).unwrap();
        let back = split_lift(&y, &chart, 0.0).unwrap();
        prop_assert!((back.t - t).abs() < 1e-10);
        for (a, b) in back.x.iter().zip(&c.x) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn classification_is_symmetric_and_invariant(seed in any::<u64>(), kind in 0..3usize, antipodal in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = [GeodesicKind::Timelike, GeodesicKind::Null, GeodesicKind::Spacelike][kind];
        let pair = geodesic_pair(&mut rng, 2, kind, antipodal).unwrap();
        let g = random_isometry(&mut rng, 2).unwrap();
        let c = classify_pair(&pair.p, &pair.q);
        prop_assert_eq!(c, pair.expected);
        prop_assert_eq!(classify_pair(&pair.q, &pair.p), c);
        prop_assert_eq!(classify_pair(&g.apply_point(&pair.p), &g.apply_point(&pair.q)), c);
    }

    #[test]
    fn reverse_triangle_inequality(
        r1 in 0.0..0.6f64, a1 in -PI..PI, t1 in 0.2..1.2f64,
        r2 in 0.0..0.6f64, a2 in -PI..PI, t2 in 1.6..2.6f64,
    ) {
        let chart = SplitChart::standard(2);
        let embed = |x: Vec<f64>, t: f64| split_embed(&SplitCoord::new(x, t).unwrap(), &chart).unwrap();
        let p = embed(point(0.0, 0.0), 0.0);
        let q = embed(point(r1, a1), t1);
        let r = embed(point(r2, a2), t2);
        if [(&p, &q), (&q, &r), (&p, &r)].iter().all(|(a, b)| classify_pair(a, b) == CausalClass::TimeRelated) {
            let pq = lorentzian_distance(&p, &q).unwrap();
            let qr = lorentzian_distance(&q, &r).unwrap();
            let pr = lorentzian_distance(&p, &r).unwrap();
            if pq + qr < PI {
                prop_assert!(pr >= pq + qr - 1e-10, "{} < {} + {}", pr, pq, qr);
            }
        }
    }

    #[test]
    fn extensions_are_ordered_and_monotone(
        a in -0.4..0.4f64, b in -0.2..0.2f64, c in -1.0..1.0f64, lift in 0.0..0.5f64,
        rho in 0.0..3.0f64, angle in -PI..PI,
    ) {
        let f = smooth_data(a, b, c);
        let g = smooth_data(a, b, c + lift);
        let ef = extremal_extensions(&f).unwrap();
        let eg = extremal_extensions(&g).unwrap();
        let x = point(rho, angle);
        let (fm, fp) = ef.at(&x);
        let (gm, gp) = eg.at(&x);
        prop_assert!(fm <= fp + 1e-12);
        prop_assert!(gp >= fp - 1e-12 && gm >= fm - 1e-12);
        prop_assert!((gp - fp - lift).abs() < 1e-9);
        prop_assert!((gm - fm - lift).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn hull_lies_between_extensions(
        a in -0.4..0.4f64, b in -0.2..0.2f64,
        points in proptest::collection::vec((0.0..3.0f64, -PI..PI), 10),
    ) {
        let f = smooth_data(a, b, 0.0);
        let ext = extremal_extensions(&f).unwrap();
        let hull = convex_hull_build(&f, DEFAULT_PLANE_BUDGET).unwrap();
        for (rho, angle) in points {
            let x = point(rho, angle);
            let (um, up) = ext.at(&x);
            let lo = ch_boundary_value(&x, &hull, Side::Past).unwrap();
            let hi = ch_boundary_value(&x, &hull, Side::Future).unwrap();
            prop_assert!(um <= lo + 1e-7, "u- {} > hull {}", um, lo);
            prop_assert!(lo <= hi + 1e-9);
            prop_assert!(hi <= up + 1e-7, "hull {} > u+ {}", hi, up);
        }
    }
}
