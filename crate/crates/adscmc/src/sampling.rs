//! Random isometries and geodesic point pairs with known causal relation,
//! used by the randomized property suites and `classify --random`.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::Result;
use crate::quadric::{exp_map, AmbientVector, CausalClass, Isometry, QuadricPoint, TangentVector};

/// Largest rapidity of a single random boost.
pub const MAX_RAPIDITY: f64 = 1.0;
/// Distance kept between a sampled parameter and the degenerate values.
pub const PARAM_MARGIN: f64 = 1e-2;

/// Type of the geodesic joining a sampled pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeodesicKind {
    Timelike,
    Null,
    Spacelike,
}

/// Two points on a geodesic through `p`, possibly with `q` replaced by its
/// antipode, and the relation they must be classified as.
#[derive(Debug, Clone)]
pub struct GeodesicPair {
    pub p: QuadricPoint,
    pub q: QuadricPoint,
    pub kind: GeodesicKind,
    /// Geodesic parameter of `q` (before any antipodal flip).
    pub param: f64,
    pub antipodal: bool,
    pub expected: CausalClass,
    /// Lorentzian distance for time-related pairs.
    pub expected_distance: Option<f64>,
}

/// Composition of random rotations of both sign blocks and random boosts.
pub fn random_isometry<R: Rng>(rng: &mut R, n: usize) -> Result<Isometry> {
    let mut g = Isometry::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            g = g.compose(&Isometry::rotation(n, i, j, rng.gen_range(-PI..PI))?);
        }
    }
    g = g.compose(&Isometry::rotation(n, n, n + 1, rng.gen_range(-PI..PI))?);
    for i in 0..n {
        let j = n + rng.gen_range(0..2);
        g = g.compose(&Isometry::boost(n, i, j, rng.gen_range(-MAX_RAPIDITY..MAX_RAPIDITY))?);
    }
    Ok(g)
}

fn random_unit_spacelike<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if l > 0.1 && l <= 1.0 {
            return v.iter().map(|x| x / l).collect();
        }
    }
}

/// A random pair on a geodesic of the given kind in `AdS^{n+1}`.
pub fn geodesic_pair<R: Rng>(rng: &mut R, n: usize, kind: GeodesicKind, antipodal: bool) -> Result<GeodesicPair> {
    let dim = n + 2;
    let mut o = vec![0.0; dim];
    o[n] = 1.0;
    let s = random_unit_spacelike(rng, n);
    let b: f64 = rng.gen_range(-1.0..1.0);
    let (time, space) = match kind {
        GeodesicKind::Timelike => (b.cosh(), b.sinh()),
        GeodesicKind::Null => (1.0, 1.0),
        GeodesicKind::Spacelike => (b.sinh(), b.cosh()),
    };
    let mut d = vec![0.0; dim];
    d[n + 1] = time;
    for i in 0..n {
        d[i] = space * s[i];
    }
    let param = match kind {
        GeodesicKind::Timelike => rng.gen_range(PARAM_MARGIN..PI - PARAM_MARGIN),
        _ => rng.gen_range(PARAM_MARGIN..3.0),
    };
    let base = QuadricPoint::new(AmbientVector(o))?;
    let end = exp_map(&TangentVector::new(base.clone(), AmbientVector(d))?, param)?;
    let end = if antipodal { end.antipode() } else { end };
    let g = random_isometry(rng, n)?;
    let (expected, expected_distance) = match (kind, antipodal) {
        (GeodesicKind::Timelike, false) => (CausalClass::TimeRelated, Some(param)),
        (GeodesicKind::Timelike, true) => (CausalClass::TimeRelated, Some(PI - param)),
        (GeodesicKind::Null, false) => (CausalClass::LightRelated, None),
        (GeodesicKind::Null, true) => (CausalClass::AntipodalLight, None),
        (GeodesicKind::Spacelike, false) => (CausalClass::SpaceRelated, None),
        (GeodesicKind::Spacelike, true) => (CausalClass::AntipodalSpace, None),
    };
    Ok(GeodesicPair {
        p: g.apply_point(&base),
        q: g.apply_point(&end),
        kind,
        param,
        antipodal,
        expected,
        expected_distance,
    })
}

/// A pair of uniformly random kind, antipodal with probability 1/4.
pub fn random_geodesic_pair<R: Rng>(rng: &mut R, n: usize) -> Result<GeodesicPair> {
    let kind = match rng.gen_range(0..3) {
        0 => GeodesicKind::Timelike,
        1 => GeodesicKind::Null,
        _ => GeodesicKind::Spacelike,
    };
    let antipodal = rng.gen_bool(0.25);
    geodesic_pair(rng, n, kind, antipodal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadric::{classify_pair, lorentzian_distance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn isometries_preserve_the_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..5 {
            assert!(random_isometry(&mut rng, n).unwrap().defect() < 1e-10);
        }
    }

    #[test]
    fn sampled_pairs_classify_as_constructed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..2000 {
            let pair = random_geodesic_pair(&mut rng, 2).unwrap();
            assert_eq!(classify_pair(&pair.p, &pair.q), pair.expected, "{pair:?}");
            if let Some(d) = pair.expected_distance {
                assert!((lorentzian_distance(&pair.p, &pair.q).unwrap() - d).abs() < 1e-9);
            }
        }
    }
}
