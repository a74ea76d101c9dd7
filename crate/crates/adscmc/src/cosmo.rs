//! Cosmological times of the invisible domain and the barrier level sets.
//!
//! `tau_past(p)` is the supremum of the Lorentzian distance from `p` to the
//! past boundary `gr u-` of the invisible domain, and `tau_future` is the
//! same for `gr u+`. [`TauEvaluator`] computes them directly by a grid scan
//! over the boundary graph followed by a local compass search.
//!
//! Between `gr u-` and the future boundary of the convex hull,
//! `tau_past = pi/2 - dist(p, upper hull boundary)`, and symmetrically for
//! `tau_future`. The hull boundary is pleated, so that distance is a max
//! over facets and bending lines in closed form. The barriers use this fast
//! path.

use std::f64::consts::FRAC_PI_2;

use crate::boundary::{hemi_from_hyperboloid, hemi_from_polar, sphere_dist, BoundaryData, ExtremalPair, Hemi};
use crate::error::{AdsError, Result};
use crate::exact::Side;
use crate::hull::ConvexHullModel;
use crate::quadric::{psi2, SplitCoord};

/// Polar rows of the scan grid.
pub const TAU_GRID_ALPHA: usize = 32;
/// Azimuthal columns of the scan grid.
pub const TAU_GRID_PHI: usize = 128;
/// Smallest compass step of the local refinement.
const COMPASS_MIN_STEP: f64 = 1e-6;
/// Iteration cap of the local refinement.
const COMPASS_MAX_ITERS: usize = 400;
/// Improvement of `cos` below which a compass move does not count.
const COMPASS_MIN_GAIN: f64 = 1e-14;
/// Bracket width of the barrier root find.
pub const BARRIER_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
struct GridPoint {
    s: Hemi,
    minus: f64,
    plus: f64,
}

/// Direct evaluator of the cosmological times.
#[derive(Debug, Clone)]
pub struct TauEvaluator {
    ext: ExtremalPair,
    grid: Vec<GridPoint>,
}

/// Result of a cosmological-time evaluation with its retraction point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSample {
    pub value: f64,
    /// Hemisphere point of the maximizing boundary point.
    pub retraction: Hemi,
}

impl TauEvaluator {
    pub fn new(ext: ExtremalPair) -> Self {
        let mut grid = vec![];
        for i in 0..TAU_GRID_ALPHA {
            let alpha = FRAC_PI_2 * i as f64 / TAU_GRID_ALPHA as f64;
            let cols = if i == 0 { 1 } else { TAU_GRID_PHI };
            for j in 0..cols {
                let s = hemi_from_polar(alpha, std::f64::consts::TAU * j as f64 / cols as f64);
                grid.push(GridPoint { s, minus: ext.minus(&s), plus: ext.plus(&s) });
            }
        }
        Self { ext, grid }
    }

    pub fn extensions(&self) -> &ExtremalPair {
        &self.ext
    }

    /// `cos` of the Lorentzian distance from `(s_p, t)` to the boundary-graph
    /// point over `q` at fiber time `u_q`, or `None` when the pair is not
    /// time-related with `q` on the requested side.
    fn cos_dist(sp: &Hemi, t: f64, q: &Hemi, uq: f64, which: Side) -> Option<f64> {
        let dt = match which {
            Side::Past => t - uq,
            Side::Future => uq - t,
        };
        let d = sphere_dist(sp, q);
        if !(dt > d && dt < std::f64::consts::PI) {
            return None;
        }
        let v = 1.0 + (dt.cos() - d.cos()) / (sp[2] * q[2]);
        if v > -1.0 {
            Some(v.min(1.0))
        } else {
            None
        }
    }

    fn graph_value(&self, q: &Hemi, which: Side) -> f64 {
        match which {
            Side::Past => self.ext.minus(q),
            Side::Future => self.ext.plus(q),
        }
    }

    /// `tau_past` (`Side::Past`) or `tau_future` at split coordinates `(x, t)`.
    pub fn tau(&self, x: &[f64], t: f64, which: Side) -> Result<TauSample> {
        let sp = hemi_from_hyperboloid(x);
        let (lo, hi) = (self.ext.minus(&sp), self.ext.plus(&sp));
        if !(t > lo && t < hi) {
            return Err(AdsError::OutsideDomain(format!("t = {t} not in ({lo}, {hi})")));
        }
        let mut best_q = sp;
        let mut best = Self::cos_dist(&sp, t, &sp, if which == Side::Past { lo } else { hi }, which).unwrap_or(1.0);
        for g in &self.grid {
            let u = if which == Side::Past { g.minus } else { g.plus };
            if let Some(v) = Self::cos_dist(&sp, t, &g.s, u, which) {
                if v < best {
                    best = v;
                    best_q = g.s;
                }
            }
        }
        let mut step = FRAC_PI_2 / TAU_GRID_ALPHA as f64;
        let dirs: Vec<(f64, f64)> = (0..12).map(|k| (k as f64 * std::f64::consts::TAU / 12.0).sin_cos()).collect();
        let mut iters = 0;
        while step > COMPASS_MIN_STEP && iters < COMPASS_MAX_ITERS {
            iters += 1;
            let q = best_q;
            let e1 = {
                let r = (q[0] * q[0] + q[1] * q[1]).sqrt();
                if r > 1e-12 {
                    [q[0] * q[2] / r, q[1] * q[2] / r, -r]
                } else {
                    [1.0, 0.0, 0.0]
                }
            };
            let e2 = [q[1] * e1[2] - q[2] * e1[1], q[2] * e1[0] - q[0] * e1[2], q[0] * e1[1] - q[1] * e1[0]];
            let (sh, ch) = step.sin_cos();
            let mut moved = false;
            for (s, c) in &dirs {
                let cand = [
                    ch * q[0] + sh * (c * e1[0] + s * e2[0]),
                    ch * q[1] + sh * (c * e1[1] + s * e2[1]),
                    ch * q[2] + sh * (c * e1[2] + s * e2[2]),
                ];
                if cand[2] <= 1e-9 {
                    continue;
                }
                let u = self.graph_value(&cand, which);
                if let Some(v) = Self::cos_dist(&sp, t, &cand, u, which) {
                    if v < best - COMPASS_MIN_GAIN {
                        best = v;
                        best_q = cand;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        Ok(TauSample { value: best.clamp(-1.0, 1.0).acos(), retraction: best_q })
    }
}

/// `tau_past` or `tau_future` at `p`, building a one-off evaluator.
pub fn tau_eval(p: &SplitCoord, which: Side, ext: &ExtremalPair) -> Result<f64> {
    Ok(TauEvaluator::new(ext.clone()).tau(&p.x, p.t, which)?.value)
}

/// `tau_past` (`Side::Past`) or `tau_future` from the hull, valid between
/// the corresponding boundary of the invisible domain and the opposite hull
/// boundary.
pub fn tau_from_hull(hull: &ConvexHullModel, x: &[f64], t: f64, which: Side) -> f64 {
    let p = psi2(&[x[0], x[1], x[2]], t);
    let target = match which {
        Side::Past => Side::Future,
        Side::Future => Side::Past,
    };
    FRAC_PI_2 - hull.distance_to_boundary(&p, target)
}

/// Extensions and hull of one boundary datum, bundled for barrier queries.
#[derive(Debug, Clone)]
pub struct BarrierField {
    pub ext: ExtremalPair,
    pub hull: ConvexHullModel,
}

impl BarrierField {
    pub fn new(f: &BoundaryData, plane_budget: usize) -> Result<Self> {
        Ok(Self {
            ext: crate::boundary::extremal_extensions(f)?,
            hull: crate::hull::convex_hull_build(f, plane_budget)?,
        })
    }

    /// See [`barrier_graph`].
    pub fn value(&self, theta: f64, side: Side, x: &[f64]) -> Result<f64> {
        barrier_graph(theta, side, &self.hull, &self.ext, x)
    }
}

/// Fiber value over `x` of the barrier at distance `theta` from the hull:
/// `Side::Past` gives `W-` (distance `theta` to the past of the future hull
/// boundary, the level set `tau_past = pi/2 - theta`), `Side::Future` gives `W+`.
pub fn barrier_graph(theta: f64, side: Side, hull: &ConvexHullModel, ext: &ExtremalPair, x: &[f64]) -> Result<f64> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(AdsError::InvalidParameter(format!("theta = {theta} is outside (0, pi/2)")));
    }
    let (lower, upper) = hull.fiber_interval(x)?;
    let (um, up) = ext.at(x);
    let xs = [x[0], x[1], x[2]];
    let (a, b, target) = match side {
        Side::Past => (um, upper, Side::Future),
        Side::Future => (lower, up, Side::Past),
    };
    // h > 0 near `a` and h <= 0 near `b` on both sides.
    let sign = match side {
        Side::Past => 1.0,
        Side::Future => -1.0,
    };
    let h = |t: f64| sign * (hull.distance_to_boundary(&psi2(&xs, t), target) - theta);
    Ok(bracketed_root(h, a, b))
}

/// Root of `h` on `[a, b]` for `h` positive near `a` and nonpositive near `b`.
/// Bisection until both signs are seen at interior points, then Illinois
/// steps, to width `BARRIER_TOL`.
fn bracketed_root(h: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let (mut fa, mut fb) = (None, None);
    // +1 after moving `a`, -1 after moving `b`, 0 while bisecting.
    let mut prev = 0;
    let mut iters = 0;
    while b - a > BARRIER_TOL && iters < 200 {
        iters += 1;
        let c = match (fa, fb) {
            (Some(ya), Some(yb)) => {
                let c = b - yb * (b - a) / (yb - ya);
                if c > a && c < b {
                    c
                } else {
                    0.5 * (a + b)
                }
            }
            _ => 0.5 * (a + b),
        };
        let both = fa.is_some() && fb.is_some();
        let y = h(c);
        if y > 0.0 {
            a = c;
            fa = Some(y);
            if both && prev == 1 {
                fb = fb.map(|v: f64| 0.5 * v);
            }
            prev = 1;
        } else {
            if y == 0.0 {
                return c;
            }
            b = c;
            fb = Some(y);
            if both && prev == -1 {
                fa = fa.map(|v: f64| 0.5 * v);
            }
            prev = -1;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::extremal_extensions;
    use crate::exact::equidistant_graph;
    use crate::quadric::hyperboloid_point;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn tau_of_zero_data_at_origin() {
        let ext = extremal_extensions(&BoundaryData::zero(16).unwrap()).unwrap();
        let ev = TauEvaluator::new(ext);
        let x0 = [0.0, 0.0, 1.0];
        let tp = ev.tau(&x0, 0.0, Side::Past).unwrap().value;
        assert!((tp - FRAC_PI_2).abs() < 1e-9, "{tp}");
        let tf = ev.tau(&x0, 0.3, Side::Future).unwrap().value;
        assert!((tf - (FRAC_PI_2 - 0.3)).abs() < 1e-9, "{tf}");
        let near = ev.tau(&x0, -FRAC_PI_2 + 1e-4, Side::Past).unwrap().value;
        assert!(near < 2e-4);
        assert!(ev.tau(&x0, FRAC_PI_2, Side::Past).is_err());
    }

    #[test]
    fn barrier_of_zero_data_is_equidistant() {
        let f = BoundaryData::zero(32).unwrap();
        let field = BarrierField::new(&f, 64).unwrap();
        for rho in [0.0, 1.0, 2.0] {
            let x = hyperboloid_point(rho, &[0.0, 1.0]);
            let w = field.value(FRAC_PI_4, Side::Past, &x).unwrap();
            let e = equidistant_graph(FRAC_PI_4, Side::Past, &x).unwrap();
            assert!((w - e).abs() < 1e-9, "{rho}: {w} vs {e}");
            let wf = field.value(0.3, Side::Future, &x).unwrap();
            let ef = equidistant_graph(0.3, Side::Future, &x).unwrap();
            assert!((wf - ef).abs() < 1e-9);
        }
        assert!(field.value(0.0, Side::Past, &[0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn hull_tau_matches_direct_tau() {
        let f = BoundaryData::cosine(0.5, 64).unwrap();
        let field = BarrierField::new(&f, 512).unwrap();
        let ev = TauEvaluator::new(field.ext.clone());
        for (rho, phi, frac) in [(0.0, 0.0, 0.3), (0.8, 1.0, 0.5), (1.5, 3.0, 0.2), (2.0, 4.5, 0.7)] {
            let x = hyperboloid_point(rho, &[f64::cos(phi), f64::sin(phi)]);
            let (um, _) = field.ext.at(&x);
            let (_, upper) = field.hull.fiber_interval(&x).unwrap();
            let t = um + frac * (upper - um);
            let direct = ev.tau(&x, t, Side::Past).unwrap().value;
            let hull = tau_from_hull(&field.hull, &x, t, Side::Past);
            assert!((direct - hull).abs() < 5e-5, "rho {rho}: direct {direct} hull {hull}");
        }
    }
}
