//! Convex hull of the boundary curve in R^{2,2} and its fiber values.
//!
//! The boundary curve is the set of null rays `l(phi) = (cos phi, sin phi,
//! cos f(phi), sin f(phi))`. In the affine chart centred at the fiber time
//! `c = (max f + min f) / 2` each ray becomes the point
//! `(cos phi, sin phi, sin(f - c)) / cos(f - c)` of R^3, so the projective hull
//! is an ordinary 3D convex hull. Each facet `a . P <= b` pulls back to a
//! covector `w` with `<w, .> <= 0` on the hull.

use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::boundary::BoundaryData;
use crate::error::{AdsError, Result};
use crate::exact::Side;
use crate::quadric::{dot4, fiber_unit4, V4};

/// Default number of boundary points fed to the hull.
pub const DEFAULT_PLANE_BUDGET: usize = 512;
/// Certification tolerance on `<w, l_i>`.
pub const CERTIFY_TOL: f64 = 1e-8;

type P3 = [f64; 3];

fn sub(a: &P3, b: &P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: &P3, b: &P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: &P3, b: &P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &P3) -> f64 {
    dot(a, a).sqrt()
}

/// Triangular facets of the 3D convex hull, outward oriented, or `None`
/// when the points are coplanar within `1e-10` relative tolerance.
pub fn hull3d(pts: &[P3]) -> Option<Vec<[usize; 3]>> {
    let n = pts.len();
    if n < 4 {
        return None;
    }
    let scale = pts.iter().fold(1.0_f64, |m, p| m.max(p[0].abs()).max(p[1].abs()).max(p[2].abs()));
    let eps = 1e-12 * scale;
    let i0 = (0..n).min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0])).unwrap();
    let i1 = (0..n).max_by(|&a, &b| norm(&sub(&pts[a], &pts[i0])).total_cmp(&norm(&sub(&pts[b], &pts[i0])))).unwrap();
    let d01 = sub(&pts[i1], &pts[i0]);
    let i2 = (0..n)
        .max_by(|&a, &b| {
            norm(&cross(&d01, &sub(&pts[a], &pts[i0]))).total_cmp(&norm(&cross(&d01, &sub(&pts[b], &pts[i0]))))
        })
        .unwrap();
    let nrm = cross(&d01, &sub(&pts[i2], &pts[i0]));
    let nn = norm(&nrm);
    if nn <= 1e-14 * scale * scale {
        return None;
    }
    let height = |k: usize| dot(&nrm, &sub(&pts[k], &pts[i0])) / nn;
    let i3 = (0..n).max_by(|&a, &b| height(a).abs().total_cmp(&height(b).abs())).unwrap();
    if height(i3).abs() <= 1e-10 * scale {
        return None;
    }

    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut planes: Vec<(P3, f64)> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let centroid = {
        let mut c = [0.0; 3];
        for k in [i0, i1, i2, i3] {
            for d in 0..3 {
                c[d] += pts[k][d] / 4.0;
            }
        }
        c
    };
    let plane_of = |f: &[usize; 3]| {
        let nv = cross(&sub(&pts[f[1]], &pts[f[0]]), &sub(&pts[f[2]], &pts[f[0]]));
        let l = norm(&nv);
        let u = [nv[0] / l, nv[1] / l, nv[2] / l];
        (u, dot(&u, &pts[f[0]]))
    };
    let add_face = |f: [usize; 3],
                    faces: &mut Vec<[usize; 3]>,
                    planes: &mut Vec<(P3, f64)>,
                    alive: &mut Vec<bool>,
                    edges: &mut HashMap<(usize, usize), usize>| {
        let id = faces.len();
        faces.push(f);
        planes.push(plane_of(&f));
        alive.push(true);
        edges.insert((f[0], f[1]), id);
        edges.insert((f[1], f[2]), id);
        edges.insert((f[2], f[0]), id);
    };
    for tri in [[i0, i1, i2], [i0, i1, i3], [i1, i2, i3], [i2, i0, i3]] {
        let (u, b) = plane_of(&tri);
        let f = if dot(&u, &centroid) - b > 0.0 { [tri[0], tri[2], tri[1]] } else { tri };
        add_face(f, &mut faces, &mut planes, &mut alive, &mut edges);
    }

    for p in 0..n {
        if p == i0 || p == i1 || p == i2 || p == i3 {
            continue;
        }
        let visible: Vec<usize> =
            (0..faces.len()).filter(|&f| alive[f] && dot(&planes[f].0, &pts[p]) - planes[f].1 > eps).collect();
        if visible.is_empty() {
            continue;
        }
        let mut is_vis = vec![false; faces.len()];
        for &f in &visible {
            is_vis[f] = true;
        }
        let mut horizon = Vec::new();
        for &f in &visible {
            let t = faces[f];
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                match edges.get(&(b, a)) {
                    Some(&g) if is_vis[g] => {}
                    _ => horizon.push((a, b)),
                }
            }
        }
        for &f in &visible {
            alive[f] = false;
            let t = faces[f];
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                if edges.get(&e) == Some(&f) {
                    edges.remove(&e);
                }
            }
        }
        for (a, b) in horizon {
            add_face([a, b, p], &mut faces, &mut planes, &mut alive, &mut edges);
        }
    }
    Some(faces.into_iter().zip(alive).filter(|(_, a)| *a).map(|(f, _)| f).collect())
}

/// Convex hull of planar points: outward normal and a fan triangulation of
/// the 2D hull polygon (counter-clockwise about the normal).
fn planar_fan(pts: &[P3]) -> (P3, Vec<[usize; 3]>) {
    let n = pts.len();
    let i0 = 0;
    let i1 = (0..n).max_by(|&a, &b| norm(&sub(&pts[a], &pts[i0])).total_cmp(&norm(&sub(&pts[b], &pts[i0])))).unwrap();
    let d01 = sub(&pts[i1], &pts[i0]);
    let i2 = (0..n)
        .max_by(|&a, &b| {
            norm(&cross(&d01, &sub(&pts[a], &pts[i0]))).total_cmp(&norm(&cross(&d01, &sub(&pts[b], &pts[i0]))))
        })
        .unwrap();
    let mut nv = cross(&d01, &sub(&pts[i2], &pts[i0]));
    if nv[2] < 0.0 {
        nv = [-nv[0], -nv[1], -nv[2]];
    }
    let l = norm(&nv);
    let nu = [nv[0] / l, nv[1] / l, nv[2] / l];
    let lu = norm(&d01);
    let u = [d01[0] / lu, d01[1] / lu, d01[2] / lu];
    let v = cross(&nu, &u);
    let mut idx: Vec<usize> = (0..n).collect();
    let pr: Vec<(f64, f64)> = pts.iter().map(|p| (dot(p, &u), dot(p, &v))).collect();
    idx.sort_by(|&a, &b| pr[a].0.total_cmp(&pr[b].0).then(pr[a].1.total_cmp(&pr[b].1)));
    let turn = |o: usize, a: usize, b: usize| {
        (pr[a].0 - pr[o].0) * (pr[b].1 - pr[o].1) - (pr[a].1 - pr[o].1) * (pr[b].0 - pr[o].0)
    };
    let mut hull: Vec<usize> = Vec::new();
    for &i in idx.iter().chain(idx.iter().rev().skip(1)) {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], i) <= 0.0 {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    let fan = (1..hull.len() - 1).map(|k| [hull[0], hull[k], hull[k + 1]]).collect();
    (nu, fan)
}

/// A supporting facet of the hull.
#[derive(Debug, Clone, Serialize)]
pub struct Facet {
    /// Indices of the three ideal vertices.
    pub verts: [usize; 3],
    /// Unit outward normal in the affine chart.
    pub normal: [f64; 3],
    /// Offset `b` of `normal . P <= b`.
    pub offset: f64,
    /// Ambient covector, scaled to `|<w,w>| = 1`.
    pub w: V4,
    /// Facet of the future boundary component.
    pub upper: bool,
    #[serde(skip)]
    rho: f64,
    #[serde(skip)]
    beta: f64,
    #[serde(skip)]
    gram_inv: [[f64; 3]; 3],
}

/// Supporting half-spaces of the hull of the sampled boundary cone.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexHullModel {
    pub center: f64,
    pub ideal: Vec<V4>,
    pub facets: Vec<Facet>,
    pub planar: bool,
    #[serde(skip)]
    upper_edges: Vec<(usize, usize, f64)>,
    #[serde(skip)]
    lower_edges: Vec<(usize, usize, f64)>,
}

/// Samples the boundary curve at the data nodes plus a uniform grid so that
/// about `plane_budget` points enter the hull, and builds the hull.
pub fn convex_hull_build(f: &BoundaryData, plane_budget: usize) -> Result<ConvexHullModel> {
    if !f.is_admissible() {
        return Err(AdsError::NotAdmissible { oscillation: f.oscillation() });
    }
    let extra = plane_budget.saturating_sub(f.len());
    let mut phis: Vec<f64> = f.angles().to_vec();
    phis.extend((0..extra).map(|i| TAU * (i as f64 + 0.5) / extra as f64));
    phis.sort_by(|a, b| a.total_cmp(b));
    phis.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let vals: Vec<f64> = phis.iter().map(|p| f.eval(*p)).collect();
    ConvexHullModel::from_points(&phis, &vals)
}

impl ConvexHullModel {
    /// Hull of the null rays over the given boundary points.
    pub fn from_points(phis: &[f64], vals: &[f64]) -> Result<Self> {
        let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        if hi - lo >= PI {
            return Err(AdsError::NotAdmissible { oscillation: hi - lo });
        }
        let c = 0.5 * (hi + lo);
        let ideal: Vec<V4> = phis.iter().zip(vals).map(|(p, v)| [p.cos(), p.sin(), v.cos(), v.sin()]).collect();
        let pts: Vec<P3> = phis
            .iter()
            .zip(vals)
            .map(|(p, v)| {
                let k = (v - c).cos();
                [p.cos() / k, p.sin() / k, (v - c).tan()]
            })
            .collect();
        let mut raw: Vec<([usize; 3], P3)> = Vec::new();
        let planar;
        match hull3d(&pts) {
            Some(tris) => {
                planar = false;
                for t in tris {
                    let nv = cross(&sub(&pts[t[1]], &pts[t[0]]), &sub(&pts[t[2]], &pts[t[0]]));
                    let l = norm(&nv);
                    raw.push((t, [nv[0] / l, nv[1] / l, nv[2] / l]));
                }
            }
            None => {
                planar = true;
                let (nu, fan) = planar_fan(&pts);
                for t in fan {
                    raw.push((t, nu));
                    raw.push(([t[0], t[2], t[1]], [-nu[0], -nu[1], -nu[2]]));
                }
            }
        }
        let (sc, cc) = c.sin_cos();
        let mut facets = Vec::with_capacity(raw.len());
        for (verts, a) in raw {
            let b = dot(&a, &pts[verts[0]]);
            let mut w = [a[0], a[1], a[2] * sc + b * cc, -a[2] * cc + b * sc];
            let q = dot4(&w, &w).abs().sqrt();
            if q > 0.0 {
                w = [w[0] / q, w[1] / q, w[2] / q, w[3] / q];
            }
            let mut g = nalgebra::Matrix3::<f64>::zeros();
            for i in 0..3 {
                for j in 0..3 {
                    g[(i, j)] = dot4(&ideal[verts[i]], &ideal[verts[j]]);
                }
            }
            let gi = g.try_inverse().unwrap_or_else(nalgebra::Matrix3::zeros);
            let mut gram_inv = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    gram_inv[i][j] = gi[(i, j)];
                }
            }
            facets.push(Facet {
                verts,
                normal: a,
                offset: b,
                w,
                upper: a[2] > 0.0,
                rho: w[2].hypot(w[3]),
                beta: w[3].atan2(w[2]),
                gram_inv,
            });
        }
        let edges_of = |upper: bool| {
            let mut e: Vec<(usize, usize)> = Vec::new();
            for f in facets.iter().filter(|f| f.upper == upper) {
                let v = f.verts;
                for (a, b) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                    e.push((a.min(b), a.max(b)));
                }
            }
            e.sort_unstable();
            e.dedup();
            e.into_iter().map(|(a, b)| (a, b, -dot4(&ideal[a], &ideal[b]))).collect::<Vec<_>>()
        };
        let upper_edges = edges_of(true);
        let lower_edges = edges_of(false);
        Ok(Self { center: c, ideal, facets, planar, upper_edges, lower_edges })
    }

    /// Covectors `w` of the supporting half-spaces `{<w, .> <= 0}`.
    pub fn support_planes(&self) -> Vec<V4> {
        self.facets.iter().map(|f| f.w).collect()
    }

    /// Largest `<w, l_i>` over all planes and ideal samples.
    pub fn certify(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for f in &self.facets {
            for l in &self.ideal {
                worst = worst.max(dot4(&f.w, l));
            }
        }
        worst
    }

    /// True iff every ideal sample satisfies every half-space within `CERTIFY_TOL`.
    pub fn is_certified(&self) -> bool {
        self.certify() <= CERTIFY_TOL
    }

    fn intersect_arcs(&self, x: &[f64], slack: f64) -> Vec<(f64, f64)> {
        let c = self.center;
        let mut ivs = vec![(c - FRAC_PI_2, c + FRAC_PI_2)];
        for f in &self.facets {
            if f.rho == 0.0 {
                continue;
            }
            let a = f.w[0] * x[0] + f.w[1] * x[1];
            let ratio = a / (x[2] * f.rho);
            if ratio <= -1.0 {
                continue;
            }
            let g = if ratio >= 1.0 { 0.0 } else { ratio.acos() } + slack;
            if ratio > 1.0 && (ratio - 1.0) > slack * slack + 1e-15 {
                return Vec::new();
            }
            let k0 = ((c - f.beta) / TAU).round();
            let mut next = Vec::with_capacity(ivs.len() + 1);
            for (lo, hi) in &ivs {
                for k in [k0 - 1.0, k0, k0 + 1.0] {
                    let m = f.beta + TAU * k;
                    let (al, ah) = (m - g, m + g);
                    let (l2, h2) = (lo.max(al), hi.min(ah));
                    if l2 <= h2 {
                        next.push((l2, h2));
                    }
                }
            }
            ivs = next;
            if ivs.is_empty() {
                break;
            }
        }
        ivs
    }

    /// `(lower, upper)` fiber times where the fiber over `x` meets the hull.
    pub fn fiber_interval(&self, x: &[f64]) -> Result<(f64, f64)> {
        let mut ivs = self.intersect_arcs(x, 0.0);
        if ivs.is_empty() {
            ivs = self.intersect_arcs(x, 1e-9);
            if ivs.is_empty() {
                return Err(AdsError::EmptyFiber);
            }
            let lo = ivs.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
            let hi = ivs.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
            let m = 0.5 * (lo + hi);
            return Ok((m, m));
        }
        let lo = ivs.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
        let hi = ivs.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
        Ok((lo, hi))
    }

    /// Lorentzian distance from `p` to the future (`Side::Future`) or past
    /// boundary component of the hull, for `p` between that component and
    /// the opposite boundary of the invisible domain. Returns 0 when no
    /// cell is time-related to `p`.
    pub fn distance_to_boundary(&self, p: &V4, side: Side) -> f64 {
        let upper = side == Side::Future;
        let tp = fiber_unit4(p);
        let right_way = |q: &V4| {
            let s = dot4(q, &tp);
            if upper {
                s < 0.0
            } else {
                s > 0.0
            }
        };
        let mut best = 0.0_f64;
        for f in self.facets.iter().filter(|f| f.upper == upper) {
            let s = dot4(p, &f.w);
            if s > 0.0 || s <= -1.0 {
                continue;
            }
            let d = (-s).asin();
            if d <= best {
                continue;
            }
            let q = [p[0] + s * f.w[0], p[1] + s * f.w[1], p[2] + s * f.w[2], p[3] + s * f.w[3]];
            if s != 0.0 && !right_way(&q) {
                continue;
            }
            let rhs = [
                dot4(&q, &self.ideal[f.verts[0]]),
                dot4(&q, &self.ideal[f.verts[1]]),
                dot4(&q, &self.ideal[f.verts[2]]),
            ];
            let inside = (0..3).all(|i| {
                let ci = f.gram_inv[i][0] * rhs[0] + f.gram_inv[i][1] * rhs[1] + f.gram_inv[i][2] * rhs[2];
                ci >= -1e-12
            });
            if inside {
                best = d;
            }
        }
        let edges = if upper { &self.upper_edges } else { &self.lower_edges };
        for &(i, j, g) in edges {
            let a = dot4(p, &self.ideal[i]);
            let b = dot4(p, &self.ideal[j]);
            if a >= 0.0 || b >= 0.0 || g <= 0.0 {
                continue;
            }
            let v = (2.0 * a * b / g).sqrt();
            if v >= 1.0 {
                continue;
            }
            let d = v.acos();
            if d <= best {
                continue;
            }
            let ca = (b / (2.0 * g * a)).sqrt();
            let cb = (a / (2.0 * g * b)).sqrt();
            let (li, lj) = (&self.ideal[i], &self.ideal[j]);
            let q =
                [ca * li[0] + cb * lj[0], ca * li[1] + cb * lj[1], ca * li[2] + cb * lj[2], ca * li[3] + cb * lj[3]];
            if right_way(&q) {
                best = d;
            }
        }
        best
    }
}

/// Fiber value of the future (`upper`) or past boundary of the hull over `x`.
pub fn ch_boundary_value(x: &[f64], hull: &ConvexHullModel, side: Side) -> Result<f64> {
    let (lo, hi) = hull.fiber_interval(x)?;
    Ok(match side {
        Side::Future => hi,
        Side::Past => lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadric::{hyperboloid_point, psi2};

    #[test]
    fn zero_data_hull_is_the_plane() {
        let f = BoundaryData::zero(32).unwrap();
        let h = convex_hull_build(&f, 64).unwrap();
        assert!(h.planar);
        assert!(h.is_certified());
        let up = h.facets.iter().find(|f| f.upper).unwrap().w;
        assert!((up[3] + 1.0).abs() < 1e-12 && up[0].abs() + up[1].abs() + up[2].abs() < 1e-12);
        for rho in [0.0, 1.0, 2.5] {
            let x = hyperboloid_point(rho, &[0.6, -0.8]);
            let (lo, hi) = h.fiber_interval(&x).unwrap();
            assert!(lo.abs() < 1e-12 && hi.abs() < 1e-12, "{lo} {hi}");
        }
    }

    #[test]
    fn cosine_hull_has_interior() {
        let f = BoundaryData::cosine(0.5, 64).unwrap();
        let h = convex_hull_build(&f, 256).unwrap();
        assert!(!h.planar);
        assert!(h.is_certified(), "{}", h.certify());
        let (lo, hi) = h.fiber_interval(&[0.0, 0.0, 1.0]).unwrap();
        assert!(hi - lo > 1e-2, "{lo} {hi}");
    }

    #[test]
    fn hull3d_of_cube_has_twelve_faces() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push([(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        pts.push([0.5, 0.5, 0.5]);
        let f = hull3d(&pts).unwrap();
        assert_eq!(f.len(), 12);
    }

    #[test]
    fn distance_to_plane_hull_is_fiber_time() {
        let f = BoundaryData::zero(32).unwrap();
        let h = convex_hull_build(&f, 64).unwrap();
        let p = psi2(&[0.0, 0.0, 1.0], -0.4);
        assert!((h.distance_to_boundary(&p, Side::Future) - 0.4).abs() < 1e-12);
        let q = psi2(&[0.0, 0.0, 1.0], 0.3);
        assert!((h.distance_to_boundary(&q, Side::Past) - 0.3).abs() < 1e-12);
    }
}
