//! Admissible boundary data on S^1 and the extremal 1-Lipschitz extensions.
//!
//! Points of H^2 are handled in the hemisphere model: `x` maps to the unit
//! vector `s = (x_1, x_2, 1) / x_3` of the open upper hemisphere, so that
//! `cos(alpha) = 1 / cosh(rho)` for the polar angle `alpha`.

use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{AdsError, Result};
use crate::quadric::SplitCoord;

/// Slack on the pairwise Lipschitz ratio.
pub const LIPSCHITZ_TOL: f64 = 1e-8;
/// Margin below `pi` on the oscillation of admissible data.
pub const ADMISSIBLE_MARGIN: f64 = 1e-6;
/// Strictness tolerance of the invisible-domain test.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Minimum number of samples.
pub const MIN_SAMPLES: usize = 8;
/// Uniform angles scanned by the extension evaluators besides the sample nodes.
pub const EXTENSION_SCAN: usize = 256;

/// Unit vector of the closed upper hemisphere.
pub type Hemi = [f64; 3];

/// Hemisphere point of `x` in H^2 (hyperboloid coordinates).
#[inline]
pub fn hemi_from_hyperboloid(x: &[f64]) -> Hemi {
    [x[0] / x[2], x[1] / x[2], 1.0 / x[2]]
}

/// Hemisphere point with polar angle `alpha` and azimuth `phi`.
#[inline]
pub fn hemi_from_polar(alpha: f64, phi: f64) -> Hemi {
    let (sa, ca) = alpha.sin_cos();
    [sa * phi.cos(), sa * phi.sin(), ca]
}

/// Hyperboloid point over an interior hemisphere point.
#[inline]
pub fn hyperboloid_from_hemi(s: &Hemi) -> [f64; 3] {
    [s[0] / s[2], s[1] / s[2], 1.0 / s[2]]
}

/// Spherical distance between unit vectors.
#[inline]
pub fn sphere_dist(a: &Hemi, b: &Hemi) -> f64 {
    let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let sn = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    sn.atan2(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
}

/// Spherical distance from `s` to the equator point at angle `(cos, sin)`.
#[inline]
pub fn equator_dist(s: &Hemi, cp: f64, sp: f64) -> f64 {
    let t = s[0] * sp - s[1] * cp;
    (s[2] * s[2] + t * t).sqrt().atan2(s[0] * cp + s[1] * sp)
}

/// Angular distance on S^1.
#[inline]
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// A 1-Lipschitz function on S^1 sampled at sorted angles and interpolated
/// piecewise linearly in the angle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryData {
    angles: Vec<f64>,
    values: Vec<f64>,
}

impl BoundaryData {
    /// Validates sample count, finiteness, distinct angles and the pairwise
    /// Lipschitz ratio `|f_i - f_j| / d(xi_i, xi_j) <= 1 + 1e-8`.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(AdsError::TooFewSamples(samples.len()));
        }
        if samples.iter().any(|(a, v)| !a.is_finite() || !v.is_finite()) {
            return Err(AdsError::InvalidParameter("non-finite boundary sample".into()));
        }
        let mut s: Vec<(f64, f64)> = samples.into_iter().map(|(a, v)| (a.rem_euclid(TAU), v)).collect();
        s.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in s.windows(2) {
            if w[1].0 - w[0].0 <= 1e-14 {
                return Err(AdsError::InvalidParameter(format!("duplicate boundary angle {}", w[0].0)));
            }
        }
        let (angles, values): (Vec<f64>, Vec<f64>) = s.into_iter().unzip();
        let data = Self { angles, values };
        data.check_lipschitz()?;
        Ok(data)
    }

    /// Samples `f` at `count` equally spaced angles.
    pub fn from_fn(count: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            (0..count)
                .map(|i| {
                    let a = TAU * i as f64 / count as f64;
                    (a, f(a))
                })
                .collect(),
        )
    }

    /// `f = 0`: the boundary of the totally geodesic plane.
    pub fn zero(count: usize) -> Result<Self> {
        Self::from_fn(count, |_| 0.0)
    }

    /// `f(phi) = amplitude cos(phi)`.
    pub fn cosine(amplitude: f64, count: usize) -> Result<Self> {
        Self::from_fn(count, |a| amplitude * a.cos())
    }

    /// `f(phi) = -arcsin|sin(phi)|`: boundary of the maximal cylinder in the
    /// standard frame.
    pub fn tent(count: usize) -> Result<Self> {
        Self::from_fn(count, |a| -(a.sin().abs()).asin())
    }

    fn check_lipschitz(&self) -> Result<()> {
        let n = self.angles.len();
        for i in 0..n {
            for j in i + 1..n {
                let d = circle_dist(self.angles[i], self.angles[j]);
                let ratio = (self.values[i] - self.values[j]).abs() / d;
                if ratio > 1.0 + LIPSCHITZ_TOL {
                    return Err(AdsError::LipschitzViolation { ratio, i, j });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.angles.iter().copied().zip(self.values.iter().copied())
    }

    /// Index `i` of the segment `[angle_i, angle_{i+1}]` (cyclic) containing `phi`.
    fn segment(&self, phi: f64) -> usize {
        let n = self.angles.len();
        let p = self.angles.partition_point(|a| *a <= phi);
        if p == 0 {
            n - 1
        } else {
            p - 1
        }
    }

    /// Piecewise-linear periodic interpolation.
    pub fn eval(&self, phi: f64) -> f64 {
        let phi = phi.rem_euclid(TAU);
        let n = self.angles.len();
        let i = self.segment(phi);
        let j = (i + 1) % n;
        let a0 = self.angles[i];
        let mut a1 = self.angles[j];
        if a1 <= a0 {
            a1 += TAU;
        }
        let mut p = phi;
        if p < a0 {
            p += TAU;
        }
        let w = (p - a0) / (a1 - a0);
        (1.0 - w) * self.values[i] + w * self.values[j]
    }

    /// `max f - min f`.
    pub fn oscillation(&self) -> f64 {
        let (lo, hi) = self.range();
        hi - lo
    }

    /// `(min f, max f)`.
    pub fn range(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
    }

    /// True iff `osc(f) < pi - 1e-6`.
    pub fn is_admissible(&self) -> bool {
        self.oscillation() < PI - ADMISSIBLE_MARGIN
    }

    /// `f + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self { angles: self.angles.clone(), values: self.values.iter().map(|v| v + c).collect() }
    }

    /// `-f`, the data seen with reversed time orientation.
    pub fn negated(&self) -> Self {
        Self { angles: self.angles.clone(), values: self.values.iter().map(|v| -v).collect() }
    }

    /// Largest Lipschitz ratio between any two samples.
    pub fn lipschitz_ratio(&self) -> f64 {
        let n = self.angles.len();
        let mut m = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                m = m.max((self.values[i] - self.values[j]).abs() / circle_dist(self.angles[i], self.angles[j]));
            }
        }
        m
    }
}

/// `oscillation(f)`.
pub fn oscillation(f: &BoundaryData) -> f64 {
    f.oscillation()
}

/// `is_admissible(f)`.
pub fn is_admissible(f: &BoundaryData) -> bool {
    f.is_admissible()
}

/// Admissibility report emitted by the `extend` command.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub samples: usize,
    pub oscillation: f64,
    pub lipschitz_ratio: f64,
    pub admissible: bool,
}

impl AdmissibilityReport {
    pub fn of(f: &BoundaryData) -> Self {
        Self {
            samples: f.len(),
            oscillation: f.oscillation(),
            lipschitz_ratio: f.lipschitz_ratio(),
            admissible: f.is_admissible(),
        }
    }
}

/// The McShane extensions `u+(s) = min (f + d)` and `u-(s) = max (f - d)`.
#[derive(Debug, Clone)]
pub struct ExtremalPair {
    data: BoundaryData,
    scan_phi: Vec<f64>,
    scan_cos: Vec<f64>,
    scan_sin: Vec<f64>,
    scan_f: Vec<f64>,
}

/// Builds the extremal pair of admissible data.
pub fn extremal_extensions(f: &BoundaryData) -> Result<ExtremalPair> {
    if !f.is_admissible() {
        return Err(AdsError::NotAdmissible { oscillation: f.oscillation() });
    }
    Ok(ExtremalPair::new(f.clone()))
}

const GOLDEN_ITERS: usize = 60;

impl ExtremalPair {
    fn new(data: BoundaryData) -> Self {
        let mut phi: Vec<f64> = (0..EXTENSION_SCAN).map(|i| TAU * i as f64 / EXTENSION_SCAN as f64).collect();
        phi.extend_from_slice(data.angles());
        phi.sort_by(|a, b| a.total_cmp(b));
        phi.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        let scan_cos = phi.iter().map(|p| p.cos()).collect();
        let scan_sin = phi.iter().map(|p| p.sin()).collect();
        let scan_f = phi.iter().map(|p| data.eval(*p)).collect();
        Self { data, scan_phi: phi, scan_cos, scan_sin, scan_f }
    }

    pub fn data(&self) -> &BoundaryData {
        &self.data
    }

    /// `min (sign f + d)`; `sign = +1` gives `u+` and `sign = -1` gives `-u-`.
    fn extend(&self, s: &Hemi, sign: f64) -> f64 {
        let obj = |phi: f64| sign * self.data.eval(phi) + equator_dist(s, phi.cos(), phi.sin());
        let m = self.scan_phi.len();
        let mut best = f64::INFINITY;
        let mut k = 0;
        for i in 0..m {
            let v = sign * self.scan_f[i] + equator_dist(s, self.scan_cos[i], self.scan_sin[i]);
            if v < best {
                best = v;
                k = i;
            }
        }
        let prev = if k == 0 { self.scan_phi[m - 1] - TAU } else { self.scan_phi[k - 1] };
        let next = if k + 1 == m { self.scan_phi[0] + TAU } else { self.scan_phi[k + 1] };
        let here = self.scan_phi[k];
        for (a, b) in [(prev, here), (here, next)] {
            best = best.min(golden_min(&obj, a, b));
        }
        best
    }

    /// `u+` at a hemisphere point.
    pub fn plus(&self, s: &Hemi) -> f64 {
        self.extend(s, 1.0)
    }

    /// `u-` at a hemisphere point.
    pub fn minus(&self, s: &Hemi) -> f64 {
        -self.extend(s, -1.0)
    }

    /// `(u-, u+)` at a point of H^2.
    pub fn at(&self, x: &[f64]) -> (f64, f64) {
        let s = hemi_from_hyperboloid(x);
        (self.minus(&s), self.plus(&s))
    }
}

/// Minimum of `f` over `[a, b]` by golden-section search, including endpoints.
pub fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let fa = f(a);
    let fb = f(b);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fa.min(fb).min(fc).min(fd)
}

/// True iff `u-(x) < t < u+(x)` strictly (tolerance 1e-9).
pub fn invisible_membership(p: &SplitCoord, ext: &ExtremalPair) -> bool {
    let (lo, hi) = ext.at(&p.x);
    p.t > lo + MEMBERSHIP_TOL && p.t < hi - MEMBERSHIP_TOL
}

/// Largest and smallest extensions of the data restricted to a finite node
/// set, computed by Bellman-Ford relaxation over the complete graph of
/// `nodes` with spherical edge lengths. Nodes with `Some(v)` carry data.
pub fn lipschitz_cone_bounds(nodes: &[Hemi], data: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    let m = nodes.len();
    let mut up: Vec<f64> = data.iter().map(|d| d.unwrap_or(f64::INFINITY)).collect();
    let mut lo: Vec<f64> = data.iter().map(|d| d.unwrap_or(f64::NEG_INFINITY)).collect();
    loop {
        let mut changed = false;
        for i in 0..m {
            if data[i].is_some() {
                continue;
            }
            for j in 0..m {
                if i == j {
                    continue;
                }
                let d = sphere_dist(&nodes[i], &nodes[j]);
                if up[j] + d < up[i] {
                    up[i] = up[j] + d;
                    changed = true;
                }
                if lo[j] - d > lo[i] {
                    lo[i] = lo[j] - d;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (lo, up)
}
