//! Anti-de Sitter space as the quadric `{<x,x> = -1}` in R^{n,2}.
//!
//! The bilinear form has signature (n,2):
//! `<x,y> = x_1 y_1 + ... + x_n y_n - x_{n+1} y_{n+1} - x_{n+2} y_{n+2}`.
//! Everything here is closed form and works for any `n >= 2`. The `V4`
//! helpers at the bottom are the allocation-free fast path used by the
//! n = 2 mesh code.

use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{AdsError, Result};

/// Tolerance on `|<x,x> + 1|` for points of the quadric.
pub const QUADRIC_TOL: f64 = 1e-10;
/// Tolerance for the boundary cases `<p,q> = +-1` of the causal classification.
pub const CAUSAL_TOL: f64 = 1e-9;
/// Tolerance on `<v,v>` in {-1, 0, 1} for geodesic directions.
pub const DIRECTION_TOL: f64 = 1e-8;

/// A vector of R^{n,2}; the length is `n + 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbientVector(pub Vec<f64>);

impl AmbientVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 4 {
            return Err(AdsError::InvalidParameter(format!(
                "ambient vectors need n + 2 >= 4 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(AdsError::InvalidParameter("non-finite coordinate".into()));
        }
        Ok(Self(coords))
    }

    /// Basis vector `e_i` (zero-based index) of R^{n,2}.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n + 2];
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The `n` of R^{n,2}.
    pub fn n(&self) -> usize {
        self.0.len() - 2
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.iter().map(|x| x * s).collect())
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(x, y)| a * x + b * y).collect())
    }

    /// `<self, self>`.
    pub fn norm_sq(&self) -> f64 {
        form(&self.0, &self.0)
    }
}

/// Unchecked bilinear form on slices of equal length `n + 2`.
#[inline]
pub fn form(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() - 2;
    let mut s = 0.0;
    for i in 0..n {
        s += a[i] * b[i];
    }
    s - a[n] * b[n] - a[n + 1] * b[n + 1]
}

/// The bilinear form of signature (n,2).
pub fn bilinear_form(a: &AmbientVector, b: &AmbientVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(AdsError::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(form(&a.0, &b.0))
}

/// A point of the quadric `{<x,x> = -1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadricPoint(AmbientVector);

impl QuadricPoint {
    /// Accepts `v` only if it already lies on the quadric within `QUADRIC_TOL`.
    pub fn new(v: AmbientVector) -> Result<Self> {
        let defect = v.norm_sq() + 1.0;
        if defect.abs() > QUADRIC_TOL {
            return Err(AdsError::NotOnQuadric(defect));
        }
        Ok(Self(v))
    }

    /// Rescales a negative vector onto the quadric.
    pub fn normalize(v: AmbientVector) -> Result<Self> {
        let q = v.norm_sq();
        if !(q < 0.0) {
            return Err(AdsError::NotOnQuadric(q + 1.0));
        }
        Ok(Self(v.scaled(1.0 / (-q).sqrt())))
    }

    pub fn vector(&self) -> &AmbientVector {
        &self.0
    }

    pub fn coords(&self) -> &[f64] {
        &self.0 .0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    /// The quadric antipode `-p`.
    pub fn antipode(&self) -> Self {
        Self(self.0.scaled(-1.0))
    }
}

/// A vector in `T_x = x^perp`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: QuadricPoint,
    dir: AmbientVector,
}

impl TangentVector {
    pub fn new(base: QuadricPoint, dir: AmbientVector) -> Result<Self> {
        if base.0.dim() != dir.dim() {
            return Err(AdsError::DimensionMismatch { left: base.0.dim(), right: dir.dim() });
        }
        let scale = dir.0.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        let t = form(base.coords(), &dir.0);
        if t.abs() > QUADRIC_TOL * scale {
            return Err(AdsError::NotTangent(t));
        }
        Ok(Self { base, dir })
    }

    /// Projects an arbitrary vector onto `x^perp` first.
    pub fn projected(base: QuadricPoint, dir: AmbientVector) -> Result<Self> {
        let t = form(base.coords(), &dir.0);
        // x^perp projection: v + <x,v> x since <x,x> = -1.
        let d = dir.combine(1.0, base.vector(), t);
        Self::new(base, d)
    }

    pub fn base(&self) -> &QuadricPoint {
        &self.base
    }

    pub fn dir(&self) -> &AmbientVector {
        &self.dir
    }
}

/// Geodesic `exp_x(t v)`; `v` must be unit timelike, null or unit spacelike.
pub fn exp_map(v: &TangentVector, t: f64) -> Result<QuadricPoint> {
    let x = v.base.coords();
    let d = &v.dir.0;
    let q = form(d, d);
    let (a, b) = if (q + 1.0).abs() <= DIRECTION_TOL {
        (t.cos(), t.sin())
    } else if q.abs() <= DIRECTION_TOL {
        (1.0, t)
    } else if (q - 1.0).abs() <= DIRECTION_TOL {
        (t.cosh(), t.sinh())
    } else {
        return Err(AdsError::BadDirection(q));
    };
    let y: Vec<f64> = x.iter().zip(d).map(|(xi, di)| a * xi + b * di).collect();
    QuadricPoint::normalize(AmbientVector(y))
}

/// Causal relation between two points of the quadric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CausalClass {
    TimeRelated,
    LightRelated,
    SpaceRelated,
    AntipodalLight,
    AntipodalSpace,
    Coincident,
    Antipodal,
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CausalClass::TimeRelated => "time-related",
            CausalClass::LightRelated => "light-related",
            CausalClass::SpaceRelated => "space-related",
            CausalClass::AntipodalLight => "antipodal-light",
            CausalClass::AntipodalSpace => "antipodal-space",
            CausalClass::Coincident => "coincident",
            CausalClass::Antipodal => "antipodal",
        };
        f.write_str(s)
    }
}

/// Classifies a pair by the value of `<p,q>`.
pub fn classify_pair(p: &QuadricPoint, q: &QuadricPoint) -> CausalClass {
    let (a, b) = (p.coords(), q.coords());
    let diff = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    if diff <= CAUSAL_TOL {
        return CausalClass::Coincident;
    }
    let sum = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x + y).abs()));
    if sum <= CAUSAL_TOL {
        return CausalClass::Antipodal;
    }
    classify_product(form(a, b))
}

/// Classification from the product alone, for distinct non-antipodal points.
pub fn classify_product(s: f64) -> CausalClass {
    if (s + 1.0).abs() <= CAUSAL_TOL {
        CausalClass::LightRelated
    } else if (s - 1.0).abs() <= CAUSAL_TOL {
        CausalClass::AntipodalLight
    } else if s < -1.0 {
        CausalClass::SpaceRelated
    } else if s > 1.0 {
        CausalClass::AntipodalSpace
    } else {
        CausalClass::TimeRelated
    }
}

/// Lorentzian distance `arccos(-<p,q>)` of a time-related pair.
pub fn lorentzian_distance(p: &QuadricPoint, q: &QuadricPoint) -> Result<f64> {
    let class = classify_pair(p, q);
    if class != CausalClass::TimeRelated {
        return Err(AdsError::NotTimeRelated(class.to_string()));
    }
    let s = form(p.coords(), q.coords());
    Ok((-s).clamp(-1.0, 1.0).acos())
}

/// The dual point `-p`. Its dual hyperplane `{q : <p,q> = 0}` is at distance
/// pi/2 from `p`; `future` selects which component is meant and does not
/// change the returned point.
pub fn dual_point(p: &QuadricPoint, _future: bool) -> QuadricPoint {
    p.antipode()
}

/// True iff `q` lies in the fundamental region `U_p = {<p,.> < 0}`.
pub fn in_fundamental_region(p: &QuadricPoint, q: &QuadricPoint) -> bool {
    form(p.coords(), q.coords()) < 0.0
}

/// A linear map of R^{n,2}, stored row-major; isometries preserve the form.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    dim: usize,
    m: Vec<f64>,
}

impl Isometry {
    pub fn identity(n: usize) -> Self {
        let dim = n + 2;
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Self { dim, m }
    }

    /// Accepts an arbitrary matrix if it preserves the form within `tol`.
    pub fn from_matrix(n: usize, m: Vec<f64>, tol: f64) -> Result<Self> {
        let dim = n + 2;
        if m.len() != dim * dim {
            return Err(AdsError::DimensionMismatch { left: m.len(), right: dim * dim });
        }
        let iso = Self { dim, m };
        if iso.defect() > tol {
            return Err(AdsError::InvalidParameter("matrix is not in O(n,2)".into()));
        }
        Ok(iso)
    }

    fn sign(&self, i: usize) -> f64 {
        if i + 2 >= self.dim {
            -1.0
        } else {
            1.0
        }
    }

    /// Rotation by `angle` in the plane of two axes of the same sign.
    pub fn rotation(n: usize, i: usize, j: usize, angle: f64) -> Result<Self> {
        let mut g = Self::identity(n);
        if i == j || i >= g.dim || j >= g.dim || g.sign(i) != g.sign(j) {
            return Err(AdsError::InvalidParameter("rotation needs two distinct axes of equal sign".into()));
        }
        let (c, s) = (angle.cos(), angle.sin());
        let d = g.dim;
        g.m[i * d + i] = c;
        g.m[i * d + j] = -s;
        g.m[j * d + i] = s;
        g.m[j * d + j] = c;
        Ok(g)
    }

    /// Boost of rapidity `r` mixing spacelike axis `i` with timelike axis `j`.
    pub fn boost(n: usize, i: usize, j: usize, r: f64) -> Result<Self> {
        let mut g = Self::identity(n);
        if i >= g.dim || j >= g.dim || g.sign(i) != 1.0 || g.sign(j) != -1.0 {
            return Err(AdsError::InvalidParameter("boost needs a spacelike and a timelike axis".into()));
        }
        let (c, s) = (r.cosh(), r.sinh());
        let d = g.dim;
        g.m[i * d + i] = c;
        g.m[i * d + j] = s;
        g.m[j * d + i] = s;
        g.m[j * d + j] = c;
        Ok(g)
    }

    pub fn compose(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.m[i * d + k];
                if a != 0.0 {
                    for j in 0..d {
                        m[i * d + j] += a * other.m[k * d + j];
                    }
                }
            }
        }
        Self { dim: d, m }
    }

    pub fn apply_slice(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d).map(|i| (0..d).map(|j| self.m[i * d + j] * v[j]).sum()).collect()
    }

    pub fn apply(&self, v: &AmbientVector) -> AmbientVector {
        AmbientVector(self.apply_slice(&v.0))
    }

    pub fn apply_point(&self, p: &QuadricPoint) -> QuadricPoint {
        QuadricPoint(self.apply(p.vector()))
    }

    /// Max entry of `M^T eta M - eta`.
    pub fn defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for a in 0..d {
            for b in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += self.sign(k) * self.m[k * d + a] * self.m[k * d + b];
                }
                let target = if a == b { self.sign(a) } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

/// Basepoint, future unit normal and orthonormal spacelike frame of a splitting.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitChart {
    p: QuadricPoint,
    normal: AmbientVector,
    frame: Vec<AmbientVector>,
}

impl SplitChart {
    /// `p = e_{n+1}`, `N = e_{n+2}`, frame `e_1..e_n`.
    pub fn standard(n: usize) -> Self {
        Self {
            p: QuadricPoint(AmbientVector::basis(n, n)),
            normal: AmbientVector::basis(n, n + 1),
            frame: (0..n).map(|i| AmbientVector::basis(n, i)).collect(),
        }
    }

    pub fn new(p: QuadricPoint, normal: AmbientVector, frame: Vec<AmbientVector>) -> Result<Self> {
        let n = p.n();
        if frame.len() != n || normal.dim() != n + 2 || frame.iter().any(|e| e.dim() != n + 2) {
            return Err(AdsError::DimensionMismatch { left: frame.len(), right: n });
        }
        let tol = QUADRIC_TOL;
        let pc = p.coords();
        if (normal.norm_sq() + 1.0).abs() > tol || form(pc, &normal.0).abs() > tol {
            return Err(AdsError::InvalidParameter("normal must be unit timelike and tangent".into()));
        }
        for (i, e) in frame.iter().enumerate() {
            if (e.norm_sq() - 1.0).abs() > tol || form(pc, &e.0).abs() > tol || form(&normal.0, &e.0).abs() > tol {
                return Err(AdsError::InvalidParameter("frame must be orthonormal spacelike".into()));
            }
            for f in &frame[..i] {
                if form(&e.0, &f.0).abs() > tol {
                    return Err(AdsError::InvalidParameter("frame must be orthonormal".into()));
                }
            }
        }
        Ok(Self { p, normal, frame })
    }

    /// Image of the chart under an isometry.
    pub fn transformed(&self, g: &Isometry) -> Self {
        Self {
            p: g.apply_point(&self.p),
            normal: g.apply(&self.normal),
            frame: self.frame.iter().map(|e| g.apply(e)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    pub fn basepoint(&self) -> &QuadricPoint {
        &self.p
    }

    pub fn normal(&self) -> &AmbientVector {
        &self.normal
    }

    pub fn frame(&self) -> &[AmbientVector] {
        &self.frame
    }
}

/// Split coordinates `(x, t)`: `x` on the hyperboloid model of H^n, `t` fiber time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitCoord {
    pub x: Vec<f64>,
    pub t: f64,
}

impl SplitCoord {
    pub fn new(x: Vec<f64>, t: f64) -> Result<Self> {
        check_hyperboloid(&x)?;
        Ok(Self { x, t })
    }

    /// The basepoint `x_0` of H^n at time `t`.
    pub fn origin(n: usize, t: f64) -> Self {
        let mut x = vec![0.0; n + 1];
        x[n] = 1.0;
        Self { x, t }
    }
}

/// Checks `<x,x>_{n,1} = -1` with `x_{n+1} > 0`.
pub fn check_hyperboloid(x: &[f64]) -> Result<()> {
    let n = x.len().saturating_sub(1);
    if n < 1 {
        return Err(AdsError::InvalidParameter("empty hyperboloid point".into()));
    }
    let q: f64 = x[..n].iter().map(|v| v * v).sum::<f64>() - x[n] * x[n];
    if (q + 1.0).abs() > QUADRIC_TOL * x[n].max(1.0).powi(2) || x[n] <= 0.0 {
        return Err(AdsError::InvalidParameter(format!("not on the hyperboloid: defect {:e}", q + 1.0)));
    }
    Ok(())
}

/// Embeds split coordinates: `sum x_i e_i + x_{n+1} (cos t p + sin t N)`.
pub fn split_embed(c: &SplitCoord, chart: &SplitChart) -> Result<QuadricPoint> {
    let n = chart.n();
    if c.x.len() != n + 1 {
        return Err(AdsError::DimensionMismatch { left: c.x.len(), right: n + 1 });
    }
    let (ct, st) = (c.t.cos(), c.t.sin());
    let r = c.x[n];
    let mut y: Vec<f64> = (0..n + 2).map(|k| r * (ct * chart.p.coords()[k] + st * chart.normal.0[k])).collect();
    for (i, e) in chart.frame.iter().enumerate() {
        for (k, yk) in y.iter_mut().enumerate() {
            *yk += c.x[i] * e.0[k];
        }
    }
    Ok(QuadricPoint(AmbientVector(y)))
}

/// Wraps `t` into `(hint - pi, hint + pi]`.
pub fn wrap_near(t: f64, hint: f64) -> f64 {
    let mut s = t - hint;
    s -= 2.0 * PI * (s / (2.0 * PI)).round();
    if s <= -PI {
        s += 2.0 * PI;
    }
    hint + s
}

/// Inverse of `split_embed` with `t` on the branch `(hint - pi, hint + pi]`.
pub fn split_lift(y: &QuadricPoint, chart: &SplitChart, branch_hint: f64) -> Result<SplitCoord> {
    let n = chart.n();
    if y.n() != n {
        return Err(AdsError::DimensionMismatch { left: y.n(), right: n });
    }
    let yc = y.coords();
    let mut x: Vec<f64> = chart.frame.iter().map(|e| form(yc, &e.0)).collect();
    let a = -form(yc, chart.p.coords());
    let b = -form(yc, &chart.normal.0);
    x.push(a.hypot(b));
    let t = wrap_near(b.atan2(a), branch_hint);
    Ok(SplitCoord { x, t })
}

/// The conformal factor `x_{n+1}^2 = cosh^2 d(x_0, x)` of the hemisphere chart.
pub fn conformal_factor(x: &[f64]) -> f64 {
    let n = x.len() - 1;
    x[n] * x[n]
}

/// Hyperbolic distance from the basepoint `x_0`.
pub fn distance_from_origin(x: &[f64]) -> f64 {
    x[x.len() - 1].max(1.0).acosh()
}

/// Point of H^n at distance `rho` from `x_0` in the unit direction `dir`.
pub fn hyperboloid_point(rho: f64, dir: &[f64]) -> Vec<f64> {
    let mut x: Vec<f64> = dir.iter().map(|d| d * rho.sinh()).collect();
    x.push(rho.cosh());
    x
}

/// Ambient vectors for the n = 2 fast path.
pub type V4 = [f64; 4];

#[inline]
pub fn dot4(a: &V4, b: &V4) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

#[inline]
pub fn axpy4(a: f64, x: &V4, y: &V4) -> V4 {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2], a * x[3] + y[3]]
}

#[inline]
pub fn scale4(a: f64, x: &V4) -> V4 {
    [a * x[0], a * x[1], a * x[2], a * x[3]]
}

/// Standard-chart embedding for n = 2: `(x_1, x_2, x_3 cos t, x_3 sin t)`.
#[inline]
pub fn psi2(x: &[f64; 3], t: f64) -> V4 {
    [x[0], x[1], x[2] * t.cos(), x[2] * t.sin()]
}

/// Unit future fiber direction `T = d/dt / |d/dt|` at an ambient point (n = 2).
#[inline]
pub fn fiber_unit4(f: &V4) -> V4 {
    let r = f[2].hypot(f[3]);
    [0.0, 0.0, -f[3] / r, f[2] / r]
}

/// Vector `w` with `<w, a> = <w, b> = <w, c> = 0`, via the Euclidean cross
/// product in R^4 followed by the metric sign flip.
pub fn orthogonal4(a: &V4, b: &V4, c: &V4) -> V4 {
    let m = |i: usize, j: usize, k: usize| {
        a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i]) + a[k] * (b[i] * c[j] - b[j] * c[i])
    };
    let e = [m(1, 2, 3), -m(0, 2, 3), m(0, 1, 3), -m(0, 1, 2)];
    [e[0], e[1], -e[2], -e[3]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> QuadricPoint {
        QuadricPoint::normalize(AmbientVector(v.to_vec())).unwrap()
    }

    #[test]
    fn bilinear_form_examples() {
        let e3 = AmbientVector::basis(2, 2);
        assert_eq!(bilinear_form(&e3, &e3).unwrap(), -1.0);
        let a = AmbientVector::basis(2, 0);
        let b = AmbientVector::basis(2, 3);
        assert_eq!(bilinear_form(&a, &b).unwrap(), 0.0);
        let c = AmbientVector(vec![3.0, 0.0, 2.0, 2.0 * 2f64.sqrt()]);
        assert!((bilinear_form(&c, &c).unwrap() + 3.0).abs() < 1e-12);
        let d = AmbientVector(vec![0.0; 5]);
        assert!(bilinear_form(&a, &d).is_err());
    }

    #[test]
    fn exp_map_timelike_landmarks() {
        let p = pt(&[0.0, 0.0, 1.0, 0.0]);
        let v = TangentVector::new(p.clone(), AmbientVector(vec![0.0, 0.0, 0.0, 1.0])).unwrap();
        let q = exp_map(&v, PI).unwrap();
        assert!(q.coords().iter().zip(p.coords()).all(|(a, b)| (a + b).abs() < 1e-12));
        let q0 = exp_map(&v, 0.0).unwrap();
        assert_eq!(q0, p);
        let q1 = exp_map(&v, PI / 2.0).unwrap();
        assert!((q1.coords()[3] - 1.0).abs() < 1e-12 && q1.coords()[2].abs() < 1e-12);
    }

    #[test]
    fn exp_map_rejects_non_unit() {
        let p = pt(&[0.0, 0.0, 1.0, 0.0]);
        let v = TangentVector::new(p, AmbientVector(vec![0.0, 0.0, 0.0, 2.0])).unwrap();
        assert!(matches!(exp_map(&v, 1.0), Err(AdsError::BadDirection(_))));
    }

    #[test]
    fn exp_map_null_and_spacelike_stay_on_quadric() {
        let p = pt(&[0.0, 0.0, 1.0, 0.0]);
        let null = TangentVector::new(p.clone(), AmbientVector(vec![1.0, 0.0, 0.0, 1.0])).unwrap();
        let q = exp_map(&null, 3.0).unwrap();
        assert!((q.vector().norm_sq() + 1.0).abs() < 1e-10);
        assert_eq!(classify_pair(&p, &q), CausalClass::LightRelated);
        let sp = TangentVector::new(p.clone(), AmbientVector(vec![1.0, 0.0, 0.0, 0.0])).unwrap();
        let q = exp_map(&sp, 0.7).unwrap();
        assert_eq!(classify_pair(&p, &q), CausalClass::SpaceRelated);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_product(-(PI / 4.0).cos()), CausalClass::TimeRelated);
        assert_eq!(classify_product(-1.5), CausalClass::SpaceRelated);
        assert_eq!(classify_product(-1.0), CausalClass::LightRelated);
        assert_eq!(classify_product(1.0), CausalClass::AntipodalLight);
        assert_eq!(classify_product(1.5), CausalClass::AntipodalSpace);
        let p = pt(&[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(classify_pair(&p, &p), CausalClass::Coincident);
        assert_eq!(classify_pair(&p, &p.antipode()), CausalClass::Antipodal);
    }

    #[test]
    fn distance_examples() {
        let p = pt(&[0.0, 0.0, 1.0, 0.0]);
        let q = pt(&[0.0, 0.0, 0.3f64.cos(), 0.3f64.sin()]);
        assert!((lorentzian_distance(&p, &q).unwrap() - 0.3).abs() < 1e-12);
        let q = pt(&[0.0, 0.0, (PI / 4.0).cos(), (PI / 4.0).sin()]);
        assert!((lorentzian_distance(&p, &q).unwrap() - PI / 4.0).abs() < 1e-12);
        let far = pt(&[1.0, 0.0, 2f64.sqrt(), 0.0]);
        assert!(lorentzian_distance(&p, &far).is_err());
    }

    #[test]
    fn split_chart_landmarks() {
        let chart = SplitChart::standard(2);
        let o = split_embed(&SplitCoord::origin(2, 0.0), &chart).unwrap();
        assert_eq!(o.coords(), &[0.0, 0.0, 1.0, 0.0]);
        let top = split_embed(&SplitCoord::origin(2, PI / 2.0), &chart).unwrap();
        assert!(top.coords()[2].abs() < 1e-15 && (top.coords()[3] - 1.0).abs() < 1e-15);
        let c = SplitCoord::new(hyperboloid_point(0.8, &[0.6, 0.8]), 0.4).unwrap();
        let a = split_embed(&c, &chart).unwrap();
        let b = split_embed(&SplitCoord { x: c.x.clone(), t: c.t + 2.0 * PI }, &chart).unwrap();
        assert!(a.coords().iter().zip(b.coords()).all(|(u, v)| (u - v).abs() < 1e-12));
        let back = split_lift(&top, &chart, 0.0).unwrap();
        assert!((back.t - PI / 2.0).abs() < 1e-15);
        let back = split_lift(&o, &chart, 0.0).unwrap();
        assert_eq!(back.t, 0.0);
    }

    #[test]
    fn conformal_factor_examples() {
        assert_eq!(conformal_factor(&[0.0, 0.0, 1.0]), 1.0);
        let x = hyperboloid_point(3f64.sqrt().acosh() * 0.0 + 2f64.acosh(), &[1.0, 0.0]);
        assert!((conformal_factor(&x) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn duality_and_fundamental_region() {
        let p = pt(&[0.0, 0.0, 1.0, 0.0]);
        let d = dual_point(&p, true);
        assert_eq!(classify_pair(&p, &d), CausalClass::Antipodal);
        assert_eq!(dual_point(&d, false), p);
        let q = pt(&[0.0, 0.0, 0.0, 1.0]);
        assert!(form(p.coords(), q.coords()).abs() < 1e-15);
        let v = TangentVector::new(p.clone(), AmbientVector(vec![0.0, 0.0, 0.0, 1.0])).unwrap();
        assert!((lorentzian_distance(&p, &exp_map(&v, PI / 2.0 - 1e-7).unwrap()).unwrap() - PI / 2.0).abs() < 1e-6);
        assert!(in_fundamental_region(&p, &p));
        assert!(!in_fundamental_region(&p, &p.antipode()));
        let r = pt(&[0.0, 0.0, 0.3, 0.0f64.max((1.0f64 - 0.09).sqrt())]);
        assert!((form(p.coords(), r.coords()) + 0.3).abs() < 1e-12);
        assert!(in_fundamental_region(&p, &r));
    }

    #[test]
    fn isometry_generators_preserve_form() {
        let g = Isometry::rotation(2, 0, 1, 0.3)
            .unwrap()
            .compose(&Isometry::boost(2, 1, 3, 0.7).unwrap())
            .compose(&Isometry::rotation(2, 2, 3, 1.1).unwrap());
        assert!(g.defect() < 1e-12);
        assert!(Isometry::rotation(2, 0, 2, 0.3).is_err());
        assert!(Isometry::boost(2, 2, 3, 0.3).is_err());
    }

    #[test]
    fn orthogonal4_is_orthogonal() {
        let a = [0.3, -0.2, 1.1, 0.4];
        let b = [1.0, 0.5, 0.1, -0.3];
        let c = [-0.2, 0.7, 0.9, 1.3];
        let w = orthogonal4(&a, &b, &c);
        for v in [a, b, c] {
            assert!(dot4(&w, &v).abs() < 1e-12);
        }
    }
}
