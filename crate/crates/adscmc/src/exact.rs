//! Closed-form CMC hypersurfaces: equidistants and cylinders.
//!
//! Sign conventions: the unit normal is future directed and
//! `II(v,w) = <D_v N, w>`. With these conventions the past equidistant at
//! distance `theta` from a totally geodesic plane has `H = n tan(theta)` and
//! the future one has `H = -n tan(theta)`.

use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::error::{AdsError, Result};
use crate::quadric::{split_embed, AmbientVector, Isometry, QuadricPoint, SplitChart, SplitCoord, V4};

/// Clamp distance from `{0, pi/2}` used by the cylinder routines.
pub const THETA_CLAMP: f64 = 1e-8;

/// Which side of the reference plane (or barrier) a surface lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Past,
    Future,
}

impl Side {
    /// `-1` for the past, `+1` for the future.
    pub fn sign(self) -> f64 {
        match self {
            Side::Past => -1.0,
            Side::Future => 1.0,
        }
    }
}

fn check_theta_closed(theta: f64) -> Result<()> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(AdsError::InvalidParameter(format!("theta = {theta} is outside [0, pi/2)")));
    }
    Ok(())
}

fn clamp_open(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(AdsError::InvalidParameter(format!("theta = {theta} is outside (0, pi/2)")));
    }
    Ok(theta.clamp(THETA_CLAMP, FRAC_PI_2 - THETA_CLAMP))
}

/// Fiber time of the equidistant `P(theta)` over `x` in the standard chart:
/// `t = -+ arcsin(sin(theta) / cosh(rho))`, with `rho = d(x_0, x)`.
pub fn equidistant_graph(theta: f64, side: Side, x: &[f64]) -> Result<f64> {
    check_theta_closed(theta)?;
    let cosh_rho = x[x.len() - 1];
    Ok(side.sign() * (theta.sin() / cosh_rho).asin())
}

/// Same graph as a function of the hyperbolic radius.
pub fn equidistant_graph_rho(theta: f64, side: Side, rho: f64) -> Result<f64> {
    check_theta_closed(theta)?;
    Ok(side.sign() * (theta.sin() / rho.cosh()).asin())
}

/// Mean curvature `-+ n tan(theta)` of the future/past equidistant.
#[allow(non_snake_case)]
pub fn equidistant_H(theta: f64, side: Side, n: usize) -> f64 {
    -side.sign() * n as f64 * theta.tan()
}

/// Equidistant at distance `theta` from the totally geodesic plane of a chart.
#[derive(Debug, Clone)]
pub struct EquidistantSurface {
    pub theta: f64,
    pub side: Side,
    pub chart: SplitChart,
}

impl EquidistantSurface {
    pub fn new(theta: f64, side: Side, chart: SplitChart) -> Result<Self> {
        check_theta_closed(theta)?;
        Ok(Self { theta, side, chart })
    }

    /// Point of the surface over `x`.
    pub fn embed(&self, x: &[f64]) -> Result<QuadricPoint> {
        let t = equidistant_graph(self.theta, self.side, x)?;
        split_embed(&SplitCoord { x: x.to_vec(), t }, &self.chart)
    }

    #[allow(non_snake_case)]
    pub fn H(&self) -> f64 {
        equidistant_H(self.theta, self.side, self.chart.n())
    }

    /// Future unit normal at the point `F` of the surface.
    ///
    /// Writing `F = cos(theta) p +- sin(theta) e` with `p` on the plane and
    /// `e` its future unit normal, `N = -+ sin(theta) p + cos(theta) e`.
    pub fn normal_at(&self, f: &QuadricPoint) -> AmbientVector {
        let e = self.chart.normal();
        let fc = f.coords();
        let s = -crate::quadric::form(fc, &e.0);
        let (c, sn) = (self.theta.cos(), self.theta.sin());
        let sgn = self.side.sign();
        AmbientVector(fc.iter().zip(&e.0).map(|(fi, ei)| -sgn * sn * (fi - s * ei) / c + c * ei).collect())
    }
}

/// Cylinder `H(k, theta) = {cos(theta) x + sin(theta) y}` with `x` in a
/// `(k,1)` block and `y` on the past sheet of the complementary `(n-k,1)` block.
#[derive(Debug, Clone)]
pub struct CylindricalSurface {
    pub n: usize,
    pub k: usize,
    pub theta: f64,
    pub frame: Isometry,
}

impl CylindricalSurface {
    /// Coordinate-aligned cylinder: the first block is `e_1..e_k, e_{n+1}`,
    /// the second `e_{k+1}..e_n, e_{n+2}`.
    pub fn new(n: usize, k: usize, theta: f64) -> Result<Self> {
        Self::with_frame(n, k, theta, Isometry::identity(n))
    }

    pub fn with_frame(n: usize, k: usize, theta: f64, frame: Isometry) -> Result<Self> {
        if n < 2 || k > n {
            return Err(AdsError::InvalidParameter(format!("need n >= 2 and k <= n, got n={n}, k={k}")));
        }
        let theta = clamp_open(theta)?;
        Ok(Self { n, k, theta, frame })
    }

    /// `gamma = cos(theta) x + sin(theta) y` for `x` in H^k and `y` in
    /// H^{n-k}, both in hyperboloid coordinates.
    pub fn embed(&self, xk: &[f64], ym: &[f64]) -> Result<QuadricPoint> {
        let (n, k) = (self.n, self.k);
        if xk.len() != k + 1 || ym.len() != n - k + 1 {
            return Err(AdsError::DimensionMismatch { left: xk.len() + ym.len(), right: n + 2 });
        }
        crate::quadric::check_hyperboloid(xk).or_else(|e| if k == 0 { Ok(()) } else { Err(e) })?;
        crate::quadric::check_hyperboloid(ym).or_else(|e| if k == n { Ok(()) } else { Err(e) })?;
        let (c, s) = (self.theta.cos(), self.theta.sin());
        let mut v = vec![0.0; n + 2];
        v[..k].copy_from_slice(&xk[..k].iter().map(|a| c * a).collect::<Vec<_>>());
        v[n] = c * xk[k];
        for i in 0..n - k {
            v[k + i] = s * ym[i];
        }
        v[n + 1] = -s * ym[n - k];
        let p = self.frame.apply(&AmbientVector(v));
        QuadricPoint::normalize(p)
    }

    /// Future unit normal `sin(theta) x - cos(theta) y` at the image of `(x, y)`.
    pub fn normal(&self, xk: &[f64], ym: &[f64]) -> AmbientVector {
        let (n, k) = (self.n, self.k);
        let (c, s) = (self.theta.cos(), self.theta.sin());
        let mut v = vec![0.0; n + 2];
        for i in 0..k {
            v[i] = s * xk[i];
        }
        v[n] = s * xk[k];
        for i in 0..n - k {
            v[k + i] = -c * ym[i];
        }
        v[n + 1] = c * ym[n - k];
        self.frame.apply(&AmbientVector(v))
    }

    /// Principal curvatures: `tan(theta)` (k times) then `-cot(theta)` (n-k times).
    pub fn shape_operator(&self) -> Vec<f64> {
        cylinder_shape_operator(self.n, self.k, self.theta).expect("validated on construction")
    }

    #[allow(non_snake_case)]
    pub fn H(&self) -> f64 {
        cylinder_H(self.n, self.k, self.theta)
    }
}

/// Eigenvalues of the shape operator of `H(k, theta)`.
pub fn cylinder_shape_operator(n: usize, k: usize, theta: f64) -> Result<Vec<f64>> {
    if k > n {
        return Err(AdsError::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let theta = clamp_open(theta)?;
    let t = theta.tan();
    let mut ev = vec![t; k];
    ev.extend(std::iter::repeat_n(-1.0 / t, n - k));
    Ok(ev)
}

/// Mean curvature `k tan(theta) - (n-k) / tan(theta)`.
#[allow(non_snake_case)]
pub fn cylinder_H(n: usize, k: usize, theta: f64) -> f64 {
    let t = theta.tan();
    k as f64 * t - (n - k) as f64 / t
}

/// Parameter of a cylinder: the angle or the mean curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CylinderParam {
    Theta(f64),
    MeanCurvature(f64),
}

/// `|II|^2` of `H(k, theta)`.
///
/// For `Theta` the value is `k tan^2 + (n-k) cot^2`. For `MeanCurvature`
/// the cylinder is oriented so that its mean curvature is `|H|`; the value is
/// `n + (n H^2 + |H| (n - 2k) sqrt(H^2 + 4k(n-k))) / (2k(n-k))`, or `H^2/n`
/// when `k` is `0` or `n`.
pub fn cylinder_ii_norm(k: usize, param: CylinderParam, n: usize) -> Result<f64> {
    if n < 2 || k > n {
        return Err(AdsError::InvalidParameter(format!("need n >= 2 and k <= n, got n={n}, k={k}")));
    }
    match param {
        CylinderParam::Theta(theta) => {
            let theta = clamp_open(theta)?;
            let t2 = theta.tan().powi(2);
            Ok(k as f64 * t2 + (n - k) as f64 / t2)
        }
        CylinderParam::MeanCurvature(h) => {
            if !h.is_finite() {
                return Err(AdsError::InvalidParameter("non-finite H".into()));
            }
            let (nf, kf) = (n as f64, k as f64);
            if k == 0 || k == n {
                return Ok(h * h / nf);
            }
            let l = h.abs();
            let m = kf * (nf - kf);
            Ok(nf + (nf * l * l + l * (nf - 2.0 * kf) * (l * l + 4.0 * m).sqrt()) / (2.0 * m))
        }
    }
}

/// Sharp bound on `|II|^2` for CMC hypersurfaces with `|H| <= L`:
/// `n + (n L^2 + L (n-2) sqrt(L^2 + 4(n-1))) / (2(n-1))`.
///
/// This is `|II|^2` of the extremal cylinder `H(1, theta_L)`.
pub fn bound_rhs(l: f64, n: usize) -> f64 {
    let nf = n as f64;
    nf + (nf * l * l + l * (nf - 2.0) * (l * l + 4.0 * (nf - 1.0)).sqrt()) / (2.0 * (nf - 1.0))
}

/// Angle of the extremal cylinder: `tan(theta)` is the positive root of
/// `t^2 - H t - (n-1) = 0`.
#[allow(non_snake_case)]
pub fn extremal_theta(H: f64, n: usize) -> f64 {
    let nf = n as f64;
    ((H + (H * H + 4.0 * (nf - 1.0)).sqrt()) / 2.0).atan()
}

/// Fiber time of the maximal-type cylinder `H(1, theta)` in AdS^3 over a
/// point `y` of H^2 (standard chart, coordinate-aligned blocks).
pub fn cylinder_graph_n2(theta: f64, y: &[f64]) -> f64 {
    let (s, c) = theta.sin_cos();
    -(s * s + y[1] * y[1]).sqrt().atan2((c * c + y[0] * y[0]).sqrt())
}

/// Future unit normal of the n = 2, k = 1 cylinder at its point over `y`.
pub fn cylinder_normal_n2(theta: f64, y: &[f64]) -> V4 {
    let (s, c) = theta.sin_cos();
    // x = (sinh a, cosh a), y' = (sinh b, -cosh b) with c sinh a = y1, s sinh b = y2.
    let sa = y[0] / c;
    let sb = y[1] / s;
    let ca = (1.0 + sa * sa).sqrt();
    let cb = (1.0 + sb * sb).sqrt();
    [s * sa, -c * sb, s * ca, c * cb]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadric::{dot4, hyperboloid_point, psi2};
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn equidistant_graph_values() {
        let x0 = [0.0, 0.0, 1.0];
        assert_eq!(equidistant_graph(0.0, Side::Past, &x0).unwrap(), 0.0);
        assert!((equidistant_graph(FRAC_PI_4, Side::Past, &x0).unwrap() + FRAC_PI_4).abs() < 1e-15);
        let x = hyperboloid_point(2.0, &[1.0, 0.0]);
        let t = equidistant_graph(FRAC_PI_4, Side::Past, &x).unwrap();
        assert!((t + 0.189_075_099_850_194_5).abs() < 1e-14, "{t}");
        assert!(equidistant_graph(FRAC_PI_2, Side::Past, &x).is_err());
    }

    #[test]
    fn equidistant_graph_is_at_constant_distance() {
        let f = [0.0, 0.0, 0.0, 1.0];
        for rho in [0.0, 0.5, 1.3, 2.0, 4.0] {
            let x = hyperboloid_point(rho, &[0.6, 0.8]);
            let t = equidistant_graph(FRAC_PI_4, Side::Past, &x).unwrap();
            let p = psi2(&[x[0], x[1], x[2]], t);
            assert!((dot4(&p, &f) - FRAC_PI_4.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn equidistant_h_values() {
        assert!((equidistant_H(FRAC_PI_4, Side::Past, 2) - 2.0).abs() < 1e-15);
        assert_eq!(equidistant_H(0.0, Side::Future, 2), 0.0);
        assert!((equidistant_H(FRAC_PI_3, Side::Future, 3) + 3.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn equidistant_normal_is_unit_and_normal() {
        let s = EquidistantSurface::new(0.6, Side::Past, SplitChart::standard(2)).unwrap();
        let x = hyperboloid_point(1.1, &[0.0, 1.0]);
        let f = s.embed(&x).unwrap();
        let nv = s.normal_at(&f);
        assert!((nv.norm_sq() + 1.0).abs() < 1e-12);
        assert!(crate::quadric::form(f.coords(), &nv.0).abs() < 1e-12);
    }

    #[test]
    fn shape_operator_values() {
        let ev = cylinder_shape_operator(2, 1, FRAC_PI_4).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] + 1.0).abs() < 1e-12);
        for (n, k, th) in [(2, 1, 0.3), (3, 2, 1.2), (4, 0, 0.7), (4, 4, 0.1)] {
            let tr: f64 = cylinder_shape_operator(n, k, th).unwrap().iter().sum();
            assert!((tr - cylinder_H(n, k, th)).abs() < 1e-12);
        }
        assert!(cylinder_shape_operator(2, 1, 0.0).is_err());
    }

    #[test]
    fn ii_norm_values() {
        let v = cylinder_ii_norm(1, CylinderParam::Theta(FRAC_PI_4), 2).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = cylinder_ii_norm(1, CylinderParam::MeanCurvature(2.0), 2).unwrap();
        assert!((v - 6.0).abs() < 1e-12);
        let th = 0.4;
        let a = cylinder_ii_norm(3, CylinderParam::Theta(th), 3).unwrap();
        let h = cylinder_H(3, 3, th);
        assert!((a - h * h / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bound_values() {
        assert_eq!(bound_rhs(0.0, 2), 2.0);
        assert!((bound_rhs(2.0, 2) - 6.0).abs() < 1e-12);
        for n in 2..7 {
            assert!((bound_rhs(0.0, n) - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn extremal_theta_values() {
        assert!((extremal_theta(0.0, 2) - FRAC_PI_4).abs() < 1e-15);
        assert!((extremal_theta(1.0, 2) - 1.017_221_967_897_851).abs() < 1e-12);
        for n in 2..5 {
            for i in 0..=10 {
                let h = 0.5 * i as f64;
                let s = cylinder_ii_norm(1, CylinderParam::Theta(extremal_theta(h, n)), n).unwrap();
                assert!((s - bound_rhs(h, n)).abs() < 1e-10 * bound_rhs(h, n));
            }
        }
    }

    #[test]
    fn cylinder_points_are_on_quadric_and_graph_matches() {
        let c = CylindricalSurface::new(2, 1, 0.7).unwrap();
        let x = [0.3f64.sinh(), 0.3f64.cosh()];
        let y = [(-1.2f64).sinh(), 1.2f64.cosh()];
        let p = c.embed(&x, &y).unwrap();
        assert!((p.vector().norm_sq() + 1.0).abs() < 1e-12);
        let pc = p.coords();
        let r = pc[2].hypot(pc[3]);
        let base = [pc[0], pc[1], r];
        let t = cylinder_graph_n2(0.7, &base);
        assert!((t - pc[3].atan2(pc[2])).abs() < 1e-12);
        let nv = cylinder_normal_n2(0.7, &base);
        let nn = c.normal(&x, &y);
        for i in 0..4 {
            assert!((nv[i] - nn.0[i]).abs() < 1e-12);
        }
        assert!((dot4(&nv, &nv) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_extremes_are_equidistants() {
        let th = 0.5;
        let top = CylindricalSurface::new(2, 2, th).unwrap();
        let x = hyperboloid_point(0.9, &[0.6, 0.8]);
        let p = top.embed(&x, &[1.0]).unwrap();
        assert!((-p.coords()[3] - th.sin()).abs() < 1e-12);
        let bottom = CylindricalSurface::new(2, 0, th).unwrap();
        let q = bottom.embed(&[1.0], &x).unwrap();
        assert!((q.coords()[2] - th.cos()).abs() < 1e-12);
    }
}
