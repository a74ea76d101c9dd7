//! Per-vertex extrinsic geometry of discrete spacelike graphs (n = 2).
//!
//! At each vertex the embedded neighbours in the 3-ring are written in an
//! orthonormal frame `(e_1, e_2, N)` of the tangent space of AdS^3, and the
//! height `w = -<q, N>` is fitted by weighted least squares as a jet
//! `c_1 a + c_2 b + (A a^2 + 2 B ab + C b^2) / 2 + higher terms` (up to
//! quartic when the stencil is large enough). The linear
//! part tilts the normal (two refinement passes), and the quadratic part is
//! the second fundamental form `II = [[A, B], [B, C]]` with respect to the
//! future unit normal. The same fit applied to a scalar field gives its
//! Laplace-Beltrami operator.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{AdsError, Result};
use crate::fem::FemSpace;
use crate::mesh::DiskMesh;
use crate::quadric::{dot4, fiber_unit4, orthogonal4, psi2, scale4, SplitChart, V4};

/// Combinatorial radius of the fitting stencil.
pub const STENCIL_RINGS: usize = 3;
/// Fewest independent neighbours accepted by the jet fit.
pub const MIN_STENCIL: usize = 6;
/// Stencils at least this large use the cubic jet.
const CUBIC_STENCIL: usize = 12;
/// Stencils at least this large use the quartic jet.
const QUARTIC_STENCIL: usize = 20;
/// Normal refinement passes.
const NORMAL_PASSES: usize = 2;

/// Per-vertex geometry of an embedded discrete graph.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceGeometry {
    pub points: Vec<V4>,
    /// Future unit normals.
    pub normals: Vec<V4>,
    /// Gradient function `-<N, T>` against the unit fiber field of the chart.
    pub nu: Vec<f64>,
    /// Second fundamental form `[A, B, C]` in the vertex frame.
    pub ii: Vec<[f64; 3]>,
    pub mean_curvature: Vec<f64>,
    pub ii_norm_sq: Vec<f64>,
    /// Sectional curvature from the Gauss equation, `-1 - det II`.
    pub gauss_curvature: Vec<f64>,
    /// Intrinsic curvature from hyperbolic comparison angle defects.
    pub intrinsic_curvature: Vec<f64>,
    pub interior: Vec<bool>,
    #[serde(skip)]
    frames: Vec<[V4; 2]>,
}

impl SurfaceGeometry {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn frame(&self, i: usize) -> [V4; 2] {
        self.frames[i]
    }

    /// Max over interior vertices of `|values_i - target|`.
    pub fn interior_max_deviation(&self, values: &[f64], target: f64) -> f64 {
        (0..self.len()).filter(|&i| self.interior[i]).map(|i| (values[i] - target).abs()).fold(0.0, f64::max)
    }

    /// Max of a field over interior vertices.
    pub fn interior_max(&self, values: &[f64]) -> f64 {
        (0..self.len()).filter(|&i| self.interior[i]).map(|i| values[i]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Max over interior vertices of `|H_i - target|`.
    pub fn mean_curvature_error(&self, target: f64) -> f64 {
        self.interior_max_deviation(&self.mean_curvature, target)
    }
}

/// The linear map sending the standard chart to `chart` (n = 2).
pub fn chart_matrix(chart: &SplitChart) -> Result<[V4; 4]> {
    if chart.n() != 2 {
        return Err(AdsError::DimensionMismatch { left: chart.n(), right: 2 });
    }
    let col = |v: &[f64]| [v[0], v[1], v[2], v[3]];
    Ok([
        col(chart.frame()[0].as_slice()),
        col(chart.frame()[1].as_slice()),
        col(chart.basepoint().coords()),
        col(chart.normal().as_slice()),
    ])
}

fn apply_columns(m: &[V4; 4], v: &V4) -> V4 {
    let mut out = [0.0; 4];
    for (k, c) in m.iter().enumerate() {
        for r in 0..4 {
            out[r] += v[k] * c[r];
        }
    }
    out
}

/// Embedded vertices of the graph of `u` in the standard chart.
pub fn embed_graph_standard(mesh: &DiskMesh, u: &[f64]) -> Vec<V4> {
    mesh.vertices.iter().zip(u).map(|(x, &t)| psi2(x, t)).collect()
}

/// Embedded vertices of the graph of `u` in `chart`.
pub fn embed_graph(mesh: &DiskMesh, u: &[f64], chart: &SplitChart) -> Result<Vec<V4>> {
    if u.len() != mesh.num_vertices() {
        return Err(AdsError::DimensionMismatch { left: u.len(), right: mesh.num_vertices() });
    }
    let m = chart_matrix(chart)?;
    Ok(embed_graph_standard(mesh, u).iter().map(|p| apply_columns(&m, p)).collect())
}

/// Spacelike margin of the discrete graph (see [`FemSpace::spacelike_margin`]).
pub fn spacelike_margin(mesh: &DiskMesh, u: &[f64]) -> f64 {
    FemSpace::new(mesh).spacelike_margin(u)
}

/// Geometry of the graph of `u` in `chart`.
pub fn extrinsic_geometry(mesh: &DiskMesh, u: &[f64], chart: &SplitChart) -> Result<SurfaceGeometry> {
    if u.len() != mesh.num_vertices() {
        return Err(AdsError::DimensionMismatch { left: u.len(), right: mesh.num_vertices() });
    }
    let m = chart_matrix(chart)?;
    let mut g = point_cloud_geometry(mesh, &embed_graph_standard(mesh, u))?;
    if *chart != SplitChart::standard(2) {
        for v in g.points.iter_mut().chain(g.normals.iter_mut()) {
            *v = apply_columns(&m, v);
        }
        for f in g.frames.iter_mut() {
            *f = [apply_columns(&m, &f[0]), apply_columns(&m, &f[1])];
        }
    }
    Ok(g)
}

/// Local frame and jet fit at one vertex.
struct LocalFit {
    normal: V4,
    frame: [V4; 2],
    ii: [f64; 3],
}

/// Weighted least-squares jet of `values` on the stencil coordinates.
/// Returns `(c_1, c_2, f_aa, f_ab, f_bb)`.
fn jet(coords: &[(f64, f64)], values: &[f64]) -> Option<[f64; 5]> {
    let m = coords.len();
    let cols = if m >= QUARTIC_STENCIL {
        14
    } else if m >= CUBIC_STENCIL {
        9
    } else {
        5
    };
    let hl = coords.iter().map(|(a, b)| a.hypot(*b)).sum::<f64>() / m as f64;
    if !(hl > 0.0) {
        return None;
    }
    let mut mat = vec![0.0; m * cols];
    let mut rhs = vec![0.0; m];
    for (r, (&(a, b), &v)) in coords.iter().zip(values).enumerate() {
        let w = hl / a.hypot(b).max(1e-3 * hl);
        let (x, y) = (a / hl, b / hl);
        let row = [
            x,
            y,
            0.5 * x * x,
            x * y,
            0.5 * y * y,
            x * x * x,
            x * x * y,
            x * y * y,
            y * y * y,
            x * x * x * x,
            x * x * x * y,
            x * x * y * y,
            x * y * y * y,
            y * y * y * y,
        ];
        for c in 0..cols {
            mat[r * cols + c] = w * row[c];
        }
        rhs[r] = w * v;
    }
    let beta = householder_lstsq(&mut mat, &mut rhs, m, cols)?;
    let h2 = hl * hl;
    Some([beta[0] / hl, beta[1] / hl, beta[2] / h2, beta[3] / h2, beta[4] / h2])
}

/// Least-squares solution of the row-major `m x cols` system by Householder
/// QR in place. `None` if the matrix is rank deficient.
fn householder_lstsq(a: &mut [f64], b: &mut [f64], m: usize, cols: usize) -> Option<[f64; 14]> {
    let mut scale = 0.0f64;
    for v in a.iter() {
        scale = scale.max(v.abs());
    }
    for k in 0..cols {
        let norm = (k..m).map(|r| a[r * cols + k].powi(2)).sum::<f64>().sqrt();
        if !(norm > 1e-13 * scale) {
            return None;
        }
        let alpha = if a[k * cols + k] > 0.0 { -norm } else { norm };
        a[k * cols + k] -= alpha;
        let vnorm_sq = (k..m).map(|r| a[r * cols + k].powi(2)).sum::<f64>();
        for c in k + 1..cols {
            let s = (k..m).map(|r| a[r * cols + k] * a[r * cols + c]).sum::<f64>() * 2.0 / vnorm_sq;
            for r in k..m {
                a[r * cols + c] -= s * a[r * cols + k];
            }
        }
        let s = (k..m).map(|r| a[r * cols + k] * b[r]).sum::<f64>() * 2.0 / vnorm_sq;
        for r in k..m {
            b[r] -= s * a[r * cols + k];
        }
        a[k * cols + k] = alpha;
    }
    let mut x = [0.0; 14];
    for k in (0..cols).rev() {
        let s = (k + 1..cols).map(|c| a[k * cols + c] * x[c]).sum::<f64>();
        x[k] = (b[k] - s) / a[k * cols + k];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn normalize_timelike(v: &V4) -> Option<V4> {
    let q = dot4(v, v);
    if q < 0.0 {
        Some(scale4(1.0 / (-q).sqrt(), v))
    } else {
        None
    }
}

fn normalize_spacelike(v: &V4) -> Option<V4> {
    let q = dot4(v, v);
    if q > 0.0 {
        Some(scale4(1.0 / q.sqrt(), v))
    } else {
        None
    }
}

/// Orthonormal frame of `T_F S` given `F`, `N` and a hint direction.
fn tangent_frame(f: &V4, n: &V4, hint: &V4) -> Option<[V4; 2]> {
    let mut v = *hint;
    let pf = dot4(&v, f);
    let pn = dot4(&v, n);
    for k in 0..4 {
        v[k] += pf * f[k] + pn * n[k];
    }
    let e1 = normalize_spacelike(&v)?;
    let e2 = normalize_spacelike(&orthogonal4(f, n, &e1))?;
    Some([e1, e2])
}

fn future(v: V4, t: &V4) -> V4 {
    if dot4(&v, t) > 0.0 {
        scale4(-1.0, &v)
    } else {
        v
    }
}

fn fit_vertex(mesh: &DiskMesh, points: &[V4], i: usize, stencil: &[usize]) -> Result<LocalFit> {
    let degenerate = || AdsError::DegenerateStencil { vertex: i, neighbors: stencil.len() };
    if stencil.len() < MIN_STENCIL {
        return Err(degenerate());
    }
    let f = points[i];
    let t = fiber_unit4(&f);
    let mut acc = [0.0; 4];
    for &tr in &mesh.vertex_triangles[i] {
        let tri = mesh.triangles[tr];
        let o = future(orthogonal4(&points[tri[0]], &points[tri[1]], &points[tri[2]]), &t);
        for k in 0..4 {
            acc[k] += o[k];
        }
    }
    let pf = dot4(&acc, &f);
    for k in 0..4 {
        acc[k] += pf * f[k];
    }
    let mut normal = normalize_timelike(&acc).ok_or_else(degenerate)?;
    let hint = points[stencil[0]];
    let mut coords = vec![(0.0, 0.0); stencil.len()];
    let mut heights = vec![0.0; stencil.len()];
    let mut pass = 0;
    loop {
        let frame = tangent_frame(&f, &normal, &hint).ok_or_else(degenerate)?;
        for (k, &j) in stencil.iter().enumerate() {
            let q = points[j];
            coords[k] = (dot4(&q, &frame[0]), dot4(&q, &frame[1]));
            heights[k] = -dot4(&q, &normal);
        }
        let c = jet(&coords, &heights).ok_or_else(degenerate)?;
        if pass == NORMAL_PASSES {
            return Ok(LocalFit { normal, frame, ii: [c[2], c[3], c[4]] });
        }
        let tilted = [0, 1, 2, 3].map(|k| normal[k] + c[0] * frame[0][k] + c[1] * frame[1][k]);
        normal = normalize_timelike(&tilted).ok_or_else(degenerate)?;
        pass += 1;
    }
}

/// Geometry of an arbitrary embedded point cloud on the mesh connectivity
/// (used for normal graphs, which are not vertical graphs over the mesh).
pub fn point_cloud_geometry(mesh: &DiskMesh, points: &[V4]) -> Result<SurfaceGeometry> {
    cloud_geometry(mesh, points, true)
}

/// Extrinsic geometry of the graph of `u` in the standard chart without the
/// intrinsic curvature (left as NaN), for inner solver loops.
pub fn graph_geometry_fast(mesh: &DiskMesh, u: &[f64]) -> Result<SurfaceGeometry> {
    cloud_geometry(mesh, &embed_graph_standard(mesh, u), false)
}

fn cloud_geometry(mesh: &DiskMesh, points: &[V4], intrinsic: bool) -> Result<SurfaceGeometry> {
    let n = mesh.num_vertices();
    if points.len() != n {
        return Err(AdsError::DimensionMismatch { left: points.len(), right: n });
    }
    let fits: Vec<LocalFit> = (0..n)
        .into_par_iter()
        .map(|i| fit_vertex(mesh, points, i, &mesh.k_ring(i, STENCIL_RINGS)))
        .collect::<Result<_>>()?;
    let mut g = SurfaceGeometry {
        points: points.to_vec(),
        normals: Vec::with_capacity(n),
        nu: Vec::with_capacity(n),
        ii: Vec::with_capacity(n),
        mean_curvature: Vec::with_capacity(n),
        ii_norm_sq: Vec::with_capacity(n),
        gauss_curvature: Vec::with_capacity(n),
        intrinsic_curvature: if intrinsic { angle_defect_curvature(mesh, points) } else { vec![f64::NAN; n] },
        interior: (0..n).map(|i| mesh.is_interior(i)).collect(),
        frames: Vec::with_capacity(n),
    };
    for (i, fit) in fits.into_iter().enumerate() {
        let [a, b, c] = fit.ii;
        g.nu.push(-dot4(&fit.normal, &fiber_unit4(&points[i])));
        g.normals.push(fit.normal);
        g.frames.push(fit.frame);
        g.ii.push(fit.ii);
        g.mean_curvature.push(a + c);
        g.ii_norm_sq.push(a * a + 2.0 * b * b + c * c);
        g.gauss_curvature.push(-1.0 - (a * c - b * b));
    }
    Ok(g)
}

/// Spacelike distance between points of a spacelike surface.
fn chord(p: &V4, q: &V4) -> f64 {
    (-dot4(p, q)).max(1.0).acosh()
}

/// Curvature `-1 + (2 pi - sum of hyperbolic comparison angles) / (area / 3)`,
/// averaged over the interior vertices of a geodesic ball of radius `sqrt(h)`.
/// Single-vertex defects are not pointwise consistent on irregular stencils;
/// the averaged value converges like `sqrt(h)`. Exact (-1) on totally geodesic
/// planes. Boundary entries are NaN.
fn angle_defect_curvature(mesh: &DiskMesh, points: &[V4]) -> Vec<f64> {
    let n = mesh.num_vertices();
    let mut angle = vec![0.0; n];
    let mut area = vec![0.0; n];
    for tri in &mesh.triangles {
        let l = [
            chord(&points[tri[1]], &points[tri[2]]),
            chord(&points[tri[2]], &points[tri[0]]),
            chord(&points[tri[0]], &points[tri[1]]),
        ];
        let mut sum = 0.0;
        let mut ang = [0.0; 3];
        for k in 0..3 {
            let (a, b, c) = (l[k], l[(k + 1) % 3], l[(k + 2) % 3]);
            let cos = (b.cosh() * c.cosh() - a.cosh()) / (b.sinh() * c.sinh());
            ang[k] = cos.clamp(-1.0, 1.0).acos();
            sum += ang[k];
        }
        let tri_area = (PI - sum).max(0.0);
        for k in 0..3 {
            angle[tri[k]] += ang[k];
            area[tri[k]] += tri_area / 3.0;
        }
    }
    let radius = mesh.h.sqrt();
    let rings = (radius / (0.5 * mesh.h)).ceil() as usize;
    (0..n)
        .map(|i| {
            if !mesh.is_interior(i) {
                return f64::NAN;
            }
            let mut patch = mesh.k_ring(i, rings);
            patch.push(i);
            patch.retain(|&j| {
                mesh.is_interior(j) && crate::mesh::hyperbolic_distance(&mesh.vertices[i], &mesh.vertices[j]) <= radius
            });
            let d: f64 = patch.iter().map(|&j| TAU - angle[j]).sum();
            let a: f64 = patch.iter().map(|&j| area[j]).sum();
            -1.0 + d / a
        })
        .collect()
}

/// Per-vertex Gauss-equation residual `K_intrinsic - (-1 - det II)`.
#[derive(Debug, Clone, Serialize)]
pub struct GaussReport {
    pub residual: Vec<f64>,
    pub max_interior: f64,
}

/// Compares intrinsic curvature with the Gauss equation at every vertex.
pub fn sectional_curvature_check(geom: &SurfaceGeometry) -> GaussReport {
    let residual: Vec<f64> = geom.intrinsic_curvature.iter().zip(&geom.gauss_curvature).map(|(k, g)| k - g).collect();
    let max_interior = geom.interior_max_deviation(&residual, 0.0);
    GaussReport { residual, max_interior }
}

/// Laplace-Beltrami of a nodal field on the surface described by `geom`.
pub fn laplace_beltrami(mesh: &DiskMesh, geom: &SurfaceGeometry, v: &[f64]) -> Result<Vec<f64>> {
    (0..mesh.num_vertices())
        .into_par_iter()
        .map(|i| {
            let stencil = mesh.k_ring(i, STENCIL_RINGS);
            let [e1, e2] = geom.frames[i];
            let coords: Vec<(f64, f64)> =
                stencil.iter().map(|&j| (dot4(&geom.points[j], &e1), dot4(&geom.points[j], &e2))).collect();
            let vals: Vec<f64> = stencil.iter().map(|&j| v[j] - v[i]).collect();
            let c = jet(&coords, &vals).ok_or(AdsError::DegenerateStencil { vertex: i, neighbors: stencil.len() })?;
            Ok(c[2] + c[4])
        })
        .collect()
}

/// The Jacobi operator `J v = Lap v - (2 + |II|^2) v` on the surface.
pub fn jacobi_operator(mesh: &DiskMesh, geom: &SurfaceGeometry, v: &[f64]) -> Result<Vec<f64>> {
    let lap = laplace_beltrami(mesh, geom, v)?;
    Ok(lap.iter().enumerate().map(|(i, l)| l - (2.0 + geom.ii_norm_sq[i]) * v[i]).collect())
}

/// The normal graph `cos(v) F + sin(v) N` over a surface.
pub fn normal_graph(geom: &SurfaceGeometry, v: &[f64]) -> Vec<V4> {
    geom.points
        .iter()
        .zip(&geom.normals)
        .zip(v)
        .map(|((f, n), &s)| {
            let (sn, cs) = s.sin_cos();
            [0, 1, 2, 3].map(|k| cs * f[k] + sn * n[k])
        })
        .collect()
}
