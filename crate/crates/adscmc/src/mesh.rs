//! Triangulated geodesic discs of H^2.
//!
//! Vertices sit on concentric geodesic circles of radius `k dr`. Ring `k`
//! carries `max(6, ceil(2 pi sinh(k dr) / h))` equally spaced vertices, and
//! consecutive rings are stitched by a zipper walk in angle. Vertices are
//! numbered ring by ring, so the disc of `k` rings is a prefix of any larger
//! disc built with the same `dr` and `h`.

use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{AdsError, Result};
use crate::quadric::hyperboloid_point;

/// Largest supported radius.
pub const MAX_RADIUS: f64 = 6.0;

/// Triangulated geodesic disc centred at `x_0`.
#[derive(Debug, Clone, Serialize)]
pub struct DiskMesh {
    pub radius: f64,
    pub h: f64,
    pub dr: f64,
    /// Hyperboloid coordinates.
    pub vertices: Vec<[f64; 3]>,
    /// Poincare disc coordinates `(x_1, x_2) / (1 + x_3)`.
    pub disk: Vec<[f64; 2]>,
    /// Distance from `x_0`.
    pub rho: Vec<f64>,
    /// Counter-clockwise triangles in the disc chart.
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    /// Ring `k` owns vertices `ring_start[k]..ring_start[k + 1]`.
    pub ring_start: Vec<usize>,
    #[serde(skip)]
    pub neighbors: Vec<Vec<usize>>,
    #[serde(skip)]
    pub vertex_triangles: Vec<Vec<usize>>,
    /// Triangles between rings `k` and `k + 1` are `strip_start[k]..strip_start[k + 1]`.
    #[serde(skip)]
    strip_start: Vec<usize>,
}

/// Ring spacing used by `build_mesh(R, h)`.
pub fn ring_spacing(radius: f64, h: f64) -> f64 {
    radius / (radius / (h * 3f64.sqrt() / 2.0)).ceil()
}

/// Disc of radius `R` with target edge length `h` (hyperbolic).
pub fn build_mesh(radius: f64, h: f64) -> Result<DiskMesh> {
    if !(radius > 0.0 && radius <= MAX_RADIUS) {
        return Err(AdsError::Mesh(format!("radius {radius} outside (0, {MAX_RADIUS}]")));
    }
    if !(h > 0.0 && h <= radius / 4.0) {
        return Err(AdsError::Mesh(format!("edge length {h} outside (0, R/4]")));
    }
    let dr = ring_spacing(radius, h);
    let rings = (radius / dr).round() as usize;
    build_rings(rings, dr, h)
}

/// Disc made of `rings` rings of spacing `dr` (radius `rings * dr`).
pub fn build_rings(rings: usize, dr: f64, h: f64) -> Result<DiskMesh> {
    if rings < 1 || !(dr > 0.0) || !(h > 0.0) {
        return Err(AdsError::Mesh("need at least one ring and positive spacing".into()));
    }
    let mut vertices = vec![[0.0, 0.0, 1.0]];
    let mut rho = vec![0.0];
    let mut angles: Vec<Vec<f64>> = vec![vec![0.0]];
    let mut ring_start = vec![0, 1];
    for k in 1..=rings {
        let r = k as f64 * dr;
        let m = 6.max((TAU * r.sinh() / h).ceil() as usize);
        let offset = if k % 2 == 1 { PI / m as f64 } else { 0.0 };
        let mut a = Vec::with_capacity(m);
        for j in 0..m {
            let phi = offset + TAU * j as f64 / m as f64;
            let p = hyperboloid_point(r, &[phi.cos(), phi.sin()]);
            vertices.push([p[0], p[1], p[2]]);
            rho.push(r);
            a.push(phi);
        }
        angles.push(a);
        ring_start.push(vertices.len());
    }
    let mut triangles = Vec::new();
    let mut strip_start = vec![0];
    // Centre fan.
    let m1 = angles[1].len();
    for j in 0..m1 {
        triangles.push([0, 1 + j, 1 + (j + 1) % m1]);
    }
    strip_start.push(triangles.len());
    for k in 2..=rings {
        zipper(&angles[k - 1], ring_start[k - 1], &angles[k], ring_start[k], &mut triangles);
        strip_start.push(triangles.len());
    }
    let n = vertices.len();
    let disk = vertices.iter().map(|v| [v[0] / (1.0 + v[2]), v[1] / (1.0 + v[2])]).collect();
    let mut boundary = vec![false; n];
    for b in boundary.iter_mut().skip(ring_start[rings]) {
        *b = true;
    }
    let mut mesh = DiskMesh {
        radius: rings as f64 * dr,
        h,
        dr,
        vertices,
        disk,
        rho,
        triangles,
        boundary,
        ring_start,
        neighbors: vec![],
        vertex_triangles: vec![],
        strip_start,
    };
    mesh.build_adjacency();
    Ok(mesh)
}

/// Stitches an inner ring to an outer ring, walking both by angle.
fn zipper(inner: &[f64], i0: usize, outer: &[f64], o0: usize, out: &mut Vec<[usize; 3]>) {
    let (mi, mo) = (inner.len(), outer.len());
    let ang = |a: &[f64], k: usize| a[k % a.len()] + TAU * (k / a.len()) as f64;
    let (mut i, mut j) = (0, 0);
    while i < mi || j < mo {
        let advance_outer = j < mo && (i == mi || ang(outer, j + 1) < ang(inner, i + 1));
        if advance_outer {
            out.push([i0 + i % mi, o0 + j % mo, o0 + (j + 1) % mo]);
            j += 1;
        } else {
            out.push([i0 + i % mi, o0 + j % mo, i0 + (i + 1) % mi]);
            i += 1;
        }
    }
}

impl DiskMesh {
    fn build_adjacency(&mut self) {
        let n = self.vertices.len();
        let mut nb: Vec<Vec<usize>> = vec![vec![]; n];
        let mut vt: Vec<Vec<usize>> = vec![vec![]; n];
        for (t, tri) in self.triangles.iter().enumerate() {
            for a in 0..3 {
                vt[tri[a]].push(t);
                for b in 0..3 {
                    if a != b {
                        nb[tri[a]].push(tri[b]);
                    }
                }
            }
        }
        for l in nb.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }
        self.neighbors = nb;
        self.vertex_triangles = vt;
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_rings(&self) -> usize {
        self.ring_start.len() - 2
    }

    pub fn is_interior(&self, i: usize) -> bool {
        !self.boundary[i]
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices()).filter(|&i| !self.boundary[i])
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices()).filter(|&i| self.boundary[i])
    }

    /// The nested disc made of the first `rings` rings.
    pub fn prefix(&self, rings: usize) -> Result<DiskMesh> {
        if rings < 1 || rings > self.num_rings() {
            return Err(AdsError::Mesh(format!("prefix of {rings} rings out of 1..={}", self.num_rings())));
        }
        build_rings(rings, self.dr, self.h)
    }

    /// Number of rings whose radius is closest to `r`.
    pub fn rings_for_radius(&self, r: f64) -> usize {
        ((r / self.dr).round() as usize).clamp(1, self.num_rings())
    }

    /// Vertices within distance `r` of `x_0`.
    pub fn vertices_within(&self, r: f64) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices()).filter(move |&i| self.rho[i] <= r + 1e-12)
    }

    /// Neighbours at combinatorial distance 1 or 2 (excluding the vertex).
    pub fn two_ring(&self, i: usize) -> Vec<usize> {
        self.k_ring(i, 2)
    }

    /// Neighbours at combinatorial distance `1..=k` (excluding the vertex).
    pub fn k_ring(&self, i: usize, k: usize) -> Vec<usize> {
        let mut s: Vec<usize> = vec![i];
        let mut frontier = vec![i];
        for _ in 0..k {
            let mut next = vec![];
            for &v in &frontier {
                next.extend_from_slice(&self.neighbors[v]);
            }
            next.sort_unstable();
            next.dedup();
            next.retain(|v| s.binary_search(v).is_err());
            s.extend_from_slice(&next);
            s.sort_unstable();
            frontier = next;
        }
        s.retain(|&j| j != i);
        s
    }

    /// Signed area of a triangle in the disc chart.
    pub fn disk_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.disk[a], self.disk[b], self.disk[c]);
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))
    }

    /// Hyperbolic length of the longest edge.
    pub fn max_edge_length(&self) -> f64 {
        let mut m = 0.0_f64;
        for tri in &self.triangles {
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                m = m.max(hyperbolic_distance(&self.vertices[a], &self.vertices[b]));
            }
        }
        m
    }

    /// Triangle containing the disc point `z` and its barycentric weights.
    pub fn locate(&self, z: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
        if r >= 1.0 {
            return None;
        }
        let rho = 2.0 * r.atanh();
        let k = (rho / self.dr).floor() as usize;
        let strips = self.strip_start.len() - 1;
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(strips - 1);
        let mut best: Option<(usize, [f64; 3])> = None;
        let mut best_min = f64::NEG_INFINITY;
        for s in lo..=hi {
            for t in self.strip_start[s]..self.strip_start[s + 1] {
                let w = self.barycentric(t, z);
                let mn = w[0].min(w[1]).min(w[2]);
                if mn > best_min {
                    best_min = mn;
                    best = Some((t, w));
                }
            }
        }
        if best_min >= -1e-9 {
            best
        } else {
            None
        }
    }

    /// Barycentric coordinates of `z` in triangle `t` (disc chart).
    pub fn barycentric(&self, t: usize, z: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.disk[a], self.disk[b], self.disk[c]);
        let det = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
        let l1 = ((z[0] - p[0]) * (r[1] - p[1]) - (z[1] - p[1]) * (r[0] - p[0])) / det;
        let l2 = ((q[0] - p[0]) * (z[1] - p[1]) - (q[1] - p[1]) * (z[0] - p[0])) / det;
        [1.0 - l1 - l2, l1, l2]
    }

    /// Piecewise-linear interpolation of nodal values at a point of H^2.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> Option<f64> {
        let z = [x[0] / (1.0 + x[2]), x[1] / (1.0 + x[2])];
        let (t, w) = self.locate(z)?;
        let tri = self.triangles[t];
        Some(w[0] * values[tri[0]] + w[1] * values[tri[1]] + w[2] * values[tri[2]])
    }
}

/// Hyperbolic distance between hyperboloid points.
pub fn hyperbolic_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let c = a[2] * b[2] - a[0] * b[0] - a[1] * b[1];
    c.max(1.0).acosh()
}

/// Point of H^2 from Poincare disc coordinates.
pub fn hyperboloid_from_disk(z: [f64; 2]) -> [f64; 3] {
    let r2 = z[0] * z[0] + z[1] * z[1];
    let d = 1.0 - r2;
    [2.0 * z[0] / d, 2.0 * z[1] / d, (1.0 + r2) / d]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_invariants_default_resolution() {
        let m = build_mesh(3.0, 0.1).unwrap();
        assert!(m.num_vertices() > 5000 && m.num_vertices() < 8000, "{}", m.num_vertices());
        assert!(m.max_edge_length() <= 1.5 * m.h);
        for t in 0..m.triangles.len() {
            assert!(m.disk_area(t) > 0.0, "triangle {t} not positively oriented");
        }
        for i in m.boundary_vertices() {
            assert!((m.rho[i] - 3.0).abs() < 1e-8);
            let d = hyperbolic_distance(&[0.0, 0.0, 1.0], &m.vertices[i]);
            assert!((d - 3.0).abs() < 1e-8);
        }
        for i in m.interior_vertices() {
            assert!(m.neighbors[i].len() >= 3);
        }
    }

    #[test]
    fn mesh_is_conforming() {
        let m = build_mesh(1.5, 0.2).unwrap();
        let mut count = std::collections::HashMap::new();
        for tri in &m.triangles {
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        for ((a, b), c) in count {
            let on_boundary = m.boundary[a] && m.boundary[b];
            assert_eq!(c, if on_boundary { 1 } else { 2 }, "edge {a}-{b}");
        }
        // Euler characteristic of a disc.
        let e = (m.triangles.len() * 3 + m.boundary_vertices().count()) / 2;
        assert_eq!(m.num_vertices() as i64 - e as i64 + m.triangles.len() as i64, 1);
    }

    #[test]
    fn prefixes_are_nested() {
        let m = build_mesh(2.0, 0.2).unwrap();
        let p = m.prefix(5).unwrap();
        for i in 0..p.num_vertices() {
            assert_eq!(p.vertices[i], m.vertices[i]);
        }
        assert_eq!(&m.triangles[..p.triangles.len()], &p.triangles[..]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_mesh(7.0, 0.1).is_err());
        assert!(build_mesh(1.0, 0.5).is_err());
    }

    #[test]
    fn interpolation_reproduces_linear_functions() {
        let m = build_mesh(2.0, 0.2).unwrap();
        let vals: Vec<f64> = m.disk.iter().map(|z| 0.3 * z[0] - 0.7 * z[1] + 0.1).collect();
        for z in [[0.1, 0.2], [-0.5, 0.3], [0.0, 0.0], [0.6, -0.2]] {
            let x = hyperboloid_from_disk(z);
            let v = m.interpolate(&vals, &x).unwrap();
            assert!((v - (0.3 * z[0] - 0.7 * z[1] + 0.1)).abs() < 1e-12);
        }
        assert!(m.interpolate(&vals, &hyperboloid_from_disk([0.95, 0.0])).is_none());
    }
}
