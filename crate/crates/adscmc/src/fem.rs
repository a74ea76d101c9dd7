//! Finite elements for spacelike graphs over a geodesic disc.
//!
//! A graph `t = u(x)` in the standard split chart has induced area density
//! `mu^2 sqrt(1 - |du|^2 / lambda^2)` in Poincare disc coordinates, where
//! `lambda = 2 / (1 + |z|^2)` and `mu = 2 / (1 - |z|^2)` (`mu` is the conformal
//! factor of H^2 and `mu / lambda = cosh rho`). The CMC-`H` graphs are the
//! critical points of the convex functional
//!
//! `J_H(u) = int -mu^2 sqrt(1 - |du|^2/lambda^2) + H cosh(rho) mu^2 u dz`,
//!
//! whose second term is `H` times the signed spacetime volume under the graph.
//! With P1 elements and a three-point quadrature rule, the nodal mean
//! curvature is `H_i = -A_i / M_i`, where `A_i` is the area variation along
//! the hat function `phi_i` and `M_i = int cosh(rho) mu^2 phi_i`.

use crate::error::{AdsError, Result};
use crate::mesh::DiskMesh;
use crate::sparse::CsrMatrix;

/// Barycentric quadrature points (degree 2) with equal weights 1/3.
const QUAD: [[f64; 3]; 3] =
    [[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0]];

#[derive(Debug, Clone, Copy)]
struct QuadPoint {
    /// `|T| w mu^2`.
    area: f64,
    /// `1 / lambda^2`.
    inv_l2: f64,
    /// `|T| w cosh(rho) mu^2`.
    vol: f64,
    phi: [f64; 3],
}

#[derive(Debug, Clone)]
struct Element {
    verts: [usize; 3],
    grads: [[f64; 2]; 3],
    quad: [QuadPoint; 3],
}

/// Precomputed P1 element data on a disc mesh.
#[derive(Debug, Clone)]
pub struct FemSpace {
    elements: Vec<Element>,
    /// `M_i = int cosh(rho) mu^2 phi_i`.
    pub volume_mass: Vec<f64>,
    /// `int mu^2 phi_i` (lumped hyperbolic area).
    pub area_mass: Vec<f64>,
    pub free: Vec<bool>,
    n: usize,
}

impl FemSpace {
    pub fn new(mesh: &DiskMesh) -> Self {
        let n = mesh.num_vertices();
        let mut volume_mass = vec![0.0; n];
        let mut area_mass = vec![0.0; n];
        let elements = mesh
            .triangles
            .iter()
            .map(|&verts| {
                let p: Vec<[f64; 2]> = verts.iter().map(|&v| mesh.disk[v]).collect();
                let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
                let area = 0.5 * det;
                let mut grads = [[0.0; 2]; 3];
                for a in 0..3 {
                    let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                    grads[a] = [(p[b][1] - p[c][1]) / det, (p[c][0] - p[b][0]) / det];
                }
                let quad = QUAD.map(|bc| {
                    let z = [
                        bc[0] * p[0][0] + bc[1] * p[1][0] + bc[2] * p[2][0],
                        bc[0] * p[0][1] + bc[1] * p[1][1] + bc[2] * p[2][1],
                    ];
                    let r2 = z[0] * z[0] + z[1] * z[1];
                    let lambda = 2.0 / (1.0 + r2);
                    let mu = 2.0 / (1.0 - r2);
                    let w = area / 3.0;
                    QuadPoint {
                        area: w * mu * mu,
                        inv_l2: 1.0 / (lambda * lambda),
                        vol: w * mu * mu * mu / lambda,
                        phi: bc,
                    }
                });
                for q in &quad {
                    for a in 0..3 {
                        volume_mass[verts[a]] += q.vol * q.phi[a];
                        area_mass[verts[a]] += q.area * q.phi[a];
                    }
                }
                Element { verts, grads, quad }
            })
            .collect();
        let free = (0..n).map(|i| mesh.is_interior(i)).collect();
        Self { elements, volume_mass, area_mass, free, n }
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    fn slope(e: &Element, u: &[f64]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for a in 0..3 {
            g[0] += u[e.verts[a]] * e.grads[a][0];
            g[1] += u[e.verts[a]] * e.grads[a][1];
        }
        g
    }

    /// Minimum over quadrature points of `1 - |du|^2_{H^2} cosh^2 rho`; positive
    /// exactly when the discrete graph is spacelike there.
    pub fn spacelike_margin(&self, u: &[f64]) -> f64 {
        let mut m = f64::INFINITY;
        for e in &self.elements {
            let g = Self::slope(e, u);
            let g2 = g[0] * g[0] + g[1] * g[1];
            for q in &e.quad {
                m = m.min(1.0 - g2 * q.inv_l2);
            }
        }
        m
    }

    /// Per-vertex margin (minimum over incident quadrature points).
    pub fn vertex_margins(&self, u: &[f64]) -> Vec<f64> {
        let mut m = vec![f64::INFINITY; self.n];
        for e in &self.elements {
            let g = Self::slope(e, u);
            let g2 = g[0] * g[0] + g[1] * g[1];
            let em = e.quad.iter().map(|q| 1.0 - g2 * q.inv_l2).fold(f64::INFINITY, f64::min);
            for &v in &e.verts {
                m[v] = m[v].min(em);
            }
        }
        m
    }

    /// `J_H(u)`, or `None` if the graph is not spacelike.
    pub fn energy(&self, u: &[f64], h: f64) -> Option<f64> {
        let mut j = 0.0;
        for e in &self.elements {
            let g = Self::slope(e, u);
            let g2 = g[0] * g[0] + g[1] * g[1];
            for q in &e.quad {
                let w2 = 1.0 - g2 * q.inv_l2;
                if !(w2 > 0.0) {
                    return None;
                }
                let uq = q.phi[0] * u[e.verts[0]] + q.phi[1] * u[e.verts[1]] + q.phi[2] * u[e.verts[2]];
                j += -q.area * w2.sqrt() + h * q.vol * uq;
            }
        }
        Some(j)
    }

    /// Area variation `A_i` at every node.
    pub fn area_variation(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut a = vec![0.0; self.n];
        for e in &self.elements {
            let g = Self::slope(e, u);
            let g2 = g[0] * g[0] + g[1] * g[1];
            let mut coef = 0.0;
            for q in &e.quad {
                let w2 = 1.0 - g2 * q.inv_l2;
                if !(w2 > 0.0) {
                    return Err(AdsError::SpacelikeLoss(format!("margin {w2:e} in element {:?}", e.verts)));
                }
                coef += q.area * q.inv_l2 / w2.sqrt();
            }
            for k in 0..3 {
                a[e.verts[k]] += coef * (g[0] * e.grads[k][0] + g[1] * e.grads[k][1]);
            }
        }
        Ok(a)
    }

    /// Gradient of `J_H`: `A_i + H M_i`.
    pub fn gradient(&self, u: &[f64], h: f64) -> Result<Vec<f64>> {
        let mut g = self.area_variation(u)?;
        for (gi, m) in g.iter_mut().zip(&self.volume_mass) {
            *gi += h * m;
        }
        Ok(g)
    }

    /// Nodal mean curvature `H_i = -A_i / M_i` (boundary entries are not meaningful).
    pub fn mean_curvature(&self, u: &[f64]) -> Result<Vec<f64>> {
        let a = self.area_variation(u)?;
        Ok(a.iter().zip(&self.volume_mass).map(|(a, m)| -a / m).collect())
    }

    /// Assembles the Hessian of `J_H` (independent of `H`) into `k`.
    pub fn hessian(&self, u: &[f64], k: &mut CsrMatrix) -> Result<()> {
        k.clear();
        for (t, e) in self.elements.iter().enumerate() {
            let g = Self::slope(e, u);
            let g2 = g[0] * g[0] + g[1] * g[1];
            let (mut c1, mut c2) = (0.0, 0.0);
            for q in &e.quad {
                let w2 = 1.0 - g2 * q.inv_l2;
                if !(w2 > 0.0) {
                    return Err(AdsError::SpacelikeLoss(format!("margin {w2:e} in element {t}")));
                }
                let w = w2.sqrt();
                c1 += q.area * q.inv_l2 / w;
                c2 += q.area * q.inv_l2 * q.inv_l2 / (w2 * w);
            }
            let gd: Vec<f64> = (0..3).map(|a| g[0] * e.grads[a][0] + g[1] * e.grads[a][1]).collect();
            let slots = &k.tri_slots[t];
            for a in 0..3 {
                for b in 0..3 {
                    let dd = e.grads[a][0] * e.grads[b][0] + e.grads[a][1] * e.grads[b][1];
                    k.vals[slots[3 * a + b]] += c1 * dd + c2 * gd[a] * gd[b];
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{equidistant_graph, Side};
    use crate::mesh::build_mesh;
    use std::f64::consts::FRAC_PI_4;

    fn equidistant_nodes(mesh: &DiskMesh, theta: f64, side: Side) -> Vec<f64> {
        mesh.vertices.iter().map(|v| equidistant_graph(theta, side, v).unwrap()).collect()
    }

    #[test]
    fn totally_geodesic_slice_is_maximal() {
        let mesh = build_mesh(2.0, 0.2).unwrap();
        let fem = FemSpace::new(&mesh);
        let u = vec![0.0; mesh.num_vertices()];
        let h = fem.mean_curvature(&u).unwrap();
        assert!(mesh.interior_vertices().all(|i| h[i] == 0.0));
        assert_eq!(fem.spacelike_margin(&u), 1.0);
    }

    #[test]
    fn equidistant_has_expected_discrete_mean_curvature() {
        let mesh = build_mesh(2.0, 0.1).unwrap();
        let fem = FemSpace::new(&mesh);
        let u = equidistant_nodes(&mesh, FRAC_PI_4, Side::Past);
        let h = fem.mean_curvature(&u).unwrap();
        // Nodal values are not pointwise consistent on irregular stencils;
        // their volume-weighted average over the interior is.
        let (mut num, mut den) = (0.0, 0.0);
        for i in mesh.interior_vertices() {
            num += fem.volume_mass[i] * (h[i] - 2.0);
            den += fem.volume_mass[i];
        }
        assert!((num / den).abs() < 2e-3, "weighted error {}", num / den);
        let m = fem.spacelike_margin(&u);
        assert!((m - 0.5).abs() < 0.05, "margin {m}");
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let mesh = build_mesh(1.0, 0.25).unwrap();
        let fem = FemSpace::new(&mesh);
        let u = equidistant_nodes(&mesh, 0.5, Side::Past);
        let mut k = CsrMatrix::from_mesh(&mesh);
        fem.hessian(&u, &mut k).unwrap();
        let g0 = fem.gradient(&u, 1.0).unwrap();
        let eps = 1e-6;
        for j in [0, 3, 10] {
            let mut up = u.clone();
            up[j] += eps;
            let g1 = fem.gradient(&up, 1.0).unwrap();
            for i in 0..u.len() {
                let fd = (g1[i] - g0[i]) / eps;
                assert!((fd - k.get(i, j)).abs() < 1e-4 * (1.0 + fd.abs()), "({i},{j}) fd {fd} vs {}", k.get(i, j));
            }
        }
    }

    #[test]
    fn gradient_matches_energy_differences() {
        let mesh = build_mesh(1.0, 0.25).unwrap();
        let fem = FemSpace::new(&mesh);
        let u = equidistant_nodes(&mesh, 0.4, Side::Future);
        let g = fem.gradient(&u, -0.7).unwrap();
        let eps = 1e-6;
        for j in [0, 5, 12] {
            let mut up = u.clone();
            let mut um = u.clone();
            up[j] += eps;
            um[j] -= eps;
            let fd = (fem.energy(&up, -0.7).unwrap() - fem.energy(&um, -0.7).unwrap()) / (2.0 * eps);
            assert!((fd - g[j]).abs() < 1e-6, "{fd} vs {}", g[j]);
        }
    }
}
