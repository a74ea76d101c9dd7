//! Compressed sparse row matrices on a mesh pattern and a Jacobi-preconditioned
//! conjugate gradient solver.

use crate::error::{AdsError, Result};
use crate::mesh::DiskMesh;

/// Symmetric sparse matrix whose pattern is the vertex adjacency of a mesh.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
    /// For each triangle, CSR positions of its 3x3 local block (row-major).
    pub tri_slots: Vec<[usize; 9]>,
    diag: Vec<usize>,
}

impl CsrMatrix {
    /// Zero matrix with the pattern of `mesh` (edges and diagonal).
    pub fn from_mesh(mesh: &DiskMesh) -> Self {
        let n = mesh.num_vertices();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut diag = Vec::with_capacity(n);
        row_ptr.push(0);
        for i in 0..n {
            let mut row: Vec<usize> = mesh.neighbors[i].clone();
            row.push(i);
            row.sort_unstable();
            diag.push(cols.len() + row.iter().position(|&j| j == i).unwrap());
            cols.extend(row);
            row_ptr.push(cols.len());
        }
        let mut m = Self { n, row_ptr, cols, vals: vec![], tri_slots: vec![], diag };
        m.vals = vec![0.0; m.cols.len()];
        m.tri_slots = mesh
            .triangles
            .iter()
            .map(|tri| {
                let mut s = [0; 9];
                for a in 0..3 {
                    for b in 0..3 {
                        s[3 * a + b] = m.slot(tri[a], tri[b]).expect("pattern covers triangle");
                    }
                }
                s
            })
            .collect();
        m
    }

    /// CSR position of entry `(i, j)` if it is in the pattern.
    pub fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    pub fn clear(&mut self) {
        self.vals.iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.diag.iter().map(|&k| self.vals[k]).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.vals[k])
    }

    /// `y = A x`.
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }

    /// `y = A x` restricted to rows and columns where `free` holds.
    pub fn mul_free(&self, free: &[bool], x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            if !free[i] {
                y[i] = 0.0;
                continue;
            }
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                if free[j] {
                    s += self.vals[k] * x[j];
                }
            }
            y[i] = s;
        }
    }
}

/// Outcome of a conjugate gradient solve.
#[derive(Debug, Clone, Copy)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `A_FF x_F = b_F` on the free unknowns by Jacobi-preconditioned CG.
/// Entries of `x` outside `free` are set to zero.
pub fn pcg(a: &CsrMatrix, free: &[bool], b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Result<CgReport> {
    let n = a.n;
    let d = a.diagonal();
    let minv: Vec<f64> = (0..n).map(|i| if free[i] && d[i] > 0.0 { 1.0 / d[i] } else { 0.0 }).collect();
    if (0..n).any(|i| free[i] && !(d[i] > 0.0)) {
        return Err(AdsError::LinearSolve("non-positive diagonal entry".into()));
    }
    let dot = |u: &[f64], v: &[f64]| (0..n).filter(|&i| free[i]).map(|i| u[i] * v[i]).sum::<f64>();
    x.iter_mut().enumerate().for_each(|(i, v)| {
        if !free[i] {
            *v = 0.0
        }
    });
    let mut ax = vec![0.0; n];
    a.mul_free(free, x, &mut ax);
    let mut r: Vec<f64> = (0..n).map(|i| if free[i] { b[i] - ax[i] } else { 0.0 }).collect();
    let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    let mut z: Vec<f64> = (0..n).map(|i| minv[i] * r[i]).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        let rn = dot(&r, &r).sqrt();
        if rn <= rel_tol * bnorm {
            return Ok(CgReport { iterations: it, relative_residual: rn / bnorm });
        }
        a.mul_free(free, &p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(AdsError::LinearSolve(format!("matrix not positive definite (p'Ap = {pap:e})")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            if free[i] {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
                z[i] = minv[i] * r[i];
            }
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            if free[i] {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
    let rn = dot(&r, &r).sqrt();
    if rn <= 1e3 * rel_tol * bnorm {
        Ok(CgReport { iterations: max_iter, relative_residual: rn / bnorm })
    } else {
        Err(AdsError::LinearSolve(format!("CG stalled at relative residual {:e}", rn / bnorm)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;

    #[test]
    fn graph_laplacian_solve() {
        let mesh = build_mesh(1.0, 0.2).unwrap();
        let mut a = CsrMatrix::from_mesh(&mesh);
        for i in 0..a.n {
            for &j in &mesh.neighbors[i] {
                let k = a.slot(i, j).unwrap();
                a.vals[k] = -1.0;
            }
            let k = a.slot(i, i).unwrap();
            a.vals[k] = mesh.neighbors[i].len() as f64 + 0.1;
        }
        let free: Vec<bool> = (0..a.n).map(|i| mesh.is_interior(i)).collect();
        let xs: Vec<f64> = (0..a.n).map(|i| if free[i] { (i as f64).sin() } else { 0.0 }).collect();
        let mut b = vec![0.0; a.n];
        a.mul_free(&free, &xs, &mut b);
        let mut x = vec![0.0; a.n];
        let rep = pcg(&a, &free, &b, &mut x, 1e-13, 2000).unwrap();
        assert!(rep.relative_residual <= 1e-13);
        for i in 0..a.n {
            assert!((x[i] - xs[i]).abs() < 1e-10);
        }
    }
}
