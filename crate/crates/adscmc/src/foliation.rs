//! Families of CMC graphs over a grid of curvatures, the CMC time function
//! they define and checks that the leaves foliate the invisible domain.
//!
//! Leaves are solved by continuation: the leaf closest to `H = 0` first, then
//! outward in both directions, each warm-started from its neighbour. All
//! leaves live on the same mesh (the largest radius of the schedule).

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::BoundaryData;
use crate::cosmo::BarrierField;
use crate::error::{AdsError, Result};
use crate::mesh::DiskMesh;
use crate::solver::{exhaustion_with_field, ordering_verify, CmcSolution, OrderingReport, SolverConfig};

/// Largest `|H|` accepted on a family grid.
pub const MAX_FAMILY_CURVATURE: f64 = 5.0;
/// Number of points of the default grid on `[-2, 2]`.
pub const DEFAULT_GRID_POINTS: usize = 17;

/// `count` evenly spaced curvatures on `[h_min, h_max]`.
pub fn uniform_grid(h_min: f64, h_max: f64, count: usize) -> Result<Vec<f64>> {
    if count < 1 || !(h_min <= h_max) || (count == 1 && h_min != h_max) {
        return Err(AdsError::InvalidParameter(format!("bad grid [{h_min}, {h_max}] with {count} points")));
    }
    if count == 1 {
        return Ok(vec![h_min]);
    }
    Ok((0..count).map(|k| h_min + (h_max - h_min) * k as f64 / (count - 1) as f64).collect())
}

/// The default grid: 17 points on `[-2, 2]`.
pub fn default_grid() -> Vec<f64> {
    uniform_grid(-2.0, 2.0, DEFAULT_GRID_POINTS).expect("valid default grid")
}

/// CMC graphs with the same boundary data, sorted by increasing `H`.
#[derive(Debug, Clone, Serialize)]
pub struct CmcFamily {
    #[serde(skip)]
    pub boundary: BoundaryData,
    pub h_grid: Vec<f64>,
    pub leaves: Vec<CmcSolution>,
    /// Ordering of each adjacent pair `(k, k + 1)`.
    pub orderings: Vec<OrderingReport>,
}

impl CmcFamily {
    pub fn mesh(&self) -> &DiskMesh {
        &self.leaves[0].mesh
    }

    /// Every adjacent pair is strictly ordered.
    pub fn is_ordered(&self) -> bool {
        self.orderings.iter().all(|o| o.strict)
    }

    /// Smallest adjacent gap `min (u_{H_k} - u_{H_{k+1}})` over interior vertices.
    pub fn min_gap(&self) -> f64 {
        self.orderings.iter().map(|o| o.min_gap).fold(f64::INFINITY, f64::min)
    }

    /// Nodal time function built from the leaves.
    pub fn time_field(&self) -> CmcTimeField {
        CmcTimeField {
            h_grid: self.h_grid.clone(),
            mesh: self.mesh().clone(),
            values: self.leaves.iter().map(|l| l.u.clone()).collect(),
        }
    }
}

fn sorted_grid(h_grid: &[f64]) -> Result<Vec<f64>> {
    if h_grid.is_empty() {
        return Err(AdsError::InvalidParameter("empty curvature grid".into()));
    }
    let mut grid = h_grid.to_vec();
    if grid.iter().any(|h| !h.is_finite() || h.abs() > MAX_FAMILY_CURVATURE) {
        return Err(AdsError::InvalidParameter(format!(
            "grid values must lie in [-{MAX_FAMILY_CURVATURE}, {MAX_FAMILY_CURVATURE}]"
        )));
    }
    grid.sort_by(f64::total_cmp);
    if grid.windows(2).any(|w| w[1] - w[0] < 1e-12) {
        return Err(AdsError::InvalidParameter("grid values must be distinct".into()));
    }
    Ok(grid)
}

/// Solves every leaf of `h_grid` for the boundary data `f` by continuation
/// from the leaf closest to `H = 0`, then checks adjacent orderings. Fails if
/// any leaf does not converge.
pub fn solve_family(f: &BoundaryData, h_grid: &[f64], cfg: &SolverConfig) -> Result<CmcFamily> {
    cfg.validate()?;
    let grid = sorted_grid(h_grid)?;
    let field = BarrierField::new(f, cfg.plane_budget)?;
    let start = (0..grid.len()).min_by(|&a, &b| grid[a].abs().total_cmp(&grid[b].abs())).expect("nonempty grid");
    let solve = |h: f64, warm: Option<&[f64]>| -> Result<CmcSolution> {
        let leaf_cfg = SolverConfig { h_target: h, ..cfg.clone() };
        let sol = exhaustion_with_field(&field, &leaf_cfg, warm)?;
        if !sol.converged {
            return Err(AdsError::NotConverged(format!(
                "leaf H = {h}: discrete residual {:e}, geometric error {:e}",
                sol.discrete_residual, sol.geometric_error
            )));
        }
        Ok(sol)
    };
    let first = solve(grid[start], None)?;
    // The two branches only share the first leaf, so they run in parallel.
    let (below, above) = rayon::join(
        || -> Result<Vec<CmcSolution>> {
            let mut out: Vec<CmcSolution> = vec![];
            for k in (0..start).rev() {
                let warm = out.last().unwrap_or(&first).u.clone();
                out.push(solve(grid[k], Some(&warm))?);
            }
            out.reverse();
            Ok(out)
        },
        || -> Result<Vec<CmcSolution>> {
            let mut out: Vec<CmcSolution> = vec![];
            for &h in &grid[start + 1..] {
                let warm = out.last().unwrap_or(&first).u.clone();
                out.push(solve(h, Some(&warm))?);
            }
            Ok(out)
        },
    );
    let mut leaves = below?;
    leaves.push(first);
    leaves.extend(above?);
    let orderings =
        leaves.windows(2).map(|w| ordering_verify(&w[0], &w[1], cfg.tol_geom)).collect::<Result<Vec<_>>>()?;
    Ok(CmcFamily { boundary: f.clone(), h_grid: grid, leaves, orderings })
}

/// CMC time: the curvature of the leaf through `(x, t)`, interpolated
/// piecewise linearly between the leaves of a family.
#[derive(Debug, Clone)]
pub struct CmcTimeField {
    pub h_grid: Vec<f64>,
    pub mesh: DiskMesh,
    /// Nodal values of each leaf, in grid order.
    pub values: Vec<Vec<f64>>,
}

impl CmcTimeField {
    /// Leaf heights `u_H(x)` at a point of H^2, in grid order.
    pub fn heights_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|u| {
                self.mesh
                    .interpolate(u, x)
                    .ok_or_else(|| AdsError::OutsideDomain("point outside the family mesh".into()))
            })
            .collect()
    }

    /// `H` with `u_H(x) = t`; fails if `t` lies outside the band between the
    /// extreme leaves or the leaves are not ordered at `x`.
    pub fn eval(&self, x: &[f64], t: f64) -> Result<f64> {
        let heights = self.heights_at(x)?;
        invert_decreasing(&self.h_grid, &heights, t)
    }
}

/// Piecewise-linear inverse of the decreasing sequence `heights` over `grid`.
fn invert_decreasing(grid: &[f64], heights: &[f64], t: f64) -> Result<f64> {
    let last = heights.len() - 1;
    if heights.windows(2).any(|w| !(w[1] < w[0])) && heights.len() > 1 {
        return Err(AdsError::OutsideDomain("leaves are not strictly ordered at this point".into()));
    }
    if !(t <= heights[0] && t >= heights[last]) {
        return Err(AdsError::OutsideDomain(format!(
            "t = {t} outside the covered band [{}, {}]",
            heights[last], heights[0]
        )));
    }
    if heights.len() == 1 {
        return Ok(grid[0]);
    }
    let k = (0..last).find(|&k| t >= heights[k + 1]).unwrap_or(last - 1);
    let s = (heights[k] - t) / (heights[k] - heights[k + 1]);
    Ok(grid[k] + s * (grid[k + 1] - grid[k]))
}

/// [`CmcTimeField::eval`] on a family.
pub fn cmc_time(family: &CmcFamily, x: &[f64], t: f64) -> Result<f64> {
    family.time_field().eval(x, t)
}

/// Central-difference derivative of the leaves in `H` at an interior grid point.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub h: f64,
    /// Half-width of the difference stencil.
    pub dh: f64,
    /// Largest derivative `du/dH` over interior vertices (must be negative).
    pub max_derivative: f64,
    /// Smallest derivative over interior vertices.
    pub min_derivative: f64,
    /// Derivative at the basepoint.
    pub center_derivative: f64,
    /// Largest `|d^2u/dH^2|` over interior vertices (smoothness probe).
    pub max_second_derivative: f64,
    #[serde(skip)]
    pub derivative: Vec<f64>,
    pub pass: bool,
}

/// Checks that `du_H/dH < 0` at every interior vertex for the grid point `h`,
/// which must have a neighbour on each side.
pub fn monotonicity_probe(family: &CmcFamily, h: f64) -> Result<MonotonicityReport> {
    let grid = &family.h_grid;
    let k = grid
        .iter()
        .position(|g| (g - h).abs() <= 1e-12)
        .ok_or_else(|| AdsError::InvalidParameter(format!("H = {h} is not a grid value")))?;
    if k == 0 || k + 1 == grid.len() {
        return Err(AdsError::InvalidParameter(format!("H = {h} is not interior to the grid")));
    }
    let (lo, mid, hi) = (&family.leaves[k - 1].u, &family.leaves[k].u, &family.leaves[k + 1].u);
    let (a, b) = (grid[k] - grid[k - 1], grid[k + 1] - grid[k]);
    let mesh = family.mesh();
    let interior: Vec<usize> = mesh.interior_vertices().collect();
    let derivative: Vec<f64> = (0..mesh.num_vertices()).into_par_iter().map(|i| (hi[i] - lo[i]) / (a + b)).collect();
    let second = |i: usize| 2.0 * ((hi[i] - mid[i]) / b - (mid[i] - lo[i]) / a) / (a + b);
    let max_derivative = interior.iter().map(|&i| derivative[i]).fold(f64::NEG_INFINITY, f64::max);
    let min_derivative = interior.iter().map(|&i| derivative[i]).fold(f64::INFINITY, f64::min);
    let max_second_derivative = interior.iter().map(|&i| second(i).abs()).fold(0.0, f64::max);
    Ok(MonotonicityReport {
        h,
        dh: 0.5 * (a + b),
        max_derivative,
        min_derivative,
        center_derivative: derivative[0],
        max_second_derivative,
        derivative,
        pass: max_derivative < 0.0,
    })
}

/// Probes at every interior grid point.
pub fn monotonicity_probes(family: &CmcFamily) -> Result<Vec<MonotonicityReport>> {
    let n = family.h_grid.len();
    (1..n.saturating_sub(1)).map(|k| monotonicity_probe(family, family.h_grid[k])).collect()
}
