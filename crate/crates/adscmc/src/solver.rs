//! Dirichlet and exhaustion solvers for constant mean curvature graphs.
//!
//! The Dirichlet problem on a disc mesh is solved in two stages.
//!
//! 1. Damped Newton iteration on the convex functional of [`crate::fem`], with
//!    the exact Hessian and a Jacobi-preconditioned CG solve. Boundary data
//!    that differ from the initial guess are reached by lifting: the first
//!    Newton steps also move the boundary values, cut back whenever the
//!    spacelike margin would drop below `delta_space`.
//! 2. A polish that drives the fitted mean curvature of
//!    [`crate::geometry`] to `H` at every interior vertex. P1 nodal values
//!    carry an `O(h^2)` error at the mesh scale, which the curvature fit turns
//!    into an `O(1)` error, so the graph is corrected by defect iteration
//!    `K d = M (H_fit(u) - H)` with the stage-1 Hessian `K`, accelerated by
//!    Anderson mixing.
//!
//! Entire graphs are approximated by solving on an increasing schedule of
//! radii with barrier surfaces as Dirichlet carriers.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::boundary::BoundaryData;
use crate::cosmo::BarrierField;
use crate::error::{AdsError, Result};
use crate::exact::{bound_rhs, Side};
use crate::fem::FemSpace;
use crate::geometry::{
    extrinsic_geometry, graph_geometry_fast, jacobi_operator, normal_graph, point_cloud_geometry, SurfaceGeometry,
};
use crate::hull::DEFAULT_PLANE_BUDGET;
use crate::mesh::{build_mesh, DiskMesh};
use crate::quadric::{psi2, SplitChart};
use crate::sparse::{pcg, CsrMatrix};

/// Relative tolerance of the inner CG solves.
const CG_TOL: f64 = 1e-11;
/// Iteration cap of the inner CG solves.
const CG_MAX_ITER: usize = 20_000;
/// Smallest accepted line-search fraction.
const MIN_STEP: f64 = 1e-8;
/// Armijo sufficient-decrease constant.
const ARMIJO: f64 = 1e-4;
/// Depth of the Anderson mixing history in the polish.
const ANDERSON_DEPTH: usize = 6;

/// Solver parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub h_target: f64,
    /// Nodal max of the discrete residual `|H_i - H|`.
    pub tol_residual: f64,
    /// Max interior deviation of the fitted mean curvature from `H`.
    pub tol_geom: f64,
    pub newton_damping: f64,
    pub max_newton: usize,
    /// Iteration cap of the curvature polish (0 disables it).
    pub max_polish: usize,
    /// Fitted-curvature residual at which the polish stops.
    pub tol_polish: f64,
    /// Explicit flow step; `0` selects a stable step automatically.
    pub flow_dt: f64,
    pub max_flow_steps: usize,
    pub delta_space: f64,
    /// Exhaustion radii, strictly increasing.
    pub radii: Vec<f64>,
    /// Target edge length of exhaustion meshes.
    pub mesh_h: f64,
    /// Cauchy tolerance of the exhaustion on the inner half-ball.
    pub tol_exhaust: f64,
    /// Angle added to `arctan(|H| / 2)` for barrier carriers.
    pub barrier_margin: f64,
    /// Tolerance of barrier and hull checks.
    pub tol_barrier: f64,
    /// Boundary points fed to the convex hull.
    pub plane_budget: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            h_target: 0.0,
            tol_residual: 1e-8,
            tol_geom: 5e-3,
            newton_damping: 1.0,
            max_newton: 60,
            max_polish: 60,
            tol_polish: 1e-6,
            flow_dt: 0.0,
            max_flow_steps: 20_000,
            delta_space: 1e-3,
            radii: vec![1.5, 2.0, 2.5, 3.0],
            mesh_h: 0.1,
            tol_exhaust: 1e-4,
            barrier_margin: 0.0,
            tol_barrier: 5e-3,
            plane_budget: DEFAULT_PLANE_BUDGET,
        }
    }
}

impl SolverConfig {
    pub fn with_h(h_target: f64) -> Self {
        Self { h_target, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(AdsError::InvalidParameter(m.to_string()));
        if !self.h_target.is_finite() {
            return bad("H must be finite");
        }
        for (name, v) in [
            ("tol_residual", self.tol_residual),
            ("tol_geom", self.tol_geom),
            ("tol_polish", self.tol_polish),
            ("delta_space", self.delta_space),
            ("mesh_h", self.mesh_h),
            ("tol_exhaust", self.tol_exhaust),
            ("tol_barrier", self.tol_barrier),
        ] {
            if !(v > 0.0) {
                return bad(&format!("{name} must be positive"));
            }
        }
        if !(self.newton_damping > 0.0 && self.newton_damping <= 1.0) {
            return bad("newton_damping must lie in (0, 1]");
        }
        if self.flow_dt < 0.0 || !(self.barrier_margin >= 0.0) {
            return bad("flow_dt and barrier_margin must be nonnegative");
        }
        if self.radii.is_empty() || self.radii.windows(2).any(|w| w[1] <= w[0]) || self.radii[0] <= 0.0 {
            return bad("radii must be positive and strictly increasing");
        }
        if self.max_newton == 0 || self.plane_budget < 8 {
            return bad("max_newton must be positive and plane_budget at least 8");
        }
        Ok(())
    }
}

/// Outcome of an exhaustion run.
#[derive(Debug, Clone, Serialize)]
pub struct ExhaustionReport {
    /// Radii actually used (multiples of the ring spacing).
    pub radii: Vec<f64>,
    /// Max change on the inner half-ball between consecutive radii.
    pub cauchy: Vec<f64>,
    pub converged: bool,
    pub carrier: String,
}

/// A solved CMC graph on a disc mesh.
#[derive(Debug, Clone, Serialize)]
pub struct CmcSolution {
    #[serde(skip)]
    pub mesh: DiskMesh,
    pub u: Vec<f64>,
    #[serde(skip)]
    pub geom: SurfaceGeometry,
    pub h_target: f64,
    /// Discrete residual `max |H_i - H|` after each accepted Newton step.
    pub residual_history: Vec<f64>,
    /// Fitted-curvature residual after each polish iteration.
    pub polish_history: Vec<f64>,
    /// Finite-element residual reached before the polish.
    pub discrete_residual: f64,
    /// Max interior deviation of the fitted mean curvature from `H`.
    pub geometric_error: f64,
    pub spacelike_margin: f64,
    pub converged: bool,
    pub method: String,
    pub exhaustion: Option<ExhaustionReport>,
}

impl CmcSolution {
    fn finish(
        mesh: DiskMesh,
        fem: &FemSpace,
        mut u: Vec<f64>,
        cfg: &SolverConfig,
        history: Vec<f64>,
        method: &str,
    ) -> Result<Self> {
        let discrete_residual = discrete_residual(fem, &u, cfg.h_target)?;
        let (geom, polish_history) = polish(fem, &mesh, &mut u, cfg)?;
        let geometric_error = geom.mean_curvature_error(cfg.h_target);
        let spacelike_margin = fem.spacelike_margin(&u);
        let converged = discrete_residual <= cfg.tol_residual && geometric_error <= cfg.tol_geom;
        Ok(Self {
            mesh,
            u,
            geom,
            h_target: cfg.h_target,
            residual_history: history,
            polish_history,
            discrete_residual,
            geometric_error,
            spacelike_margin,
            converged,
            method: method.to_string(),
            exhaustion: None,
        })
    }

    /// Value at the basepoint `x_0` (vertex 0).
    pub fn center_value(&self) -> f64 {
        self.u[0]
    }

    /// Piecewise-linear value at a point of H^2 inside the mesh.
    pub fn value_at(&self, x: &[f64]) -> Option<f64> {
        self.mesh.interpolate(&self.u, x)
    }

    /// Check of `max |II|^2` against the sharp bound.
    pub fn curvature_bound(&self) -> BoundCheck {
        let max = self.geom.interior_max(&self.geom.ii_norm_sq);
        let bound = bound_rhs(self.h_target.abs(), 2);
        BoundCheck { max_ii_norm_sq: max, bound, ratio: max / bound, pass: max <= 1.05 * bound }
    }
}

/// Drives the fitted mean curvature to `H` on interior vertices by
/// Anderson-accelerated defect correction; keeps the best iterate.
fn polish(
    fem: &FemSpace,
    mesh: &DiskMesh,
    u: &mut Vec<f64>,
    cfg: &SolverConfig,
) -> Result<(SurfaceGeometry, Vec<f64>)> {
    let chart = SplitChart::standard(2);
    let mut geom = graph_geometry_fast(mesh, u)?;
    let mut err = geom.mean_curvature_error(cfg.h_target);
    let mut history = vec![err];
    if cfg.max_polish == 0 || err <= cfg.tol_polish {
        return Ok((extrinsic_geometry(mesh, u, &chart)?, history));
    }
    let n = u.len();
    let free: Vec<usize> = (0..n).filter(|&i| fem.free[i]).collect();
    let mut k = CsrMatrix::from_mesh(mesh);
    fem.hessian(u, &mut k)?;
    let mut best = (u.clone(), err);
    let mut xs: Vec<Vec<f64>> = vec![];
    let mut fs: Vec<Vec<f64>> = vec![];
    let mut d = vec![0.0; n];
    for _ in 0..cfg.max_polish {
        let r: Vec<f64> = (0..n)
            .map(|i| if fem.free[i] { fem.volume_mass[i] * (geom.mean_curvature[i] - cfg.h_target) } else { 0.0 })
            .collect();
        pcg(&k, &fem.free, &r, &mut d, CG_TOL, CG_MAX_ITER)?;
        let x: Vec<f64> = free.iter().map(|&i| u[i]).collect();
        let f: Vec<f64> = free.iter().map(|&i| d[i]).collect();
        let mut next: Vec<f64> = x.iter().zip(&f).map(|(a, b)| a + b).collect();
        xs.push(x);
        fs.push(f);
        if xs.len() > ANDERSON_DEPTH + 1 {
            xs.remove(0);
            fs.remove(0);
        }
        let m = xs.len() - 1;
        if m > 0 {
            let rows = free.len();
            let df = DMatrix::from_fn(rows, m, |r, c| fs[c + 1][r] - fs[c][r]);
            let dx = DMatrix::from_fn(rows, m, |r, c| xs[c + 1][r] - xs[c][r]);
            let fv = DVector::from_column_slice(&fs[m]);
            if let Ok(gamma) = df.clone().svd(true, true).solve(&fv, 1e-14) {
                let corr = (dx + df) * gamma;
                for (v, c) in next.iter_mut().zip(corr.iter()) {
                    *v -= c;
                }
            }
        }
        let mut trial = u.clone();
        for (j, &i) in free.iter().enumerate() {
            trial[i] = next[j];
        }
        let accepted = fem.spacelike_margin(&trial) >= cfg.delta_space;
        let step = if accepted { graph_geometry_fast(mesh, &trial).ok() } else { None };
        match step {
            Some(g) => {
                *u = trial;
                geom = g;
            }
            None => {
                // Fall back to a plain half step and restart the mixing.
                xs.clear();
                fs.clear();
                let mut half = u.clone();
                for &i in &free {
                    half[i] += 0.5 * d[i];
                }
                if fem.spacelike_margin(&half) < cfg.delta_space {
                    break;
                }
                geom = graph_geometry_fast(mesh, &half)?;
                *u = half;
            }
        }
        err = geom.mean_curvature_error(cfg.h_target);
        history.push(err);
        if err < best.1 {
            best = (u.clone(), err);
        }
        if err <= cfg.tol_polish || !err.is_finite() {
            break;
        }
    }
    *u = best.0;
    Ok((extrinsic_geometry(mesh, u, &chart)?, history))
}

/// `max |II|^2` of a solution against `bound_rhs(|H|, 2)` (5% allowance).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundCheck {
    pub max_ii_norm_sq: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Interior max of `|H_i - H|` for the discrete mean curvature.
pub fn discrete_residual(fem: &FemSpace, u: &[f64], h: f64) -> Result<f64> {
    let a = fem.area_variation(u)?;
    Ok((0..u.len()).filter(|&i| fem.free[i]).map(|i| (a[i] / fem.volume_mass[i] + h).abs()).fold(0.0, f64::max))
}

fn boundary_gap(fem: &FemSpace, u: &[f64], g: &[f64]) -> f64 {
    (0..u.len()).filter(|&i| !fem.free[i]).map(|i| (u[i] - g[i]).abs()).fold(0.0, f64::max)
}

/// Damped Newton iteration for the Dirichlet problem with data `g` on the
/// boundary vertices (interior entries of `g` are ignored).
pub fn newton_solve(mesh: &DiskMesh, u0: &[f64], g: &[f64], cfg: &SolverConfig) -> Result<CmcSolution> {
    cfg.validate()?;
    let fem = FemSpace::new(mesh);
    let mut u = u0.to_vec();
    let history = newton_iterate(&fem, mesh, &mut u, g, cfg)?;
    CmcSolution::finish(mesh.clone(), &fem, u, cfg, history, "newton")
}

fn newton_iterate(
    fem: &FemSpace,
    mesh: &DiskMesh,
    u: &mut Vec<f64>,
    g: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    let n = mesh.num_vertices();
    if u.len() != n || g.len() != n {
        return Err(AdsError::DimensionMismatch { left: u.len().min(g.len()), right: n });
    }
    let margin0 = fem.spacelike_margin(u);
    if margin0 < cfg.delta_space {
        return Err(AdsError::SpacelikeLoss(format!("initial guess has margin {margin0:e}")));
    }
    let h = cfg.h_target;
    let mut k = CsrMatrix::from_mesh(mesh);
    let mut history = vec![];
    let mut delta = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut kb = vec![0.0; n];
    for _ in 0..cfg.max_newton {
        let grad = fem.gradient(u, h)?;
        let res = (0..n).filter(|&i| fem.free[i]).map(|i| (grad[i] / fem.volume_mass[i]).abs()).fold(0.0, f64::max);
        let gap = boundary_gap(fem, u, g);
        if gap == 0.0 {
            history.push(res);
            if res <= cfg.tol_residual {
                return Ok(history);
            }
        }
        fem.hessian(u, &mut k)?;
        let db: Vec<f64> = (0..n).map(|i| if fem.free[i] { 0.0 } else { g[i] - u[i] }).collect();
        k.mul(&db, &mut kb);
        for i in 0..n {
            rhs[i] = if fem.free[i] { -grad[i] - kb[i] } else { 0.0 };
        }
        pcg(&k, &fem.free, &rhs, &mut delta, CG_TOL, CG_MAX_ITER)?;
        for i in 0..n {
            if !fem.free[i] {
                delta[i] = db[i];
            }
        }
        let energy = fem.energy(u, h);
        let slope: f64 = (0..n).map(|i| grad[i] * delta[i]).sum();
        let mut s = cfg.newton_damping;
        let accepted = loop {
            if s < MIN_STEP {
                break None;
            }
            let trial: Vec<f64> = (0..n).map(|i| u[i] + s * delta[i]).collect();
            if fem.spacelike_margin(&trial) >= cfg.delta_space {
                if gap > 0.0 {
                    break Some(trial);
                }
                let tres = discrete_residual(fem, &trial, h)?;
                let armijo = match (energy, fem.energy(&trial, h)) {
                    (Some(e0), Some(e1)) => e1 <= e0 + ARMIJO * s * slope,
                    _ => false,
                };
                if tres < res || (armijo && s < 1e-3) {
                    break Some(trial);
                }
            }
            s *= 0.5;
        };
        match accepted {
            Some(t) => *u = t,
            None => {
                return Err(if gap > 0.0 {
                    AdsError::SpacelikeLoss("boundary lifting cannot keep the spacelike margin".into())
                } else {
                    AdsError::Stall(format!("line search failed at residual {res:e}"))
                })
            }
        }
    }
    let res = discrete_residual(fem, u, h)?;
    if boundary_gap(fem, u, g) == 0.0 {
        history.push(res);
    }
    Ok(history)
}

/// Stable explicit step size for the graph flow at `u`.
fn stable_dt(fem: &FemSpace, mesh: &DiskMesh, u: &[f64], nu: &[f64]) -> Result<f64> {
    let mut k = CsrMatrix::from_mesh(mesh);
    fem.hessian(u, &mut k)?;
    let mut worst = 0.0_f64;
    for i in 0..k.n {
        if !fem.free[i] {
            continue;
        }
        let row: f64 = (k.row_ptr[i]..k.row_ptr[i + 1]).map(|p| k.vals[p].abs()).sum();
        worst = worst.max(row * nu[i] / (fem.volume_mass[i] * mesh.vertices[i][2]));
    }
    Ok(if worst > 0.0 { 1.0 / worst } else { 1.0 })
}

/// Nodal gradient function `1 / sqrt(margin)` of the graph.
fn nodal_nu(fem: &FemSpace, u: &[f64]) -> Vec<f64> {
    fem.vertex_margins(u).iter().map(|m| 1.0 / m.max(1e-300).sqrt()).collect()
}

/// One explicit step of the prescribed mean curvature flow for graphs,
/// `du/dt = (H(u) - H_target) / (cosh(rho) nu)`, with boundary values fixed.
/// `dt = 0` selects a stable step. The step is halved until the spacelike
/// margin stays above `delta_space`; returns the new values and the step used.
pub fn mcf_step(mesh: &DiskMesh, u: &[f64], cfg: &SolverConfig, dt: f64) -> Result<(Vec<f64>, f64)> {
    let fem = FemSpace::new(mesh);
    mcf_step_with(&fem, mesh, u, cfg, dt)
}

fn mcf_step_with(fem: &FemSpace, mesh: &DiskMesh, u: &[f64], cfg: &SolverConfig, dt: f64) -> Result<(Vec<f64>, f64)> {
    let hcur = fem.mean_curvature(u)?;
    let nu = nodal_nu(fem, u);
    let mut dt = if dt > 0.0 { dt } else { stable_dt(fem, mesh, u, &nu)? };
    while dt > 1e-14 {
        let next: Vec<f64> =
            (0..u.len())
                .map(|i| {
                    if fem.free[i] {
                        u[i] + dt * (hcur[i] - cfg.h_target) / (mesh.vertices[i][2] * nu[i])
                    } else {
                        u[i]
                    }
                })
                .collect();
        if fem.spacelike_margin(&next) >= cfg.delta_space {
            return Ok((next, dt));
        }
        dt *= 0.5;
    }
    Err(AdsError::Stall("flow step underflow".into()))
}

/// Runs the explicit flow from `u0` with boundary values `g` until the
/// discrete residual reaches `tol_residual` or `max_flow_steps` is spent.
pub fn flow_relax(mesh: &DiskMesh, u0: &[f64], g: &[f64], cfg: &SolverConfig) -> Result<CmcSolution> {
    cfg.validate()?;
    let fem = FemSpace::new(mesh);
    let mut u = u0.to_vec();
    for i in mesh.boundary_vertices() {
        u[i] = g[i];
    }
    if fem.spacelike_margin(&u) < cfg.delta_space {
        return Err(AdsError::SpacelikeLoss("flow start is not spacelike".into()));
    }
    let mut history = vec![discrete_residual(&fem, &u, cfg.h_target)?];
    let mut dt = cfg.flow_dt;
    for step in 0..cfg.max_flow_steps {
        let (next, used) = mcf_step_with(&fem, mesh, &u, cfg, dt)?;
        u = next;
        if cfg.flow_dt > 0.0 {
            dt = used;
        } else if step % 50 == 0 {
            dt = 0.0;
        } else {
            dt = used;
        }
        if step % 10 == 9 {
            let r = discrete_residual(&fem, &u, cfg.h_target)?;
            history.push(r);
            if r <= cfg.tol_residual {
                break;
            }
        }
    }
    CmcSolution::finish(mesh.clone(), &fem, u, cfg, history, "flow")
}

/// Finite-difference check of the Jacobi operator on a normal graph.
#[derive(Debug, Clone, Serialize)]
pub struct LinearizationReport {
    pub epsilon: f64,
    /// `max |fd - Jv| / max |Jv|` over vertices at least three rings inside.
    pub relative_error: f64,
    #[serde(skip)]
    pub finite_difference: Vec<f64>,
    #[serde(skip)]
    pub jacobi: Vec<f64>,
}

/// Compares `(H(S_{eps v}) - H(S_0)) / eps` with `J v = Lap v - (2 + |II|^2) v`,
/// where `S_{eps v}` is the normal graph `cos(eps v) F + sin(eps v) N`.
pub fn linearization_check(mesh: &DiskMesh, u: &[f64], v: &[f64], eps: f64) -> Result<LinearizationReport> {
    if !(1e-6..=1e-3).contains(&eps) {
        return Err(AdsError::InvalidParameter(format!("epsilon {eps:e} outside [1e-6, 1e-3]")));
    }
    let geom0 = extrinsic_geometry(mesh, u, &SplitChart::standard(2))?;
    let shifted: Vec<f64> = v.iter().map(|x| eps * x).collect();
    let geom1 = point_cloud_geometry(mesh, &normal_graph(&geom0, &shifted))?;
    let jv = jacobi_operator(mesh, &geom0, v)?;
    let fd: Vec<f64> = (0..v.len()).map(|i| (geom1.mean_curvature[i] - geom0.mean_curvature[i]) / eps).collect();
    let deep = mesh.num_rings().saturating_sub(3);
    let inner: Vec<usize> = (0..v.len()).filter(|&i| mesh.rho[i] <= deep as f64 * mesh.dr + 1e-12).collect();
    let num = inner.iter().map(|&i| (fd[i] - jv[i]).abs()).fold(0.0, f64::max);
    let den = inner.iter().map(|&i| jv[i].abs()).fold(0.0, f64::max);
    Ok(LinearizationReport {
        epsilon: eps,
        relative_error: num / den.max(f64::MIN_POSITIVE),
        finite_difference: fd,
        jacobi: jv,
    })
}

/// Which surface supplies the Dirichlet data of an exhaustion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Carrier {
    /// Barrier at distance `theta` to the past of the future hull boundary.
    PastBarrier(f64),
    /// Barrier at distance `theta` to the future of the past hull boundary.
    FutureBarrier(f64),
    /// Midpoint of the two hull boundaries.
    HullMidsurface,
}

impl Carrier {
    pub fn for_curvature(h: f64, margin: f64) -> Self {
        let theta = ((h.abs() / 2.0).atan() + margin).min(FRAC_PI_2 - 1e-3);
        if h > 0.0 {
            Carrier::PastBarrier(theta)
        } else if h < 0.0 {
            Carrier::FutureBarrier(theta)
        } else {
            Carrier::HullMidsurface
        }
    }

    pub fn value(&self, field: &BarrierField, x: &[f64]) -> Result<f64> {
        match *self {
            Carrier::PastBarrier(t) => field.value(t, Side::Past, x),
            Carrier::FutureBarrier(t) => field.value(t, Side::Future, x),
            Carrier::HullMidsurface => {
                let (lo, hi) = field.hull.fiber_interval(x)?;
                Ok(0.5 * (lo + hi))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Carrier::PastBarrier(t) => format!("past barrier, theta = {t:.6}"),
            Carrier::FutureBarrier(t) => format!("future barrier, theta = {t:.6}"),
            Carrier::HullMidsurface => "hull midsurface".into(),
        }
    }
}

/// Initial guess `(1 - k)(u+ + u-)/2 + k * hull midsurface`, with the smallest
/// `k` in `{0, 1/4, ..., 1}` that keeps the spacelike margin.
pub fn initial_guess(mesh: &DiskMesh, field: &BarrierField, delta_space: f64) -> Result<Vec<f64>> {
    let pairs: Vec<(f64, f64)> = mesh
        .vertices
        .par_iter()
        .map(|x| {
            let (um, up) = field.ext.at(x);
            let (lo, hi) = field.hull.fiber_interval(x)?;
            Ok((0.5 * (um + up), 0.5 * (lo + hi)))
        })
        .collect::<Result<_>>()?;
    let fem = FemSpace::new(mesh);
    for k in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let u: Vec<f64> = pairs.iter().map(|(a, b)| (1.0 - k) * a + k * b).collect();
        if fem.spacelike_margin(&u) >= delta_space {
            return Ok(u);
        }
    }
    Err(AdsError::SpacelikeLoss("no spacelike initial guess between the extensions and the hull".into()))
}

/// Carrier values on every vertex of `mesh`.
pub fn carrier_values(mesh: &DiskMesh, field: &BarrierField, carrier: Carrier) -> Result<Vec<f64>> {
    mesh.vertices.par_iter().map(|x| carrier.value(field, x)).collect()
}

/// Approximates the entire CMC-`H` graph bounded by `f` by Dirichlet problems
/// on the schedule of radii in `cfg`, with carrier data on each boundary.
pub fn exhaustion_solve(f: &BoundaryData, cfg: &SolverConfig) -> Result<CmcSolution> {
    cfg.validate()?;
    let field = BarrierField::new(f, cfg.plane_budget)?;
    exhaustion_with_field(&field, cfg, None)
}

/// [`exhaustion_solve`] with a prebuilt barrier field and an optional warm
/// start (nodal values on the largest mesh, e.g. a neighbouring leaf).
pub fn exhaustion_with_field(field: &BarrierField, cfg: &SolverConfig, warm: Option<&[f64]>) -> Result<CmcSolution> {
    cfg.validate()?;
    let rmax = *cfg.radii.last().unwrap();
    let full = build_mesh(rmax, cfg.mesh_h)?;
    let carrier = Carrier::for_curvature(cfg.h_target, cfg.barrier_margin);
    let carrier_full = carrier_values(&full, field, carrier)?;
    let mut ring_counts: Vec<usize> = cfg.radii.iter().map(|&r| full.rings_for_radius(r)).collect();
    ring_counts.dedup();
    let mut prev: Option<(DiskMesh, Vec<f64>)> = None;
    let mut cauchy = vec![];
    let mut radii = vec![];
    let mut history = vec![];
    for &rings in &ring_counts {
        let mesh = full.prefix(rings)?;
        let n = mesh.num_vertices();
        let fem = FemSpace::new(&mesh);
        let g = carrier_full[..n].to_vec();
        let mut candidates: Vec<Vec<f64>> = vec![];
        if let Some(w) = warm {
            let mut u = w[..n].to_vec();
            for i in mesh.boundary_vertices() {
                u[i] = g[i];
            }
            candidates.push(u);
        }
        if let Some((pm, pu)) = &prev {
            let mut u = g.clone();
            u[..pm.num_vertices()].copy_from_slice(pu);
            candidates.push(u);
        }
        candidates.push(g.clone());
        let mut solved = None;
        let mut last_err = None;
        for mut u in candidates {
            if fem.spacelike_margin(&u) < cfg.delta_space {
                continue;
            }
            match newton_iterate(&fem, &mesh, &mut u, &g, cfg) {
                Ok(h) => {
                    solved = Some((u, h));
                    break;
                }
                Err(e) => last_err = Some(e),
            }
        }
        let (u, h) = match solved {
            Some(s) => s,
            None => {
                let mut u = initial_guess(&mesh, field, cfg.delta_space)?;
                let h = newton_iterate(&fem, &mesh, &mut u, &g, cfg).map_err(|e| last_err.unwrap_or(e))?;
                (u, h)
            }
        };
        history = h;
        if let Some((pm, pu)) = &prev {
            let half = 0.5 * pm.radius;
            let diff = pm.vertices_within(half).map(|i| (pu[i] - u[i]).abs()).fold(0.0, f64::max);
            cauchy.push(diff);
        }
        radii.push(mesh.radius);
        prev = Some((mesh, u));
    }
    let (mesh, u) = prev.expect("at least one radius");
    let fem = FemSpace::new(&mesh);
    let mut sol = CmcSolution::finish(mesh, &fem, u, cfg, history, "exhaustion")?;
    let converged = cauchy.last().is_none_or(|&c| c <= cfg.tol_exhaust);
    sol.exhaustion = Some(ExhaustionReport { radii, cauchy, converged, carrier: carrier.describe() });
    Ok(sol)
}

/// Two exhaustion solves of the same leaf from different initial guesses.
#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub h_target: f64,
    pub first_guess: String,
    pub second_guess: String,
    /// Nodal max difference of the two final solutions.
    pub max_difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `steps` explicit flow steps from `u0` with its own boundary values.
pub fn flow_relaxed_guess(mesh: &DiskMesh, u0: &[f64], steps: usize, cfg: &SolverConfig) -> Result<Vec<f64>> {
    let fem = FemSpace::new(mesh);
    let mut u = u0.to_vec();
    for _ in 0..steps {
        u = mcf_step_with(&fem, mesh, &u, cfg, 0.0)?.0;
    }
    Ok(u)
}

/// Solves the leaf of curvature `cfg.h_target` twice, starting from the hull
/// midsurface and from the flow-relaxed barrier carrier, and compares the
/// results against `2 tol_geom`.
pub fn uniqueness_check(field: &BarrierField, cfg: &SolverConfig, flow_steps: usize) -> Result<UniquenessReport> {
    cfg.validate()?;
    let full = build_mesh(*cfg.radii.last().unwrap(), cfg.mesh_h)?;
    let hull_mid = carrier_values(&full, field, Carrier::HullMidsurface)?;
    let barrier = Carrier::for_curvature(cfg.h_target, cfg.barrier_margin);
    let relaxed = flow_relaxed_guess(&full, &carrier_values(&full, field, barrier)?, flow_steps, cfg)?;
    let a = exhaustion_with_field(field, cfg, Some(&hull_mid))?;
    let b = exhaustion_with_field(field, cfg, Some(&relaxed))?;
    let max_difference = a.u.iter().zip(&b.u).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let tolerance = 2.0 * cfg.tol_geom;
    Ok(UniquenessReport {
        h_target: cfg.h_target,
        first_guess: "hull midsurface".into(),
        second_guess: format!("{} relaxed by {flow_steps} flow steps", barrier.describe()),
        max_difference,
        tolerance,
        pass: a.converged && b.converged && max_difference <= tolerance,
    })
}

/// Result of a barrier or hull check.
#[derive(Debug, Clone, Serialize)]
pub struct BarrierReport {
    pub kind: String,
    pub theta: f64,
    /// Largest violation (positive means violated beyond zero).
    pub worst_violation: f64,
    pub worst_vertex: usize,
    pub pass: bool,
}

/// Checks a solution against the barrier of its mean curvature: for `H > 0`
/// it must lie in the past of `W-` at `theta = arctan(H/2)` (equivalently
/// `tau_past <= pi/2 - theta`), symmetrically for `H < 0`, and for `H = 0`
/// inside the convex hull.
pub fn barrier_verify(sol: &CmcSolution, field: &BarrierField, tol: f64) -> Result<BarrierReport> {
    let h = sol.h_target;
    let theta = (h.abs() / 2.0).atan();
    let interior: Vec<usize> = sol.mesh.interior_vertices().collect();
    let violations: Vec<f64> = interior
        .par_iter()
        .map(|&i| {
            let x = &sol.mesh.vertices[i];
            let (lo, hi) = field.hull.fiber_interval(x)?;
            let u = sol.u[i];
            Ok(if h == 0.0 {
                (lo - u).max(u - hi)
            } else {
                let (side, beyond) = if h > 0.0 { (Side::Future, u - hi) } else { (Side::Past, lo - u) };
                if beyond >= 0.0 {
                    theta + beyond
                } else {
                    theta - field.hull.distance_to_boundary(&psi2(x, u), side)
                }
            })
        })
        .collect::<Result<_>>()?;
    let (k, worst) = violations
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bk, bv), (k, &v)| if v > bv { (k, v) } else { (bk, bv) });
    let kind = if h > 0.0 {
        "past of W-"
    } else if h < 0.0 {
        "future of W+"
    } else {
        "hull sandwich"
    };
    Ok(BarrierReport {
        kind: kind.into(),
        theta,
        worst_violation: worst,
        worst_vertex: interior.get(k).copied().unwrap_or(0),
        pass: worst <= tol,
    })
}

/// Pointwise comparison of two solutions on the same mesh.
#[derive(Debug, Clone, Serialize)]
pub struct OrderingReport {
    pub h_first: f64,
    pub h_second: f64,
    /// `min (u_second - u_first)` over interior vertices.
    pub min_gap: f64,
    pub max_abs_difference: f64,
    /// Strict ordering (`min_gap > 0`), or coincidence for equal curvatures.
    pub strict: bool,
    /// Ordering up to `-1e-6`, or coincidence within `2 tol_geom`.
    pub pass: bool,
}

/// Checks `u_1 < u_2` on interior vertices when `H_1 > H_2` (the surfaces
/// are swapped internally otherwise), or coincidence when `H_1 = H_2`.
pub fn ordering_verify(sol1: &CmcSolution, sol2: &CmcSolution, tol_geom: f64) -> Result<OrderingReport> {
    if sol1.u.len() != sol2.u.len() {
        return Err(AdsError::DimensionMismatch { left: sol1.u.len(), right: sol2.u.len() });
    }
    let (a, b) = if sol1.h_target >= sol2.h_target { (sol1, sol2) } else { (sol2, sol1) };
    let interior = sol1.mesh.interior_vertices();
    let (mut min_gap, mut max_abs) = (f64::INFINITY, 0.0_f64);
    for i in interior {
        let d = b.u[i] - a.u[i];
        min_gap = min_gap.min(d);
        max_abs = max_abs.max(d.abs());
    }
    let equal = a.h_target == b.h_target;
    let (strict, pass) =
        if equal { (max_abs <= 2.0 * tol_geom, max_abs <= 2.0 * tol_geom) } else { (min_gap > 0.0, min_gap > -1e-6) };
    Ok(OrderingReport { h_first: a.h_target, h_second: b.h_target, min_gap, max_abs_difference: max_abs, strict, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::equidistant_graph;
    use std::f64::consts::FRAC_PI_4;

    fn equidistant(mesh: &DiskMesh, theta: f64, side: Side) -> Vec<f64> {
        mesh.vertices.iter().map(|x| equidistant_graph(theta, side, x).unwrap()).collect()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig { radii: vec![2.0, 1.0], ..SolverConfig::default() };
        assert!(bad.validate().is_err());
        let bad = SolverConfig { newton_damping: 0.0, ..SolverConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn maximal_slice_is_exact_fixed_point() {
        let mesh = build_mesh(2.0, 0.2).unwrap();
        let z = vec![0.0; mesh.num_vertices()];
        let sol = newton_solve(&mesh, &z, &z, &SolverConfig::with_h(0.0)).unwrap();
        assert!(sol.u.iter().all(|v| *v == 0.0));
        assert!(sol.converged);
    }

    #[test]
    fn dirichlet_equidistant_recovers_closed_form() {
        let mesh = build_mesh(2.0, 0.1).unwrap();
        let exact = equidistant(&mesh, FRAC_PI_4, Side::Past);
        let z = vec![0.0; mesh.num_vertices()];
        let sol = newton_solve(&mesh, &z, &exact, &SolverConfig::with_h(2.0)).unwrap();
        let err = sol.u.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 2e-3, "nodal error {err}");
        assert!(sol.discrete_residual <= 1e-8);
        assert!(sol.geometric_error <= 5e-3, "geometric error {}", sol.geometric_error);
        assert!(sol.residual_history.windows(2).all(|w| w[1] < w[0]), "{:?}", sol.residual_history);
    }

    #[test]
    fn flow_fixed_point_and_direction() {
        let mesh = build_mesh(1.5, 0.15).unwrap();
        // The explicit step is stationary at the finite-element solution.
        let cfg = SolverConfig { max_polish: 0, ..SolverConfig::with_h(2.0) };
        let fem = FemSpace::new(&mesh);
        let exact = equidistant(&mesh, FRAC_PI_4, Side::Past);
        let z = vec![0.0; mesh.num_vertices()];
        let sol = newton_solve(&mesh, &z, &exact, &cfg).unwrap();
        let (next, _) = mcf_step(&mesh, &sol.u, &cfg, 0.0).unwrap();
        let moved = next.iter().zip(&sol.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(moved < 1e-10, "{moved}");
        // A graph above the solution with the same boundary moves to the past.
        let mut above = sol.u.clone();
        for i in mesh.interior_vertices() {
            above[i] += 0.05 / mesh.vertices[i][2];
        }
        assert!(fem.spacelike_margin(&above) > 1e-3);
        let (next, _) = mcf_step(&mesh, &above, &cfg, 0.0).unwrap();
        assert!(next[0] < above[0]);
    }

    #[test]
    fn flow_and_newton_agree() {
        let mesh = build_mesh(1.0, 0.2).unwrap();
        let cfg = SolverConfig { h_target: 1.0, max_flow_steps: 40_000, tol_residual: 1e-9, ..SolverConfig::default() };
        let g = equidistant(&mesh, 0.3, Side::Past);
        let z = vec![0.0; mesh.num_vertices()];
        let newton = newton_solve(&mesh, &z, &g, &cfg).unwrap();
        let flow = flow_relax(&mesh, &g, &g, &cfg).unwrap();
        let d = newton.u.iter().zip(&flow.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(d < 2.0 * cfg.tol_geom, "difference {d}");
    }
}
