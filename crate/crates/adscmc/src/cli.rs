//! Command-line orchestration: argument parsing, configuration files and
//! export directories that `verify` can re-check.
//!
//! Exit codes: 0 on success, 1 when a solve does not converge or a
//! verification fails, 2 on invalid input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::boundary::{extremal_extensions, hemi_from_polar, hyperboloid_from_hemi, AdmissibilityReport, BoundaryData};
use crate::cosmo::BarrierField;
use crate::error::{AdsError, Result};
use crate::exact::{bound_rhs, cylinder_H, cylinder_ii_norm, equidistant_H, extremal_theta, CylinderParam, Side};
use crate::foliation::{monotonicity_probes, solve_family, uniform_grid, MonotonicityReport};
use crate::geometry::extrinsic_geometry;
use crate::io::{
    fields_csv, fmt_f64, load_boundary, parse_config, parse_fields_csv, to_json, to_json_line, write_json, ConfigFile,
    FieldSummary,
};
use crate::mesh::build_mesh;
use crate::quadric::{classify_pair, form, lorentzian_distance, AmbientVector, CausalClass, QuadricPoint, SplitChart};
use crate::sampling::random_geodesic_pair;
use crate::solver::{
    barrier_verify, carrier_values, exhaustion_with_field, flow_relax, initial_guess, BarrierReport, Carrier,
    CmcSolution, SolverConfig,
};

/// Environment variable with the worker thread count.
pub const THREADS_ENV: &str = "ADSCMC_THREADS";
/// Name of the manifest written into every export directory.
pub const MANIFEST: &str = "manifest.json";
/// Relative tolerance when re-evaluated fields are compared with exported ones.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "adscmc", version, about = "CMC spacelike graphs in AdS^3 with prescribed boundary at infinity")]
pub struct Cli {
    /// `key = value` file overriding solver defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Newton,
    Flow,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Causal relation and Lorentzian distance of two points of AdS^{n+1}.
    Classify {
        /// Comma-separated ambient coordinates (normalized onto the quadric).
        #[arg(long, allow_hyphen_values = true, requires = "q")]
        p: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// Instead of a pair, classify this many random geodesic pairs.
        #[arg(long, conflicts_with = "p")]
        random: Option<usize>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Extremal extensions and hull boundaries on a polar grid.
    Extend {
        #[arg(long)]
        boundary: String,
        /// Radial and quarter-angular resolution of the grid.
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long = "R", default_value_t = 3.0)]
        radius: f64,
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// One CMC graph by exhaustion.
    Solve {
        #[arg(long)]
        boundary: String,
        #[arg(long = "H", allow_hyphen_values = true)]
        h: Option<f64>,
        #[arg(long = "R")]
        radius: Option<f64>,
        #[arg(long = "h")]
        mesh_h: Option<f64>,
        #[arg(long, value_enum, default_value_t = Method::Newton)]
        method: Method,
        /// Output directory.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// A family of CMC graphs over a uniform curvature grid.
    Foliate {
        #[arg(long)]
        boundary: String,
        #[arg(long = "Hmin", allow_hyphen_values = true, default_value_t = -2.0)]
        h_min: f64,
        #[arg(long = "Hmax", allow_hyphen_values = true, default_value_t = 2.0)]
        h_max: f64,
        #[arg(long, default_value_t = 17)]
        count: usize,
        #[arg(long = "R")]
        radius: Option<f64>,
        #[arg(long = "h")]
        mesh_h: Option<f64>,
        /// Output directory.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Closed-form values for equidistants and cylinders.
    Oracle {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "h")]
        theta: Option<f64>,
        #[arg(long = "H", allow_hyphen_values = true)]
        h: Option<f64>,
    },
    /// Re-checks an export directory written by `solve` or `foliate`.
    Verify { dir: PathBuf },
}

/// Applies the thread count from [`THREADS_ENV`] to the global pool.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| AdsError::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        // A pool may already exist (tests, repeated calls); keep it then.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    Ok(())
}

/// Parses arguments, runs the command, prints results to `out` and errors to
/// stderr, and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return 2;
        }
        Err(e) => {
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match init_threads().and_then(|_| run(&cli, out)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load_config(cli: &Cli) -> Result<ConfigFile> {
    match &cli.config {
        Some(p) => parse_config(&fs::read_to_string(p)?),
        None => Ok(ConfigFile::default()),
    }
}

/// Runs a parsed command; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let config = load_config(cli)?;
    match &cli.command {
        Command::Classify { p, q, random, n, seed } => {
            cmd_classify(p.as_deref(), q.as_deref(), *random, *n, seed.unwrap_or(config.seed), out)
        }
        Command::Extend { boundary, grid, radius, export } => {
            cmd_extend(&load_boundary(boundary)?, *grid, *radius, export.as_deref(), out)
        }
        Command::Solve { boundary, h, radius, mesh_h, method, export } => {
            let cfg = solver_config(&config.solver, *h, *radius, *mesh_h)?;
            cmd_solve(&load_boundary(boundary)?, &cfg, *method, export.as_deref(), out)
        }
        Command::Foliate { boundary, h_min, h_max, count, radius, mesh_h, export } => {
            let cfg = solver_config(&config.solver, None, *radius, *mesh_h)?;
            let grid = uniform_grid(*h_min, *h_max, *count)?;
            cmd_foliate(&load_boundary(boundary)?, &grid, &cfg, export.as_deref(), out)
        }
        Command::Oracle { n, k, theta, h } => cmd_oracle(*n, *k, *theta, *h, out),
        Command::Verify { dir } => cmd_verify(dir, out),
    }
}

/// Solver settings with command-line overrides; `radius` truncates the
/// schedule and appends itself as the final radius.
pub fn solver_config(
    base: &SolverConfig,
    h: Option<f64>,
    radius: Option<f64>,
    mesh_h: Option<f64>,
) -> Result<SolverConfig> {
    let mut cfg = base.clone();
    if let Some(h) = h {
        cfg.h_target = h;
    }
    if let Some(r) = radius {
        cfg.radii.retain(|&x| x < r - 1e-9);
        cfg.radii.push(r);
    }
    if let Some(m) = mesh_h {
        cfg.mesh_h = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_point(s: &str, n: usize) -> Result<QuadricPoint> {
    let coords: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| AdsError::InvalidParameter(format!("bad coordinate {c:?}"))))
        .collect::<Result<_>>()?;
    if coords.len() != n + 2 {
        return Err(AdsError::DimensionMismatch { left: coords.len(), right: n + 2 });
    }
    QuadricPoint::normalize(AmbientVector::new(coords)?)
}

fn cmd_classify(
    p: Option<&str>,
    q: Option<&str>,
    random: Option<usize>,
    n: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<i32> {
    if n < 2 {
        return Err(AdsError::InvalidParameter("n must be at least 2".into()));
    }
    if let Some(count) = random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut misclassified = 0usize;
        let mut worst_distance_error = 0.0f64;
        for _ in 0..count {
            let pair = random_geodesic_pair(&mut rng, n)?;
            if classify_pair(&pair.p, &pair.q) != pair.expected {
                misclassified += 1;
            } else if let Some(d) = pair.expected_distance {
                worst_distance_error = worst_distance_error.max((lorentzian_distance(&pair.p, &pair.q)? - d).abs());
            }
        }
        let pass = misclassified == 0 && worst_distance_error <= 1e-9;
        let line = json!({"pairs": count, "n": n, "seed": seed, "misclassified": misclassified,
                          "max_distance_error": worst_distance_error, "pass": pass});
        writeln!(out, "{}", to_json_line(&line)?)?;
        return Ok(if pass { 0 } else { 1 });
    }
    let (Some(p), Some(q)) = (p, q) else {
        return Err(AdsError::InvalidParameter("classify needs --p and --q, or --random".into()));
    };
    let (p, q) = (parse_point(p, n)?, parse_point(q, n)?);
    let class = classify_pair(&p, &q);
    let distance = (class == CausalClass::TimeRelated).then(|| lorentzian_distance(&p, &q)).transpose()?;
    let line = json!({"class": class.to_string(), "product": form(p.coords(), q.coords()), "distance": distance});
    writeln!(out, "{}", to_json_line(&line)?)?;
    Ok(0)
}

/// Rows `(x, u-, u+, lower, upper)` of the `extend` command on a polar grid
/// with `grid` radii up to `radius` and `4 grid` angles.
pub fn extension_table(f: &BoundaryData, grid: usize, radius: f64) -> Result<Vec<[f64; 7]>> {
    if grid == 0 || !(radius > 0.0) {
        return Err(AdsError::InvalidParameter("grid and R must be positive".into()));
    }
    let ext = extremal_extensions(f)?;
    let field = BarrierField::new(f, crate::hull::DEFAULT_PLANE_BUDGET)?;
    let mut rows = vec![];
    for i in 0..=grid {
        let rho = radius * i as f64 / grid as f64;
        let angles = if i == 0 { 1 } else { 4 * grid };
        for j in 0..angles {
            let phi = std::f64::consts::TAU * j as f64 / angles as f64;
            let x = hyperboloid_from_hemi(&hemi_from_polar((1.0 / rho.cosh()).acos(), phi));
            let (um, up) = ext.at(&x);
            let (lo, hi) = field.hull.fiber_interval(&x)?;
            rows.push([x[0], x[1], x[2], um, up, lo, hi]);
        }
    }
    Ok(rows)
}

fn cmd_extend(f: &BoundaryData, grid: usize, radius: f64, export: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let report = AdmissibilityReport::of(f);
    writeln!(out, "{}", to_json_line(&report)?)?;
    if !report.admissible {
        return Err(AdsError::NotAdmissible { oscillation: report.oscillation });
    }
    let rows = extension_table(f, grid, radius)?;
    let mut csv = String::from("x0,x1,x2,u_minus,u_plus,lower,upper\n");
    for r in &rows {
        csv.push_str(&r.map(fmt_f64).join(","));
        csv.push('\n');
    }
    match export {
        Some(p) => fs::write(p, csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(0)
}

/// Per-leaf record of a manifest.
#[derive(Debug, Clone, Serialize)]
pub struct LeafRecord {
    pub h_target: f64,
    pub csv: String,
    pub method: String,
    pub converged: bool,
    pub discrete_residual: f64,
    pub geometric_error: f64,
    pub spacelike_margin: f64,
    pub center_value: f64,
    pub max_ii_norm_sq: f64,
    pub bound: f64,
    pub bound_pass: bool,
    pub barrier: BarrierReport,
    pub exhaustion_converged: Option<bool>,
    pub cauchy: Vec<f64>,
    pub summary: FieldSummary,
}

impl LeafRecord {
    fn of(sol: &CmcSolution, csv: &str, barrier: BarrierReport) -> Self {
        let b = sol.curvature_bound();
        let ex = sol.exhaustion.as_ref();
        Self {
            h_target: sol.h_target,
            csv: csv.to_string(),
            method: sol.method.clone(),
            converged: sol.converged,
            discrete_residual: sol.discrete_residual,
            geometric_error: sol.geometric_error,
            spacelike_margin: sol.spacelike_margin,
            center_value: sol.center_value(),
            max_ii_norm_sq: b.max_ii_norm_sq,
            bound: b.bound,
            bound_pass: b.pass,
            barrier,
            exhaustion_converged: ex.map(|e| e.converged),
            cauchy: ex.map(|e| e.cauchy.clone()).unwrap_or_default(),
            summary: FieldSummary::of(&sol.u, &sol.geom),
        }
    }

    fn ok(&self) -> bool {
        self.converged && self.bound_pass && self.barrier.pass
    }
}

#[derive(Debug, Clone, Serialize)]
struct Manifest<'a> {
    kind: &'a str,
    boundary: Vec<[f64; 2]>,
    radius: f64,
    mesh_h: f64,
    config: &'a SolverConfig,
    leaves: Vec<LeafRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<FamilyRecord>,
}

#[derive(Debug, Clone, Serialize)]
struct FamilyRecord {
    h_grid: Vec<f64>,
    /// `min (u_{H_k} - u_{H_{k+1}})` of each adjacent pair.
    gaps: Vec<f64>,
    ordered: bool,
    monotonicity: Vec<MonotonicityReport>,
    monotone: bool,
}

fn solve_one(f: &BoundaryData, cfg: &SolverConfig, method: Method) -> Result<(CmcSolution, BarrierField)> {
    let field = BarrierField::new(f, cfg.plane_budget)?;
    let sol = match method {
        Method::Newton => exhaustion_with_field(&field, cfg, None)?,
        Method::Flow => {
            let mesh = build_mesh(*cfg.radii.last().expect("validated schedule"), cfg.mesh_h)?;
            let g = carrier_values(&mesh, &field, Carrier::for_curvature(cfg.h_target, cfg.barrier_margin))?;
            let u0 = initial_guess(&mesh, &field, cfg.delta_space)?;
            flow_relax(&mesh, &u0, &g, cfg)?
        }
    };
    Ok((sol, field))
}

fn export_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn cmd_solve(
    f: &BoundaryData,
    cfg: &SolverConfig,
    method: Method,
    export: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let (sol, field) = solve_one(f, cfg, method)?;
    let barrier = barrier_verify(&sol, &field, cfg.tol_barrier)?;
    let leaf = LeafRecord::of(&sol, "solution.csv", barrier);
    let ok = leaf.converged;
    let manifest = Manifest {
        kind: "solve",
        boundary: f.samples().map(|(a, v)| [a, v]).collect(),
        radius: sol.mesh.radius,
        mesh_h: sol.mesh.h,
        config: cfg,
        leaves: vec![leaf],
        family: None,
    };
    if let Some(dir) = export {
        export_dir(dir)?;
        fs::write(dir.join("solution.csv"), fields_csv(&sol.mesh, &sol.u, &sol.geom))?;
        write_json(&dir.join(MANIFEST), &manifest)?;
    }
    writeln!(out, "{}", to_json(&manifest)?)?;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_foliate(
    f: &BoundaryData,
    grid: &[f64],
    cfg: &SolverConfig,
    export: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let family = solve_family(f, grid, cfg)?;
    let field = BarrierField::new(f, cfg.plane_budget)?;
    let monotonicity = monotonicity_probes(&family)?;
    let mut leaves = vec![];
    for (k, leaf) in family.leaves.iter().enumerate() {
        let barrier = barrier_verify(leaf, &field, cfg.tol_barrier)?;
        leaves.push(LeafRecord::of(leaf, &format!("leaf_{k:02}.csv"), barrier));
    }
    let record = FamilyRecord {
        h_grid: family.h_grid.clone(),
        gaps: family.orderings.iter().map(|o| o.min_gap).collect(),
        ordered: family.is_ordered(),
        monotone: monotonicity.iter().all(|m| m.pass),
        monotonicity,
    };
    let ok = leaves.iter().all(LeafRecord::ok) && record.ordered && record.monotone;
    let mesh = family.mesh();
    let manifest = Manifest {
        kind: "foliate",
        boundary: f.samples().map(|(a, v)| [a, v]).collect(),
        radius: mesh.radius,
        mesh_h: mesh.h,
        config: cfg,
        leaves,
        family: Some(record),
    };
    if let Some(dir) = export {
        export_dir(dir)?;
        for (k, leaf) in family.leaves.iter().enumerate() {
            fs::write(dir.join(format!("leaf_{k:02}.csv")), fields_csv(&leaf.mesh, &leaf.u, &leaf.geom))?;
        }
        write_json(&dir.join(MANIFEST), &manifest)?;
    }
    writeln!(out, "{}", to_json(&manifest)?)?;
    Ok(if ok { 0 } else { 1 })
}

/// Closed-form values for `--theta` (cylinder `H(k, theta)` and the
/// equidistant at angle `theta`) or `--H` (extremal cylinder, sharp bound and
/// equidistant with that mean curvature).
pub fn oracle_values(n: usize, k: usize, theta: Option<f64>, h: Option<f64>) -> Result<Value> {
    if n < 2 || k > n {
        return Err(AdsError::InvalidParameter(format!("need n >= 2 and k <= n, got n={n}, k={k}")));
    }
    match (theta, h) {
        (Some(t), None) => Ok(json!({
            "n": n, "k": k, "theta": t,
            "cylinder_H": cylinder_H(n, k, t),
            "cylinder_ii_norm": cylinder_ii_norm(k, CylinderParam::Theta(t), n)?,
            "equidistant_H_past": equidistant_H(t, Side::Past, n),
            "equidistant_H_future": equidistant_H(t, Side::Future, n),
        })),
        (None, Some(h)) => Ok(json!({
            "n": n, "k": k, "H": h,
            "extremal_theta": extremal_theta(h, n),
            "bound_rhs": bound_rhs(h.abs(), n),
            "cylinder_ii_norm": cylinder_ii_norm(k, CylinderParam::MeanCurvature(h), n)?,
            "equidistant_theta": (h.abs() / n as f64).atan(),
        })),
        _ => Err(AdsError::InvalidParameter("oracle needs exactly one of --theta and --H".into())),
    }
}

fn cmd_oracle(n: usize, k: usize, theta: Option<f64>, h: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    writeln!(out, "{}", to_json_line(&oracle_values(n, k, theta, h)?)?)?;
    Ok(0)
}

/// One named check of `verify`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn num(v: &Value, key: &str) -> Result<f64> {
    v.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| AdsError::Parse { line: 0, msg: format!("manifest field {key:?} missing or not a number") })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= VERIFY_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Re-checks every leaf of an export directory: mesh coordinates, fields
/// re-evaluated from the exported graph values, tolerances and bounds, and
/// for families the ordering and monotonicity of the leaves.
pub fn verify_dir(dir: &Path) -> Result<Vec<Check>> {
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST))?)?;
    let radius = num(&manifest, "radius")?;
    let mesh_h = num(&manifest, "mesh_h")?;
    let config = manifest.get("config").ok_or_else(|| AdsError::Parse { line: 0, msg: "missing config".into() })?;
    let tol_geom = num(config, "tol_geom")?;
    let mesh = build_mesh(radius, mesh_h)?;
    let leaves = manifest
        .get("leaves")
        .and_then(Value::as_array)
        .ok_or_else(|| AdsError::Parse { line: 0, msg: "missing leaves".into() })?;
    let mut checks = vec![];
    let mut check = |name: String, pass: bool, detail: String| checks.push(Check { name, pass, detail });
    let mut values: Vec<(f64, Vec<f64>)> = vec![];
    for leaf in leaves {
        let h = num(leaf, "h_target")?;
        let csv = leaf.get("csv").and_then(Value::as_str).unwrap_or_default();
        let tag = format!("H={h} {csv}");
        let rows = parse_fields_csv(&fs::read_to_string(dir.join(csv))?)?;
        if rows.len() != mesh.num_vertices() {
            check(
                format!("{tag}: vertex count"),
                false,
                format!("{} rows, mesh has {}", rows.len(), mesh.num_vertices()),
            );
            continue;
        }
        let coord_err = rows
            .iter()
            .zip(&mesh.disk)
            .map(|(r, d)| (r.disk[0] - d[0]).abs().max((r.disk[1] - d[1]).abs()))
            .fold(0.0, f64::max);
        check(format!("{tag}: mesh coordinates"), coord_err <= 1e-12, format!("max deviation {coord_err:e}"));
        let u: Vec<f64> = rows.iter().map(|r| r.u).collect();
        let geom = extrinsic_geometry(&mesh, &u, &SplitChart::standard(2))?;
        let mut field_ok = true;
        for (i, r) in rows.iter().enumerate() {
            let same = close(r.h, geom.mean_curvature[i])
                && close(r.nu, geom.nu[i])
                && close(r.ii_norm_sq, geom.ii_norm_sq[i]);
            field_ok &= same && r.interior == geom.interior[i];
        }
        check(format!("{tag}: fields reproduce from u"), field_ok, "H, nu, |II|^2 re-evaluated".into());
        let err = geom.mean_curvature_error(h);
        check(format!("{tag}: mean curvature within tol_geom"), err <= tol_geom, format!("max |H_i - H| = {err:e}"));
        let margin = crate::geometry::spacelike_margin(&mesh, &u);
        check(format!("{tag}: spacelike"), margin > 0.0, format!("margin {margin:e}"));
        let max_ii = geom.interior_max(&geom.ii_norm_sq);
        let bound = bound_rhs(h.abs(), 2);
        check(
            format!("{tag}: curvature bound"),
            max_ii <= 1.05 * bound,
            format!("max |II|^2 = {max_ii}, bound {bound}"),
        );
        let reported = num(leaf, "max_ii_norm_sq")?;
        check(
            format!("{tag}: reported |II|^2 reproduces"),
            close(reported, max_ii),
            format!("reported {reported}, recomputed {max_ii}"),
        );
        let converged = leaf.get("converged").and_then(Value::as_bool).unwrap_or(false);
        check(format!("{tag}: converged"), converged, String::new());
        let barrier = leaf.pointer("/barrier/pass").and_then(Value::as_bool).unwrap_or(false);
        check(format!("{tag}: barrier"), barrier, String::new());
        values.push((h, u));
    }
    if manifest.get("family").is_some_and(|f| !f.is_null()) {
        values.sort_by(|a, b| a.0.total_cmp(&b.0));
        let interior: Vec<usize> = mesh.interior_vertices().collect();
        for w in values.windows(2) {
            let gap = interior.iter().map(|&i| w[0].1[i] - w[1].1[i]).fold(f64::INFINITY, f64::min);
            check(format!("ordering H={} > H={}", w[1].0, w[0].0), gap > 0.0, format!("min gap {gap:e}"));
        }
        for w in values.windows(3) {
            let d =
                interior.iter().map(|&i| (w[2].1[i] - w[0].1[i]) / (w[2].0 - w[0].0)).fold(f64::NEG_INFINITY, f64::max);
            check(format!("monotonicity at H={}", w[1].0), d < 0.0, format!("max du/dH = {d:e}"));
        }
    }
    Ok(checks)
}

fn cmd_verify(dir: &Path, out: &mut dyn Write) -> Result<i32> {
    let checks = verify_dir(dir)?;
    let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
    writeln!(out, "{}", to_json(&json!({"dir": dir.display().to_string(), "pass": pass, "checks": checks}))?)?;
    Ok(if pass { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let code = main_with_args(std::iter::once("adscmc").chain(args.iter().copied()), &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn classify_pair_and_random() {
        let (code, out) = run_args(&["classify", "--p", "0,0,1,0", "--q", "0,0,0,1"]);
        assert_eq!(code, 0, "{out}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["class"], "time-related");
        assert!((v["distance"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let (code, out) = run_args(&["classify", "--random", "500", "--seed", "3"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("\"misclassified\": 0"), "{out}");
        assert_eq!(run_args(&["classify", "--p", "1,2"]).0, 2);
    }

    #[test]
    fn oracle_command() {
        let (code, out) = run_args(&["oracle", "--H", "0"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["extremal_theta"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(v["bound_rhs"].as_f64().unwrap(), 2.0);
        let (_, out) = run_args(&["oracle", "--theta", "0.7853981633974483", "--k", "1"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["cylinder_H"].as_f64().unwrap().abs() < 1e-12);
        assert_eq!(run_args(&["oracle"]).0, 2);
    }

    #[test]
    fn extend_equivariance_and_refusal() {
        let f = BoundaryData::cosine(0.3, 32).unwrap();
        let a = extension_table(&f, 3, 2.0).unwrap();
        let b = extension_table(&f.shifted(0.2), 3, 2.0).unwrap();
        for (r, s) in a.iter().zip(&b) {
            for c in 3..7 {
                assert!((s[c] - r[c] - 0.2).abs() < 1e-9, "{r:?} {s:?}");
            }
            assert!(r[5] >= r[3] - 1e-9 && r[6] <= r[4] + 1e-9 && r[5] <= r[6] + 1e-12);
        }
        let zero = extension_table(&BoundaryData::zero(16).unwrap(), 2, 1.0).unwrap();
        for r in &zero {
            let expected = (1.0 / r[2]).asin();
            assert!((r[4] - expected).abs() < 1e-9 && (r[3] + expected).abs() < 1e-9);
            assert!(r[5].abs() < 1e-9 && r[6].abs() < 1e-9);
        }
    }

    #[test]
    fn solve_export_verify_and_tamper() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.cfg");
        fs::write(&cfg_path, "radii = 1.0\nmesh_h = 0.2\n").unwrap();
        let out_dir = dir.path().join("eq");
        let (code, out) = run_args(&[
            "solve",
            "--boundary",
            "builtin:zero",
            "--H",
            "2",
            "--export",
            out_dir.to_str().unwrap(),
            "--config",
            cfg_path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{out}");
        let first = fs::read(out_dir.join(MANIFEST)).unwrap();
        let (code, out) = run_args(&["verify", out_dir.to_str().unwrap()]);
        assert_eq!(code, 0, "{out}");
        // Same run, same bytes.
        let (code, _) = run_args(&[
            "solve",
            "--boundary",
            "builtin:zero",
            "--H",
            "2",
            "--export",
            out_dir.to_str().unwrap(),
            "--config",
            cfg_path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert_eq!(first, fs::read(out_dir.join(MANIFEST)).unwrap());
        // Tampering with one graph value is detected.
        let csv = fs::read_to_string(out_dir.join("solution.csv")).unwrap();
        let mut lines: Vec<String> = csv.lines().map(String::from).collect();
        let mut cols: Vec<String> = lines[1].split(',').map(String::from).collect();
        cols[3] = fmt_f64(cols[3].parse::<f64>().unwrap() + 1e-3);
        lines[1] = cols.join(",");
        fs::write(out_dir.join("solution.csv"), lines.join("\n") + "\n").unwrap();
        let (code, _) = run_args(&["verify", out_dir.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert_eq!(run_args(&["verify", dir.path().join("missing").to_str().unwrap()]).0, 2);
    }
}
