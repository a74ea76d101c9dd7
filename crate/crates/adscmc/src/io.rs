//! File formats: boundary data, key = value configuration, CSV field export
//! and JSON documents with every float printed to 17 significant digits.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::boundary::BoundaryData;
use crate::error::{AdsError, Result};
use crate::geometry::SurfaceGeometry;
use crate::mesh::DiskMesh;
use crate::solver::SolverConfig;

/// Sample count of the built-in boundary data.
pub const BUILTIN_SAMPLES: usize = 64;

/// Floats as `{:.16e}`: 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// JSON formatter writing floats with [`fmt_f64`].
struct FixedFloat<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for FixedFloat<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-digit floats (non-finite floats become `null`).
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("JSON output is UTF-8"))
}

/// Compact single-line JSON with 17-digit floats.
pub fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(to_json(&v)?.split('\n').map(str::trim).collect::<Vec<_>>().join(" "))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)? + "\n")?;
    Ok(())
}

/// Parses boundary data: one `angle value` pair per line (radians); blank
/// lines and `#` comments are skipped.
pub fn parse_boundary(text: &str) -> Result<BoundaryData> {
    let mut samples = vec![];
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| AdsError::Parse { line: k + 1, msg: format!("not a finite number: {s:?}") })
        };
        if nums.len() != 2 {
            return Err(AdsError::Parse { line: k + 1, msg: "expected `angle value`".into() });
        }
        samples.push((parse(nums[0])?, parse(nums[1])?));
    }
    BoundaryData::new(samples)
}

/// Built-in data `builtin:zero`, `builtin:tent` or `builtin:cosine[:amplitude]`
/// (amplitude 0.5 by default), or a boundary file path.
pub fn load_boundary(source: &str) -> Result<BoundaryData> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let mut parts = name.splitn(2, ':');
        return match (parts.next(), parts.next()) {
            (Some("zero"), None) => BoundaryData::zero(BUILTIN_SAMPLES),
            (Some("tent"), None) => BoundaryData::tent(BUILTIN_SAMPLES),
            (Some("cosine"), amp) => {
                let a = amp.map_or(Ok(0.5), |s| {
                    s.parse::<f64>().map_err(|_| AdsError::InvalidParameter(format!("bad amplitude {s:?}")))
                })?;
                BoundaryData::cosine(a, BUILTIN_SAMPLES)
            }
            _ => Err(AdsError::InvalidParameter(format!("unknown built-in boundary {source:?}"))),
        };
    }
    parse_boundary(&fs::read_to_string(source)?)
}

/// Boundary data in the file format read by [`parse_boundary`].
pub fn format_boundary(f: &BoundaryData) -> String {
    f.samples().map(|(a, v)| format!("{} {}\n", fmt_f64(a), fmt_f64(v))).collect()
}

/// Settings read from a `key = value` configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub solver: SolverConfig,
    /// Seed of randomized checks.
    pub seed: u64,
}

/// Parses `key = value` lines over the defaults. Keys are the
/// [`SolverConfig`] field names (`radii` takes a comma-separated list) and
/// `seed`; unknown keys are errors.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut out = ConfigFile::default();
    let mut seen = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(a, b)| (a.trim(), b.trim()))
            .ok_or_else(|| AdsError::Parse { line: line_no, msg: "expected `key = value`".into() })?;
        if seen.insert(key.to_string(), line_no).is_some() {
            return Err(AdsError::Parse { line: line_no, msg: format!("duplicate key {key:?}") });
        }
        let bad = |what: &str| AdsError::Parse { line: line_no, msg: format!("{key}: expected {what}, got {value:?}") };
        let real = || value.parse::<f64>().map_err(|_| bad("a number"));
        let count = || value.parse::<usize>().map_err(|_| bad("a nonnegative integer"));
        let s = &mut out.solver;
        match key {
            "h_target" | "H" => s.h_target = real()?,
            "tol_residual" => s.tol_residual = real()?,
            "tol_geom" => s.tol_geom = real()?,
            "newton_damping" => s.newton_damping = real()?,
            "max_newton" => s.max_newton = count()?,
            "max_polish" => s.max_polish = count()?,
            "tol_polish" => s.tol_polish = real()?,
            "flow_dt" => s.flow_dt = real()?,
            "max_flow_steps" => s.max_flow_steps = count()?,
            "delta_space" => s.delta_space = real()?,
            "radii" => {
                s.radii = value
                    .split(',')
                    .map(|r| r.trim().parse::<f64>().map_err(|_| bad("a comma-separated list of radii")))
                    .collect::<Result<_>>()?
            }
            "mesh_h" => s.mesh_h = real()?,
            "tol_exhaust" => s.tol_exhaust = real()?,
            "barrier_margin" => s.barrier_margin = real()?,
            "tol_barrier" => s.tol_barrier = real()?,
            "plane_budget" => s.plane_budget = count()?,
            "seed" => out.seed = value.parse::<u64>().map_err(|_| bad("an unsigned integer"))?,
            _ => return Err(AdsError::Parse { line: line_no, msg: format!("unknown key {key:?}") }),
        }
    }
    out.solver.validate()?;
    Ok(out)
}

/// Column header of the per-vertex field CSV.
pub const FIELD_CSV_HEADER: &str = "vertex,x,y,u,H,nu,ii_norm_sq,interior";

/// Per-vertex CSV: disc coordinates, graph value, mean curvature, gradient
/// function and `|II|^2`.
pub fn fields_csv(mesh: &DiskMesh, u: &[f64], geom: &SurfaceGeometry) -> String {
    let mut s = String::with_capacity(mesh.num_vertices() * 140);
    s.push_str(FIELD_CSV_HEADER);
    s.push('\n');
    for i in 0..mesh.num_vertices() {
        let [x, y] = mesh.disk[i];
        let row = [x, y, u[i], geom.mean_curvature[i], geom.nu[i], geom.ii_norm_sq[i]].map(fmt_f64);
        s.push_str(&format!("{i},{},{}\n", row.join(","), u8::from(geom.interior[i])));
    }
    s
}

/// One parsed row of a field CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub disk: [f64; 2],
    pub u: f64,
    pub h: f64,
    pub nu: f64,
    pub ii_norm_sq: f64,
    pub interior: bool,
}

/// Reads a CSV written by [`fields_csv`].
pub fn parse_fields_csv(text: &str) -> Result<Vec<FieldRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == FIELD_CSV_HEADER => {}
        _ => return Err(AdsError::Parse { line: 1, msg: "unexpected CSV header".into() }),
    }
    let mut rows = vec![];
    for (k, line) in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let err = |msg: &str| AdsError::Parse { line: k + 1, msg: msg.into() };
        if cols.len() != 8 {
            return Err(err("expected 8 columns"));
        }
        if cols[0].parse::<usize>().ok() != Some(rows.len()) {
            return Err(err("vertex index out of sequence"));
        }
        let v: Vec<f64> =
            cols[1..7].iter().map(|c| c.parse::<f64>().map_err(|_| err("bad number"))).collect::<Result<_>>()?;
        let interior = match cols[7] {
            "0" => false,
            "1" => true,
            _ => return Err(err("interior flag must be 0 or 1")),
        };
        rows.push(FieldRow { disk: [v[0], v[1]], u: v[2], h: v[3], nu: v[4], ii_norm_sq: v[5], interior });
    }
    Ok(rows)
}

/// Min, max and selected percentiles of interior values.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FieldStats {
    pub min: f64,
    pub max: f64,
    pub p05: f64,
    pub p50: f64,
    pub p95: f64,
}

impl FieldStats {
    pub fn of(values: &[f64], mask: &[bool]) -> Self {
        let mut v: Vec<f64> = values.iter().zip(mask).filter(|(x, m)| **m && x.is_finite()).map(|(x, _)| *x).collect();
        if v.is_empty() {
            return Self { min: f64::NAN, max: f64::NAN, p05: f64::NAN, p50: f64::NAN, p95: f64::NAN };
        }
        v.sort_by(f64::total_cmp);
        let pick = |q: f64| v[((v.len() - 1) as f64 * q).round() as usize];
        Self { min: v[0], max: v[v.len() - 1], p05: pick(0.05), p50: pick(0.5), p95: pick(0.95) }
    }
}

/// Interior statistics of the exported fields.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FieldSummary {
    pub u: FieldStats,
    pub mean_curvature: FieldStats,
    pub nu: FieldStats,
    pub ii_norm_sq: FieldStats,
}

impl FieldSummary {
    pub fn of(u: &[f64], geom: &SurfaceGeometry) -> Self {
        let m = &geom.interior;
        Self {
            u: FieldStats::of(u, m),
            mean_curvature: FieldStats::of(&geom.mean_curvature, m),
            nu: FieldStats::of(&geom.nu, m),
            ii_norm_sq: FieldStats::of(&geom.ii_norm_sq, m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, std::f64::consts::PI] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert_eq!(s.trim_start_matches('-').split('e').next().unwrap().len(), 18);
        }
        let json = to_json(&serde_json::json!({"a": 0.5, "b": [1.0, f64::NAN]})).unwrap();
        assert!(json.contains("5.0000000000000000e-1"), "{json}");
        assert!(json.contains("null"));
        assert!(!to_json_line(&serde_json::json!({"a": [1, 2]})).unwrap().contains('\n'));
    }

    #[test]
    fn boundary_files() {
        let f = parse_boundary("# comment\n0 0.1\n1.5707963267948966 0\n\n3.141592653589793 -0.1\n4.71238898038469 0\n0.5 0.05\n1 0.08\n2 0.02\n5 0.03  # trailing\n").unwrap();
        assert_eq!(f.len(), 8);
        let g = parse_boundary(&format_boundary(&f)).unwrap();
        assert_eq!(f.angles(), g.angles());
        assert_eq!(f.values(), g.values());
        assert!(matches!(parse_boundary("0 1 2\n"), Err(AdsError::Parse { line: 1, .. })));
        assert!(matches!(parse_boundary("0 x\n"), Err(AdsError::Parse { .. })));
        assert_eq!(load_boundary("builtin:zero").unwrap().oscillation(), 0.0);
        assert!((load_boundary("builtin:cosine:0.25").unwrap().oscillation() - 0.5).abs() < 1e-12);
        assert!(load_boundary("builtin:nope").is_err());
    }

    #[test]
    fn config_files() {
        let c = parse_config("# run\nH = 1.5\nradii = 1, 2,3\nmesh_h=0.2\nseed = 9\nmax_polish = 0\n").unwrap();
        assert_eq!(c.solver.h_target, 1.5);
        assert_eq!(c.solver.radii, vec![1.0, 2.0, 3.0]);
        assert_eq!(c.solver.mesh_h, 0.2);
        assert_eq!(c.solver.max_polish, 0);
        assert_eq!(c.seed, 9);
        assert!(parse_config("bogus = 1\n").is_err());
        assert!(parse_config("H = 1\nH = 2\n").is_err());
        assert!(parse_config("radii = 2, 1\n").is_err());
        assert!(parse_config("tol_geom = -1\n").is_err());
        assert_eq!(parse_config("").unwrap(), ConfigFile::default());
    }

    #[test]
    fn field_stats() {
        let s = FieldStats::of(&[3.0, 1.0, 2.0, 100.0], &[true, true, true, false]);
        assert_eq!((s.min, s.max, s.p50), (1.0, 3.0, 2.0));
    }
}
