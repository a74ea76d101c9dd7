//! Acceptance suite: one pass/fail line per criterion, nonzero exit if any fails.
//!
//! Run: cargo test --test acceptance

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::time::Instant;

use adscmc::boundary::{
    extremal_extensions, hemi_from_polar, hyperboloid_from_hemi, lipschitz_cone_bounds, BoundaryData, Hemi,
};
use adscmc::cosmo::{BarrierField, TauEvaluator};
use adscmc::exact::{bound_rhs, cylinder_ii_norm, equidistant_graph, extremal_theta, CylinderParam, Side};
use adscmc::foliation::{monotonicity_probes, solve_family, CmcFamily};
use adscmc::geometry::extrinsic_geometry;
use adscmc::mesh::build_mesh;
use adscmc::quadric::{classify_pair, lorentzian_distance, SplitChart};
use adscmc::sampling::random_geodesic_pair;
use adscmc::solver::{barrier_verify, exhaustion_solve, linearization_check, uniqueness_check, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn cosine() -> BoundaryData {
    BoundaryData::cosine(0.5, 64).expect("admissible data")
}

fn ac1_causal_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut wrong, mut worst) = (0, 0.0f64);
    for _ in 0..10_000 {
        let pair = random_geodesic_pair(&mut rng, 2).map_err(|e| e.to_string())?;
        if classify_pair(&pair.p, &pair.q) != pair.expected {
            wrong += 1;
        } else if let Some(d) = pair.expected_distance {
            let got = lorentzian_distance(&pair.p, &pair.q).map_err(|e| e.to_string())?;
            worst = worst.max((got - d).abs());
        }
    }
    Ok((wrong == 0 && worst <= 1e-9, format!("10000 pairs, {wrong} misclassified, max distance error {worst:.2e}")))
}

fn equidistant_error(h: f64) -> Result<f64, String> {
    let mesh = build_mesh(3.0, h).map_err(|e| e.to_string())?;
    let u: Vec<f64> = mesh
        .vertices
        .iter()
        .map(|x| equidistant_graph(FRAC_PI_4, Side::Past, x))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let geom = extrinsic_geometry(&mesh, &u, &SplitChart::standard(2)).map_err(|e| e.to_string())?;
    Ok(geom.mean_curvature_error(2.0))
}

fn ac2_equidistant_oracle() -> Outcome {
    let (e1, e2) = (equidistant_error(0.1)?, equidistant_error(0.05)?);
    let order = (e1 / e2).log2();
    Ok((
        e1 <= 5e-3 && e2 <= 1.5e-3 && order >= 1.5,
        format!("max |H - 2|: {e1:.2e} (h=0.1), {e2:.2e} (h=0.05), order {order:.2}"),
    ))
}

fn ac3_sharp_bound() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=4 {
        for k in 0..=20 {
            let h = -5.0 + 0.5 * k as f64;
            let theta = extremal_theta(h.abs(), n);
            let s = cylinder_ii_norm(1, CylinderParam::Theta(theta), n).map_err(|e| e.to_string())?;
            let s2 = cylinder_ii_norm(1, CylinderParam::MeanCurvature(h), n).map_err(|e| e.to_string())?;
            worst = worst.max((s - bound_rhs(h.abs(), n)).abs()).max((s2 - bound_rhs(h.abs(), n)).abs());
        }
    }
    let maximal = cylinder_ii_norm(1, CylinderParam::Theta(FRAC_PI_4), 2).map_err(|e| e.to_string())?;
    let ok = worst <= 1e-10 && (maximal - 2.0).abs() <= 1e-15 && bound_rhs(0.0, 2) == 2.0;
    Ok((ok, format!("max deviation {worst:.2e} over 63 cases, maximal cylinder |II|^2 = {maximal}")))
}

fn ac4_solver_closed_form() -> Outcome {
    let equator = BoundaryData::zero(64).map_err(|e| e.to_string())?;
    let s2 = exhaustion_solve(&equator, &SolverConfig::with_h(2.0)).map_err(|e| e.to_string())?;
    let e2 = (s2.center_value() + FRAC_PI_4).abs();
    let s0 = exhaustion_solve(&equator, &SolverConfig::with_h(0.0)).map_err(|e| e.to_string())?;
    let e0 = s0.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ok = s2.converged && s0.converged && e2 <= 5e-3 && e0 <= 1e-10;
    Ok((ok, format!("H=2: |u(x0) + pi/4| = {e2:.2e}; H=0: max |u| = {e0:.2e}")))
}

fn ac5_uniqueness() -> Outcome {
    let field = BarrierField::new(&cosine(), SolverConfig::default().plane_budget).map_err(|e| e.to_string())?;
    let r = uniqueness_check(&field, &SolverConfig::with_h(1.0), 200).map_err(|e| e.to_string())?;
    Ok((r.pass, format!("max nodal difference {:.2e} (tolerance {:.0e})", r.max_difference, r.tolerance)))
}

fn ac6_ordering(family: &CmcFamily) -> Outcome {
    let probes = monotonicity_probes(family).map_err(|e| e.to_string())?;
    let worst = probes.iter().map(|p| p.max_derivative).fold(f64::NEG_INFINITY, f64::max);
    let ok = family.is_ordered() && probes.iter().all(|p| p.pass);
    Ok((ok, format!("min adjacent gap {:.2e}, max du/dH {worst:.2e}", family.min_gap())))
}

fn ac7_barriers(family: &CmcFamily) -> Outcome {
    let cfg = SolverConfig::default();
    let field = BarrierField::new(&family.boundary, cfg.plane_budget).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    let mut hull = f64::NAN;
    for leaf in &family.leaves {
        let tol = if leaf.h_target == 0.0 { 5e-3 } else { cfg.tol_barrier };
        let r = barrier_verify(leaf, &field, tol).map_err(|e| e.to_string())?;
        ok &= r.pass;
        worst = worst.max(r.worst_violation);
        if leaf.h_target == 0.0 {
            hull = r.worst_violation;
        }
    }
    Ok((ok && hull.is_finite(), format!("worst barrier violation {worst:.2e}, H=0 hull sandwich {hull:.2e}")))
}

fn ac8_cosmological_sum() -> Outcome {
    let ext = extremal_extensions(&cosine()).map_err(|e| e.to_string())?;
    let tau = TauEvaluator::new(ext.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let rho: f64 = rng.gen_range(0.0..3.0);
        let phi: f64 = rng.gen_range(0.0..TAU);
        let x = hyperboloid_from_hemi(&hemi_from_polar((1.0 / rho.cosh()).acos(), phi));
        let (lo, hi) = ext.at(&x);
        let t = lo + rng.gen_range(0.01..0.99) * (hi - lo);
        let past = tau.tau(&x, t, Side::Past).map_err(|e| e.to_string())?.value;
        let future = tau.tau(&x, t, Side::Future).map_err(|e| e.to_string())?.value;
        worst = worst.min(past + future);
    }
    Ok((
        worst >= FRAC_PI_2 - 1e-3,
        format!("min tau_past + tau_future = {worst:.6} over 1000 points (pi/2 = {FRAC_PI_2:.6})"),
    ))
}

fn ac9_linearization() -> Outcome {
    let mesh = build_mesh(2.0, 0.05).map_err(|e| e.to_string())?;
    let u: Vec<f64> = mesh
        .vertices
        .iter()
        .map(|x| equidistant_graph(FRAC_PI_4, Side::Past, x))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let center = [0.3f64.sinh(), 0.0, 0.3f64.cosh()];
    let v: Vec<f64> = mesh
        .vertices
        .iter()
        .map(|x| {
            let d = adscmc::mesh::hyperbolic_distance(x, &center);
            (-(d / 0.5).powi(2)).exp()
        })
        .collect();
    let eps = [4e-4, 2e-4, 1e-4];
    let reports = eps
        .iter()
        .map(|&e| linearization_check(&mesh, &u, &v, e))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let ratio = diff(&reports[0].finite_difference, &reports[1].finite_difference)
        / diff(&reports[1].finite_difference, &reports[2].finite_difference);
    let err = reports[2].relative_error;
    let ok = err <= 1e-2 && (1.8..=2.2).contains(&ratio);
    Ok((
        ok,
        format!(
            "relative error {:.2e} / {:.2e} / {err:.2e} at eps = 4e-4 / 2e-4 / 1e-4; first-order ratio {ratio:.3}",
            reports[0].relative_error, reports[1].relative_error
        ),
    ))
}

fn ac10_curvature_bound(family: &CmcFamily) -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    for leaf in &family.leaves {
        let b = leaf.curvature_bound();
        ok &= leaf.converged && b.pass;
        worst = worst.max(b.ratio);
    }
    Ok((ok, format!("max |II|^2 / bound over {} leaves = {worst:.3}", family.leaves.len())))
}

fn ac11_mcshane() -> Outcome {
    let f = BoundaryData::from_fn(64, |p| 0.4 * (2.0 * p).sin() + 0.2 * p.cos()).map_err(|e| e.to_string())?;
    let ext = extremal_extensions(&f).map_err(|e| e.to_string())?;
    let mut nodes: Vec<Hemi> = vec![];
    let mut data = vec![];
    for k in 0..8 {
        for j in 0..8 {
            nodes.push(hemi_from_polar(k as f64 * PI / 16.0, j as f64 * PI / 4.0));
            data.push(None);
        }
    }
    for (a, v) in f.samples() {
        nodes.push(hemi_from_polar(FRAC_PI_2, a));
        data.push(Some(v));
    }
    let (lo, up) = lipschitz_cone_bounds(&nodes, &data);
    let resolution = PI / 16.0;
    let mut worst = 0.0f64;
    for i in 0..64 {
        let s = nodes[i];
        worst = worst.max((ext.plus(&s) - up[i]).abs()).max((ext.minus(&s) - lo[i]).abs());
    }
    Ok((worst <= resolution, format!("max deviation {worst:.2e} on the 8x8 grid (resolution pi/16 = {resolution:.3})")))
}

fn main() {
    let family_start = Instant::now();
    let cfg = SolverConfig::default();
    let family = solve_family(&cosine(), &[-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0], &cfg);
    let family_time = family_start.elapsed().as_secs_f64();
    let with_family = |f: fn(&CmcFamily) -> Outcome| -> Outcome {
        match &family {
            Ok(fam) => f(fam),
            Err(e) => Err(format!("family solve failed: {e}")),
        }
    };
    let criteria: Vec<Criterion> = vec![
        ("AC1 causal kernel", Box::new(ac1_causal_kernel)),
        ("AC2 equidistant oracle", Box::new(ac2_equidistant_oracle)),
        ("AC3 sharp bound", Box::new(ac3_sharp_bound)),
        ("AC4 solver vs closed form", Box::new(ac4_solver_closed_form)),
        ("AC5 uniqueness regression", Box::new(ac5_uniqueness)),
        ("AC6 ordering and monotonicity", Box::new(move || with_family(ac6_ordering))),
        ("AC7 barriers and hull", Box::new(move || with_family(ac7_barriers))),
        ("AC8 cosmological sum", Box::new(ac8_cosmological_sum)),
        ("AC9 linearization", Box::new(ac9_linearization)),
        ("AC10 curvature bound on leaves", Box::new(move || with_family(ac10_curvature_bound))),
        ("AC11 McShane oracle", Box::new(ac11_mcshane)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let mut secs = start.elapsed().as_secs_f64();
        if name.starts_with("AC6") {
            secs += family_time;
        }
        println!("{} {name}: {detail} [{secs:.1} s]", if pass { "PASS" } else { "FAIL" });
        failed += usize::from(!pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
