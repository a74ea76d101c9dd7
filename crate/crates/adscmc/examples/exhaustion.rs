//! Approximates the entire CMC graph with prescribed asymptotic boundary by
//! Dirichlet problems on growing discs, and checks it against its barrier.
//!
//! Run: cargo run --release --example exhaustion

use adscmc::boundary::BoundaryData;
use adscmc::cosmo::BarrierField;
use adscmc::solver::{barrier_verify, exhaustion_with_field, SolverConfig};

fn main() -> adscmc::error::Result<()> {
    let f = BoundaryData::cosine(0.3, 64)?;
    let cfg = SolverConfig { radii: vec![1.5, 2.0, 2.5], ..SolverConfig::with_h(1.0) };
    let field = BarrierField::new(&f, cfg.plane_budget)?;
    let sol = exhaustion_with_field(&field, &cfg, None)?;
    if let Some(report) = &sol.exhaustion {
        println!("carrier: {}", report.carrier);
        for (r, c) in report.radii.iter().skip(1).zip(&report.cauchy) {
            println!("radius {r:.3}: change on the inner half-ball {c:.2e}");
        }
    }
    println!("center value {:.6}, geometric error {:.2e}", sol.center_value(), sol.geometric_error);
    let bound = sol.curvature_bound();
    println!("max |II|^2 {:.4} against bound {:.4}", bound.max_ii_norm_sq, bound.bound);
    let barrier = barrier_verify(&sol, &field, cfg.tol_barrier)?;
    println!("{} check: worst violation {:.2e}, pass {}", barrier.kind, barrier.worst_violation, barrier.pass);
    Ok(())
}
