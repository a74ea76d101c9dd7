//! Relaxes a graph to constant mean curvature with the explicit flow and
//! compares the result with the Newton solution of the same problem.
//!
//! Run: cargo run --release --example mean_curvature_flow

use adscmc::mesh::build_mesh;
use adscmc::solver::{flow_relax, newton_solve, SolverConfig};

fn main() -> adscmc::error::Result<()> {
    let mesh = build_mesh(1.0, 0.125)?;
    let g: Vec<f64> = mesh.vertices.iter().map(|x| 0.1 * x[0]).collect();
    let cfg = SolverConfig { tol_residual: 1e-6, ..SolverConfig::with_h(0.5) };
    let flow = flow_relax(&mesh, &g, &g, &cfg)?;
    let newton = newton_solve(&mesh, &g, &g, &cfg)?;
    let diff = flow.u.iter().zip(&newton.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("flow: {} steps recorded, final residual {:.2e}", flow.residual_history.len(), flow.discrete_residual);
    println!("newton: {} steps, final residual {:.2e}", newton.residual_history.len(), newton.discrete_residual);
    println!("max difference between the two solutions: {diff:.2e}");
    Ok(())
}
