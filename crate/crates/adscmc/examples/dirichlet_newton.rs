//! Solves one Dirichlet problem for a CMC graph with Newton's method, using
//! the exact equidistant as boundary data, and reports the convergence
//! history and the error against the exact surface.
//!
//! Run: cargo run --example dirichlet_newton

use adscmc::exact::{equidistant_graph, Side};
use adscmc::mesh::build_mesh;
use adscmc::solver::{newton_solve, SolverConfig};

fn main() -> adscmc::error::Result<()> {
    let theta: f64 = 0.4;
    let h = 2.0 * theta.tan();
    let mesh = build_mesh(1.5, 0.1)?;
    let exact: Vec<f64> =
        mesh.vertices.iter().map(|x| equidistant_graph(theta, Side::Past, x)).collect::<Result<_, _>>()?;
    let u0 = vec![0.0; exact.len()];
    let sol = newton_solve(&mesh, &u0, &exact, &SolverConfig::with_h(h))?;
    for (k, r) in sol.residual_history.iter().enumerate() {
        println!("step {k:>2}: residual {r:.3e}");
    }
    let err = sol.u.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("H = {h:.6}, converged {}, geometric error {:.2e}", sol.converged, sol.geometric_error);
    println!("max deviation from the exact surface: {err:.2e}");
    Ok(())
}
