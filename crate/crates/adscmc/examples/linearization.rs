//! Checks the Jacobi operator `Lap v - (2 + |II|^2) v` of a CMC surface
//! against finite differences of the mean curvature of normal graphs.
//!
//! Run: cargo run --release --example linearization

use adscmc::exact::{equidistant_graph, Side};
use adscmc::mesh::build_mesh;
use adscmc::solver::linearization_check;

fn main() -> adscmc::error::Result<()> {
    let mesh = build_mesh(2.0, 0.05)?;
    let u: Vec<f64> =
        mesh.vertices.iter().map(|x| equidistant_graph(0.3, Side::Future, x)).collect::<Result<_, _>>()?;
    let v: Vec<f64> = mesh.rho.iter().map(|r| (-((r - 0.3) / 0.5).powi(2)).exp()).collect();
    for eps in [4e-4, 2e-4, 1e-4] {
        let report = linearization_check(&mesh, &u, &v, eps)?;
        println!("eps {eps:.0e}: relative error {:.3e}", report.relative_error);
    }
    Ok(())
}
