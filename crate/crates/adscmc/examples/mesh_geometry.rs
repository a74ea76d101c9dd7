//! Builds a geodesic disc mesh, lifts an exact equidistant onto it and
//! compares the fitted mean curvature, second fundamental form and Gauss
//! equation residual with their closed-form values.
//!
//! Run: cargo run --example mesh_geometry

use adscmc::exact::{equidistant_H, equidistant_graph, Side};
use adscmc::geometry::{extrinsic_geometry, sectional_curvature_check};
use adscmc::mesh::build_mesh;
use adscmc::quadric::SplitChart;

fn main() -> adscmc::error::Result<()> {
    let mesh = build_mesh(2.0, 0.1)?;
    println!("{} vertices, {} triangles, {} rings", mesh.num_vertices(), mesh.triangles.len(), mesh.num_rings());
    let theta = 0.5;
    let u: Vec<f64> =
        mesh.vertices.iter().map(|x| equidistant_graph(theta, Side::Future, x)).collect::<Result<_, _>>()?;
    let geom = extrinsic_geometry(&mesh, &u, &SplitChart::standard(2))?;
    let h = equidistant_H(theta, Side::Future, 2);
    println!("exact H {h:.6}, max interior deviation {:.2e}", geom.mean_curvature_error(h));
    let ii = 2.0 * theta.tan().powi(2);
    println!("exact |II|^2 {ii:.6}, max interior deviation {:.2e}", geom.interior_max_deviation(&geom.ii_norm_sq, ii));
    println!("Gauss equation residual {:.2e}", sectional_curvature_check(&geom).max_interior);
    Ok(())
}
