//! Closed-form CMC surfaces: equidistants from a totally geodesic plane and
//! the cylinders `S^k x H^{n-k}`, with their curvatures and the sharp bound
//! on `|II|^2`.
//!
//! Run: cargo run --example exact_surfaces

use adscmc::exact::{
    bound_rhs, cylinder_H, cylinder_ii_norm, equidistant_H, equidistant_graph_rho, extremal_theta, CylinderParam, Side,
};

fn main() -> adscmc::error::Result<()> {
    println!("equidistants in AdS^3");
    for theta in [0.0, 0.3, 0.6, 0.9] {
        let h = equidistant_H(theta, Side::Future, 2);
        let u = equidistant_graph_rho(theta, Side::Future, 1.0)?;
        println!("  theta {theta:.2}: H = {h:+.6}, height at rho = 1: {u:.6}");
    }
    println!("cylinders and the bound on |II|^2");
    for n in [2usize, 3, 4] {
        for h in [0.0, 1.0, 2.0] {
            let theta = extremal_theta(h, n);
            let k = 1;
            let ii = cylinder_ii_norm(k, CylinderParam::Theta(theta), n)?;
            println!(
                "  n {n}, H {h}: theta {theta:.6}, cylinder H {:.6}, |II|^2 {ii:.6}, bound {:.6}",
                cylinder_H(n, k, theta),
                bound_rhs(h, n)
            );
        }
    }
    Ok(())
}
