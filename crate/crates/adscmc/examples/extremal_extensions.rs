//! Extremal 1-Lipschitz extensions of boundary data and the boundary of
//! its convex hull, sampled along a ray from the basepoint.
//!
//! Run: cargo run --example extremal_extensions

use adscmc::boundary::{extremal_extensions, AdmissibilityReport, BoundaryData};
use adscmc::exact::Side;
use adscmc::hull::{ch_boundary_value, convex_hull_build, DEFAULT_PLANE_BUDGET};
use adscmc::quadric::hyperboloid_point;

fn main() -> adscmc::error::Result<()> {
    let f = BoundaryData::from_fn(64, |phi| 0.4 * (2.0 * phi).sin() + 0.2 * phi.cos())?;
    println!("{:?}", AdmissibilityReport::of(&f));
    let ext = extremal_extensions(&f)?;
    let hull = convex_hull_build(&f, DEFAULT_PLANE_BUDGET)?;
    println!("hull certificate: {:.2e}", hull.certify());
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "rho", "u-", "hull-", "hull+", "u+");
    for i in 0..=8 {
        let rho = 0.5 * i as f64;
        let x = hyperboloid_point(rho, &[0.6, 0.8]);
        let (um, up) = ext.at(&x);
        let lo = ch_boundary_value(&x, &hull, Side::Past)?;
        let hi = ch_boundary_value(&x, &hull, Side::Future)?;
        println!("{rho:>5.2} {um:>10.6} {lo:>10.6} {hi:>10.6} {up:>10.6}");
    }
    Ok(())
}
