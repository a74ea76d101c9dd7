//! Solves a family of CMC graphs over a curvature grid, checks that the
//! leaves are ordered and evaluates the resulting CMC time function.
//!
//! Run: cargo run --release --example cmc_foliation

use adscmc::boundary::BoundaryData;
use adscmc::foliation::{cmc_time, solve_family, uniform_grid};
use adscmc::quadric::hyperboloid_point;
use adscmc::solver::SolverConfig;

fn main() -> adscmc::error::Result<()> {
    let f = BoundaryData::cosine(0.3, 64)?;
    let cfg = SolverConfig { radii: vec![1.5, 2.0], ..SolverConfig::default() };
    let family = solve_family(&f, &uniform_grid(-1.0, 1.0, 5)?, &cfg)?;
    for (h, leaf) in family.h_grid.iter().zip(&family.leaves) {
        println!("H {h:+.2}: center {:+.6}, geometric error {:.2e}", leaf.center_value(), leaf.geometric_error);
    }
    println!("ordered {}, min gap {:.3e}", family.is_ordered(), family.min_gap());
    let x = hyperboloid_point(0.5, &[1.0, 0.0]);
    let centre = family.leaves[2].value_at(&x).unwrap_or(0.0);
    for dt in [-0.05, 0.0, 0.05] {
        println!("CMC time at t = {:+.4}: {:+.6}", centre + dt, cmc_time(&family, &x, centre + dt)?);
    }
    Ok(())
}
