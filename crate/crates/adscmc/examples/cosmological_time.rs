//! Evaluates the past and future cosmological times inside the invisible
//! domain of boundary data, with the boundary points realizing them.
//!
//! Run: cargo run --release --example cosmological_time

use adscmc::boundary::{extremal_extensions, BoundaryData};
use adscmc::cosmo::TauEvaluator;
use adscmc::exact::Side;
use adscmc::quadric::hyperboloid_point;

fn main() -> adscmc::error::Result<()> {
    let f = BoundaryData::tent(64)?;
    let eval = TauEvaluator::new(extremal_extensions(&f)?);
    for rho in [0.0, 1.0, 2.0] {
        let x = hyperboloid_point(rho, &[0.0, 1.0]);
        let (lo, hi) = eval.extensions().at(&x);
        for s in [0.25, 0.5, 0.75] {
            let t = lo + s * (hi - lo);
            let past = eval.tau(&x, t, Side::Past)?;
            let future = eval.tau(&x, t, Side::Future)?;
            println!(
                "rho {rho:.1}, t {t:+.4}: past {:.6}, future {:.6}, sum {:.6}",
                past.value,
                future.value,
                past.value + future.value
            );
        }
    }
    Ok(())
}
