//! Classifies random geodesic pairs of AdS^3 and checks the Lorentzian
//! distance of time-related pairs against the geodesic parameter.
//!
//! Run: cargo run --example causal_classification

use adscmc::quadric::{classify_pair, lorentzian_distance, CausalClass};
use adscmc::sampling::random_geodesic_pair;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn main() -> adscmc::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let (mut wrong, mut worst) = (0, 0.0_f64);
    for _ in 0..2000 {
        let pair = random_geodesic_pair(&mut rng, 2)?;
        let class = classify_pair(&pair.p, &pair.q);
        *counts.entry(class.to_string()).or_default() += 1;
        if class != pair.expected {
            wrong += 1;
        }
        if let (CausalClass::TimeRelated, Some(d)) = (class, pair.expected_distance) {
            worst = worst.max((lorentzian_distance(&pair.p, &pair.q)? - d).abs());
        }
    }
    for (class, n) in &counts {
        println!("{class:>16}: {n}");
    }
    println!("misclassified: {wrong}, max distance error: {worst:.2e}");
    Ok(())
}
