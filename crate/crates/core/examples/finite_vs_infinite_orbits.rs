//! Classify a 20×20 seed lattice under `H` and under the `F` map on an
//! invariant circle, contrasting finite and (suspected) infinite orbits.

use std::f64::consts::PI;

use holodyn::orbit::{classify_seed_grid, DomainBall, GridSpec, OrbitOptions, OrbitStatus};
use holodyn::presets::{f_map, h_map, two_pi_i};
use holodyn::C64;

fn main() -> holodyn::Result<()> {
    let ball = DomainBall::new(0.3)?;
    let opts = OrbitOptions::default();

    let summary = classify_seed_grid(&h_map(two_pi_i()), ball, &GridSpec::lattice(20, 20), &opts)?;
    let longest = summary.records.iter().filter_map(|r| r.mu).max().unwrap_or(0);
    println!(
        "H, rho = 0.3, {} seeds: escaped {}, periodic {}, infinite-suspected {} (largest mu {longest})",
        summary.total(),
        summary.escaped,
        summary.periodic,
        summary.exhausted
    );

    // On xy = C the F map rotates x by 1 + 2πi C; pick the rotation angle θ irrational.
    let theta = (5f64.sqrt() - 1.0) / 20.0;
    let c = (C64::from_polar(1.0, 2.0 * PI * theta) - 1.0) / two_pi_i();
    let x0 = c.sqrt();
    let seeds = GridSpec::Explicit(vec![vec![x0, c / x0]]);
    let f = classify_seed_grid(&f_map(two_pi_i()), ball, &seeds, &opts)?;
    let r = &f.records[0];
    println!(
        "F on |1 + 2πiC| = 1, C = {:.6}{:+.6}i: status {:?}, max norm {:.4}",
        c.re, c.im, r.status, r.max_norm
    );
    assert_eq!(r.status, OrbitStatus::BudgetExhausted);
    Ok(())
}
