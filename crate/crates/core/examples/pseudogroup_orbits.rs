//! Orbits of the pseudogroup generated by `diag(e^{πi/3}, e^{2πi/3})` and the
//! coordinate swap, with witnessing words, and the closure of the group.

use holodyn::orbit::{group_closure, noncommuting_pair, pseudogroup_orbit, DomainBall, PseudogroupOptions};
use holodyn::presets::pseudogroup_by_name;
use holodyn::C64;

fn main() -> holodyn::Result<()> {
    let gens = pseudogroup_by_name("schur24")?;
    let closure = group_closure(&gens, 1000)?;
    println!("group order: {:?}", closure.order);
    if let Some((i, j)) = noncommuting_pair(&closure.elements) {
        println!("non-commuting:\n{}{}", closure.elements[i], closure.elements[j]);
    }
    let ball = DomainBall::new(0.3)?;
    for p in [
        [C64::new(0.1, 0.05), C64::new(-0.07, 0.02)],
        [C64::new(0.1, 0.0), C64::new(0.1, 0.0)],
        [C64::new(0.2, 0.0), C64::default()],
    ] {
        let o = pseudogroup_orbit(&gens, &p, ball, &PseudogroupOptions::default())?;
        let longest = o.words.iter().map(Vec::len).max().unwrap_or(0);
        println!("seed {p:?}: {} points, longest word {longest}", o.cardinality());
    }
    Ok(())
}
