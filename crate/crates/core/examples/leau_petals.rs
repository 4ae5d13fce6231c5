//! Attracting and repelling directions of `x ↦ x + c x^{d+1}`, and the
//! parabolic model seen by the `H` map on a level set `xy = C`.

use holodyn::orbit::{petal_analysis, PetalOptions};
use holodyn::presets::{h_map, two_pi_i};
use holodyn::C64;

fn main() -> holodyn::Result<()> {
    for (d, c) in [(1, C64::new(1.0, 0.0)), (2, C64::new(1.0, 0.0)), (3, C64::new(0.0, 1.0))] {
        let rep = petal_analysis(d, c, &PetalOptions::default())?;
        println!("d = {d}, c = {c}: attracting {:?}", rep.attracting);
        println!("               repelling  {:?}", rep.repelling);
        for r in &rep.runs {
            println!("    run: |x_n| = {:.2e}, arg error {:.2e}", r.final_point.norm(), r.arg_error);
        }
    }

    // On xy = C, H acts on x as x + C·f(0)·x² + O(x³).
    let level = C64::new(0.01, 0.002);
    let h = h_map(two_pi_i());
    for x in [0.01, 0.005, 0.0025] {
        let x = C64::new(x, 0.0);
        let hx = h.apply(&[x, level / x])?[0];
        let model = x + level * two_pi_i() * x * x;
        println!("|H(x) - parabolic model| at |x| = {:.4}: {:.2e}", x.norm(), (hx - model).norm());
    }
    Ok(())
}
