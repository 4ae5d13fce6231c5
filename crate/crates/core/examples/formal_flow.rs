//! Formal flow of a polynomial vector field at complex time, compared with
//! numeric integration along a path in the time plane.

use holodyn::flows::IntegratorOptions;
use holodyn::presets::{gen_h, two_pi_i};
use holodyn::{formal_flow, numeric_flow, C64};

fn main() -> holodyn::Result<()> {
    let field = gen_h(two_pi_i());
    let t = C64::new(0.5, 0.25);
    let jet = formal_flow(&field, t, 10)?;
    println!("time-t map, x component: {}", jet.component(0));

    let p = [C64::new(0.05, 0.01), C64::new(0.04, -0.02)];
    let path = [C64::default(), C64::new(0.5, 0.0), t];
    let num = numeric_flow(&field, &p, &path, &IntegratorOptions::with_tol(1e-12))?;
    let ser = jet.eval(&p);
    for k in 0..2 {
        println!("x{}: |jet - numeric| = {:.1e}", k + 1, (ser[k] - num[k]).norm());
    }
    Ok(())
}
