//! A vector field `Y` on `C²` becomes the holonomy of `Y + 2πi z∂z`; the
//! holonomy equals the time-one map of `Y`.

use holodyn::holonomy::{holonomy_series, realize_as_holonomy};
use holodyn::presets::{gen_f, two_pi_i};
use holodyn::{formal_flow, C64};

fn main() -> holodyn::Result<()> {
    let y = gen_f(two_pi_i());
    let fol = realize_as_holonomy(&y)?;
    println!("realizing field on C^{}:", fol.n_vars());
    for (k, c) in fol.field().components().iter().enumerate() {
        println!("  X{} = {c}", k + 1);
    }
    let one = C64::new(1.0, 0.0);
    let hol = holonomy_series(&fol, 7, one)?.map;
    let flow = formal_flow(&y, one, 7)?;
    println!("holonomy x component: {}", hol.component(0));
    println!("|holonomy - time-one map| = {:.1e}", hol.max_abs_diff(&flow));
    Ok(())
}
