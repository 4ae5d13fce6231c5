//! Holonomy of `x(1 + x²yz³)∂x + y(1 − x²yz³)∂y − z∂z` around the `z` axis:
//! monodromy system, exact coefficients, normal form and a numeric check.

use holodyn::holonomy::{extract_normal_form, holonomy_numeric, holonomy_series, Foliation};
use holodyn::flows::IntegratorOptions;
use holodyn::presets::thm_b;
use holodyn::C64;

fn main() -> holodyn::Result<()> {
    let one = C64::new(1.0, 0.0);
    let fol = Foliation::new(thm_b(), 2)?;
    let hs = holonomy_series(&fol, 8, one)?;
    print!("{}", hs.system);
    println!("a31(t) = {:?}", hs.table.get(0, &[3, 1]));
    println!("a31(1) = {}", hs.table.get(0, &[3, 1]).eval(one));
    println!("b22(1) = {}", hs.table.get(1, &[2, 2]).eval(one));
    println!("{}", extract_normal_form(&hs.map)?);

    let p = [C64::new(0.04, 0.01), C64::new(-0.03, 0.02)];
    let num = holonomy_numeric(&fol, &p, one, &IntegratorOptions::with_tol(1e-12))?;
    let ser = hs.map.eval(&p);
    println!("series vs integration at p: {:.1e}", (num[0] - ser[0]).norm().max((num[1] - ser[1]).norm()));
    Ok(())
}
