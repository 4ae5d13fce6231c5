//! Normal form `x(1 + xy f(xy))` of the holonomy of `x(1 + xyz²)∂x + …`,
//! with `f(0)` estimated independently from one integrated loop.

use holodyn::holonomy::{extract_normal_form, holonomy_series, Foliation};
use holodyn::presets::example3;
use holodyn::reproduce::numeric_f0;
use holodyn::C64;

fn main() -> holodyn::Result<()> {
    let fol = Foliation::new(example3(), 2)?;
    let nf = extract_normal_form(&holonomy_series(&fol, 10, C64::new(1.0, 0.0))?.map)?;
    println!("{nf}");
    println!("f = {}", nf.f);
    for s in [0.02, 0.01, 0.005] {
        println!("numeric f(0) from |x| = |y| = {s}: {:.8}", numeric_f0(&fol, s)?);
    }
    Ok(())
}
