//! Holonomy of a linear field around its first axis is diagonal with
//! multipliers `e^{2πiλⱼ/λ₁}`.

use holodyn::holonomy::{holonomy_series, Foliation};
use holodyn::flows::VectorField;
use holodyn::C64;

fn main() -> holodyn::Result<()> {
    for lams in [[1.0, -1.0, -2.0], [2.0, -1.0, -3.0], [1.0, 0.5, -0.25]] {
        let l: Vec<C64> = lams.iter().map(|&v| C64::new(v, 0.0)).collect();
        let fol = Foliation::new(VectorField::linear(&l), 0)?;
        let map = holonomy_series(&fol, 2, C64::new(1.0, 0.0))?.map;
        println!("λ = {lams:?}");
        println!("  holonomy linear part:\n{}", map.linear_part());
        println!("  expected multipliers: {:?}", fol.expected_linear_holonomy());
    }
    Ok(())
}
