//! Truncated power series: products, reciprocals, composition and the
//! compositional inverse of a germ.

use holodyn::{Jet, JetMap, C64};

fn main() -> holodyn::Result<()> {
    let order = 6;
    let x = Jet::var(2, order, 0);
    let y = Jet::var(2, order, 1);
    let one = Jet::one(2, order);

    // 1/(1 - x - y) as a jet
    let geometric = (&one - &(&x + &y)).reciprocal()?;
    println!("1/(1-x-y) = {geometric}");

    // h(x, y) = (x + x y, y + x²) and its inverse
    let h = JetMap::new(vec![&x + &(&x * &y), &y + &(&x * &x)])?;
    let g = h.inverse()?;
    let id = JetMap::identity(2, order);
    println!("h⁻¹ first component: {}", g.component(0));
    println!("|h∘h⁻¹ - id| = {:.1e}", h.compose(&g)?.max_abs_diff(&id));

    // evaluation is a ring homomorphism up to truncation
    let p = [C64::new(0.01, 0.02), C64::new(-0.03, 0.01)];
    let lhs = (&geometric * &x).eval(&p);
    let rhs = geometric.eval(&p) * p[0];
    println!("eval(f·x) - eval(f)·x (degree-7 truncation) = {:.1e}", (lhs - rhs).norm());
    Ok(())
}
