//! Monomial first integrals: symbolic Lie derivative and drift along
//! numeric trajectories.

use holodyn::flows::{first_integral_drift, Expected, IntegratorOptions};
use holodyn::presets::{example1, thm_b};
use holodyn::{lie_derivative, Jet, C64};

fn main() -> holodyn::Result<()> {
    let one = C64::new(1.0, 0.0);
    for (n, m, a, b) in [(1, 1, 1, 1), (2, 3, 1, 2), (3, 1, 2, 1)] {
        let field = example1(n, m, a, b);
        let g = Jet::monomial(2, n + m + field.order(), &[n, m], one);
        let lie = lie_derivative(&field, &g)?;
        let p = [C64::new(0.4, 0.1), C64::new(0.3, -0.2)];
        let drift = first_integral_drift(&field, &g, &p, 1.0, Expected::Constant, &IntegratorOptions::with_tol(1e-12))?;
        println!("x^{n} y^{m} along x^{a}y^{b}(x∂x - ({n}/{m})y∂y): Lie derivative zero: {}, drift {drift:.1e}", lie.is_zero());
    }
    let field = thm_b();
    let g = Jet::monomial(3, 4 + field.order(), &[1, 1, 2], one);
    println!("xyz² along the three-dimensional field: Lie derivative zero: {}", lie_derivative(&field, &g)?.is_zero());
    Ok(())
}
