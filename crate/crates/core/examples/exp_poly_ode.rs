//! Closed-form solutions of `a' = μa + g(t)` for exponential-polynomial forcing,
//! including the resonant case that produces secular `t·e^{μt}` terms.

use holodyn::{solve_linear_ode, ExpPoly, Frequency, C64};

fn main() {
    let mu = Frequency::turns(-1, 1); // μ = -2πi
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);

    // resonant forcing g = -2πi e^{-2πit}
    let g = ExpPoly::term(0, mu, -two_pi_i);
    let a = solve_linear_ode(mu, &g, C64::default());
    println!("resonant solution a(t) = {a:?}");
    println!("a(1) = {}", a.eval(C64::new(1.0, 0.0)));

    // non-resonant forcing: a' = μa + e^{2πi·3t}
    let g = ExpPoly::exp(Frequency::turns(3, 1));
    let b = solve_linear_ode(mu, &g, C64::new(1.0, 0.0));
    let residual = b.derivative().sub(&b.scale(mu.mu())).sub(&g);
    println!("non-resonant residual at t = 0.37: {:.1e}", residual.eval(C64::new(0.37, 0.0)).norm());
}
