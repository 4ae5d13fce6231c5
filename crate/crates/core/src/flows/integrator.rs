use crate::error::{Error, Result};
use crate::jet::C64;

/// Right-hand side of `dx/dt = f(t, x)` with real time and complex state.
pub trait Rhs {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, x: &[C64], dx: &mut [C64]);
}

impl<F> Rhs for (usize, F)
where
    F: Fn(f64, &[C64], &mut [C64]),
{
    fn dim(&self) -> usize {
        self.0
    }

    fn eval(&self, t: f64, x: &[C64], dx: &mut [C64]) {
        (self.1)(t, x, dx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
    /// The trajectory is abandoned once `max |x_i|` exceeds this.
    pub escape_radius: f64,
    /// Initial step as a fraction of the interval length.
    pub initial_fraction: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            atol: 1e-10,
            rtol: 1e-10,
            max_steps: 1_000_000,
            escape_radius: 10.0,
            initial_fraction: 1e-2,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tol(tol: f64) -> Self {
        IntegratorOptions {
            atol: tol,
            rtol: tol,
            ..Default::default()
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// fifth-order weights (also the last row, FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// difference between fifth- and fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates from `t0` to `t1` (either direction) with an adaptive
/// Dormand–Prince 5(4) pair. `observer` sees the initial state and every
/// accepted step.
pub fn integrate<R: Rhs + ?Sized>(
    rhs: &R,
    t0: f64,
    t1: f64,
    x0: &[C64],
    opts: &IntegratorOptions,
    observer: &mut dyn FnMut(f64, &[C64]),
) -> Result<Vec<C64>> {
    let n = rhs.dim();
    assert_eq!(x0.len(), n, "state dimension mismatch");
    let mut x = x0.to_vec();
    observer(t0, &x);
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(x);
    }
    let dir = span.signum();
    let mut h = span.abs() * opts.initial_fraction;
    let h_min = 1e-14 * span.abs().max(1.0);
    let mut t = t0;

    let mut k: Vec<Vec<C64>> = vec![vec![C64::default(); n]; 7];
    let mut tmp = vec![C64::default(); n];
    let mut x_new = vec![C64::default(); n];
    rhs.eval(t, &x, &mut k[0]);

    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        steps += 1;
        let last = h >= (t1 - t).abs();
        let hs = if last { t1 - t } else { dir * h };

        stage(&mut tmp, &x, hs, &k, &[A21]);
        rhs.eval(t + C2 * hs, &tmp, &mut k[1]);
        stage(&mut tmp, &x, hs, &k, &[A31, A32]);
        rhs.eval(t + C3 * hs, &tmp, &mut k[2]);
        stage(&mut tmp, &x, hs, &k, &[A41, A42, A43]);
        rhs.eval(t + C4 * hs, &tmp, &mut k[3]);
        stage(&mut tmp, &x, hs, &k, &[A51, A52, A53, A54]);
        rhs.eval(t + C5 * hs, &tmp, &mut k[4]);
        stage(&mut tmp, &x, hs, &k, &[A61, A62, A63, A64, A65]);
        rhs.eval(t + hs, &tmp, &mut k[5]);
        stage(&mut x_new, &x, hs, &k, &[B1, 0.0, B3, B4, B5, B6]);
        rhs.eval(t + hs, &x_new, &mut k[6]);

        let mut err: f64 = 0.0;
        let mut finite = true;
        for i in 0..n {
            let e = hs
                * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                    + E7 * k[6][i]);
            let scale = opts.atol + opts.rtol * x[i].norm().max(x_new[i].norm());
            let r = e.norm() / scale;
            if !r.is_finite() || !x_new[i].re.is_finite() || !x_new[i].im.is_finite() {
                finite = false;
            }
            err = err.max(r);
        }

        if finite && err <= 1.0 {
            t = if last { t1 } else { t + hs };
            std::mem::swap(&mut x, &mut x_new);
            k.swap(0, 6);
            observer(t, &x);
            let norm = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if norm > opts.escape_radius {
                return Err(Error::Escaped { t, norm });
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = hs.abs() * factor;
        } else {
            let factor = if finite { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h = hs.abs() * factor;
            if h < h_min {
                return Err(Error::StepUnderflow { t });
            }
        }
    }
    Ok(x)
}

fn stage(out: &mut [C64], x: &[C64], h: f64, k: &[Vec<C64>], coeffs: &[f64]) {
    for i in 0..out.len() {
        let mut acc = C64::default();
        for (j, &a) in coeffs.iter().enumerate() {
            if a != 0.0 {
                acc += a * k[j][i];
            }
        }
        out[i] = x[i] + h * acc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let rhs = (1usize, |_t: f64, x: &[C64], dx: &mut [C64]| dx[0] = x[0]);
        let x = integrate(&rhs, 0.0, 1.0, &[C64::new(1.0, 0.0)], &Default::default(), &mut |_, _| {}).unwrap();
        assert!((x[0] - C64::new(std::f64::consts::E, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn rotation_backwards() {
        let rhs = (1usize, |_t: f64, x: &[C64], dx: &mut [C64]| dx[0] = C64::new(0.0, 1.0) * x[0]);
        let x = integrate(&rhs, 0.0, -2.0, &[C64::new(1.0, 0.0)], &Default::default(), &mut |_, _| {}).unwrap();
        assert!((x[0] - C64::from_polar(1.0, -2.0)).norm() < 1e-9);
    }

    #[test]
    fn blow_up_is_reported() {
        // x' = x², x(0) = 1 blows up at t = 1
        let rhs = (1usize, |_t: f64, x: &[C64], dx: &mut [C64]| dx[0] = x[0] * x[0]);
        let r = integrate(&rhs, 0.0, 2.0, &[C64::new(1.0, 0.0)], &Default::default(), &mut |_, _| {});
        assert!(matches!(r, Err(Error::Escaped { .. })));
    }

    #[test]
    fn step_budget() {
        let rhs = (1usize, |_t: f64, x: &[C64], dx: &mut [C64]| dx[0] = x[0]);
        let opts = IntegratorOptions { max_steps: 3, ..Default::default() };
        let r = integrate(&rhs, 0.0, 1.0, &[C64::new(1.0, 0.0)], &opts, &mut |_, _| {});
        assert_eq!(r, Err(Error::TooManySteps(3)));
    }
}
