use std::f64::consts::PI;

use super::{integrate, IntegratorOptions, Rhs, VectorField};
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::jet::{Jet, C64};

/// The field restricted to one straight segment of complex time,
/// reparametrised by `s ∈ [0, 1]`.
struct Segment<'a> {
    field: &'a VectorField,
    dt: C64,
}

impl Rhs for Segment<'_> {
    fn dim(&self) -> usize {
        self.field.n_vars()
    }

    fn eval(&self, _s: f64, x: &[C64], dx: &mut [C64]) {
        self.field.eval_into(x, dx);
        for v in dx.iter_mut() {
            *v *= self.dt;
        }
    }
}

/// Transports `p` along the complex-time polyline `path` (which must start at
/// 0) under `dx/dt = X(x)`.
pub fn numeric_flow(
    field: &VectorField,
    p: &[C64],
    path: &[C64],
    opts: &IntegratorOptions,
) -> Result<Vec<C64>> {
    if p.len() != field.n_vars() {
        return Err(Error::VarMismatch {
            expected: field.n_vars(),
            found: p.len(),
        });
    }
    match path.first() {
        Some(t0) if *t0 == C64::default() => {}
        _ => return Err(Error::Invalid("time path must start at 0".into())),
    }
    let mut x = p.to_vec();
    for w in path.windows(2) {
        let seg = Segment {
            field,
            dt: w[1] - w[0],
        };
        x = integrate(&seg, 0.0, 1.0, &x, opts, &mut |_, _| {})?;
    }
    Ok(x)
}

/// Closed polyline `center + r e^{iθ}` starting and ending at `center + r`,
/// with `segments` (at least 64) chords.
pub fn circle_path(center: C64, radius: f64, segments: usize) -> Vec<C64> {
    let segments = segments.max(64);
    (0..=segments)
        .map(|k| center + C64::from_polar(radius, 2.0 * PI * k as f64 / segments as f64))
        .collect()
}

/// What `g` should equal along the trajectory.
#[derive(Clone, Debug)]
pub enum Expected<'a> {
    /// `g(x(t)) = g(x₀)`.
    Constant,
    /// `g(x(t)) = g(x₀)·m(t)`.
    Covariant(&'a ExpPoly),
}

/// Largest deviation `|g(x(t)) − expected(t)|` over the accepted steps of a
/// numeric solution on `[0, t_end]`.
pub fn first_integral_drift<R: Rhs + ?Sized>(
    rhs: &R,
    g: &Jet,
    p: &[C64],
    t_end: f64,
    expected: Expected<'_>,
    opts: &IntegratorOptions,
) -> Result<f64> {
    let g0 = g.eval(p);
    let mut drift: f64 = 0.0;
    integrate(rhs, 0.0, t_end, p, opts, &mut |t, x| {
        let want = match expected {
            Expected::Constant => g0,
            Expected::Covariant(m) => g0 * m.eval_real(t),
        };
        drift = drift.max((g.eval(x) - want).norm());
    })?;
    Ok(drift)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_time_linear_flow() {
        let lams = [C64::new(1.0, 0.0), C64::new(0.0, -1.0)];
        let f = VectorField::linear(&lams);
        let p = [C64::new(0.1, 0.0), C64::new(0.0, 0.2)];
        let path = [C64::default(), C64::new(0.5, 0.0), C64::new(0.5, 1.0)];
        let x = numeric_flow(&f, &p, &path, &IntegratorOptions::default()).unwrap();
        let t = path[2];
        for i in 0..2 {
            assert!((x[i] - p[i] * (lams[i] * t).exp()).norm() < 1e-9);
        }
    }

    #[test]
    fn closed_loop_returns() {
        let f = VectorField::linear(&[C64::new(0.0, 1.0)]);
        let path = circle_path(C64::default(), 0.5, 64);
        let path: Vec<C64> = path.iter().map(|z| z - path[0]).collect();
        let x = numeric_flow(&f, &[C64::new(0.3, 0.1)], &path, &Default::default()).unwrap();
        assert!((x[0] - C64::new(0.3, 0.1)).norm() < 1e-9);
    }

    #[test]
    fn zero_field_has_no_drift() {
        let f = VectorField::zero(1);
        let g = Jet::var(1, 3, 0);
        let d = first_integral_drift(&f, &g, &[C64::new(0.2, 0.0)], 1.0, Expected::Constant, &Default::default())
            .unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn path_must_start_at_zero() {
        let f = VectorField::zero(1);
        let r = numeric_flow(&f, &[C64::default()], &[C64::new(1.0, 0.0)], &Default::default());
        assert!(matches!(r, Err(Error::Invalid(_))));
    }
}
