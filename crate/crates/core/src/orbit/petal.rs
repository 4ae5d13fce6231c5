use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PetalOptions {
    /// Seed modulus in units of `|c|^{-1/d}`.
    pub seed_radius: f64,
    /// Angular offset of each seed from its attracting direction (radians).
    pub offset: f64,
    pub iterations: u64,
}

impl Default for PetalOptions {
    fn default() -> Self {
        PetalOptions {
            seed_radius: 0.1,
            offset: 0.1,
            iterations: 200_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PetalRun {
    pub direction: f64,
    pub seed: C64,
    pub final_point: C64,
    pub iterations: u64,
    /// Distance from the final argument to `direction`, in `[0, π]`.
    pub arg_error: f64,
    /// Modulus decreased monotonically towards 0 over the run.
    pub converged_to_zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PetalReport {
    pub d: u32,
    pub c: C64,
    /// Arguments in `[0, 2π)` where `c·x^d` is negative real.
    pub attracting: Vec<f64>,
    /// Arguments in `[0, 2π)` where `c·x^d` is positive real.
    pub repelling: Vec<f64>,
    pub runs: Vec<PetalRun>,
}

fn wrap(theta: f64) -> f64 {
    theta.rem_euclid(2.0 * PI)
}

/// Angular distance on the circle.
fn arg_distance(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(2.0 * PI - d)
}

/// The `d` attracting and `d` repelling characteristic directions of
/// `x ↦ x + c·x^{d+1}`, each sorted ascending in `[0, 2π)`.
pub fn petal_directions(d: u32, c: C64) -> (Vec<f64>, Vec<f64>) {
    let arg_c = c.arg();
    let dirs = |base: f64| {
        let mut v: Vec<f64> = (0..d)
            .map(|k| wrap((base - arg_c + 2.0 * PI * k as f64) / d as f64))
            .collect();
        v.sort_by(f64::total_cmp);
        v
    };
    (dirs(PI), dirs(0.0))
}

/// Characteristic directions plus one empirical orbit per attracting
/// direction, seeded slightly off the direction.
pub fn petal_analysis(d: u32, c: C64, opts: &PetalOptions) -> Result<PetalReport> {
    if d == 0 {
        return Err(Error::Invalid("petal degree d must be positive".into()));
    }
    if c.norm() == 0.0 || !c.re.is_finite() || !c.im.is_finite() {
        return Err(Error::Invalid("petal coefficient c must be nonzero".into()));
    }
    let (attracting, repelling) = petal_directions(d, c);
    let r0 = opts.seed_radius * c.norm().powf(-1.0 / d as f64);
    let runs = attracting
        .iter()
        .map(|&theta| {
            let seed = C64::from_polar(r0, theta + opts.offset);
            let mut x = seed;
            let mut monotone = true;
            for _ in 0..opts.iterations {
                let next = x + c * x.powu(d + 1);
                monotone &= next.norm() < x.norm();
                x = next;
            }
            PetalRun {
                direction: theta,
                seed,
                final_point: x,
                iterations: opts.iterations,
                arg_error: arg_distance(x.arg(), theta),
                converged_to_zero: monotone && x.norm() < 0.1 * r0,
            }
        })
        .collect();
    Ok(PetalReport {
        d,
        c,
        attracting,
        repelling,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_parabola() {
        let (a, r) = petal_directions(1, C64::new(1.0, 0.0));
        assert!((a[0] - PI).abs() < 1e-15);
        assert!(r[0].abs() < 1e-15);
    }

    #[test]
    fn cubic_directions_and_runs() {
        let rep = petal_analysis(2, C64::new(1.0, 0.0), &PetalOptions::default()).unwrap();
        assert!((rep.attracting[0] - PI / 2.0).abs() < 1e-15);
        assert!((rep.attracting[1] - 3.0 * PI / 2.0).abs() < 1e-15);
        assert_eq!(rep.repelling.len(), 2);
        for run in &rep.runs {
            assert!(run.converged_to_zero);
            assert!(run.arg_error < 1e-3, "{}", run.arg_error);
        }
    }

    #[test]
    fn directions_make_cxd_real() {
        let c = C64::new(-0.3, 1.7);
        let (a, r) = petal_directions(3, c);
        for t in a {
            let v = c * C64::from_polar(1.0, 3.0 * t);
            assert!(v.re < 0.0 && v.im.abs() < 1e-12);
        }
        for t in r {
            let v = c * C64::from_polar(1.0, 3.0 * t);
            assert!(v.re > 0.0 && v.im.abs() < 1e-12);
        }
    }
}
