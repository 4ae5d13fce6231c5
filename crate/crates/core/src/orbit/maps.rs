use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::flows::{numeric_flow, IntegratorOptions, VectorField};
use crate::jet::{Jet, JetMap, C64};

const NEWTON_MAX_ITER: usize = 60;
/// Relative residual accepted when checking a computed inverse.
pub const INVERSE_CHECK_TOL: f64 = 1e-12;

/// A germ that can be evaluated exactly (up to rounding) at points.
#[derive(Clone, Debug)]
pub enum EvaluableMap {
    Linear(DMatrix<C64>),
    /// `x ↦ L·(x_{perm[0]}, …, x_{perm[n−1]})`.
    Permutation { perm: Vec<usize>, linear: DMatrix<C64> },
    /// `(x, y) ↦ (x·u, y·u⁻¹)`, `u = 1 + w f(w)`, `w = x^a y^b`.
    ProductPreserving { a: u32, b: u32, f: Jet },
    /// `x ↦ x + c·x^{d+1}`.
    OneVarParabolic { d: u32, c: C64 },
    /// Time-one map of a vector field, integrated numerically.
    TimeOne { field: VectorField, tol: f64 },
    /// Truncated Taylor map; its inverse is the truncated compositional inverse.
    TruncatedJet { map: JetMap, inverse: Option<JetMap> },
}

impl EvaluableMap {
    pub fn linear(m: DMatrix<C64>) -> Self {
        EvaluableMap::Linear(m)
    }

    pub fn diagonal(d: &[C64]) -> Self {
        EvaluableMap::Linear(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn permutation(perm: Vec<usize>) -> Self {
        let n = perm.len();
        EvaluableMap::Permutation {
            perm,
            linear: DMatrix::identity(n, n),
        }
    }

    pub fn product_preserving(a: u32, b: u32, f: Jet) -> Result<Self> {
        if f.n_vars() != 1 {
            return Err(Error::Invalid("f must be a one-variable jet".into()));
        }
        if a == 0 && b == 0 {
            return Err(Error::Invalid("a and b cannot both vanish".into()));
        }
        Ok(EvaluableMap::ProductPreserving { a, b, f })
    }

    pub fn time_one(field: VectorField, tol: f64) -> Self {
        EvaluableMap::TimeOne { field, tol }
    }

    pub fn truncated_jet(map: JetMap) -> Self {
        let inverse = map.inverse().ok();
        EvaluableMap::TruncatedJet { map, inverse }
    }

    pub fn dim(&self) -> usize {
        match self {
            EvaluableMap::Linear(m) => m.nrows(),
            EvaluableMap::Permutation { perm, .. } => perm.len(),
            EvaluableMap::ProductPreserving { .. } => 2,
            EvaluableMap::OneVarParabolic { .. } => 1,
            EvaluableMap::TimeOne { field, .. } => field.n_vars(),
            EvaluableMap::TruncatedJet { map, .. } => map.n_vars(),
        }
    }

    /// Whether backward iteration uses an exact inverse.
    pub fn has_exact_inverse(&self) -> bool {
        !matches!(self, EvaluableMap::TruncatedJet { .. })
    }

    /// The matrix of a linear or permutation map.
    pub fn matrix(&self) -> Option<DMatrix<C64>> {
        match self {
            EvaluableMap::Linear(m) => Some(m.clone()),
            EvaluableMap::Permutation { perm, linear } => {
                let n = perm.len();
                let p = DMatrix::from_fn(n, n, |i, j| {
                    if perm[i] == j {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::default()
                    }
                });
                Some(linear * p)
            }
            _ => None,
        }
    }

    pub fn apply(&self, p: &[C64]) -> Result<Vec<C64>> {
        if p.len() != self.dim() {
            return Err(Error::VarMismatch {
                expected: self.dim(),
                found: p.len(),
            });
        }
        match self {
            EvaluableMap::Linear(m) => Ok(mat_vec(m, p)),
            EvaluableMap::Permutation { perm, linear } => {
                let q: Vec<C64> = perm.iter().map(|&i| p[i]).collect();
                Ok(mat_vec(linear, &q))
            }
            EvaluableMap::ProductPreserving { a, b, f } => {
                let w = p[0].powu(*a) * p[1].powu(*b);
                let u = unit(f, w);
                Ok(vec![p[0] * u, p[1] / u])
            }
            EvaluableMap::OneVarParabolic { d, c } => Ok(vec![p[0] + c * p[0].powu(d + 1)]),
            EvaluableMap::TimeOne { field, tol } => numeric_flow(
                field,
                p,
                &[C64::default(), C64::new(1.0, 0.0)],
                &IntegratorOptions::with_tol(*tol),
            ),
            EvaluableMap::TruncatedJet { map, .. } => Ok(map.eval(p)),
        }
    }

    pub fn apply_inverse(&self, p: &[C64]) -> Result<Vec<C64>> {
        if p.len() != self.dim() {
            return Err(Error::VarMismatch {
                expected: self.dim(),
                found: p.len(),
            });
        }
        match self {
            EvaluableMap::Linear(_) | EvaluableMap::Permutation { .. } => {
                let m = self.matrix().unwrap();
                let inv = m.try_inverse().ok_or(Error::SingularLinearPart)?;
                Ok(mat_vec(&inv, p))
            }
            EvaluableMap::ProductPreserving { a, b, f } => {
                let w_img = p[0].powu(*a) * p[1].powu(*b);
                // w(image) = w·u(w)^{a−b}; recover w, then undo the scaling.
                let w = if a == b {
                    w_img
                } else {
                    let e = *a as i32 - *b as i32;
                    newton(w_img, w_img, |w| {
                        let u = unit(f, w);
                        let du = unit_derivative(f, w);
                        let val = w * u.powi(e) - w_img;
                        let der = u.powi(e) + w * e as f64 * u.powi(e - 1) * du;
                        (val, der)
                    })?
                };
                let u = unit(f, w);
                let q = vec![p[0] / u, p[1] * u];
                self.check_inverse(&q, p)?;
                Ok(q)
            }
            EvaluableMap::OneVarParabolic { d, c } => {
                let target = p[0];
                let guess = target - c * target.powu(d + 1);
                let x = newton(guess, target, |x| {
                    (x + c * x.powu(d + 1) - target, 1.0 + c * (d + 1) as f64 * x.powu(*d))
                })?;
                Ok(vec![x])
            }
            EvaluableMap::TimeOne { field, tol } => numeric_flow(
                field,
                p,
                &[C64::default(), C64::new(-1.0, 0.0)],
                &IntegratorOptions::with_tol(*tol),
            ),
            EvaluableMap::TruncatedJet { inverse, .. } => {
                let inv = inverse
                    .as_ref()
                    .ok_or_else(|| Error::NoInverse("linear part is singular".into()))?;
                let q = inv.eval(p);
                self.check_inverse(&q, p)?;
                Ok(q)
            }
        }
    }

    /// Verifies `self(q) ≈ p`.
    fn check_inverse(&self, q: &[C64], p: &[C64]) -> Result<()> {
        let back = self.apply(q)?;
        let scale = p.iter().map(|v| v.norm()).fold(1e-300, f64::max);
        let err = back
            .iter()
            .zip(p)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if err <= INVERSE_CHECK_TOL * scale.max(1e-3) {
            Ok(())
        } else {
            Err(Error::NoInverse(format!("inverse check residual {err:.3e}")))
        }
    }
}

fn unit(f: &Jet, w: C64) -> C64 {
    C64::new(1.0, 0.0) + w * f.eval(&[w])
}

fn unit_derivative(f: &Jet, w: C64) -> C64 {
    f.eval(&[w]) + w * f.derivative(0).eval(&[w])
}

fn mat_vec(m: &DMatrix<C64>, p: &[C64]) -> Vec<C64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * p[j]).sum())
        .collect()
}

/// Scalar Newton iteration; `g` returns `(value, derivative)`.
fn newton(mut x: C64, scale: C64, g: impl Fn(C64) -> (C64, C64)) -> Result<C64> {
    let tiny = 1e-15 * scale.norm().max(1e-300);
    for _ in 0..NEWTON_MAX_ITER {
        let (v, d) = g(x);
        if d.norm() == 0.0 || !v.re.is_finite() {
            break;
        }
        let step = v / d;
        x -= step;
        if step.norm() <= tiny {
            return Ok(x);
        }
    }
    Err(Error::NoInverse("Newton iteration did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::two_pi_i;

    fn h_map() -> EvaluableMap {
        EvaluableMap::product_preserving(2, 1, Jet::constant(1, 0, two_pi_i())).unwrap()
    }

    #[test]
    fn product_preserving_keeps_xy() {
        let p = [C64::new(0.2, 0.1), C64::new(-0.15, 0.05)];
        let q = h_map().apply(&p).unwrap();
        assert!((q[0] * q[1] - p[0] * p[1]).norm() < 1e-16);
    }

    #[test]
    fn product_preserving_inverse_round_trip() {
        for (a, b) in [(1, 1), (2, 1), (1, 3)] {
            let h = EvaluableMap::product_preserving(a, b, Jet::from_terms(1, 2, [(vec![0], two_pi_i()), (vec![1], C64::new(0.5, 0.0))])).unwrap();
            let p = [C64::new(0.25, -0.1), C64::new(0.12, 0.2)];
            let back = h.apply_inverse(&h.apply(&p).unwrap()).unwrap();
            assert!((back[0] - p[0]).norm() < 1e-12 && (back[1] - p[1]).norm() < 1e-12, "a={a} b={b}");
        }
    }

    #[test]
    fn parabolic_inverse() {
        let h = EvaluableMap::OneVarParabolic { d: 2, c: C64::new(1.0, 0.5) };
        let p = [C64::new(0.1, 0.05)];
        let back = h.apply_inverse(&h.apply(&p).unwrap()).unwrap();
        assert!((back[0] - p[0]).norm() < 1e-14);
    }

    #[test]
    fn permutation_matrix() {
        let s = EvaluableMap::permutation(vec![1, 0]);
        let p = [C64::new(1.0, 0.0), C64::new(2.0, 0.0)];
        assert_eq!(s.apply(&p).unwrap(), vec![p[1], p[0]]);
        assert_eq!(s.apply_inverse(&p).unwrap(), vec![p[1], p[0]]);
    }

    #[test]
    fn truncated_jet_inverse_is_checked() {
        let x = Jet::var(1, 3, 0);
        let map = JetMap::new(vec![&x + &(&x * &x)]).unwrap();
        let h = EvaluableMap::truncated_jet(map);
        // tiny point: truncation error far below the check tolerance
        assert!(h.apply_inverse(&[C64::new(1e-6, 0.0)]).is_ok());
        // large point: truncated inverse is visibly wrong
        assert!(matches!(h.apply_inverse(&[C64::new(0.3, 0.0)]), Err(Error::NoInverse(_))));
    }
}
