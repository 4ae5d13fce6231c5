use std::f64::consts::PI;

use super::Foliation;
use crate::error::{Error, Result};
use crate::flows::{integrate, IntegratorOptions, Rhs};
use crate::jet::C64;

/// Leafwise equations `dx_j/dt = 2πi z·A_j(x, z)/C(x, z)` with
/// `z = z₀e^{2πit}`, evaluated directly from the field's polynomials (no
/// series division), so it is independent of the monodromy-system expansion.
pub struct LeafwiseRhs<'a> {
    fol: &'a Foliation,
    z0: C64,
    transverse: Vec<usize>,
}

impl<'a> LeafwiseRhs<'a> {
    pub fn new(fol: &'a Foliation, z0: C64) -> Self {
        LeafwiseRhs {
            fol,
            z0,
            transverse: fol.transverse_vars(),
        }
    }

    fn full_point(&self, t: f64, x: &[C64]) -> (Vec<C64>, C64) {
        let z = self.z0 * C64::from_polar(1.0, 2.0 * PI * t);
        let mut p = x.to_vec();
        p.insert(self.fol.axis(), z);
        (p, z)
    }
}

impl Rhs for LeafwiseRhs<'_> {
    fn dim(&self) -> usize {
        self.transverse.len()
    }

    fn eval(&self, t: f64, x: &[C64], dx: &mut [C64]) {
        let (p, z) = self.full_point(t, x);
        let field = self.fol.field();
        let dz_dt = C64::new(0.0, 2.0 * PI) * z;
        let c = field.component(self.fol.axis()).eval(&p);
        let factor = dz_dt / c;
        for (o, &j) in dx.iter_mut().zip(&self.transverse) {
            *o = field.component(j).eval(&p) * factor;
        }
    }
}

/// Return point on the transversal `{z = z₀}` after lifting the loop
/// `z₀e^{2πit}`, `t ∈ [0, 1]`, into the leaf through `p`.
///
/// A leaf leaving the integrator's domain yields [`Error::Escaped`].
pub fn holonomy_numeric(
    fol: &Foliation,
    p: &[C64],
    z0: C64,
    opts: &IntegratorOptions,
) -> Result<Vec<C64>> {
    if p.len() != fol.transverse_dim() {
        return Err(Error::VarMismatch {
            expected: fol.transverse_dim(),
            found: p.len(),
        });
    }
    let rhs = LeafwiseRhs::new(fol, z0);
    integrate(&rhs, 0.0, 1.0, p, opts, &mut |_, _| {})
}
