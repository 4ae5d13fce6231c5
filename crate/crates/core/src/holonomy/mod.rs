//! Holonomy of a foliation on `(Cⁿ,0)` around an invariant coordinate axis.
//!
//! Lifting the loop `z = z₀e^{2πit}` on the separatrix into the leaves gives a
//! non-autonomous system in the transverse variables (the
//! [`MonodromySystem`]) whose time-one map is the holonomy. The map is
//! computed two ways: exactly, by solving for the Taylor coefficients of the
//! solution in the ring of exponential polynomials ([`holonomy_series`]), and
//! numerically by integrating the original field along the loop
//! ([`holonomy_numeric`]).

mod monodromy;
mod normal_form;
mod numeric;
mod series;

pub use monodromy::{build_monodromy_system, MonodromySystem};
pub use normal_form::{extract_normal_form, NormalForm};
pub use numeric::{holonomy_numeric, LeafwiseRhs};
pub use series::{holonomy_series, CoefficientTable, HolonomySeries};

use crate::error::{Error, Result};
use crate::flows::VectorField;
use crate::jet::{Jet, MultiIndex, C64};
use crate::presets::two_pi_i;

/// A foliation given by a vector field together with an invariant coordinate
/// axis (the separatrix) along which the holonomy is taken.
#[derive(Clone, Debug, PartialEq)]
pub struct Foliation {
    field: VectorField,
    axis: usize,
    transversal_radius: f64,
}

impl Foliation {
    pub fn new(field: VectorField, axis: usize) -> Result<Self> {
        let n = field.n_vars();
        if n < 2 || axis >= n {
            return Err(Error::Invalid(format!(
                "axis {axis} out of range for a field on C^{n}"
            )));
        }
        let others: Vec<usize> = (0..n).filter(|&i| i != axis).collect();
        for &j in &others {
            if !field.component(j).restrict_zero(&others).is_zero() {
                return Err(Error::AxisNotInvariant(axis));
            }
        }
        let lam = field.component(axis).coeff_at(&MultiIndex::unit(n, axis));
        if lam == C64::default() {
            return Err(Error::ZeroAxisEigenvalue(axis));
        }
        Ok(Foliation {
            field,
            axis,
            transversal_radius: 1.0,
        })
    }

    pub fn with_transversal_radius(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Invalid("transversal radius must be positive".into()));
        }
        self.transversal_radius = r;
        Ok(self)
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn transversal_radius(&self) -> f64 {
        self.transversal_radius
    }

    pub fn n_vars(&self) -> usize {
        self.field.n_vars()
    }

    pub fn transverse_dim(&self) -> usize {
        self.field.n_vars() - 1
    }

    /// Indices of the transverse coordinates, in their original order.
    pub fn transverse_vars(&self) -> Vec<usize> {
        (0..self.n_vars()).filter(|&i| i != self.axis).collect()
    }

    pub fn axis_eigenvalue(&self) -> C64 {
        self.field
            .component(self.axis)
            .coeff_at(&MultiIndex::unit(self.n_vars(), self.axis))
    }

    /// Linear part of the holonomy, `e^{2πi λ_j/λ_axis}` for a diagonal linear part.
    pub fn expected_linear_holonomy(&self) -> Option<Vec<C64>> {
        let ev = self.field.eigenvalues()?;
        let la = ev[self.axis];
        Some(
            self.transverse_vars()
                .iter()
                .map(|&j| crate::exppoly::Frequency::from_complex(two_pi_i() * ev[j] / la)
                    .exp_at(C64::new(1.0, 0.0)))
                .collect(),
        )
    }
}

/// Foliation on `C^{n+1}` given by `Y + 2πi z ∂/∂z`, whose holonomy around the
/// new `z`-axis is the time-one map of `Y`.
pub fn realize_as_holonomy(y: &VectorField) -> Result<Foliation> {
    let n = y.n_vars();
    let order = y.order().max(1);
    let mut comps: Vec<Jet> = y.components().iter().map(|c| c.embed(n, order)).collect();
    comps.push(Jet::var(n + 1, order, n).scale(two_pi_i()));
    Foliation::new(VectorField::new(comps)?, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn preset_axes_are_invariant() {
        assert!(Foliation::new(presets::thm_b(), 2).is_ok());
        assert!(Foliation::new(presets::example3(), 2).is_ok());
    }

    #[test]
    fn non_invariant_axis_rejected() {
        // x' = x + z² leaves the z-axis
        let x = Jet::from_terms(3, 2, [(vec![1, 0, 0], C64::new(1.0, 0.0)), (vec![0, 0, 2], C64::new(1.0, 0.0))]);
        let f = VectorField::new(vec![x, Jet::var(3, 2, 1), Jet::var(3, 2, 2)]).unwrap();
        assert_eq!(Foliation::new(f, 2), Err(Error::AxisNotInvariant(2)));
    }

    #[test]
    fn zero_axis_eigenvalue_rejected() {
        let f = VectorField::linear(&[C64::new(1.0, 0.0), C64::default()]);
        assert_eq!(Foliation::new(f, 1), Err(Error::ZeroAxisEigenvalue(1)));
    }

    #[test]
    fn realization_shape() {
        let fol = realize_as_holonomy(&presets::gen_h(two_pi_i())).unwrap();
        assert_eq!(fol.axis(), 2);
        assert_eq!(fol.axis_eigenvalue(), two_pi_i());
        assert_eq!(fol.field().component(0).coeff(&[3, 1, 0]), two_pi_i());
    }
}
