//! Polynomial vector fields on `(Cⁿ,0)` and their time-t maps.
//!
//! [`formal_flow`] computes the truncated Taylor expansion of the flow map in
//! closed form (coefficients are exponential polynomials in `t`), while
//! [`numeric_flow`] integrates the field along a complex-time polyline with an
//! adaptive Dormand–Prince 5(4) scheme. The two are independent and are used
//! to cross-check one another.

mod formal;
mod integrator;
mod numeric;

pub use formal::{formal_flow, formal_flow_series};
pub use integrator::{integrate, IntegratorOptions, Rhs};
pub use numeric::{circle_path, first_integral_drift, numeric_flow, Expected};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, MultiIndex, C64};

/// Polynomial vector field `Σ X_i ∂/∂x_i` vanishing at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct VectorField {
    components: Vec<Jet>,
    /// Diagonal of the linear part, present iff the linear part is diagonal.
    eigenvalues: Option<Vec<C64>>,
}

impl VectorField {
    pub fn new(components: Vec<Jet>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::Invalid("vector field needs at least one component".into()));
        }
        let order = components.iter().map(Jet::order).max().unwrap();
        for (i, c) in components.iter().enumerate() {
            if c.n_vars() != n {
                return Err(Error::VarMismatch {
                    expected: n,
                    found: c.n_vars(),
                });
            }
            if c.constant_term() != C64::default() {
                return Err(Error::NonVanishingField(i));
            }
        }
        let components: Vec<Jet> = components.iter().map(|c| c.with_order(order)).collect();
        let lin = linear_matrix(&components);
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || lin[(i, j)] == C64::default()));
        let eigenvalues = diagonal.then(|| (0..n).map(|i| lin[(i, i)]).collect());
        Ok(VectorField {
            components,
            eigenvalues,
        })
    }

    /// `Σ λ_i x_i ∂/∂x_i`.
    pub fn linear(lambdas: &[C64]) -> Self {
        let n = lambdas.len();
        VectorField::new(
            lambdas
                .iter()
                .enumerate()
                .map(|(i, &l)| Jet::var(n, 1, i).scale(l))
                .collect(),
        )
        .expect("linear field is valid")
    }

    pub fn zero(n: usize) -> Self {
        VectorField::new(vec![Jet::zero(n, 1); n]).unwrap()
    }

    pub fn n_vars(&self) -> usize {
        self.components.len()
    }

    /// Polynomial degree bound of the stored components.
    pub fn order(&self) -> u32 {
        self.components[0].order()
    }

    pub fn components(&self) -> &[Jet] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Jet {
        &self.components[i]
    }

    pub fn eigenvalues(&self) -> Option<&[C64]> {
        self.eigenvalues.as_deref()
    }

    pub fn linear_part(&self) -> DMatrix<C64> {
        linear_matrix(&self.components)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Jet::is_zero)
    }

    /// Components viewed as jets of the given order.
    pub fn components_at(&self, order: u32) -> Vec<Jet> {
        self.components.iter().map(|c| c.with_order(order)).collect()
    }

    pub fn eval(&self, p: &[C64]) -> Vec<C64> {
        self.components.iter().map(|c| c.eval(p)).collect()
    }

    pub fn eval_into(&self, p: &[C64], out: &mut [C64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval(p);
        }
    }

    pub fn scale(&self, s: C64) -> VectorField {
        VectorField::new(self.components.iter().map(|c| c.scale(s)).collect()).unwrap()
    }

    pub fn try_add(&self, other: &VectorField) -> Result<VectorField> {
        if self.n_vars() != other.n_vars() {
            return Err(Error::VarMismatch {
                expected: self.n_vars(),
                found: other.n_vars(),
            });
        }
        let order = self.order().max(other.order());
        let comps = self
            .components_at(order)
            .iter()
            .zip(other.components_at(order))
            .map(|(a, b)| a.try_add(&b))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(comps)
    }

    /// The field multiplied by the polynomial `g`.
    pub fn times(&self, g: &Jet) -> Result<VectorField> {
        if g.n_vars() != self.n_vars() {
            return Err(Error::VarMismatch {
                expected: self.n_vars(),
                found: g.n_vars(),
            });
        }
        let order = self.order() + g.degree().unwrap_or(0);
        let g = g.with_order(order);
        let comps = self
            .components_at(order)
            .iter()
            .map(|c| c.try_mul(&g))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(comps)
    }
}

fn linear_matrix(components: &[Jet]) -> DMatrix<C64> {
    let n = components.len();
    DMatrix::from_fn(n, n, |i, j| components[i].coeff_at(&MultiIndex::unit(n, j)))
}

/// `X(g) = Σ X_i ∂g/∂x_i`, truncated at the order of `g`.
pub fn lie_derivative(field: &VectorField, g: &Jet) -> Result<Jet> {
    if g.n_vars() != field.n_vars() {
        return Err(Error::VarMismatch {
            expected: field.n_vars(),
            found: g.n_vars(),
        });
    }
    let comps = field.components_at(g.order());
    let mut acc = Jet::zero(g.n_vars(), g.order());
    for (i, xi) in comps.iter().enumerate() {
        acc = acc.try_add(&xi.try_mul(&g.derivative(i))?)?;
    }
    Ok(acc)
}

impl Rhs for VectorField {
    fn dim(&self) -> usize {
        self.n_vars()
    }

    fn eval(&self, _t: f64, x: &[C64], dx: &mut [C64]) {
        self.eval_into(x, dx);
    }
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    n_vars: usize,
    components: Vec<Jet>,
    eigenvalues: Option<Vec<[f64; 2]>>,
}

impl From<VectorField> for FieldRepr {
    fn from(f: VectorField) -> Self {
        FieldRepr {
            n_vars: f.n_vars(),
            eigenvalues: f
                .eigenvalues
                .as_ref()
                .map(|v| v.iter().map(|c| [c.re, c.im]).collect()),
            components: f.components,
        }
    }
}

impl TryFrom<FieldRepr> for VectorField {
    type Error = String;
    fn try_from(r: FieldRepr) -> std::result::Result<Self, String> {
        if r.components.len() != r.n_vars {
            return Err(format!(
                "n_vars is {} but {} components were given",
                r.n_vars,
                r.components.len()
            ));
        }
        let f = VectorField::new(r.components).map_err(|e| e.to_string())?;
        if let Some(given) = r.eigenvalues {
            let ok = match &f.eigenvalues {
                Some(ev) => {
                    ev.len() == given.len()
                        && ev
                            .iter()
                            .zip(&given)
                            .all(|(a, b)| (a - C64::new(b[0], b[1])).norm() < 1e-12)
                }
                None => false,
            };
            if !ok {
                return Err("eigenvalues do not match the diagonal of the linear part".into());
            }
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn eigenvalues_only_for_diagonal_linear_part() {
        let f = VectorField::linear(&[c(1.0), c(-2.0)]);
        assert_eq!(f.eigenvalues().unwrap(), &[c(1.0), c(-2.0)]);
        let g = VectorField::new(vec![Jet::var(2, 2, 1), Jet::zero(2, 2)]).unwrap();
        assert!(g.eigenvalues().is_none());
    }

    #[test]
    fn rejects_constant_terms() {
        let r = VectorField::new(vec![Jet::one(1, 2)]);
        assert_eq!(r, Err(Error::NonVanishingField(0)));
    }

    #[test]
    fn euler_field_fixes_x() {
        let f = VectorField::linear(&[c(1.0)]);
        let x = Jet::var(1, 4, 0);
        assert_eq!(lie_derivative(&f, &x).unwrap(), x);
    }

    #[test]
    fn monomial_first_integral_of_linear_saddle() {
        let (n, m) = (3u32, 2u32);
        let f = VectorField::linear(&[c(1.0), c(-(n as f64) / m as f64)]);
        let g = Jet::monomial(2, 8, &[n, m], c(1.0));
        assert!(lie_derivative(&f, &g).unwrap().is_zero());
    }

    #[test]
    fn json_round_trip() {
        let f = VectorField::linear(&[C64::new(0.0, 1.0), c(2.0)]);
        let s = serde_json::to_string(&f).unwrap();
        let back: VectorField = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let wrong = s.replace("[0.0,1.0]", "[5.0,1.0]");
        assert!(serde_json::from_str::<VectorField>(&wrong).is_err());
    }
}
