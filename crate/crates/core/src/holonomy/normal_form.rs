use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetMap, MultiIndex, C64};

/// Coefficient tolerance used when matching the normal form.
pub const NORMAL_FORM_TOL: f64 = 1e-10;

/// `h(x, y) = (x·u, y·u⁻¹)` with `u = 1 + w f(w)`, `w = x^a y^b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalForm {
    pub a: u32,
    pub b: u32,
    /// One-variable jet holding `f`; zero for the identity.
    pub f: Jet,
}

impl NormalForm {
    pub fn f0(&self) -> C64 {
        self.f.constant_term()
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.f0();
        write!(
            f,
            "h(x,y) = (x(1 + w f(w)), y(1 + w f(w))^-1), w = x^{} y^{}, f(0) = {:.12}{:+.12}i",
            self.a, self.b, c.re, c.im
        )
    }
}

/// Matches a tangent-to-identity, `xy`-preserving map on `C²` against
/// `x ↦ x(1 + x^a y^b f(x^a y^b))`, picking the smallest `(a, b)`.
pub fn extract_normal_form(h: &JetMap) -> Result<NormalForm> {
    if h.n_vars() != 2 {
        return Err(Error::Invalid("normal form needs a map on C^2".into()));
    }
    let order = h.order();
    let id = JetMap::identity(2, order);
    if h.linear_part().iter().zip(id.linear_part().iter()).any(|(a, b)| (a - b).norm() > NORMAL_FORM_TOL) {
        return Err(Error::NotTangentToIdentity);
    }
    let xy = Jet::monomial(2, order, &[1, 1], C64::new(1.0, 0.0));
    let defect = xy.compose(h)?.max_abs_diff(&xy);
    if defect > NORMAL_FORM_TOL {
        return Err(Error::XyNotPreserved(defect));
    }

    // (h₁ − x)/x, as exponents (i−1, j)
    let mut quotient: Vec<(u32, u32, C64)> = Vec::new();
    for (idx, c) in h.component(0).terms() {
        if idx.degree() <= 1 || c.norm() <= NORMAL_FORM_TOL {
            continue;
        }
        if idx.get(0) == 0 {
            return Err(Error::NoNormalForm(format!(
                "first component has a term y^{} not divisible by x",
                idx.get(1)
            )));
        }
        quotient.push((idx.get(0) - 1, idx.get(1), *c));
    }
    let Some(&(p, q, _)) = quotient.first() else {
        return Ok(NormalForm {
            a: 0,
            b: 0,
            f: Jet::zero(1, 0),
        });
    };
    let g = p.gcd(&q);
    let (a, b) = (p / g, q / g);
    let step = a + b;
    let f_order = ((order - 1) / step).saturating_sub(1);
    let mut f = Jet::zero(1, f_order);
    for (i, j, c) in quotient {
        let k = if a > 0 { i / a } else { j / b };
        if i != k * a || j != k * b || k == 0 {
            return Err(Error::NoNormalForm(format!(
                "term x^{} y^{} is not a power of x^{a} y^{b}",
                i + 1,
                j
            )));
        }
        f.add_term(MultiIndex::new(vec![k - 1]), c);
    }
    Ok(NormalForm { a, b, f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::two_pi_i;

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    /// (x(1 + w f(w)), xy / (x(1 + w f(w)))) through `order`, for constant f.
    fn product_map(a: u32, b: u32, f0: C64, order: u32) -> JetMap {
        let x = Jet::var(2, order, 0);
        let y = Jet::var(2, order, 1);
        let w = Jet::monomial(2, order, &[a, b], f0);
        let u = &Jet::one(2, order) + &w;
        JetMap::new(vec![&x * &u, &y * &u.reciprocal().unwrap()]).unwrap()
    }

    #[test]
    fn identity_has_trivial_form() {
        let nf = extract_normal_form(&JetMap::identity(2, 6)).unwrap();
        assert_eq!((nf.a, nf.b), (0, 0));
        assert!(nf.f.is_zero());
    }

    #[test]
    fn recovers_exponents_and_f0() {
        let nf = extract_normal_form(&product_map(2, 1, two_pi_i(), 8)).unwrap();
        assert_eq!((nf.a, nf.b), (2, 1));
        assert!((nf.f0() - two_pi_i()).norm() < 1e-14);
        let nf = extract_normal_form(&product_map(1, 1, c(-0.5), 8)).unwrap();
        assert_eq!((nf.a, nf.b), (1, 1));
        assert!((nf.f0() - c(-0.5)).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_tangent_and_non_preserving() {
        let m = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0), c(0.5)]));
        let lin = JetMap::from_linear(&m, 4).unwrap();
        assert_eq!(extract_normal_form(&lin), Err(Error::NotTangentToIdentity));
        let x = Jet::var(2, 4, 0);
        let y = Jet::var(2, 4, 1);
        let bad = JetMap::new(vec![&x + &(&x * &x), y]).unwrap();
        assert!(matches!(extract_normal_form(&bad), Err(Error::XyNotPreserved(_))));
    }
}
