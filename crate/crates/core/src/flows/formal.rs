use super::VectorField;
use crate::error::{Error, Result};
use crate::exppoly::{solve_linear_ode, ExpJet, ExpPoly, Frequency};
use crate::jet::{Jet, JetMap, MultiIndex, C64};

/// Taylor expansion of the flow `φ^t` through degree `order`, with each
/// coefficient an exponential polynomial in `t`.
///
/// Picard iteration in variation-of-constants form,
/// `φ_{k+1}(t) = e^{Λt}x + ∫₀ᵗ e^{Λ(t−s)} N(φ_k(s)) ds`, where `Λ` is the
/// (diagonal) linear part and `N` the nonlinear part. The nonlinear part has no
/// terms of degree below 2, so every pass fixes one more degree and `order − 1`
/// passes reach the fixed point.
pub fn formal_flow_series(field: &VectorField, order: u32) -> Result<Vec<ExpJet>> {
    let n = field.n_vars();
    let eig = field.eigenvalues().ok_or(Error::NonDiagonalLinearPart)?;
    let rates: Vec<Frequency> = eig.iter().map(|&l| Frequency::from_complex(l)).collect();
    let order = order.max(1);
    let nonlinear: Vec<Jet> = field
        .components_at(order)
        .iter()
        .map(|c| c - &c.degree_part(1))
        .collect();

    let linear_flow = |j: usize| {
        let mut e = ExpJet::zero(n, order);
        e.set(MultiIndex::unit(n, j), ExpPoly::exp(rates[j]));
        e
    };
    let mut phi: Vec<ExpJet> = (0..n).map(linear_flow).collect();
    for _ in 1..order {
        let next: Vec<ExpJet> = (0..n)
            .map(|j| {
                let forcing = ExpJet::compose_poly(&nonlinear[j], &phi, order);
                let mut out = linear_flow(j);
                for (idx, g) in forcing.terms() {
                    out.set(idx.clone(), solve_linear_ode(rates[j], g, C64::default()));
                }
                out
            })
            .collect();
        if next == phi {
            break;
        }
        phi = next;
    }
    Ok(phi)
}

/// Degree-`order` truncation of the time-`t` map of `field`.
pub fn formal_flow(field: &VectorField, t: C64, order: u32) -> Result<JetMap> {
    let series = formal_flow_series(field, order)?;
    JetMap::new(series.iter().map(|c| c.eval_at(t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn euler_field_time_one() {
        let f = VectorField::linear(&[C64::new(1.0, 0.0)]);
        let h = formal_flow(&f, C64::new(1.0, 0.0), 6).unwrap();
        assert!((h.component(0).coeff(&[1]) - C64::new(E, 0.0)).norm() < 1e-14);
        assert_eq!(h.component(0).len(), 1);
    }

    #[test]
    fn diagonal_linear_flow() {
        let lams = [C64::new(0.5, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, 2.0)];
        let f = VectorField::linear(&lams);
        let t = C64::new(0.3, -0.7);
        let h = formal_flow(&f, t, 5).unwrap();
        for (i, l) in lams.iter().enumerate() {
            let want = (l * t).exp();
            let got = h.component(i).coeff_at(&MultiIndex::unit(3, i));
            assert!((got - want).norm() < 1e-13);
            assert_eq!(h.component(i).len(), 1);
        }
    }

    #[test]
    fn quadratic_field_matches_closed_form() {
        // x' = x², x(t) = x/(1 - t x) = Σ t^k x^{k+1}
        let f = VectorField::new(vec![Jet::monomial(1, 2, &[2], C64::new(1.0, 0.0))]).unwrap();
        let t = 0.7;
        let h = formal_flow(&f, C64::new(t, 0.0), 7).unwrap();
        for k in 0..7u32 {
            let got = h.component(0).coeff(&[k + 1]);
            assert!((got - C64::new(t.powi(k as i32), 0.0)).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn nilpotent_linear_part_is_rejected() {
        let f = VectorField::new(vec![Jet::var(2, 1, 1), Jet::zero(2, 1)]).unwrap();
        assert_eq!(formal_flow(&f, C64::new(1.0, 0.0), 3), Err(Error::NonDiagonalLinearPart));
    }
}
