use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use super::Foliation;
use crate::error::{Error, Result};
use crate::flows::Rhs;
use crate::jet::{Jet, MultiIndex, C64};
use crate::presets::two_pi_i;

/// Jets in the transverse variables indexed by integer frequency `m`, standing
/// for `Σ_m e^{2πimt}·jet_m` (equivalently a polynomial in `z`).
type Fourier = BTreeMap<i64, Jet>;

/// The leafwise system `dx_j/dt = Σ_m e^{2πimt} P_{j,m}(x)` obtained by
/// substituting `z = z₀e^{2πit}`. Period 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MonodromySystem {
    order: u32,
    z0: C64,
    rhs: Vec<Fourier>,
}

impl MonodromySystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn z0(&self) -> C64 {
        self.z0
    }

    /// `(m, P_{j,m})` pairs of component `j`, ascending in `m`.
    pub fn terms(&self, j: usize) -> impl Iterator<Item = (i64, &Jet)> {
        self.rhs[j].iter().map(|(m, p)| (*m, p))
    }

    pub fn term(&self, j: usize, m: i64) -> Option<&Jet> {
        self.rhs[j].get(&m)
    }

    /// All frequencies present, ascending.
    pub fn frequencies(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.rhs.iter().flat_map(|f| f.keys().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

impl Rhs for MonodromySystem {
    fn dim(&self) -> usize {
        self.rhs.len()
    }

    fn eval(&self, t: f64, x: &[C64], dx: &mut [C64]) {
        for (o, f) in dx.iter_mut().zip(&self.rhs) {
            *o = f
                .iter()
                .map(|(m, p)| C64::from_polar(1.0, 2.0 * PI * (*m as f64) * t) * p.eval(x))
                .sum();
        }
    }
}

impl fmt::Display for MonodromySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["x", "y", "u", "v", "w"];
        for (j, comp) in self.rhs.iter().enumerate() {
            let name = names.get(j).copied().unwrap_or("x?");
            write!(f, "d{name}/dt =")?;
            for (k, (m, p)) in comp.iter().enumerate() {
                let sep = if k == 0 { " " } else { "\n        + " };
                if *m == 0 {
                    write!(f, "{sep}[{p}]")?;
                } else {
                    write!(f, "{sep}e^{{2πi·{m}t}}·[{p}]")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn split_by_axis(j: &Jet, axis: usize, order: u32) -> Fourier {
    let mut out: BTreeMap<i64, Vec<(Vec<u32>, C64)>> = BTreeMap::new();
    for (idx, c) in j.terms() {
        let k = idx.get(axis) as i64;
        out.entry(k)
            .or_default()
            .push((idx.without(axis).exps().to_vec(), *c));
    }
    let n = j.n_vars() - 1;
    out.into_iter()
        .map(|(k, terms)| (k, Jet::from_terms(n, order, terms)))
        .filter(|(_, j)| !j.is_zero())
        .collect()
}

fn fourier_mul(a: &Fourier, b: &Fourier) -> Fourier {
    let mut out: Fourier = BTreeMap::new();
    for (ma, ja) in a {
        for (mb, jb) in b {
            let p = ja * jb;
            if p.is_zero() {
                continue;
            }
            let e = out.entry(ma + mb).or_insert_with(|| Jet::zero(p.n_vars(), p.order()));
            *e = &*e + &p;
        }
    }
    out.retain(|_, j| !j.is_zero());
    out
}

fn fourier_add(a: &Fourier, b: &Fourier) -> Fourier {
    let mut out = a.clone();
    for (m, j) in b {
        let e = out.entry(*m).or_insert_with(|| Jet::zero(j.n_vars(), j.order()));
        *e = &*e + j;
    }
    out.retain(|_, j| !j.is_zero());
    out
}

fn fourier_scale(a: &Fourier, s: C64) -> Fourier {
    a.iter().map(|(m, j)| (*m, j.scale(s))).collect()
}

/// Substitutes `z = z₀e^{2πit}` on the separatrix and writes the leafwise
/// equations `dx_j/dt = 2πi z·A_j/C` as a truncated series in the transverse
/// variables with trigonometric-polynomial coefficients.
///
/// The axis component must factor as `C = z·(λ + r)` where every term of `r`
/// involves a transverse variable, so that `1/(λ + r)` expands as a finite
/// sum after truncation.
pub fn build_monodromy_system(fol: &Foliation, order: u32, z0: C64) -> Result<MonodromySystem> {
    let axis = fol.axis();
    let n = fol.n_vars();
    let m = n - 1;
    if z0 == C64::default() {
        return Err(Error::Invalid("base point z0 must be nonzero".into()));
    }
    let field = fol.field();
    let c_full = split_by_axis(field.component(axis), axis, order);
    if let Some(j) = c_full.get(&0) {
        if !j.is_zero() {
            return Err(Error::NonResolvableDivision(
                "axis component does not vanish on {z = 0}".into(),
            ));
        }
    }
    // C = z·c with c = Σ_k z^k c_k
    let c: Fourier = c_full
        .into_iter()
        .filter(|(k, _)| *k > 0)
        .map(|(k, j)| (k - 1, j))
        .collect();
    let lambda = c.get(&0).map(Jet::constant_term).unwrap_or_default();
    if lambda == C64::default() {
        return Err(Error::ZeroAxisEigenvalue(axis));
    }
    let zero_idx = MultiIndex::zero(m);
    let mut r = c.clone();
    for (k, j) in r.iter_mut() {
        let c0 = j.constant_term();
        if *k == 0 {
            *j = &*j - &Jet::constant(m, order, c0);
        } else if c0 != C64::default() {
            return Err(Error::NonResolvableDivision(format!(
                "axis component contains the pure z-power z^{}",
                k + 1
            )));
        }
        debug_assert_eq!(j.coeff_at(&zero_idx), C64::default());
    }
    r.retain(|_, j| !j.is_zero());

    // 1/c = (1/λ) Σ_k (−r/λ)^k, finite because r has no constant part.
    let minus_r_over_l = fourier_scale(&r, -lambda.inv());
    let one: Fourier = BTreeMap::from([(0, Jet::one(m, order))]);
    let mut inv_c = one.clone();
    for _ in 0..order {
        inv_c = fourier_add(&one, &fourier_mul(&minus_r_over_l, &inv_c));
    }
    let inv_c = fourier_scale(&inv_c, lambda.inv() * two_pi_i());

    let rhs = fol
        .transverse_vars()
        .into_iter()
        .map(|j| {
            let a = split_by_axis(field.component(j), axis, order);
            fourier_mul(&a, &inv_c)
                .into_iter()
                .map(|(k, jet)| (k, jet.scale(z0.powi(k as i32))))
                .filter(|(_, jet)| !jet.is_zero())
                .collect()
        })
        .collect();
    Ok(MonodromySystem { order, z0, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holonomy::realize_as_holonomy;
    use crate::presets;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn theorem_b_system() {
        let fol = Foliation::new(presets::thm_b(), 2).unwrap();
        let sys = build_monodromy_system(&fol, 6, one()).unwrap();
        let w = -two_pi_i();
        // dx/dt = −2πi x(1 + e^{6πit} x²y)
        assert_eq!(sys.frequencies(), vec![0, 3]);
        let x0 = sys.term(0, 0).unwrap();
        assert_eq!(x0.len(), 1);
        assert!((x0.coeff(&[1, 0]) - w).norm() < 1e-15);
        let x3 = sys.term(0, 3).unwrap();
        assert_eq!(x3.len(), 1);
        assert!((x3.coeff(&[3, 1]) - w).norm() < 1e-15);
        // dy/dt = −2πi y(1 − e^{6πit} x²y)
        assert!((sys.term(1, 0).unwrap().coeff(&[0, 1]) - w).norm() < 1e-15);
        assert!((sys.term(1, 3).unwrap().coeff(&[2, 2]) + w).norm() < 1e-15);
    }

    #[test]
    fn example3_system() {
        let fol = Foliation::new(presets::example3(), 2).unwrap();
        let sys = build_monodromy_system(&fol, 6, one()).unwrap();
        assert_eq!(sys.frequencies(), vec![0, 2]);
        assert!((sys.term(0, 2).unwrap().coeff(&[2, 1]) + two_pi_i()).norm() < 1e-15);
        assert!((sys.term(1, 2).unwrap().coeff(&[1, 2]) - two_pi_i()).norm() < 1e-15);
    }

    #[test]
    fn realized_field_is_autonomous() {
        let y = presets::gen_h(two_pi_i());
        let sys = build_monodromy_system(&realize_as_holonomy(&y).unwrap(), 5, one()).unwrap();
        assert_eq!(sys.frequencies(), vec![0]);
        assert!(sys.term(0, 0).unwrap().max_abs_diff(&y.component(0).with_order(5)) < 1e-15);
        assert!(sys.term(1, 0).unwrap().max_abs_diff(&y.component(1).with_order(5)) < 1e-15);
    }

    #[test]
    fn nonlinear_axis_unit_is_expanded() {
        // C = −z(1 + x): dx/dt = 2πi·x/(−(1+x)) = −2πi x (1 − x + x² − …)
        let x = Jet::var(3, 3, 0);
        let y = Jet::var(3, 3, 1);
        let zc = Jet::from_terms(3, 3, [(vec![0, 0, 1], -one()), (vec![1, 0, 1], -one())]);
        let fol = Foliation::new(VectorField::new(vec![x, y, zc]).unwrap(), 2).unwrap();
        let sys = build_monodromy_system(&fol, 4, one()).unwrap();
        let p = sys.term(0, 0).unwrap();
        for k in 1..=4u32 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            assert!((p.coeff(&[k, 0]) + two_pi_i() * sign).norm() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn pure_z_terms_are_rejected() {
        let zc = Jet::from_terms(2, 3, [(vec![0, 1], one()), (vec![0, 2], one())]);
        let fol = Foliation::new(VectorField::new(vec![Jet::var(2, 3, 0), zc]).unwrap(), 1).unwrap();
        assert!(matches!(
            build_monodromy_system(&fol, 3, one()),
            Err(Error::NonResolvableDivision(_))
        ));
    }

    use crate::flows::VectorField;
}
