use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{build_monodromy_system, Foliation, MonodromySystem};
use crate::error::{Error, Result};
use crate::exppoly::{solve_linear_ode, ExpJet, ExpPoly, Frequency};
use crate::jet::{Jet, JetMap, MultiIndex, C64};

/// Coefficient functions of the solution `x_j(t) = Σ_α a_{j,α}(t) x₀^α` of the
/// monodromy system, keyed by `(component, α)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct CoefficientTable {
    n_vars: usize,
    order: u32,
    entries: BTreeMap<(usize, MultiIndex), ExpPoly>,
}

impl CoefficientTable {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `a_{j,α}(t)`; zero when absent.
    pub fn get(&self, component: usize, exps: &[u32]) -> ExpPoly {
        self.entries
            .get(&(component, MultiIndex::new(exps.to_vec())))
            .cloned()
            .unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &MultiIndex, &ExpPoly)> {
        self.entries.iter().map(|((j, a), p)| (*j, a, p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn from_solution(sol: &[ExpJet]) -> Self {
        let mut entries = BTreeMap::new();
        for (j, comp) in sol.iter().enumerate() {
            for (idx, p) in comp.terms() {
                entries.insert((j, idx.clone()), p.clone());
            }
        }
        CoefficientTable {
            n_vars: sol.len(),
            order: sol.first().map(ExpJet::order).unwrap_or(0),
            entries,
        }
    }

    /// The solution as time-dependent jets, one per component.
    pub fn to_exp_jets(&self) -> Vec<ExpJet> {
        let mut out = vec![ExpJet::zero(self.n_vars, self.order); self.n_vars];
        for ((j, idx), p) in &self.entries {
            out[*j].set(idx.clone(), p.clone());
        }
        out
    }

    /// The time-`t` map `x₀ ↦ x(t)`.
    pub fn map_at(&self, t: C64) -> Result<JetMap> {
        JetMap::new(self.to_exp_jets().iter().map(|c| c.eval_at(t)).collect())
    }

    /// Largest coefficient of `x' − RHS(x)` as an exponential polynomial, where
    /// `x` is the tabulated solution. Zero up to rounding for a correct table.
    pub fn ode_residual(&self, system: &MonodromySystem) -> f64 {
        let x = self.to_exp_jets();
        let mut worst: f64 = 0.0;
        for (j, xj) in x.iter().enumerate() {
            let mut rhs = ExpJet::zero(self.n_vars, self.order);
            for (m, p) in system.terms(j) {
                let comp = ExpJet::compose_poly(p, &x, self.order);
                rhs = rhs.add(&comp.shift(&Frequency::turns(m, 1)));
            }
            let res = xj.derivative().add(&rhs.scale(C64::new(-1.0, 0.0)));
            worst = worst.max(res.max_abs_coeff());
        }
        worst
    }
}

/// Holonomy computed through the coefficient recursion.
#[derive(Clone, Debug)]
pub struct HolonomySeries {
    pub system: MonodromySystem,
    pub table: CoefficientTable,
    /// Values of the table at `t = 1`.
    pub map: JetMap,
}

/// Taylor coefficients of the holonomy map through degree `order`.
///
/// Multi-indices are processed by increasing total degree. For degree `d`
/// the forcing of `a_{j,α}` collects the degree-`d` part of the nonlinear
/// right-hand side evaluated on the already known coefficients of degree
/// `< d`; with a diagonal linear part `μ_j x_j` each coefficient then solves
/// `a' = μ_j a + g` with `a(0) = 0`. Degree one is `a_{j,e_j} = e^{μ_j t}`.
pub fn holonomy_series(fol: &Foliation, order: u32, z0: C64) -> Result<HolonomySeries> {
    let order = order.max(1);
    let system = build_monodromy_system(fol, order, z0)?;
    let m = system.dim();

    let mut rates = Vec::with_capacity(m);
    let mut nonlinear: Vec<Vec<(i64, Jet)>> = Vec::with_capacity(m);
    for j in 0..m {
        let mut parts = Vec::new();
        let mut mu = C64::default();
        for (freq, p) in system.terms(j) {
            let lin = p.degree_part(1);
            for (idx, c) in lin.terms() {
                if freq != 0 || idx.get(j) != 1 {
                    return Err(Error::NonDiagonalLinearPart);
                }
                mu = *c;
            }
            let nl = p - &lin;
            if !nl.is_zero() {
                parts.push((freq, nl));
            }
        }
        rates.push(Frequency::from_complex(mu));
        nonlinear.push(parts);
    }

    let mut x: Vec<ExpJet> = (0..m)
        .map(|j| {
            let mut e = ExpJet::zero(m, order);
            e.set(MultiIndex::unit(m, j), ExpPoly::exp(rates[j]));
            e
        })
        .collect();

    for d in 2..=order {
        let forcing: Vec<ExpJet> = (0..m)
            .map(|j| {
                nonlinear[j]
                    .iter()
                    .fold(ExpJet::zero(m, order), |acc, (freq, p)| {
                        let g = ExpJet::compose_poly(p, &x, d).degree_part(d);
                        acc.add(&g.shift(&Frequency::turns(*freq, 1)))
                    })
            })
            .collect();
        for (j, g) in forcing.iter().enumerate() {
            for (idx, gj) in g.terms() {
                x[j].set(idx.clone(), solve_linear_ode(rates[j], gj, C64::default()));
            }
        }
    }

    let table = CoefficientTable::from_solution(&x);
    let map = table.map_at(C64::new(1.0, 0.0))?;
    Ok(HolonomySeries { system, table, map })
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    component: usize,
    exp: Vec<u32>,
    poly: ExpPoly,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    n_vars: usize,
    order: u32,
    entries: Vec<EntryRepr>,
}

impl From<CoefficientTable> for TableRepr {
    fn from(t: CoefficientTable) -> Self {
        TableRepr {
            n_vars: t.n_vars,
            order: t.order,
            entries: t
                .entries
                .into_iter()
                .map(|((component, idx), poly)| EntryRepr {
                    component,
                    exp: idx.exps().to_vec(),
                    poly,
                })
                .collect(),
        }
    }
}

impl TryFrom<TableRepr> for CoefficientTable {
    type Error = String;
    fn try_from(r: TableRepr) -> std::result::Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (i, e) in r.entries.into_iter().enumerate() {
            if e.component >= r.n_vars || e.exp.len() != r.n_vars {
                return Err(format!("entries[{i}] does not fit {} variables", r.n_vars));
            }
            entries.insert((e.component, MultiIndex::new(e.exp)), e.poly);
        }
        Ok(CoefficientTable {
            n_vars: r.n_vars,
            order: r.order,
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holonomy::realize_as_holonomy;
    use crate::presets::{self, two_pi_i};
    use crate::flows::{formal_flow, VectorField};

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn theorem_b_degree_four() {
        let fol = Foliation::new(presets::thm_b(), 2).unwrap();
        let h = holonomy_series(&fol, 4, one()).unwrap();
        for (_, idx, p) in h.table.entries() {
            let d = idx.degree();
            assert!(d == 1 || d == 4, "unexpected nonzero coefficient at {idx:?}: {p}");
        }
        let a31 = h.table.get(0, &[3, 1]);
        let b22 = h.table.get(1, &[2, 2]);
        let alpha = Frequency::turns(-1, 1);
        assert_eq!(a31, ExpPoly::term(1, alpha, -two_pi_i()));
        assert_eq!(b22, ExpPoly::term(1, alpha, two_pi_i()));
        assert!((h.map.component(0).coeff(&[3, 1]) + two_pi_i()).norm() < 1e-12);
        assert!((h.map.component(1).coeff(&[2, 2]) - two_pi_i()).norm() < 1e-12);
    }

    #[test]
    fn table_solves_its_odes() {
        let fol = Foliation::new(presets::example3(), 2).unwrap();
        let h = holonomy_series(&fol, 6, one()).unwrap();
        assert!(h.table.ode_residual(&h.system) < 1e-9);
    }

    #[test]
    fn linear_model_is_diagonal() {
        let lams: Vec<C64> = [2.0, -1.0, -3.0].iter().map(|&v| C64::new(v, 0.0)).collect();
        let fol = Foliation::new(VectorField::linear(&lams), 0).unwrap();
        let h = holonomy_series(&fol, 4, one()).unwrap();
        assert_eq!(h.map.component(0).len(), 1);
        assert_eq!(h.map.component(0).coeff(&[1, 0]), C64::new(-1.0, 0.0));
        assert_eq!(h.map.component(1).coeff(&[0, 1]), C64::new(-1.0, 0.0));
    }

    #[test]
    fn realized_generator_gives_time_one_map() {
        let y = presets::gen_f(two_pi_i());
        let h = holonomy_series(&realize_as_holonomy(&y).unwrap(), 6, one()).unwrap();
        let phi = formal_flow(&y, one(), 6).unwrap();
        assert!(h.map.max_abs_diff(&phi) < 1e-10);
    }

    #[test]
    fn table_json_round_trip() {
        let fol = Foliation::new(presets::thm_b(), 2).unwrap();
        let h = holonomy_series(&fol, 4, one()).unwrap();
        let s = serde_json::to_string(&h.table).unwrap();
        let back: CoefficientTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h.table);
    }
}
