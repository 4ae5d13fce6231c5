//! Truncated multivariate power series over the complex numbers.
//!
//! A [`Jet`] stores the coefficients of a power series in `n_vars` variables
//! up to a fixed total degree (its *order*). Storage is sparse and iterates in
//! graded-lexicographic order. Arithmetic never produces terms beyond the
//! order, and coefficients of modulus below [`PRUNE_EPS`] are dropped after
//! every operation.
//!
//! A [`JetMap`] is an n-tuple of jets in n variables with zero constant terms,
//! i.e. a truncated germ of a holomorphic map fixing the origin.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Coefficients smaller than this in modulus are removed after each operation.
pub const PRUNE_EPS: f64 = 1e-14;

/// Default truncation order.
pub const DEFAULT_ORDER: u32 = 8;

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex(exps)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn n_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Index with variable `i` removed.
    pub fn without(&self, i: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e.remove(i);
        MultiIndex(e)
    }

    /// Index with exponent `k` inserted at position `i`.
    pub fn with_inserted(&self, i: usize, k: u32) -> MultiIndex {
        let mut e = self.0.clone();
        e.insert(i, k);
        MultiIndex(e)
    }

    /// All indices of total degree exactly `d` in `n` variables, ascending.
    pub fn of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == n {
                prefix.push(d);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for k in (0..=d).rev() {
                prefix.push(k);
                rec(n, d - k, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
        out
    }
}

impl Ord for MultiIndex {
    /// Graded order: total degree first, then x₁ before x₂ before … within a
    /// degree (so `1, x, y, x², xy, y², …`).
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Truncated power series in `n_vars` complex variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JetRepr", into = "JetRepr")]
pub struct Jet {
    n_vars: usize,
    order: u32,
    coeffs: BTreeMap<MultiIndex, C64>,
}

impl Jet {
    pub fn zero(n_vars: usize, order: u32) -> Self {
        Jet {
            n_vars,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, order: u32, c: C64) -> Self {
        Self::monomial(n_vars, order, &vec![0; n_vars], c)
    }

    pub fn one(n_vars: usize, order: u32) -> Self {
        Self::constant(n_vars, order, C64::new(1.0, 0.0))
    }

    /// The coordinate function `x_i`.
    pub fn var(n_vars: usize, order: u32, i: usize) -> Self {
        Self::monomial(n_vars, order, &MultiIndex::unit(n_vars, i).0, C64::new(1.0, 0.0))
    }

    pub fn monomial(n_vars: usize, order: u32, exps: &[u32], c: C64) -> Self {
        assert_eq!(exps.len(), n_vars, "exponent length must equal n_vars");
        let mut j = Jet::zero(n_vars, order);
        j.add_term(MultiIndex(exps.to_vec()), c);
        j.prune();
        j
    }

    /// Builds a jet from `(exponents, coefficient)` pairs; repeated exponents
    /// are summed and terms above `order` are dropped.
    pub fn from_terms<I, E>(n_vars: usize, order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (E, C64)>,
        E: Into<Vec<u32>>,
    {
        let mut j = Jet::zero(n_vars, order);
        for (e, c) in terms {
            let e = e.into();
            assert_eq!(e.len(), n_vars, "exponent length must equal n_vars");
            j.add_term(MultiIndex(e), c);
        }
        j.prune();
        j
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeff(&self, exps: &[u32]) -> C64 {
        self.coeffs
            .get(&MultiIndex(exps.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn coeff_at(&self, idx: &MultiIndex) -> C64 {
        self.coeffs.get(idx).copied().unwrap_or_default()
    }

    /// Terms in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn constant_term(&self) -> C64 {
        self.coeff_at(&MultiIndex::zero(self.n_vars))
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().next().map(MultiIndex::degree)
    }

    /// Highest total degree carrying a nonzero coefficient.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().map(MultiIndex::degree).max()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of the moduli of the coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// Homogeneous component of degree `d`.
    pub fn degree_part(&self, d: u32) -> Jet {
        Jet {
            n_vars: self.n_vars,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.degree() == d)
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Same coefficients viewed at another truncation order. Raising the order
    /// treats the jet as an exact polynomial.
    pub fn with_order(&self, order: u32) -> Jet {
        Jet {
            n_vars: self.n_vars,
            order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.degree() <= order)
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    pub(crate) fn add_term(&mut self, idx: MultiIndex, c: C64) {
        if idx.degree() > self.order {
            return;
        }
        *self.coeffs.entry(idx).or_default() += c;
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() >= PRUNE_EPS);
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.n_vars != other.n_vars {
            return Err(Error::VarMismatch {
                expected: self.n_vars,
                found: other.n_vars,
            });
        }
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(k.clone(), *v);
        }
        out.prune();
        Ok(out)
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(k.clone(), -*v);
        }
        out.prune();
        Ok(out)
    }

    /// Cauchy product with every term above the order dropped.
    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let mut out = Jet::zero(self.n_vars, self.order);
        for (ka, va) in &self.coeffs {
            let da = ka.degree();
            for (kb, vb) in &other.coeffs {
                if da + kb.degree() > self.order {
                    // keys are degree-sorted, nothing further can fit
                    break;
                }
                out.add_term(ka.plus(kb), va * vb);
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> Jet {
        let mut out = Jet {
            n_vars: self.n_vars,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v * s)).collect(),
        };
        out.prune();
        out
    }

    pub fn pow(&self, k: u32) -> Jet {
        let mut acc = Jet::one(self.n_vars, self.order);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse, defined when the constant term is nonzero.
    pub fn reciprocal(&self) -> Result<Jet> {
        let a0 = self.constant_term();
        if a0.norm() == 0.0 {
            return Err(Error::ZeroConstantTerm);
        }
        // a = a0 (1 + b) with b(0) = 0, so 1/a = (1/a0) Σ (-b)^k, k <= order.
        let mut b = self.scale(a0.inv());
        b.coeffs.remove(&MultiIndex::zero(self.n_vars));
        let one = Jet::one(self.n_vars, self.order);
        let mut r = one.clone();
        for _ in 0..self.order {
            r = &one - &(&b * &r);
        }
        Ok(r.scale(a0.inv()))
    }

    /// Partial derivative in variable `i`, kept at the same order.
    pub fn derivative(&self, i: usize) -> Jet {
        let mut out = Jet::zero(self.n_vars, self.order);
        for (k, v) in &self.coeffs {
            let e = k.get(i);
            if e == 0 {
                continue;
            }
            let mut exps = k.0.clone();
            exps[i] -= 1;
            out.add_term(MultiIndex(exps), v * e as f64);
        }
        out.prune();
        out
    }

    pub fn eval(&self, p: &[C64]) -> C64 {
        assert_eq!(p.len(), self.n_vars, "point dimension must equal n_vars");
        let max = self.order as usize;
        let pows: Vec<Vec<C64>> = p
            .iter()
            .map(|&x| {
                let mut v = Vec::with_capacity(max + 1);
                let mut acc = C64::new(1.0, 0.0);
                for _ in 0..=max {
                    v.push(acc);
                    acc *= x;
                }
                v
            })
            .collect();
        self.coeffs
            .iter()
            .map(|(k, c)| {
                k.0.iter()
                    .enumerate()
                    .fold(*c, |acc, (i, &e)| acc * pows[i][e as usize])
            })
            .sum()
    }

    /// Composition `self ∘ h`, truncated at the common order.
    pub fn compose(&self, h: &JetMap) -> Result<Jet> {
        if self.n_vars != h.len() {
            return Err(Error::VarMismatch {
                expected: self.n_vars,
                found: h.len(),
            });
        }
        if self.order != h.order() {
            return Err(Error::OrderMismatch(self.order, h.order()));
        }
        let n_out = h.n_vars();
        // powers[i][k] = h_i^k, filled lazily
        let mut powers: Vec<Vec<Jet>> = vec![vec![Jet::one(n_out, self.order)]; self.n_vars];
        let mut out = Jet::zero(n_out, self.order);
        for (k, c) in &self.coeffs {
            let mut term = Jet::constant(n_out, self.order, *c);
            for (i, &e) in k.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &h.components[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    term = &term * &powers[i][e as usize];
                }
            }
            for (kk, v) in term.coeffs {
                out.add_term(kk, v);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Largest coefficientwise difference in modulus.
    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        let mut m: f64 = 0.0;
        for (k, v) in &self.coeffs {
            m = m.max((v - other.coeff_at(k)).norm());
        }
        for (k, v) in &other.coeffs {
            if !self.coeffs.contains_key(k) {
                m = m.max(v.norm());
            }
        }
        m
    }

    /// Substitutes `x_i = 0` for every `i` in `vars`.
    pub fn restrict_zero(&self, vars: &[usize]) -> Jet {
        Jet {
            n_vars: self.n_vars,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| vars.iter().all(|&i| k.get(i) == 0))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Adds a variable at position `at` on which the jet does not depend.
    pub fn embed(&self, at: usize, order: u32) -> Jet {
        let mut out = Jet::zero(self.n_vars + 1, order);
        for (k, v) in &self.coeffs {
            out.add_term(k.with_inserted(at, 0), *v);
        }
        out
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<String> = if self.n_vars <= 3 {
            ["x", "y", "z"][..self.n_vars].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=self.n_vars).map(|i| format!("x{i}")).collect()
        };
        let mut first = true;
        for (k, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)", c.re, c.im)?;
            for (i, &e) in k.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·{}", names[i])?,
                    _ => write!(f, "·{}^{}", names[i], e)?,
                }
            }
        }
        write!(f, " + O({})", self.order + 1)
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            /// Panics when the operands have different shapes; use the
            /// `try_*` method for a fallible version.
            fn $method(self, rhs: &Jet) -> Jet {
                self.$checked(rhs).expect("incompatible jets")
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$checked(&rhs).expect("incompatible jets")
            }
        }
    };
}

jet_binop!(Add, add, try_add);
jet_binop!(Sub, sub, try_sub);
jet_binop!(Mul, mul, try_mul);

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct JetRepr {
    n_vars: usize,
    order: u32,
    terms: Vec<TermRepr>,
}

impl From<Jet> for JetRepr {
    fn from(j: Jet) -> Self {
        JetRepr {
            n_vars: j.n_vars,
            order: j.order,
            terms: j
                .coeffs
                .into_iter()
                .map(|(k, c)| TermRepr {
                    exp: k.0,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<JetRepr> for Jet {
    type Error = String;
    fn try_from(r: JetRepr) -> std::result::Result<Self, String> {
        if r.n_vars == 0 {
            return Err("n_vars must be at least 1".into());
        }
        let mut j = Jet::zero(r.n_vars, r.order);
        for (i, t) in r.terms.into_iter().enumerate() {
            if t.exp.len() != r.n_vars {
                return Err(format!(
                    "terms[{i}].exp has length {}, expected {}",
                    t.exp.len(),
                    r.n_vars
                ));
            }
            let idx = MultiIndex(t.exp);
            if idx.degree() > r.order {
                return Err(format!(
                    "terms[{i}] has degree {} above order {}",
                    idx.degree(),
                    r.order
                ));
            }
            let c = C64::new(t.re, t.im);
            if c != C64::default() {
                *j.coeffs.entry(idx).or_default() += c;
            }
        }
        Ok(j)
    }
}

/// Truncated germ of a holomorphic map `(Cⁿ,0) → (Cⁿ,0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JetMapRepr", into = "JetMapRepr")]
pub struct JetMap {
    components: Vec<Jet>,
    linear: DMatrix<C64>,
}

impl JetMap {
    pub fn new(components: Vec<Jet>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::Invalid("a jet map needs at least one component".into()));
        }
        let order = components[0].order;
        for (i, c) in components.iter().enumerate() {
            if c.n_vars != n {
                return Err(Error::VarMismatch {
                    expected: n,
                    found: c.n_vars,
                });
            }
            if c.order != order {
                return Err(Error::OrderMismatch(order, c.order));
            }
            if c.constant_term() != C64::default() {
                return Err(Error::NonzeroConstantTerm(i));
            }
        }
        let linear = DMatrix::from_fn(n, n, |i, j| {
            components[i].coeff_at(&MultiIndex::unit(n, j))
        });
        Ok(JetMap { components, linear })
    }

    pub fn identity(n: usize, order: u32) -> Self {
        JetMap::new((0..n).map(|i| Jet::var(n, order, i)).collect()).unwrap()
    }

    pub fn from_linear(m: &DMatrix<C64>, order: u32) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::Invalid("linear map must be square".into()));
        }
        let comps = (0..n)
            .map(|i| {
                Jet::from_terms(
                    n,
                    order,
                    (0..n).map(|j| (MultiIndex::unit(n, j).0, m[(i, j)])),
                )
            })
            .collect();
        JetMap::new(comps)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn n_vars(&self) -> usize {
        self.components.len()
    }

    pub fn order(&self) -> u32 {
        self.components[0].order
    }

    pub fn components(&self) -> &[Jet] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Jet {
        &self.components[i]
    }

    pub fn linear_part(&self) -> &DMatrix<C64> {
        &self.linear
    }

    pub fn eval(&self, p: &[C64]) -> Vec<C64> {
        self.components.iter().map(|c| c.eval(p)).collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &JetMap) -> Result<JetMap> {
        let comps = self
            .components
            .iter()
            .map(|c| c.compose(inner))
            .collect::<Result<Vec<_>>>()?;
        JetMap::new(comps)
    }

    /// Compositional inverse through the truncation order.
    pub fn inverse(&self) -> Result<JetMap> {
        let n = self.n_vars();
        let order = self.order();
        let linv = self
            .linear
            .clone()
            .try_inverse()
            .ok_or(Error::SingularLinearPart)?;
        let nonlinear: Vec<Jet> = self
            .components
            .iter()
            .map(|c| c - &c.degree_part(1))
            .collect();
        let nonlinear = JetMap {
            components: nonlinear,
            linear: DMatrix::zeros(n, n),
        };
        let apply_linv = |v: &[Jet]| -> Vec<Jet> {
            (0..n)
                .map(|i| {
                    (0..n).fold(Jet::zero(n, order), |acc, j| {
                        &acc + &v[j].scale(linv[(i, j)])
                    })
                })
                .collect()
        };
        let ids: Vec<Jet> = (0..n).map(|i| Jet::var(n, order, i)).collect();
        // g = L⁻¹ (y − N(g)); each pass fixes one more degree.
        let mut g = JetMap::new(apply_linv(&ids))?;
        for _ in 1..order {
            let ng = nonlinear.compose(&g)?;
            let rhs: Vec<Jet> = ids
                .iter()
                .zip(&ng.components)
                .map(|(a, b)| a - b)
                .collect();
            g = JetMap::new(apply_linv(&rhs))?;
        }
        Ok(g)
    }

    pub fn max_abs_diff(&self, other: &JetMap) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    /// Same map with every component re-truncated at `order`.
    pub fn with_order(&self, order: u32) -> JetMap {
        JetMap::new(self.components.iter().map(|c| c.with_order(order)).collect()).unwrap()
    }
}

#[derive(Serialize, Deserialize)]
struct JetMapRepr {
    components: Vec<Jet>,
}

impl From<JetMap> for JetMapRepr {
    fn from(m: JetMap) -> Self {
        JetMapRepr {
            components: m.components,
        }
    }
}

impl TryFrom<JetMapRepr> for JetMap {
    type Error = String;
    fn try_from(r: JetMapRepr) -> std::result::Result<Self, String> {
        JetMap::new(r.components).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn graded_lex_order() {
        let idx = MultiIndex::of_degree(2, 2);
        assert_eq!(
            idx,
            vec![
                MultiIndex::new(vec![2, 0]),
                MultiIndex::new(vec![1, 1]),
                MultiIndex::new(vec![0, 2])
            ]
        );
        assert!(MultiIndex::new(vec![0, 1]) < MultiIndex::new(vec![2, 0]));
        assert!(MultiIndex::new(vec![1, 0]) < MultiIndex::new(vec![0, 1]));
        assert_eq!(MultiIndex::of_degree(3, 3).len(), 10);
    }

    #[test]
    fn add_cancels() {
        let x = Jet::var(1, 4, 0);
        let one = Jet::one(1, 4);
        let s = &(&one + &x) + &(&one - &x);
        assert_eq!(s, Jet::constant(1, 4, c(2.0)));
        assert_eq!(&x + &Jet::zero(1, 4), x);
    }

    #[test]
    fn mul_difference_of_squares() {
        let x = Jet::var(1, 4, 0);
        let one = Jet::one(1, 4);
        let p = &(&one + &x) * &(&one - &x);
        assert_eq!(p, Jet::from_terms(1, 4, [(vec![0], c(1.0)), (vec![2], c(-1.0))]));
    }

    #[test]
    fn mul_square_of_trinomial() {
        let x = Jet::var(2, 4, 0);
        let y = Jet::var(2, 4, 1);
        let s = &(&Jet::one(2, 4) + &x) + &y;
        let sq = &s * &s;
        let expect = Jet::from_terms(
            2,
            4,
            [
                (vec![0, 0], c(1.0)),
                (vec![1, 0], c(2.0)),
                (vec![0, 1], c(2.0)),
                (vec![2, 0], c(1.0)),
                (vec![1, 1], c(2.0)),
                (vec![0, 2], c(1.0)),
            ],
        );
        assert!(sq.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn mul_truncates() {
        let x = Jet::var(1, 3, 0);
        assert!(x.pow(4).is_zero());
        assert_eq!(x.pow(3).coeff(&[3]), c(1.0));
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = Jet::var(2, 3, 0);
        let b = Jet::var(1, 3, 0);
        assert!(matches!(a.try_add(&b), Err(Error::VarMismatch { .. })));
        let d = Jet::var(2, 4, 0);
        assert!(matches!(a.try_mul(&d), Err(Error::OrderMismatch(3, 4))));
    }

    #[test]
    fn geometric_reciprocal() {
        let n = 7;
        let a = &Jet::one(1, n) + &Jet::var(1, n, 0);
        let r = a.reciprocal().unwrap();
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(r.coeff(&[k]), c(sign));
        }
        assert_eq!(Jet::constant(1, n, c(2.0)).reciprocal().unwrap(), Jet::constant(1, n, c(0.5)));
        assert_eq!(Jet::var(1, n, 0).reciprocal(), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn compose_with_identity() {
        let g = Jet::from_terms(2, 5, [(vec![1, 1], c(1.0)), (vec![3, 0], C64::new(0.0, 2.0))]);
        let id = JetMap::identity(2, 5);
        assert_eq!(g.compose(&id).unwrap(), g);
    }

    #[test]
    fn compose_rejects_constant_terms() {
        let comps = vec![Jet::one(1, 3)];
        assert_eq!(JetMap::new(comps), Err(Error::NonzeroConstantTerm(0)));
    }

    #[test]
    fn diagonal_inverse() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0), c(3.0)]));
        let h = JetMap::from_linear(&m, 4).unwrap();
        let inv = h.inverse().unwrap();
        assert!((inv.component(0).coeff(&[1, 0]) - c(0.5)).norm() < 1e-15);
        assert!((inv.component(1).coeff(&[0, 1]) - c(1.0 / 3.0)).norm() < 1e-15);
        assert_eq!(inv.component(0).len(), 1);
    }

    #[test]
    fn singular_linear_part() {
        let h = JetMap::new(vec![Jet::var(2, 3, 0), Jet::var(2, 3, 0)]).unwrap();
        assert_eq!(h.inverse(), Err(Error::SingularLinearPart));
    }

    #[test]
    fn derivative_and_eval() {
        let g = Jet::from_terms(2, 4, [(vec![2, 1], c(3.0)), (vec![0, 1], c(1.0))]);
        let dx = g.derivative(0);
        assert_eq!(dx.coeff(&[1, 1]), c(6.0));
        let p = [C64::new(0.5, 0.1), C64::new(-0.2, 0.3)];
        let direct = p[0] * p[0] * p[1] * 3.0 + p[1];
        assert!((g.eval(&p) - direct).norm() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let g = Jet::from_terms(2, 3, [(vec![0, 1], c(1.5)), (vec![1, 0], C64::new(0.0, -1.0))]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(
            s,
            r#"{"n_vars":2,"order":3,"terms":[{"exp":[1,0],"re":0.0,"im":-1.0},{"exp":[0,1],"re":1.5,"im":0.0}]}"#
        );
        let back: Jet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"n_vars":2,"order":1,"terms":[{"exp":[1,1],"re":1.0,"im":0.0}]}"#;
        assert!(serde_json::from_str::<Jet>(bad).is_err());
    }
}
