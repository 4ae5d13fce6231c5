//! Exponential polynomials `Σ c·t^k·e^{μt}` and the linear ODEs they solve.
//!
//! Frequencies that are rational multiples of `2πi` are kept exact
//! ([`Frequency::Turns`]) so that resonance `ν = α` is detected without
//! tolerance. Everything else falls back to complex doubles compared with
//! [`RESONANCE_TOL`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::jet::{Jet, MultiIndex, C64, PRUNE_EPS};

pub const RESONANCE_TOL: f64 = 1e-12;

/// Largest denominator tried when snapping a frequency to a rational number of turns.
const MAX_SNAP_DENOM: i64 = 1000;

/// Exponential rate `μ` of a term `e^{μt}`.
#[derive(Clone, Copy, Debug)]
pub enum Frequency {
    /// `μ = 2πi·q` with `q` exact.
    Turns(Rational64),
    Complex(C64),
}

impl Frequency {
    pub fn zero() -> Self {
        Frequency::Turns(Rational64::from_integer(0))
    }

    pub fn turns(num: i64, den: i64) -> Self {
        Frequency::Turns(Rational64::new(num, den))
    }

    /// Classifies `mu`, snapping to an exact number of turns when
    /// `mu/(2πi)` is within [`RESONANCE_TOL`] of a rational with small denominator.
    pub fn from_complex(mu: C64) -> Self {
        let q = mu / C64::new(0.0, 2.0 * PI);
        if q.im.abs() < RESONANCE_TOL {
            for den in 1..=MAX_SNAP_DENOM {
                let num = (q.re * den as f64).round();
                if num.abs() < 1e15 && (q.re - num / den as f64).abs() < RESONANCE_TOL {
                    return Frequency::Turns(Rational64::new(num as i64, den));
                }
            }
        }
        Frequency::Complex(mu)
    }

    pub fn mu(&self) -> C64 {
        match self {
            Frequency::Turns(q) => C64::new(0.0, 2.0 * PI * rat_to_f64(q)),
            Frequency::Complex(m) => *m,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Frequency::Turns(q) => *q.numer() == 0,
            Frequency::Complex(m) => m.norm() < RESONANCE_TOL,
        }
    }

    pub fn plus(&self, other: &Frequency) -> Frequency {
        match (self, other) {
            (Frequency::Turns(a), Frequency::Turns(b)) => Frequency::Turns(a + b),
            _ => Frequency::Complex(self.mu() + other.mu()),
        }
    }

    pub fn scaled(&self, k: i64) -> Frequency {
        match self {
            Frequency::Turns(q) => Frequency::Turns(q * k),
            Frequency::Complex(m) => Frequency::Complex(m * k as f64),
        }
    }

    /// `e^{μt}`. For exact turns and real `t` the angle is reduced before the
    /// trigonometric call, so `e^{2πi·m}` is exactly 1 for integer `m`.
    pub fn exp_at(&self, t: C64) -> C64 {
        match self {
            Frequency::Turns(q) if t.im == 0.0 => {
                let turns = if t.re.fract() == 0.0 && t.re.abs() < 1e15 {
                    // exact rational reduction for integer times
                    let r = q * Rational64::from_integer(t.re as i64);
                    let frac = r - r.floor();
                    rat_to_f64(&frac)
                } else {
                    let x = rat_to_f64(q) * t.re;
                    x - x.floor()
                };
                exact_cis(turns)
            }
            _ => (self.mu() * t).exp(),
        }
    }

    fn sort_key(&self) -> (f64, f64) {
        let m = self.mu();
        (m.im, m.re)
    }
}

impl PartialEq for Frequency {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Frequency::Turns(a), Frequency::Turns(b)) => a == b,
            _ => (self.mu() - other.mu()).norm() < RESONANCE_TOL,
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Turns(q) => write!(f, "2πi·({q})"),
            Frequency::Complex(m) => write!(f, "({:.6}{:+.6}i)", m.re, m.im),
        }
    }
}

/// `e^{2πi·turns}` for `turns ∈ [0, 1)`, exact at quarter turns.
fn exact_cis(turns: f64) -> C64 {
    match turns {
        t if t == 0.0 => C64::new(1.0, 0.0),
        t if t == 0.25 => C64::new(0.0, 1.0),
        t if t == 0.5 => C64::new(-1.0, 0.0),
        t if t == 0.75 => C64::new(0.0, -1.0),
        t => C64::from_polar(1.0, 2.0 * PI * t),
    }
}

fn rat_to_f64(q: &Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// One term `c·t^k·e^{μt}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpTerm {
    pub k: u32,
    pub freq: Frequency,
    pub c: C64,
}

/// Finite sum of terms `c·t^k·e^{μt}` with distinct `(k, μ)` and nonzero `c`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExpPolyRepr", into = "ExpPolyRepr")]
pub struct ExpPoly {
    terms: Vec<ExpTerm>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::term(0, Frequency::zero(), c)
    }

    /// `c·t^k·e^{μt}`.
    pub fn term(k: u32, freq: Frequency, c: C64) -> Self {
        let mut p = ExpPoly::zero();
        p.push(ExpTerm { k, freq, c });
        p.prune();
        p
    }

    /// `e^{μt}`.
    pub fn exp(freq: Frequency) -> Self {
        Self::term(0, freq, C64::new(1.0, 0.0))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ExpTerm>) -> Self {
        let mut p = ExpPoly::zero();
        for t in terms {
            p.push(t);
        }
        p.prune();
        p
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.c.norm()).fold(0.0, f64::max)
    }

    fn push(&mut self, t: ExpTerm) {
        if let Some(e) = self
            .terms
            .iter_mut()
            .find(|e| e.k == t.k && e.freq == t.freq)
        {
            e.c += t.c;
        } else {
            self.terms.push(t);
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|t| t.c.norm() >= PRUNE_EPS);
        self.terms.sort_by(|a, b| {
            let (ka, kb) = (a.freq.sort_key(), b.freq.sort_key());
            ka.0.total_cmp(&kb.0)
                .then(ka.1.total_cmp(&kb.1))
                .then(a.k.cmp(&b.k))
        });
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(*t);
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> ExpPoly {
        let mut out = ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| ExpTerm { c: t.c * s, ..*t })
                .collect(),
        };
        out.prune();
        out
    }

    /// Termwise convolution: `t^k e^{μt} · t^l e^{νt} = t^{k+l} e^{(μ+ν)t}`.
    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.push(ExpTerm {
                    k: a.k + b.k,
                    freq: a.freq.plus(&b.freq),
                    c: a.c * b.c,
                });
            }
        }
        out.prune();
        out
    }

    /// Multiplies by `e^{νt}`.
    pub fn shift(&self, nu: &Frequency) -> ExpPoly {
        ExpPoly::from_terms(self.terms.iter().map(|t| ExpTerm {
            freq: t.freq.plus(nu),
            ..*t
        }))
    }

    /// Exact derivative in `t`.
    pub fn derivative(&self) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for t in &self.terms {
            if t.k > 0 {
                out.push(ExpTerm {
                    k: t.k - 1,
                    freq: t.freq,
                    c: t.c * t.k as f64,
                });
            }
            if !t.freq.is_zero() {
                out.push(ExpTerm {
                    c: t.c * t.freq.mu(),
                    ..*t
                });
            }
        }
        out.prune();
        out
    }

    /// Value at complex time `t`; terms sharing a frequency are summed by Horner's rule.
    pub fn eval(&self, t: C64) -> C64 {
        let mut by_freq: Vec<(Frequency, BTreeMap<u32, C64>)> = Vec::new();
        for term in &self.terms {
            match by_freq.iter_mut().find(|(f, _)| *f == term.freq) {
                Some((_, m)) => *m.entry(term.k).or_default() += term.c,
                None => by_freq.push((term.freq, BTreeMap::from([(term.k, term.c)]))),
            }
        }
        by_freq
            .into_iter()
            .map(|(f, poly)| {
                let top = *poly.keys().next_back().unwrap();
                let mut acc = C64::default();
                for k in (0..=top).rev() {
                    acc = acc * t + poly.get(&k).copied().unwrap_or_default();
                }
                acc * f.exp_at(t)
            })
            .sum()
    }

    /// Value at real time `t`.
    pub fn eval_real(&self, t: f64) -> C64 {
        self.eval(C64::new(t, 0.0))
    }
}

/// Unique exponential-polynomial solution of `a' = α·a + g`, `a(0) = a0`.
///
/// Each forcing term `c·t^k·e^{νt}` contributes a particular solution
/// `p(t)·e^{νt}` with `p' + (ν−α)p = c·t^k`; when `ν = α` the particular
/// solution is `c·t^{k+1}/(k+1)·e^{αt}`. The homogeneous part `e^{αt}` then
/// absorbs the initial condition.
pub fn solve_linear_ode(alpha: Frequency, g: &ExpPoly, a0: C64) -> ExpPoly {
    let mut out = ExpPoly::zero();
    let mut at_zero = C64::default();
    for term in &g.terms {
        if term.freq == alpha {
            out.push(ExpTerm {
                k: term.k + 1,
                freq: alpha,
                c: term.c / (term.k + 1) as f64,
            });
            continue;
        }
        let delta = term.freq.mu() - alpha.mu();
        let k = term.k;
        let mut cj = term.c / delta;
        for j in 0..=k {
            out.push(ExpTerm {
                k: k - j,
                freq: term.freq,
                c: cj,
            });
            if j == k {
                at_zero += cj;
            }
            cj = -cj * (k - j) as f64 / delta;
        }
    }
    out.push(ExpTerm {
        k: 0,
        freq: alpha,
        c: a0 - at_zero,
    });
    out.prune();
    out
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)", t.c.re, t.c.im)?;
            match t.k {
                0 => {}
                1 => write!(f, "·t")?,
                k => write!(f, "·t^{k}")?,
            }
            if !t.freq.is_zero() {
                write!(f, "·exp({}·t)", t.freq)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ExpTermRepr {
    k: u32,
    q_re: Option<String>,
    q_im: Option<String>,
    mu_re: f64,
    mu_im: f64,
    c_re: f64,
    c_im: f64,
}

#[derive(Serialize, Deserialize)]
struct ExpPolyRepr {
    terms: Vec<ExpTermRepr>,
}

impl From<ExpPoly> for ExpPolyRepr {
    fn from(p: ExpPoly) -> Self {
        ExpPolyRepr {
            terms: p
                .terms
                .into_iter()
                .map(|t| {
                    let mu = t.freq.mu();
                    let (q_re, q_im) = match t.freq {
                        Frequency::Turns(q) => (Some(q.to_string()), Some("0".to_string())),
                        Frequency::Complex(_) => (None, None),
                    };
                    ExpTermRepr {
                        k: t.k,
                        q_re,
                        q_im,
                        mu_re: mu.re,
                        mu_im: mu.im,
                        c_re: t.c.re,
                        c_im: t.c.im,
                    }
                })
                .collect(),
        }
    }
}

impl TryFrom<ExpPolyRepr> for ExpPoly {
    type Error = String;
    fn try_from(r: ExpPolyRepr) -> Result<Self, String> {
        let mut terms = Vec::with_capacity(r.terms.len());
        for (i, t) in r.terms.into_iter().enumerate() {
            let freq = match (&t.q_re, &t.q_im) {
                (Some(re), im) => {
                    let q = Rational64::from_str(re)
                        .map_err(|e| format!("terms[{i}].q_re: {e}"))?;
                    match im.as_deref() {
                        None | Some("0") => Frequency::Turns(q),
                        Some(_) => Frequency::Complex(Complex64::new(t.mu_re, t.mu_im)),
                    }
                }
                (None, _) => Frequency::Complex(Complex64::new(t.mu_re, t.mu_im)),
            };
            terms.push(ExpTerm {
                k: t.k,
                freq,
                c: C64::new(t.c_re, t.c_im),
            });
        }
        let mut p = ExpPoly::zero();
        for t in terms {
            p.push(t);
        }
        p.terms.retain(|t| t.c != C64::default());
        Ok(p)
    }
}

/// Truncated power series whose coefficients are exponential polynomials in `t`.
/// Represents a jet of maps depending on time, e.g. `x(t) = Σ a_α(t) x₀^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpJet {
    n_vars: usize,
    order: u32,
    coeffs: BTreeMap<MultiIndex, ExpPoly>,
}

impl ExpJet {
    pub fn zero(n_vars: usize, order: u32) -> Self {
        ExpJet {
            n_vars,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(n_vars: usize, order: u32) -> Self {
        let mut j = Self::zero(n_vars, order);
        j.set(MultiIndex::zero(n_vars), ExpPoly::constant(C64::new(1.0, 0.0)));
        j
    }

    /// Jet with constant-in-time coefficients.
    pub fn from_jet(j: &Jet) -> Self {
        let mut out = Self::zero(j.n_vars(), j.order());
        for (k, c) in j.terms() {
            out.set(k.clone(), ExpPoly::constant(*c));
        }
        out
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, idx: &MultiIndex) -> Option<&ExpPoly> {
        self.coeffs.get(idx)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &ExpPoly)> {
        self.coeffs.iter()
    }

    pub fn set(&mut self, idx: MultiIndex, p: ExpPoly) {
        if p.is_zero() || idx.degree() > self.order {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, p);
        }
    }

    fn accumulate(&mut self, idx: MultiIndex, p: &ExpPoly) {
        let merged = match self.coeffs.get(&idx) {
            Some(e) => e.add(p),
            None => p.clone(),
        };
        self.set(idx, merged);
    }

    pub fn add(&self, other: &ExpJet) -> ExpJet {
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.accumulate(k.clone(), v);
        }
        out
    }

    /// Product truncated at total degree `cap` (at most the order).
    pub fn mul_capped(&self, other: &ExpJet, cap: u32) -> ExpJet {
        let cap = cap.min(self.order);
        let mut out = ExpJet::zero(self.n_vars, self.order);
        for (ka, va) in &self.coeffs {
            for (kb, vb) in &other.coeffs {
                if ka.degree() + kb.degree() > cap {
                    break;
                }
                out.accumulate(ka.plus(kb), &va.mul(vb));
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> ExpJet {
        let mut out = ExpJet::zero(self.n_vars, self.order);
        for (k, v) in &self.coeffs {
            out.set(k.clone(), v.scale(s));
        }
        out
    }

    pub fn shift(&self, nu: &Frequency) -> ExpJet {
        let mut out = ExpJet::zero(self.n_vars, self.order);
        for (k, v) in &self.coeffs {
            out.set(k.clone(), v.shift(nu));
        }
        out
    }

    /// Homogeneous component of degree `d`.
    pub fn degree_part(&self, d: u32) -> ExpJet {
        ExpJet {
            n_vars: self.n_vars,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.degree() == d)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn derivative(&self) -> ExpJet {
        let mut out = ExpJet::zero(self.n_vars, self.order);
        for (k, v) in &self.coeffs {
            out.set(k.clone(), v.derivative());
        }
        out
    }

    /// Freezes time at `t`.
    pub fn eval_at(&self, t: C64) -> Jet {
        Jet::from_terms(
            self.n_vars,
            self.order,
            self.coeffs
                .iter()
                .map(|(k, v)| (k.exps().to_vec(), v.eval(t))),
        )
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .values()
            .map(ExpPoly::max_abs_coeff)
            .fold(0.0, f64::max)
    }

    /// Composition `p ∘ maps` for a complex polynomial jet `p`, keeping total
    /// degree at most `cap`. Every map component must lack a constant term.
    pub fn compose_poly(p: &Jet, maps: &[ExpJet], cap: u32) -> ExpJet {
        assert_eq!(p.n_vars(), maps.len(), "one map component per variable");
        let n_out = maps[0].n_vars;
        let order = maps[0].order;
        let mut powers: Vec<Vec<ExpJet>> = vec![vec![ExpJet::one(n_out, order)]; maps.len()];
        let mut out = ExpJet::zero(n_out, order);
        for (k, c) in p.terms() {
            if k.degree() > cap {
                continue;
            }
            let mut term = ExpJet::one(n_out, order).scale(*c);
            for (i, &e) in k.exps().iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_capped(&maps[i], cap);
                    powers[i].push(next);
                }
                if e > 0 {
                    term = term.mul_capped(&powers[i][e as usize], cap);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_pi_i() -> C64 {
        C64::new(0.0, 2.0 * PI)
    }

    #[test]
    fn inverse_exponentials_cancel() {
        let p = ExpPoly::exp(Frequency::turns(1, 1)).mul(&ExpPoly::exp(Frequency::turns(-1, 1)));
        assert_eq!(p, ExpPoly::constant(C64::new(1.0, 0.0)));
    }

    #[test]
    fn powers_of_t_accumulate() {
        let mu = Frequency::Complex(C64::new(0.3, -1.0));
        let a = ExpPoly::term(1, mu, C64::new(1.0, 0.0));
        let t = ExpPoly::term(1, Frequency::zero(), C64::new(1.0, 0.0));
        assert_eq!(a.mul(&t), ExpPoly::term(2, mu, C64::new(1.0, 0.0)));
    }

    #[test]
    fn homogeneous_solution() {
        let s = solve_linear_ode(Frequency::turns(-1, 1), &ExpPoly::zero(), C64::new(1.0, 0.0));
        assert_eq!(s, ExpPoly::exp(Frequency::turns(-1, 1)));
        assert_eq!(s.eval_real(1.0), C64::new(1.0, 0.0));
    }

    #[test]
    fn resonant_forcing_produces_secular_term() {
        let alpha = Frequency::turns(-1, 1);
        let g = ExpPoly::term(0, alpha, -two_pi_i());
        let s = solve_linear_ode(alpha, &g, C64::default());
        assert_eq!(s, ExpPoly::term(1, alpha, -two_pi_i()));
        assert_eq!(s.eval_real(1.0), -two_pi_i());
    }

    #[test]
    fn resonant_polynomial() {
        let g = ExpPoly::term(1, Frequency::zero(), C64::new(1.0, 0.0));
        let s = solve_linear_ode(Frequency::zero(), &g, C64::default());
        assert_eq!(s, ExpPoly::term(2, Frequency::zero(), C64::new(0.5, 0.0)));
    }

    #[test]
    fn snapping() {
        assert!(matches!(
            Frequency::from_complex(C64::new(0.0, -4.0 * PI)),
            Frequency::Turns(q) if q == Rational64::from_integer(-2)
        ));
        assert!(matches!(
            Frequency::from_complex(C64::new(0.0, PI / 3.0)),
            Frequency::Turns(q) if q == Rational64::new(1, 6)
        ));
        assert!(matches!(Frequency::from_complex(C64::new(1.0, 0.0)), Frequency::Complex(_)));
    }

    #[test]
    fn json_round_trip_keeps_exact_turns() {
        let p = ExpPoly::from_terms([
            ExpTerm { k: 1, freq: Frequency::turns(-3, 2), c: C64::new(0.25, -1.0) },
            ExpTerm { k: 0, freq: Frequency::Complex(C64::new(0.1, 0.2)), c: C64::new(2.0, 0.0) },
        ]);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains(r#""q_re":"-3/2""#));
        let back: ExpPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(matches!(back.terms()[0].freq, Frequency::Turns(_)) || matches!(back.terms()[1].freq, Frequency::Turns(_)));
    }
}
