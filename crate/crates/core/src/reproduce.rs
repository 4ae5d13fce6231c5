//! End-to-end checks of the headline results, shared by the
//! `reproduce-paper` command and the examples.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::exppoly::{solve_linear_ode, ExpPoly, ExpTerm, Frequency};
use crate::flows::{first_integral_drift, formal_flow, lie_derivative, Expected, IntegratorOptions, VectorField};
use crate::holonomy::{
    extract_normal_form, holonomy_numeric, holonomy_series, realize_as_holonomy, Foliation, LeafwiseRhs,
};
use crate::jet::{Jet, JetMap, C64};
use crate::orbit::{
    classify_seed_grid, group_closure, noncommuting_pair, periodicity_test, pseudogroup_orbit, DomainBall,
    GridSpec, OrbitOptions, OrbitStatus, PseudogroupOptions,
};
use crate::presets::{self, two_pi_i};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: u32, title: &str, passed: bool, detail: String) -> Self {
        CriterionResult {
            id,
            title: title.to_string(),
            passed,
            detail,
        }
    }

    fn failed(id: u32, title: &str, err: crate::Error) -> Self {
        Self::new(id, title, false, format!("error: {err}"))
    }
}

/// Rotation angle (in turns) of the `F` map on its invariant circle used for
/// the infinite-orbit contrast: `(√5 − 1)/20`, irrational.
pub fn contrast_rotation_turns() -> f64 {
    (5f64.sqrt() - 1.0) / 20.0
}

/// `C` with `1 + C·κ = e^{2πiθ}`: on `xy = C` the `F` map with `f ≡ κ` is the
/// rotation `x ↦ e^{2πiθ}x`.
pub fn level_for_rotation(kappa: C64, theta_turns: f64) -> C64 {
    (C64::from_polar(1.0, 2.0 * PI * theta_turns) - 1.0) / kappa
}

/// `k` points on `{xy = C, |x| = |y|}`.
pub fn level_circle_seeds(c: C64, k: usize) -> Vec<Vec<C64>> {
    let r = c.sqrt();
    (0..k)
        .map(|j| {
            let x = r * C64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64);
            vec![x, c / x]
        })
        .collect()
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn tight() -> IntegratorOptions {
    IntegratorOptions::with_tol(1e-12)
}

fn run(id: u32, title: &str, body: impl FnOnce() -> Result<(bool, String)>) -> CriterionResult {
    match body() {
        Ok((ok, detail)) => CriterionResult::new(id, title, ok, detail),
        Err(e) => CriterionResult::failed(id, title, e),
    }
}

/// Exact-route holonomy of the `x(1 + x²yz³)` field.
pub fn theorem_b_exact() -> CriterionResult {
    run(1, "holonomy of the x(1+x²yz³) field, exact route", || {
        let fol = Foliation::new(presets::thm_b(), 2)?;
        let hs = holonomy_series(&fol, 4, one())?;
        let low = hs
            .table
            .entries()
            .filter(|(_, idx, _)| (2..=3).contains(&idx.degree()))
            .map(|(_, _, p)| p.max_abs_coeff())
            .fold(0.0, f64::max);
        let a31 = hs.table.get(0, &[3, 1]).eval(one());
        let b22 = hs.table.get(1, &[2, 2]).eval(one());
        let ea = (a31 + two_pi_i()).norm();
        let eb = (b22 - two_pi_i()).norm();
        Ok((
            low < 1e-12 && ea < 1e-10 && eb < 1e-10,
            format!(
                "max |degree 2-3 coeff| = {low:.1e}; a31(1) = {:.12}{:+.12}i (err {ea:.1e}); b22(1) = {:.12}{:+.12}i (err {eb:.1e})",
                a31.re, a31.im, b22.re, b22.im
            ),
        ))
    })
}

/// 5×5 grid of transverse points with max-norm `r`.
pub fn transverse_grid(r: f64) -> Vec<Vec<C64>> {
    let s = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut out = Vec::new();
    for a in s {
        for b in s {
            out.push(vec![
                C64::from_polar(r * a, PI / 7.0),
                C64::from_polar(r * b, -PI / 5.0),
            ]);
        }
    }
    out
}

/// Largest deviation between the series jet and direct integration.
pub fn series_vs_numeric(fol: &Foliation, order: u32, points: &[Vec<C64>]) -> Result<f64> {
    let map = holonomy_series(fol, order, one())?.map;
    let mut worst: f64 = 0.0;
    for p in points {
        let num = holonomy_numeric(fol, p, one(), &tight())?;
        let ser = map.eval(p);
        for (a, b) in num.iter().zip(&ser) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

pub fn theorem_b_oracle() -> CriterionResult {
    run(2, "holonomy of the x(1+x²yz³) field, series vs integration", || {
        let fol = Foliation::new(presets::thm_b(), 2)?;
        let err = series_vs_numeric(&fol, 8, &transverse_grid(0.05))?;
        Ok((err < 1e-6, format!("max |series - numeric| on 25 points, |p| <= 0.05, N = 8: {err:.2e}")))
    })
}

/// `f(0)` estimated from one numeric holonomy evaluation on a small leaf.
pub fn numeric_f0(fol: &Foliation, s: f64) -> Result<C64> {
    let p = [C64::new(s, 0.0), C64::new(s, 0.0)];
    let q = holonomy_numeric(fol, &p, one(), &tight())?;
    let w = p[0] * p[1];
    Ok((q[0] / p[0] - 1.0) / w)
}

pub fn example3_normal_form() -> CriterionResult {
    run(3, "normal form of the x(1+xyz²) holonomy", || {
        let fol = Foliation::new(presets::example3(), 2)?;
        let nf = extract_normal_form(&holonomy_series(&fol, 8, one())?.map)?;
        let f0 = nf.f0();
        let modulus_err = (f0.norm() - 2.0 * PI).abs();
        let num = numeric_f0(&fol, 0.01)?;
        let consistent = (num - f0).norm() < 0.01 * f0.norm();
        Ok((
            (nf.a, nf.b) == (1, 1) && modulus_err < 1e-9 && consistent,
            format!(
                "(a,b) = ({},{}); f(0) = {:.12}{:+.12}i, ||f(0)| - 2π| = {modulus_err:.1e}; numeric estimate {:.6}{:+.6}i (same sign: {consistent})",
                nf.a, nf.b, f0.re, f0.im, num.re, num.im
            ),
        ))
    })
}

pub fn xy_preservation() -> CriterionResult {
    run(4, "holonomy preserves xy", || {
        let mut detail = String::new();
        let mut ok = true;
        for (name, field) in [("x(1+xyz²)", presets::example3()), ("x(1+x²yz³)", presets::thm_b())] {
            let fol = Foliation::new(field, 2)?;
            let map = holonomy_series(&fol, 8, one())?.map;
            let xy = Jet::monomial(2, 8, &[1, 1], one());
            let defect = xy.compose(&map)?.max_abs_diff(&xy);
            let decay = ExpPoly::exp(Frequency::turns(-2, 1));
            let p = [C64::new(0.05, 0.01), C64::new(0.04, -0.02)];
            let drift = first_integral_drift(&LeafwiseRhs::new(&fol, one()), &xy, &p, 1.0, Expected::Covariant(&decay), &tight())?;
            ok &= defect < 1e-12 && drift < 1e-8;
            let _ = write!(detail, "{name}: jet defect {defect:.1e}, drift |xy(t) - x0y0 e^(-4πit)| {drift:.1e}; ");
        }
        Ok((ok, detail.trim_end_matches("; ").to_string()))
    })
}

pub fn realization_identity() -> CriterionResult {
    run(5, "realizing a flow as a holonomy recovers its time-one map", || {
        let gens = [
            ("genF", presets::gen_f(two_pi_i())),
            ("genH", presets::gen_h(two_pi_i())),
            ("x y²(x∂x - y∂y)", presets::xy_preserving_generator(1, 2, C64::new(0.5, -1.0))),
        ];
        let mut worst: f64 = 0.0;
        let mut detail = String::new();
        for (name, y) in gens {
            let hol = holonomy_series(&realize_as_holonomy(&y)?, 6, one())?.map;
            let flow = formal_flow(&y, one(), 6)?;
            let d = hol.max_abs_diff(&flow);
            worst = worst.max(d);
            let _ = write!(detail, "{name}: {d:.1e}; ");
        }
        Ok((worst < 1e-10, detail.trim_end_matches("; ").to_string()))
    })
}

pub fn linear_model() -> CriterionResult {
    run(6, "holonomy of a linear field", || {
        let mut worst: f64 = 0.0;
        for lams in [[1.0, -1.0, -2.0], [2.0, -1.0, -3.0]] {
            let l: Vec<C64> = lams.iter().map(|&v| C64::new(v, 0.0)).collect();
            let fol = Foliation::new(VectorField::linear(&l), 0)?;
            let map = holonomy_series(&fol, 3, one())?.map;
            let diag: Vec<C64> = l[1..].iter().map(|lj| (two_pi_i() * lj / l[0]).exp()).collect();
            let m = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
            worst = worst.max(map.max_abs_diff(&JetMap::from_linear(&m, 3)?));
        }
        Ok((worst < 1e-12, format!("max coefficient error vs diag(e^(2πiλj/λ1)): {worst:.1e}")))
    })
}

pub fn finite_orbits_h() -> CriterionResult {
    run(7, "H map has only finite orbits on a 400-seed lattice", || {
        let s = classify_seed_grid(
            &presets::h_map(two_pi_i()),
            DomainBall::new(0.3)?,
            &GridSpec::lattice(20, 20),
            &OrbitOptions::with_budget(100_000),
        )?;
        let max_mu = s.records.iter().filter_map(|r| r.mu).max().unwrap_or(0);
        Ok((
            s.exhausted == 0 && s.escaped + s.periodic == 400,
            format!(
                "rho = 0.3, budget 1e5: escaped {}, periodic {}, infinite-suspected {}; largest mu {max_mu}",
                s.escaped, s.periodic, s.exhausted
            ),
        ))
    })
}

pub fn infinite_orbit_f() -> CriterionResult {
    run(8, "F map has an infinite bounded orbit", || {
        let theta = contrast_rotation_turns();
        let c = level_for_rotation(two_pi_i(), theta);
        let ball = DomainBall::new(0.3)?;
        let s = classify_seed_grid(
            &presets::f_map(two_pi_i()),
            ball,
            &GridSpec::Explicit(level_circle_seeds(c, 4)),
            &OrbitOptions::with_budget(100_000),
        )?;
        let bounded = s
            .records
            .iter()
            .filter(|r| r.status == OrbitStatus::BudgetExhausted && r.max_norm <= ball.radius())
            .count();
        Ok((
            bounded >= 1,
            format!(
                "theta = (√5-1)/20 turns, C = {:.9}{:+.9}i, |1 + 2πiC| - 1 = {:.1e}: {bounded}/4 seeds infinite-suspected and bounded",
                c.re,
                c.im,
                (one() + two_pi_i() * c).norm() - 1.0
            ),
        ))
    })
}

/// Closure of `⟨h₁, h₂⟩` by exact integer arithmetic: an element is
/// `diag(ω^a, ω^b)·swap^s` with `ω = e^{πi/3}`.
pub fn integer_closure_order() -> usize {
    type El = (u8, u8, bool);
    let mul = |(a, b, s): El, (c, d, t): El| -> El {
        // D(a,b) S^s D(c,d) S^t = D(a,b) D(σ(c,d)) S^{s+t}
        let (c, d) = if s { (d, c) } else { (c, d) };
        ((a + c) % 6, (b + d) % 6, s ^ t)
    };
    let gens: [El; 2] = [(1, 2, false), (0, 0, true)];
    let mut seen = vec![(0u8, 0u8, false)];
    let mut head = 0;
    while head < seen.len() {
        let e = seen[head];
        head += 1;
        for g in gens {
            let p = mul(e, g);
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
    }
    seen.len()
}

pub fn pseudogroup_h1h2() -> CriterionResult {
    run(9, "pseudogroup generated by h1 and the swap", || {
        let gens = presets::pseudogroup_by_name("schur24")?;
        let closure = group_closure(&gens, 10_000)?;
        let order = closure.order.unwrap_or(0);
        let oracle = integer_closure_order();
        let pair = noncommuting_pair(&closure.elements);
        let ball = DomainBall::new(0.3)?;
        let seeds = GridSpec::lattice(10, 10).seeds(2, ball)?;
        let mut bad = 0;
        let mut max_card = 0;
        for p in &seeds {
            let o = pseudogroup_orbit(&gens, p, ball, &PseudogroupOptions::default())?;
            max_card = max_card.max(o.cardinality());
            if o.truncated || order == 0 || order % o.cardinality() != 0 {
                bad += 1;
            }
        }
        let h_period = periodicity_test(&presets::h_map(two_pi_i()), 200);
        Ok((
            order == 24 && oracle == 24 && pair.is_some() && bad == 0 && h_period.is_none(),
            format!(
                "closure order {order} (integer oracle {oracle}); non-commuting pair {pair:?}; 100 seeds: max cardinality {max_card}, {bad} not dividing the order; H period up to 200: {h_period:?}"
            ),
        ))
    })
}

pub fn conservation() -> CriterionResult {
    run(10, "first integrals are conserved", || {
        let mut detail = String::new();
        let mut ok = true;
        for (n, m, a, b) in [(1u32, 1u32, 1u32, 1u32), (2, 3, 1, 2)] {
            let field = presets::example1(n, m, a, b);
            let g = Jet::monomial(2, n + m, &[n, m], one());
            let p = [C64::new(0.4, 0.1), C64::new(0.3, -0.2)];
            let drift = first_integral_drift(&field, &g, &p, 1.0, Expected::Constant, &tight())?;
            ok &= drift < 1e-8;
            let _ = write!(detail, "x^{n}y^{m} along ({n},{m},{a},{b}): drift {drift:.1e}; ");
        }
        // order high enough that nothing is truncated: deg g + deg X − 1
        let field = presets::thm_b();
        let xyz2 = Jet::monomial(3, 4 + field.order(), &[1, 1, 2], one());
        let lie = lie_derivative(&field, &xyz2)?;
        ok &= lie.is_zero();
        let _ = write!(detail, "Lie derivative of xyz² along the x(1+x²yz³) field has {} terms", lie.len());
        Ok((ok, detail))
    })
}

fn random_c(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn random_jet(rng: &mut ChaCha8Rng, n: usize, order: u32, min_degree: u32) -> Jet {
    let mut terms = Vec::new();
    for d in min_degree..=order {
        for idx in crate::jet::MultiIndex::of_degree(n, d) {
            if rng.gen_bool(0.6) {
                terms.push((idx.exps().to_vec(), random_c(rng, 1.0)));
            }
        }
    }
    Jet::from_terms(n, order, terms)
}

/// Diagonal linear part plus random nonlinear terms.
fn random_field(rng: &mut ChaCha8Rng, n: usize, order: u32) -> Result<VectorField> {
    let comps = (0..n)
        .map(|j| {
            let lin = Jet::monomial(n, order, &crate::jet::MultiIndex::unit(n, j).exps().to_vec(), random_c(rng, 1.0));
            &lin + &random_jet(rng, n, order, 2).scale(C64::new(0.3, 0.0))
        })
        .collect();
    VectorField::new(comps)
}

/// Randomized algebraic and dynamical identities with a fixed seed.
pub fn property_sweep(seed: u64, cases: usize) -> CriterionResult {
    run(11, "randomized identities (ring laws, flow group law, ODE residual, series vs integration)", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ring: f64 = 0.0;
        let mut group: f64 = 0.0;
        let mut residual: f64 = 0.0;
        for _ in 0..cases {
            let (a, b, c) = (random_jet(&mut rng, 2, 5, 0), random_jet(&mut rng, 2, 5, 0), random_jet(&mut rng, 2, 5, 0));
            ring = ring
                .max((&(&a * &b) * &c).max_abs_diff(&(&a * &(&b * &c))))
                .max((&a * &(&b + &c)).max_abs_diff(&(&(&a * &b) + &(&a * &c))))
                .max((&a * &b).max_abs_diff(&(&b * &a)));

            let x = random_field(&mut rng, 2, 4)?;
            let (s, t) = (random_c(&mut rng, 0.5), random_c(&mut rng, 0.5));
            let lhs = formal_flow(&x, s + t, 4)?;
            let rhs = formal_flow(&x, s, 4)?.compose(&formal_flow(&x, t, 4)?)?;
            group = group.max(lhs.max_abs_diff(&rhs) / (1.0 + lhs.components().iter().map(Jet::max_abs_coeff).fold(0.0, f64::max)));

            let alpha = Frequency::turns(rng.gen_range(-3..=3), rng.gen_range(1..=4));
            let g = ExpPoly::from_terms((0..3).map(|_| ExpTerm {
                k: rng.gen_range(0..3),
                freq: Frequency::turns(rng.gen_range(-3..=3), rng.gen_range(1..=4)),
                c: random_c(&mut rng, 1.0),
            }));
            let a0 = random_c(&mut rng, 1.0);
            let sol = solve_linear_ode(alpha, &g, a0);
            let res = sol.derivative().sub(&sol.scale(alpha.mu())).sub(&g);
            for k in 0..=4 {
                residual = residual.max(res.eval(C64::new(k as f64 / 4.0, 0.0)).norm());
            }
            residual = residual.max((sol.eval(C64::default()) - a0).norm());
        }
        let fol = Foliation::new(presets::example3(), 2)?;
        let pts: Vec<Vec<C64>> = (0..cases).map(|_| vec![random_c(&mut rng, 0.04), random_c(&mut rng, 0.04)]).collect();
        let cross = series_vs_numeric(&fol, 8, &pts)?;
        Ok((
            ring < 1e-12 && group < 1e-10 && residual < 1e-9 && cross < 1e-6,
            format!(
                "{cases} cases, seed {seed}: ring {ring:.1e}, flow group law {group:.1e}, ODE residual {residual:.1e}, series vs numeric {cross:.1e}"
            ),
        ))
    })
}

fn default_property_sweep() -> CriterionResult {
    property_sweep(20240601, 16)
}

/// Every check, in order.
pub fn run_all() -> Vec<CriterionResult> {
    let checks: Vec<fn() -> CriterionResult> = vec![
        theorem_b_exact,
        theorem_b_oracle,
        example3_normal_form,
        xy_preservation,
        realization_identity,
        linear_model,
        finite_orbits_h,
        infinite_orbit_f,
        pseudogroup_h1h2,
        conservation,
        default_property_sweep,
    ];
    checks.into_iter().map(|f| f()).collect()
}

/// Markdown report with one row per check.
pub fn markdown_report(results: &[CriterionResult], config_json: &str) -> String {
    let mut s = String::from("# holodyn reproduction report\n\n");
    let _ = writeln!(s, "Configuration: `{config_json}`\n");
    s.push_str("| # | check | result | details |\n|---|---|---|---|\n");
    for r in results {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} |",
            r.id,
            r.title,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail.replace('|', "\\|")
        );
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let _ = writeln!(s, "\n{passed}/{} checks passed.", results.len());
    s
}
