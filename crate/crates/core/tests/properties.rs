use std::collections::BTreeMap;
use std::f64::consts::PI;

use proptest::prelude::*;

use holodyn::exppoly::ExpTerm;
use holodyn::flows::{IntegratorOptions, VectorField};
use holodyn::holonomy::{holonomy_numeric, holonomy_series, Foliation};
use holodyn::orbit::{
    iterate_orbit, pseudogroup_orbit, DomainBall, EvaluableMap, OrbitOptions, OrbitStatus, PseudogroupOptions,
};
use holodyn::presets::{self, two_pi_i};
use holodyn::{formal_flow, lie_derivative, numeric_flow, solve_linear_ode, ExpPoly, Frequency, Jet, JetMap, C64};

const ORDER: u32 = 4;

fn cplx(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

/// Dense-ish jet on C² with coefficients in the unit square.
fn jet2(min_degree: u32) -> impl Strategy<Value = Jet> {
    let idx: Vec<(u32, u32)> = (min_degree..=ORDER)
        .flat_map(|d| (0..=d).map(move |i| (i, d - i)))
        .collect();
    let n = idx.len();
    prop::collection::vec(prop::option::weighted(0.7, cplx(1.0)), n).prop_map(move |cs| {
        Jet::from_terms(
            2,
            ORDER,
            idx.iter()
                .zip(cs)
                .filter_map(|(&(i, j), c)| c.map(|c| (vec![i, j], c))),
        )
    })
}

/// Map fixing 0 with linear part close to the identity.
fn germ2() -> impl Strategy<Value = JetMap> {
    (jet2(2), jet2(2), cplx(0.3), cplx(0.3)).prop_map(|(a, b, s, t)| {
        let x = Jet::var(2, ORDER, 0);
        let y = Jet::var(2, ORDER, 1);
        JetMap::new(vec![&(&x + &y.scale(s)) + &a, &(&y + &x.scale(t)) + &b]).unwrap()
    })
}

/// Diagonal linear part plus small nonlinear terms.
fn field2() -> impl Strategy<Value = VectorField> {
    (cplx(1.0), cplx(1.0), jet2(2), jet2(2)).prop_map(|(l1, l2, a, b)| {
        let x = Jet::var(2, ORDER, 0);
        let y = Jet::var(2, ORDER, 1);
        VectorField::new(vec![&x.scale(l1) + &a.scale(C64::new(0.3, 0.0)), &y.scale(l2) + &b.scale(C64::new(0.3, 0.0))])
            .unwrap()
    })
}

/// Schoolbook product on dense exponent tables, truncated at `ORDER`.
fn dense_product(a: &Jet, b: &Jet) -> BTreeMap<(u32, u32), C64> {
    let mut out = BTreeMap::new();
    for (ia, ca) in a.terms() {
        for (ib, cb) in b.terms() {
            let (i, j) = (ia.get(0) + ib.get(0), ia.get(1) + ib.get(1));
            if i + j <= ORDER {
                *out.entry((i, j)).or_insert(C64::default()) += ca * cb;
            }
        }
    }
    out
}

fn frequency() -> impl Strategy<Value = Frequency> {
    (-4i64..=4, 1i64..=5).prop_map(|(p, q)| Frequency::turns(p, q))
}

fn exppoly() -> impl Strategy<Value = ExpPoly> {
    prop::collection::vec((0u32..3, frequency(), cplx(1.0)), 0..4)
        .prop_map(|ts| ExpPoly::from_terms(ts.into_iter().map(|(k, freq, c)| ExpTerm { k, freq, c })))
}

fn h1_swap() -> Vec<EvaluableMap> {
    presets::pseudogroup_by_name("schur24").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed), ..ProptestConfig::default() })]

    #[test]
    fn ring_laws(a in jet2(0), b in jet2(0), c in jet2(0)) {
        prop_assert!((&(&a * &b) * &c).max_abs_diff(&(&a * &(&b * &c))) < 1e-12);
        prop_assert!((&a * &b).max_abs_diff(&(&b * &a)) < 1e-12);
        prop_assert!((&a * &(&b + &c)).max_abs_diff(&(&(&a * &b) + &(&a * &c))) < 1e-12);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn product_matches_dense_oracle(a in jet2(0), b in jet2(0)) {
        let p = &a * &b;
        let dense = dense_product(&a, &b);
        for ((i, j), c) in &dense {
            prop_assert!((p.coeff(&[*i, *j]) - c).norm() < 1e-12);
        }
        for (idx, c) in p.terms() {
            let want = dense.get(&(idx.get(0), idx.get(1))).copied().unwrap_or_default();
            prop_assert!((c - want).norm() < 1e-12);
        }
    }

    #[test]
    fn reciprocal_inverts(a in jet2(1), c0 in cplx(1.0)) {
        prop_assume!(c0.norm() > 0.2);
        let f = &Jet::constant(2, ORDER, c0) + &a;
        let g = f.reciprocal().unwrap();
        let scale = g.max_abs_coeff().max(1.0);
        prop_assert!((&f * &g).max_abs_diff(&Jet::one(2, ORDER)) < 1e-11 * scale);
    }

    #[test]
    fn evaluation_is_multiplicative_up_to_truncation(a in jet2(0), b in jet2(0), p in (cplx(1e-3), cplx(1e-3))) {
        let pt = [p.0, p.1];
        let lhs = (&a * &b).eval(&pt);
        let rhs = a.eval(&pt) * b.eval(&pt);
        // dropped terms have degree > ORDER
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn composition_is_associative(f in germ2(), g in germ2(), h in germ2()) {
        let lhs = f.compose(&g).unwrap().compose(&h).unwrap();
        let rhs = f.compose(&g.compose(&h).unwrap()).unwrap();
        let scale = lhs.components().iter().map(Jet::max_abs_coeff).fold(1.0, f64::max);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-11 * scale);
    }

    #[test]
    fn inverse_is_two_sided(f in germ2()) {
        let g = f.inverse().unwrap();
        let id = JetMap::identity(2, ORDER);
        let scale = g.components().iter().map(Jet::max_abs_coeff).fold(1.0, f64::max);
        prop_assert!(f.compose(&g).unwrap().max_abs_diff(&id) < 1e-10 * scale);
        prop_assert!(g.compose(&f).unwrap().max_abs_diff(&id) < 1e-10 * scale);
    }

    #[test]
    fn jet_json_round_trip(a in jet2(0)) {
        let s = serde_json::to_string(&a).unwrap();
        let back: Jet = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn linear_ode_residual_vanishes(alpha in frequency(), g in exppoly(), a0 in cplx(1.0), t in 0.0..2.0f64) {
        let a = solve_linear_ode(alpha, &g, a0);
        let res = a.derivative().sub(&a.scale(alpha.mu())).sub(&g);
        let scale = a.max_abs_coeff().max(1.0);
        prop_assert!(res.eval(C64::new(t, 0.0)).norm() < 1e-10 * scale);
        prop_assert!((a.eval(C64::default()) - a0).norm() < 1e-12 * scale);
    }

    #[test]
    fn flow_group_law(x in field2(), s in cplx(0.5), t in cplx(0.5)) {
        let lhs = formal_flow(&x, s + t, ORDER).unwrap();
        let rhs = formal_flow(&x, s, ORDER).unwrap().compose(&formal_flow(&x, t, ORDER).unwrap()).unwrap();
        let scale = lhs.components().iter().map(Jet::max_abs_coeff).fold(1.0, f64::max);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * scale);
    }

    #[test]
    fn formal_flow_matches_integration(x in field2(), p in (cplx(1e-3), cplx(1e-3))) {
        let pt = [p.0, p.1];
        let t = C64::new(0.5, 0.0);
        let jet = formal_flow(&x, t, 8).unwrap();
        let num = numeric_flow(&x, &pt, &[C64::default(), t], &IntegratorOptions::with_tol(1e-13)).unwrap();
        for (u, v) in jet.eval(&pt).iter().zip(&num) {
            prop_assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn series_matches_integration_near_zero(p in (cplx(0.03), cplx(0.03))) {
        let fol = Foliation::new(presets::example3(), 2).unwrap();
        let map = holonomy_series(&fol, 8, C64::new(1.0, 0.0)).unwrap().map;
        let pt = [p.0, p.1];
        let num = holonomy_numeric(&fol, &pt, C64::new(1.0, 0.0), &IntegratorOptions::with_tol(1e-12)).unwrap();
        for (u, v) in map.eval(&pt).iter().zip(&num) {
            prop_assert!((u - v).norm() < 1e-9);
        }
    }

    #[test]
    fn xy_preserving_generators_have_xy_as_integral(a in 1u32..4, b in 1u32..4, k in cplx(3.0)) {
        let x = presets::xy_preserving_generator(a, b, k);
        let xy = Jet::monomial(2, a + b + 3, &[1, 1], C64::new(1.0, 0.0));
        prop_assert!(lie_derivative(&x, &xy).unwrap().is_zero());
    }

    #[test]
    fn product_maps_keep_xy_per_step(p in (cplx(0.3), cplx(0.3))) {
        let h = presets::h_map(two_pi_i());
        let mut cur = vec![p.0, p.1];
        let w0 = cur[0] * cur[1];
        for _ in 0..200 {
            let next = h.apply(&cur).unwrap();
            if !next.iter().all(|v| v.norm() < 1e3) { break; }
            let before = cur[0] * cur[1];
            let after = next[0] * next[1];
            prop_assert!((after - before).norm() <= 1e-12 * before.norm().max(1e-300));
            cur = next;
        }
        prop_assert!((cur[0] * cur[1] - w0).norm() <= 1e-10 * w0.norm().max(1e-300));
    }

    #[test]
    fn escape_is_stable_under_larger_budget(p in (cplx(0.2), cplx(0.2))) {
        let h = presets::h_map(two_pi_i());
        let ball = DomainBall::new(0.3).unwrap();
        let small = iterate_orbit(&h, &[p.0, p.1], ball, &OrbitOptions::with_budget(2_000)).unwrap();
        let large = iterate_orbit(&h, &[p.0, p.1], ball, &OrbitOptions::with_budget(20_000)).unwrap();
        if small.status == OrbitStatus::Escaped {
            prop_assert_eq!(large.status, OrbitStatus::Escaped);
            prop_assert_eq!(large.mu, small.mu);
        }
        if large.status == OrbitStatus::BudgetExhausted {
            prop_assert_eq!(small.status, OrbitStatus::BudgetExhausted);
        }
    }

    #[test]
    fn periods_divide_later_returns(k in 1u32..12, p in cplx(0.5)) {
        let h = EvaluableMap::diagonal(&[C64::from_polar(1.0, 2.0 * PI / k as f64)]);
        let r = iterate_orbit(&h, &[p], DomainBall::new(1.0).unwrap(), &OrbitOptions::default()).unwrap();
        if p.norm() > 1e-6 {
            prop_assert_eq!(r.status, OrbitStatus::Periodic(k as u64));
            prop_assert_eq!(r.cardinality, k as usize);
        }
    }

    #[test]
    fn orbit_sizes_divide_group_order(p in (cplx(0.2), cplx(0.2))) {
        let o = pseudogroup_orbit(&h1_swap(), &[p.0, p.1], DomainBall::new(0.3).unwrap(), &PseudogroupOptions::default()).unwrap();
        prop_assert!(!o.truncated);
        prop_assert_eq!(24 % o.cardinality(), 0);
    }

    #[test]
    fn single_generator_pseudogroup_equals_iteration(p in (cplx(0.1), cplx(0.1)), s in 1.05..1.6f64) {
        let h = EvaluableMap::diagonal(&[C64::new(s, 0.0), C64::new(1.0 / s, 0.0)]);
        let ball = DomainBall::new(0.3).unwrap();
        let pt = [p.0, p.1];
        let r = iterate_orbit(&h, &pt, ball, &OrbitOptions::default()).unwrap();
        let opts = PseudogroupOptions { word_budget: 10_000, ..Default::default() };
        let o = pseudogroup_orbit(std::slice::from_ref(&h), &pt, ball, &opts).unwrap();
        prop_assert_eq!(r.status, OrbitStatus::Escaped);
        prop_assert_eq!(o.cardinality(), r.cardinality);
        for q in r.forward.iter().chain(&r.backward) {
            prop_assert!(o.points.iter().any(|x| x == q));
        }
    }
}

#[test]
fn origin_is_a_fixed_orbit_of_every_preset() {
    let ball = DomainBall::new(0.3).unwrap();
    for name in ["H", "F", "h1", "swap", "phiX", "parabolic(2,1)", "diag(2,0.5)"] {
        let h = presets::map_by_name(name).unwrap();
        let zero = vec![C64::default(); h.dim()];
        let r = iterate_orbit(&h, &zero, ball, &OrbitOptions::with_budget(10)).unwrap();
        assert_eq!(r.status, OrbitStatus::Periodic(1), "{name}");
        assert_eq!(r.cardinality, 1, "{name}");
    }
}
