use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::json;

use super::load::{load_field, load_map, parse_c, parse_grid, parse_point};
use super::output::{config_json, fmt_c, orbit_csv, orbit_svg, write_file};
use super::{CliError, CliResult, FlowArgs, HolonomyArgs, IntegralArgs, OrbitArgs, PetalArgs, PseudogroupArgs, ReproduceArgs};
use crate::flows::{first_integral_drift, formal_flow, lie_derivative, numeric_flow, Expected, IntegratorOptions};
use crate::holonomy::{extract_normal_form, holonomy_numeric, holonomy_series, Foliation};
use crate::jet::{Jet, JetMap, C64};
use crate::orbit::{
    classify_seed_grid, group_closure, noncommuting_pair, petal_analysis, pseudogroup_orbit, DomainBall,
    EvaluableMap, GridSpec, OrbitOptions, PetalOptions, PseudogroupOptions,
};
use crate::presets::{self, split_call};
use crate::reproduce;

const MAX_ORDER: u32 = 40;

fn check_order(order: u32) -> CliResult<()> {
    if (1..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(CliError::Config(format!("--order must be in 1..={MAX_ORDER}, got {order}")))
    }
}

fn check_positive(v: f64, what: &str) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("--{what} must be positive, got {v}")))
    }
}

fn config_value(s: &str) -> serde_json::Value {
    serde_json::from_str(s).expect("config is valid JSON")
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn coeff_name(n: usize, component: usize, exps: &[u32]) -> String {
    if n == 2 {
        let letter = if component == 0 { 'a' } else { 'b' };
        format!("{letter}{}{}", exps[0], exps[1])
    } else {
        let e: Vec<String> = exps.iter().map(u32::to_string).collect();
        format!("h{}[{}]", component + 1, e.join(","))
    }
}

fn print_jet_map(map: &JetMap, min_degree: u32, label: &str) {
    let n = map.n_vars();
    let mut any = false;
    for (j, comp) in map.components().iter().enumerate() {
        for (idx, c) in comp.terms() {
            if idx.degree() >= min_degree && c.norm() > 1e-12 {
                println!("  {}{label} = {}", coeff_name(n, j, idx.exps()), fmt_c(*c));
                any = true;
            }
        }
    }
    if !any {
        println!("  (none above 1e-12)");
    }
}

pub fn holonomy(a: &HolonomyArgs) -> CliResult<()> {
    check_order(a.order)?;
    check_positive(a.oracle_radius, "oracle-radius")?;
    check_positive(a.tol, "tol")?;
    let field = load_field(&a.field)?;
    let axis = a.axis.unwrap_or(field.n_vars().saturating_sub(1));
    let z0 = parse_c(&a.z0, "z0")?;
    let config = config_json("holonomy", a);
    let fol = Foliation::new(field, axis)?;
    let hs = holonomy_series(&fol, a.order, z0)?;

    println!("field {} on C^{}, axis x{}, order {}, z0 = {}", a.field, fol.n_vars(), axis + 1, a.order, fmt_c(z0));
    println!("monodromy system (t in [0,1]):");
    print!("{}", hs.system);
    println!("linear part of the holonomy:");
    print_jet_map(&hs.map.with_order(1), 1, "(1)");
    println!("nonlinear coefficients at t = 1:");
    print_jet_map(&hs.map, 2, "(1)");
    let normal_form = if fol.transverse_dim() == 2 {
        match extract_normal_form(&hs.map) {
            Ok(nf) => {
                println!("normal form: {nf}");
                Some(nf)
            }
            Err(e) => {
                println!("normal form: not available ({e})");
                None
            }
        }
    } else {
        None
    };

    if let Some(path) = &a.emit {
        let doc = json!({
            "config": config_value(&config),
            "system": hs.system.to_string(),
            "table": hs.table,
            "holonomy": hs.map,
            "normal_form": normal_form,
        });
        write_file(path, &to_json(&doc))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &a.oracle {
        if fol.transverse_dim() != 2 {
            return Err(CliError::Config("--oracle needs two transverse variables".into()));
        }
        let opts = IntegratorOptions::with_tol(a.tol);
        let mut csv = format!("# holodyn holonomy oracle\n# config: {config}\np_re_x,p_im_x,p_re_y,p_im_y,err\n");
        let mut worst: f64 = 0.0;
        for p in reproduce::transverse_grid(a.oracle_radius) {
            let num = holonomy_numeric(&fol, &p, z0, &opts)?;
            let err = num
                .iter()
                .zip(hs.map.eval(&p))
                .map(|(u, v)| (u - v).norm())
                .fold(0.0, f64::max);
            worst = worst.max(err);
            let _ = writeln!(csv, "{},{},{},{},{err:e}", p[0].re, p[0].im, p[1].re, p[1].im);
        }
        write_file(path, &csv)?;
        println!("series vs integration on 25 points, |p| <= {}: max error {worst:.3e}", a.oracle_radius);
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn flow(a: &FlowArgs) -> CliResult<()> {
    check_order(a.order)?;
    check_positive(a.tol, "tol")?;
    let field = load_field(&a.field)?;
    let t = parse_c(&a.time, "time")?;
    let config = config_json("flow", a);
    let jet = formal_flow(&field, t, a.order)?;
    println!("flow of {} at t = {}, order {}:", a.field, fmt_c(t), a.order);
    print_jet_map(&jet, 1, "");
    if let Some(p) = &a.point {
        let p = parse_point(p, "point")?;
        if p.len() != field.n_vars() {
            return Err(CliError::Config(format!("--point needs {} coordinates", field.n_vars())));
        }
        let num = numeric_flow(&field, &p, &[C64::default(), t], &IntegratorOptions::with_tol(a.tol))?;
        let ser = jet.eval(&p);
        for (k, (u, v)) in num.iter().zip(&ser).enumerate() {
            println!("  x{}: numeric {}  jet {}  |diff| {:.3e}", k + 1, fmt_c(*u), fmt_c(*v), (u - v).norm());
        }
    }
    if let Some(path) = &a.emit {
        write_file(path, &to_json(&json!({ "config": config_value(&config), "flow": jet })))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn level_circle_grid(map: &EvaluableMap, a: &OrbitArgs, ball: DomainBall) -> CliResult<GridSpec> {
    let EvaluableMap::ProductPreserving { a: 1, b: 1, f } = map else {
        return Err(CliError::Config("--level-circle needs an F-type map (product with a = b = 1)".into()));
    };
    if f.len() > 1 || f.constant_term() == C64::default() {
        return Err(CliError::Config("--level-circle needs a nonzero constant f".into()));
    }
    if a.level_seeds == 0 {
        return Err(CliError::Config("--level-seeds must be positive".into()));
    }
    let theta = a.theta.unwrap_or_else(reproduce::contrast_rotation_turns);
    let c = reproduce::level_for_rotation(f.constant_term(), theta);
    let seeds = reproduce::level_circle_seeds(c, a.level_seeds);
    if !seeds.iter().all(|p| ball.contains(p)) {
        return Err(CliError::Config(format!(
            "level circle |x| = |y| = {:.4} does not fit in the ball; raise --radius",
            c.norm().sqrt()
        )));
    }
    println!("level circle: xy = C = {}, rotation {theta} turns", fmt_c(c));
    Ok(GridSpec::Explicit(seeds))
}

pub fn orbit(a: &OrbitArgs) -> CliResult<()> {
    check_positive(a.radius, "radius")?;
    if a.budget == 0 {
        return Err(CliError::Config("--budget must be positive".into()));
    }
    let ball = DomainBall::new(a.radius)?;
    let map = load_map(&a.map)?;
    if a.projection >= map.dim() {
        return Err(CliError::Config(format!("--projection must be below {}", map.dim())));
    }
    let config = config_json("orbit", a);
    let grid = if a.level_circle {
        level_circle_grid(&map, a, ball)?
    } else if let Some(count) = a.random_seeds {
        GridSpec::Random {
            count,
            seed: a.seed,
            r_min: a.r_min,
            r_max: a.r_max,
        }
    } else {
        let (n1, n2) = parse_grid(&a.grid)?;
        GridSpec::Lattice {
            n1,
            n2,
            r_min: a.r_min,
            r_max: a.r_max,
        }
    };
    let summary = classify_seed_grid(&map, ball, &grid, &OrbitOptions::with_budget(a.budget))?;
    println!(
        "map {} on the polydisc of radius {}, budget {} per direction: {} seeds",
        a.map,
        a.radius,
        a.budget,
        summary.total()
    );
    println!("  escaped            {}", summary.escaped);
    println!("  periodic           {}", summary.periodic);
    println!("  infinite-suspected {}", summary.exhausted);
    if let Some(mu) = summary.records.iter().filter_map(|r| r.mu).max() {
        println!("  largest finite mu  {mu}");
    }
    println!("(verdicts hold for this radius and budget only)");
    if let Some(path) = &a.csv {
        write_file(path, &orbit_csv(&summary.records, &config))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &a.svg {
        write_file(path, &orbit_svg(&summary.records, a.projection, a.radius, &config))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn pseudogroup(a: &PseudogroupArgs) -> CliResult<()> {
    check_positive(a.radius, "radius")?;
    if a.seeds == 0 || a.word_budget == 0 || a.point_budget == 0 {
        return Err(CliError::Config("--seeds, --word-budget and --point-budget must be positive".into()));
    }
    let gens = presets::pseudogroup_by_name(&a.preset)?;
    let ball = DomainBall::new(a.radius)?;
    let config = config_json("pseudogroup", a);
    let closure = group_closure(&gens, 100_000)?;
    let pair = noncommuting_pair(&closure.elements);
    let n1 = (a.seeds as f64).sqrt().ceil() as usize;
    let n2 = a.seeds.div_ceil(n1);
    let mut seeds = GridSpec::lattice(n1, n2).seeds(gens[0].dim(), ball)?;
    seeds.truncate(a.seeds);
    let opts = PseudogroupOptions {
        word_budget: a.word_budget,
        point_budget: a.point_budget,
        ..Default::default()
    };
    let orbits = seeds
        .par_iter()
        .map(|p| pseudogroup_orbit(&gens, p, ball, &opts))
        .collect::<crate::Result<Vec<_>>>()?;

    match closure.order {
        Some(k) => println!("group closure order {k}"),
        None => println!("group closure exceeded its budget"),
    }
    match pair {
        Some((i, j)) => println!("non-commuting pair: elements #{i} and #{j}"),
        None => println!("all closure elements commute"),
    }
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for o in &orbits {
        *hist.entry(o.cardinality()).or_default() += 1;
    }
    println!("{} seeds, orbit cardinalities:", orbits.len());
    for (card, count) in &hist {
        let divides = closure.order.map(|k| k % card == 0);
        println!("  {card:>5}: {count} seeds{}", match divides {
            Some(true) => "",
            Some(false) => " (does not divide the group order)",
            None => "",
        });
    }
    let truncated = orbits.iter().filter(|o| o.truncated).count();
    if truncated > 0 {
        println!("{truncated} searches hit a budget");
    }
    if let Some(path) = &a.json {
        let items: Vec<_> = seeds
            .iter()
            .zip(&orbits)
            .map(|(s, o)| {
                let words: Vec<String> = o
                    .words
                    .iter()
                    .map(|w| w.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "))
                    .collect();
                json!({ "seed": s, "cardinality": o.cardinality(), "truncated": o.truncated, "points": o.points, "words": words })
            })
            .collect();
        let doc = json!({
            "config": config_value(&config),
            "closure_order": closure.order,
            "noncommuting_pair": pair,
            "orbits": items,
        });
        write_file(path, &to_json(&doc))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn petal(a: &PetalArgs) -> CliResult<()> {
    let c = parse_c(&a.c, "c")?;
    let config = config_json("petal", a);
    let opts = PetalOptions {
        iterations: a.iterations,
        ..Default::default()
    };
    let rep = petal_analysis(a.d, c, &opts)?;
    let fmt_angles = |v: &[f64]| v.iter().map(|t| format!("{t:.6}")).collect::<Vec<_>>().join(", ");
    println!("x -> x + ({}) x^{}", fmt_c(c), a.d + 1);
    println!("  attracting directions ({}): {}", rep.attracting.len(), fmt_angles(&rep.attracting));
    println!("  repelling directions  ({}): {}", rep.repelling.len(), fmt_angles(&rep.repelling));
    for r in &rep.runs {
        println!(
            "  seed arg {:.6}: after {} steps |x| = {:.3e}, arg error {:.3e}, converged {}",
            r.seed.arg(),
            r.iterations,
            r.final_point.norm(),
            r.arg_error,
            r.converged_to_zero
        );
    }
    if let Some(path) = &a.json {
        write_file(path, &to_json(&json!({ "config": config_value(&config), "report": rep })))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn default_exponents(field_spec: &str) -> Option<Vec<u32>> {
    let (name, args) = split_call(field_spec.trim()).ok()?;
    if name != "example1" || args.len() != 4 {
        return None;
    }
    Some(vec![args[0].parse().ok()?, args[1].parse().ok()?])
}

pub fn verify_integral(a: &IntegralArgs) -> CliResult<()> {
    check_positive(a.tol, "tol")?;
    check_positive(a.max_drift, "max-drift")?;
    if !(a.time.is_finite() && a.time != 0.0) {
        return Err(CliError::Config("--time must be finite and nonzero".into()));
    }
    let field = load_field(&a.field)?;
    let n = field.n_vars();
    let exps: Vec<u32> = match &a.exponents {
        Some(s) => s
            .split(',')
            .map(|v| v.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Config(format!("--exponents expects integers, got '{s}'")))?,
        None => default_exponents(&a.field)
            .ok_or_else(|| CliError::Config("--exponents is required for this field".into()))?,
    };
    if exps.len() != n {
        return Err(CliError::Config(format!("--exponents needs {n} entries")));
    }
    let p = match &a.point {
        Some(s) => parse_point(s, "point")?,
        None if n == 2 => vec![C64::new(0.4, 0.1), C64::new(0.3, -0.2)],
        None => vec![C64::new(0.1, 0.05); n],
    };
    if p.len() != n {
        return Err(CliError::Config(format!("--point needs {n} coordinates")));
    }
    let degree: u32 = exps.iter().sum();
    let g = Jet::monomial(n, degree + field.order(), &exps, C64::new(1.0, 0.0));
    let lie = lie_derivative(&field, &g)?;
    let drift = first_integral_drift(&field, &g, &p, a.time, Expected::Constant, &IntegratorOptions::with_tol(a.tol))?;
    println!("g = x^{exps:?} along {}", a.field);
    println!("  Lie derivative: {}", if lie.is_zero() { "0 (exact)".to_string() } else { format!("nonzero, max |coeff| {:.3e}", lie.max_abs_coeff()) });
    println!("  max |g(x(t)) - g(x0)| over t in [0, {}]: {drift:.3e}", a.time);
    if !lie.is_zero() {
        return Err(CliError::Assertion("the Lie derivative does not vanish".into()));
    }
    if drift > a.max_drift {
        return Err(CliError::Assertion(format!("drift {drift:.3e} exceeds {:.1e}", a.max_drift)));
    }
    Ok(())
}

pub fn reproduce(a: &ReproduceArgs) -> CliResult<()> {
    let config = config_json("reproduce-paper", a);
    let results = reproduce::run_all();
    for r in &results {
        println!("[{}] {:>2} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.title, r.detail);
    }
    write_file(&a.out, &reproduce::markdown_report(&results, &config))?;
    println!("wrote {}", a.out.display());
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Assertion(format!("{failed} of {} checks failed", results.len())));
    }
    Ok(())
}
