//! Named vector fields and maps used throughout the examples and the CLI.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::flows::VectorField;
use crate::jet::{Jet, C64};
use crate::orbit::EvaluableMap;

pub fn two_pi_i() -> C64 {
    C64::new(0.0, 2.0 * PI)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `x(1 + x^p y z^q) ∂x + y(1 − x^p y z^q) ∂y − z ∂z` on `C³` (axis = z).
fn siegel_triple(p: u32, q: u32) -> VectorField {
    let order = p + q + 2;
    let x = Jet::from_terms(3, order, [(vec![1, 0, 0], re(1.0)), (vec![p + 1, 1, q], re(1.0))]);
    let y = Jet::from_terms(3, order, [(vec![0, 1, 0], re(1.0)), (vec![p, 2, q], re(-1.0))]);
    let z = Jet::monomial(3, order, &[0, 0, 1], re(-1.0));
    VectorField::new(vec![x, y, z]).expect("preset field is valid")
}

/// `x(1 + x²yz³) ∂/∂x + y(1 − x²yz³) ∂/∂y − z ∂/∂z`.
pub fn thm_b() -> VectorField {
    siegel_triple(2, 3)
}

/// `x(1 + xyz²) ∂/∂x + y(1 − xyz²) ∂/∂y − z ∂/∂z`.
pub fn example3() -> VectorField {
    siegel_triple(1, 2)
}

/// `x^a y^b (x ∂/∂x − (n/m) y ∂/∂y)`, which has first integral `xⁿ yᵐ`.
pub fn example1(n: u32, m: u32, a: u32, b: u32) -> VectorField {
    let order = a + b + 1;
    let lam = n as f64 / m as f64;
    let x = Jet::monomial(2, order, &[a + 1, b], re(1.0));
    let y = Jet::monomial(2, order, &[a, b + 1], re(-lam));
    VectorField::new(vec![x, y]).expect("preset field is valid")
}

/// `κ·x^a y^b (x ∂/∂x − y ∂/∂y)`; its flow preserves `xy`.
pub fn xy_preserving_generator(a: u32, b: u32, kappa: C64) -> VectorField {
    let order = a + b + 1;
    let x = Jet::monomial(2, order, &[a + 1, b], kappa);
    let y = Jet::monomial(2, order, &[a, b + 1], -kappa);
    VectorField::new(vec![x, y]).expect("preset field is valid")
}

/// Generator whose time-one map is `F`-shaped: `(x e^{κxy}, y e^{−κxy})`.
pub fn gen_f(kappa: C64) -> VectorField {
    xy_preserving_generator(1, 1, kappa)
}

/// Generator whose time-one map is `H`-shaped, `x ↦ x/(1 − κx²y)`, i.e.
/// `x(1 + x²y f(x²y))` with `f(w) = κ/(1 − κw)`.
pub fn gen_h(kappa: C64) -> VectorField {
    xy_preserving_generator(2, 1, kappa)
}

/// `2πi(x ∂/∂x − y ∂/∂y)`, whose time-one map is the identity.
pub fn rotation_generator() -> VectorField {
    VectorField::linear(&[two_pi_i(), -two_pi_i()])
}

/// Names accepted by [`field_by_name`].
pub const FIELD_NAMES: &[&str] = &[
    "thmB",
    "example3",
    "example1(n,m,a,b)",
    "linear(λ1,…,λn)",
    "genF[(κ)]",
    "genH[(κ)]",
    "rotation",
];

/// Parses a preset name such as `thmB`, `example1(2,3,1,2)` or `linear(1,-1,-2)`.
pub fn field_by_name(spec: &str) -> Result<VectorField> {
    let spec = spec.trim();
    let (name, args) = split_call(spec)?;
    let nums = |n: usize| -> Result<Vec<C64>> {
        let v = args
            .iter()
            .map(|a| parse_complex(a))
            .collect::<Result<Vec<_>>>()?;
        if n != 0 && v.len() != n {
            return Err(Error::Invalid(format!("{name} expects {n} arguments, got {}", v.len())));
        }
        Ok(v)
    };
    let kappa = || -> Result<C64> {
        match args.len() {
            0 => Ok(two_pi_i()),
            1 => parse_complex(&args[0]),
            k => Err(Error::Invalid(format!("{name} expects at most 1 argument, got {k}"))),
        }
    };
    match name {
        "thmB" | "thmb" => no_args(name, &args).map(|_| thm_b()),
        "example3" => no_args(name, &args).map(|_| example3()),
        "rotation" => no_args(name, &args).map(|_| rotation_generator()),
        "example1" => {
            let v = nums(4)?;
            let ints = v
                .iter()
                .map(|c| {
                    if c.im == 0.0 && c.re >= 1.0 && c.re.fract() == 0.0 {
                        Ok(c.re as u32)
                    } else {
                        Err(Error::Invalid("example1 takes positive integers n,m,a,b".into()))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(example1(ints[0], ints[1], ints[2], ints[3]))
        }
        "linear" => {
            let v = nums(0)?;
            if v.is_empty() {
                return Err(Error::Invalid("linear needs at least one eigenvalue".into()));
            }
            Ok(VectorField::linear(&v))
        }
        "genF" => Ok(gen_f(kappa()?)),
        "genH" => Ok(gen_h(kappa()?)),
        _ => Err(Error::Invalid(format!(
            "unknown field preset '{name}'; available: {}",
            FIELD_NAMES.join(", ")
        ))),
    }
}

/// `(x, y) ↦ (x(1 + w f(w)), y(1 + w f(w))⁻¹)` with `w = x^a y^b` and constant `f ≡ κ`.
pub fn product_map(a: u32, b: u32, kappa: C64) -> EvaluableMap {
    EvaluableMap::product_preserving(a, b, Jet::constant(1, 0, kappa)).expect("exponents are positive")
}

/// `x(1 + xy f(xy))` form with `f ≡ κ`.
pub fn f_map(kappa: C64) -> EvaluableMap {
    product_map(1, 1, kappa)
}

/// `x(1 + x²y f(x²y))` form with `f ≡ κ`.
pub fn h_map(kappa: C64) -> EvaluableMap {
    product_map(2, 1, kappa)
}

/// `diag(e^{πi/3}, e^{2πi/3})`.
pub fn h1() -> EvaluableMap {
    EvaluableMap::diagonal(&[C64::from_polar(1.0, PI / 3.0), C64::from_polar(1.0, 2.0 * PI / 3.0)])
}

/// `(x, y) ↦ (y, x)`.
pub fn swap() -> EvaluableMap {
    EvaluableMap::permutation(vec![1, 0])
}

/// Time-one map of `xy(x∂x − y∂y)`.
pub fn phi_x() -> EvaluableMap {
    EvaluableMap::time_one(example1(1, 1, 1, 1), TIME_ONE_TOL)
}

/// Integration tolerance of time-one map presets.
pub const TIME_ONE_TOL: f64 = 1e-12;

/// Names accepted by [`map_by_name`].
pub const MAP_NAMES: &[&str] = &[
    "H[(κ)]",
    "F[(κ)]",
    "product(a,b,κ)",
    "h1",
    "h2",
    "swap",
    "phiX",
    "parabolic(d,c)",
    "diag(λ1,…,λn)",
    "timeone(<field preset>)",
];

/// Names accepted by [`pseudogroup_by_name`].
pub const PSEUDOGROUP_NAMES: &[&str] = &["schur24", "h1h2"];

/// Parses a map preset such as `H`, `F(1+2i)`, `parabolic(2,1)` or `timeone(genH)`.
pub fn map_by_name(spec: &str) -> Result<EvaluableMap> {
    let spec = spec.trim();
    if let Some(inner) = spec.strip_prefix("timeone(").and_then(|s| s.strip_suffix(')')) {
        return Ok(EvaluableMap::time_one(field_by_name(inner)?, TIME_ONE_TOL));
    }
    let (name, args) = split_call(spec)?;
    let nums = args.iter().map(|a| parse_complex(a)).collect::<Result<Vec<_>>>()?;
    let count = |n: usize| -> Result<()> {
        if nums.len() == n {
            Ok(())
        } else {
            Err(Error::Invalid(format!("{name} expects {n} arguments, got {}", nums.len())))
        }
    };
    let kappa = || -> Result<C64> {
        match nums.len() {
            0 => Ok(two_pi_i()),
            1 => Ok(nums[0]),
            k => Err(Error::Invalid(format!("{name} expects at most 1 argument, got {k}"))),
        }
    };
    let positive_int = |c: C64| -> Result<u32> {
        if c.im == 0.0 && c.re >= 1.0 && c.re.fract() == 0.0 {
            Ok(c.re as u32)
        } else {
            Err(Error::Invalid(format!("{name} expects a positive integer, got {c}")))
        }
    };
    match name {
        "H" => Ok(h_map(kappa()?)),
        "F" => Ok(f_map(kappa()?)),
        "product" => {
            count(3)?;
            Ok(product_map(positive_int(nums[0])?, positive_int(nums[1])?, nums[2]))
        }
        "h1" => no_args(name, &args).map(|_| h1()),
        "h2" | "swap" => no_args(name, &args).map(|_| swap()),
        "phiX" => no_args(name, &args).map(|_| phi_x()),
        "parabolic" => {
            count(2)?;
            if nums[1] == C64::default() {
                return Err(Error::Invalid("parabolic coefficient must be nonzero".into()));
            }
            Ok(EvaluableMap::OneVarParabolic {
                d: positive_int(nums[0])?,
                c: nums[1],
            })
        }
        "diag" => {
            if nums.is_empty() {
                return Err(Error::Invalid("diag needs at least one entry".into()));
            }
            Ok(EvaluableMap::diagonal(&nums))
        }
        _ => Err(Error::Invalid(format!(
            "unknown map preset '{name}'; available: {}",
            MAP_NAMES.join(", ")
        ))),
    }
}

/// Generator lists for pseudogroup experiments.
pub fn pseudogroup_by_name(spec: &str) -> Result<Vec<EvaluableMap>> {
    match spec.trim() {
        "schur24" | "h1h2" => Ok(vec![h1(), swap()]),
        other => Err(Error::Invalid(format!(
            "unknown pseudogroup preset '{other}'; available: {}",
            PSEUDOGROUP_NAMES.join(", ")
        ))),
    }
}

fn no_args(name: &str, args: &[String]) -> Result<()> {
    if args.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{name} takes no arguments")))
    }
}

/// Splits `name(a,b,c)` into its name and argument strings.
pub(crate) fn split_call(spec: &str) -> Result<(&str, Vec<String>)> {
    match spec.find('(') {
        None => Ok((spec, Vec::new())),
        Some(i) => {
            let inner = spec[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Invalid(format!("missing ')' in '{spec}'")))?;
            let args = inner
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            Ok((&spec[..i], args))
        }
    }
}

/// Parses `1.5`, `-2`, `3i`, `-i`, `1+2i`, `0.5-0.25i`, and `2pi i`-free forms.
pub fn parse_complex(s: &str) -> Result<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Invalid(format!("cannot parse complex number '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some(body) = s.strip_suffix('i') {
        // split at the last sign that is not at the start or after an exponent marker
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let im = match im_part {
            "" | "+" => 1.0,
            "-" => -1.0,
            t => t.parse::<f64>().map_err(|_| bad())?,
        };
        let re = if re_part.is_empty() {
            0.0
        } else {
            re_part.parse::<f64>().map_err(|_| bad())?
        };
        Ok(C64::new(re, im))
    } else {
        s.parse::<f64>().map(|v| C64::new(v, 0.0)).map_err(|_| bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5").unwrap(), C64::new(1.5, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(parse_complex("0.5-0.25i").unwrap(), C64::new(0.5, -0.25));
        assert_eq!(parse_complex("1e-3-2e-1i").unwrap(), C64::new(1e-3, -0.2));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn thm_b_matches_display() {
        let f = thm_b();
        assert_eq!(f.n_vars(), 3);
        assert_eq!(f.component(0).coeff(&[3, 1, 3]), re(1.0));
        assert_eq!(f.component(0).coeff(&[1, 0, 0]), re(1.0));
        assert_eq!(f.component(1).coeff(&[2, 2, 3]), re(-1.0));
        assert_eq!(f.component(2).coeff(&[0, 0, 1]), re(-1.0));
        assert_eq!(f.component(2).len(), 1);
        assert_eq!(f.eigenvalues().unwrap(), &[re(1.0), re(1.0), re(-1.0)]);
    }

    #[test]
    fn example3_matches_display() {
        let f = example3();
        assert_eq!(f.component(0).coeff(&[2, 1, 2]), re(1.0));
        assert_eq!(f.component(1).coeff(&[1, 2, 2]), re(-1.0));
    }

    #[test]
    fn names_resolve() {
        assert_eq!(field_by_name("thmB").unwrap(), thm_b());
        assert_eq!(field_by_name("example1(2,3,1,2)").unwrap(), example1(2, 3, 1, 2));
        let lin = field_by_name("linear(2,-1,-3)").unwrap();
        assert_eq!(lin.eigenvalues().unwrap(), &[re(2.0), re(-1.0), re(-3.0)]);
        let err = field_by_name("nope").unwrap_err().to_string();
        assert!(err.contains("available"));
        assert!(field_by_name("example1(1,2)").is_err());
    }

    #[test]
    fn map_names_resolve() {
        assert!(matches!(map_by_name("H").unwrap(), EvaluableMap::ProductPreserving { a: 2, b: 1, .. }));
        assert!(matches!(map_by_name("F(1+i)").unwrap(), EvaluableMap::ProductPreserving { a: 1, b: 1, .. }));
        assert!(matches!(map_by_name("parabolic(2,1)").unwrap(), EvaluableMap::OneVarParabolic { d: 2, .. }));
        assert!(matches!(map_by_name("timeone(genH)").unwrap(), EvaluableMap::TimeOne { .. }));
        assert_eq!(pseudogroup_by_name("schur24").unwrap().len(), 2);
        assert!(map_by_name("G").unwrap_err().to_string().contains("available"));
        assert!(map_by_name("parabolic(0,1)").is_err());
    }
}
