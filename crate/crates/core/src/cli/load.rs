use std::path::Path;

use serde::Deserialize;

use super::{CliError, CliResult};
use crate::flows::VectorField;
use crate::jet::{Jet, JetMap, C64};
use crate::orbit::EvaluableMap;
use crate::presets::{self, parse_complex};

fn looks_like_file(spec: &str) -> bool {
    spec.ends_with(".json") || Path::new(spec).is_file()
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{path}: {e}")))
}

/// A preset name or the path of a JSON file holding a serialized field.
pub fn load_field(spec: &str) -> CliResult<VectorField> {
    if looks_like_file(spec) {
        read_json(spec)
    } else {
        Ok(presets::field_by_name(spec)?)
    }
}

/// JSON description of a map, tagged by `kind`.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MapFile {
    /// Rows of `[re, im]` entries.
    Linear { matrix: Vec<Vec<[f64; 2]>> },
    Permutation { perm: Vec<usize> },
    Product { a: u32, b: u32, f: Jet },
    Parabolic { d: u32, c: [f64; 2] },
    TimeOne { field: VectorField, tol: Option<f64> },
    Jet { map: JetMap },
}

fn build_map(m: MapFile) -> CliResult<EvaluableMap> {
    Ok(match m {
        MapFile::Linear { matrix } => {
            let n = matrix.len();
            if n == 0 || matrix.iter().any(|r| r.len() != n) {
                return Err(CliError::Config("linear map needs a square, non-empty matrix".into()));
            }
            EvaluableMap::linear(nalgebra::DMatrix::from_fn(n, n, |i, j| {
                C64::new(matrix[i][j][0], matrix[i][j][1])
            }))
        }
        MapFile::Permutation { perm } => {
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted.iter().enumerate().any(|(i, &p)| i != p) {
                return Err(CliError::Config(format!("{perm:?} is not a permutation")));
            }
            EvaluableMap::permutation(perm)
        }
        MapFile::Product { a, b, f } => EvaluableMap::product_preserving(a, b, f)?,
        MapFile::Parabolic { d, c } => {
            if d == 0 || c == [0.0, 0.0] {
                return Err(CliError::Config("parabolic map needs d >= 1 and c != 0".into()));
            }
            EvaluableMap::OneVarParabolic {
                d,
                c: C64::new(c[0], c[1]),
            }
        }
        MapFile::TimeOne { field, tol } => EvaluableMap::time_one(field, tol.unwrap_or(presets::TIME_ONE_TOL)),
        MapFile::Jet { map } => EvaluableMap::truncated_jet(map),
    })
}

/// A preset name or the path of a JSON map description.
pub fn load_map(spec: &str) -> CliResult<EvaluableMap> {
    if looks_like_file(spec) {
        build_map(read_json(spec)?)
    } else {
        Ok(presets::map_by_name(spec)?)
    }
}

pub fn parse_c(s: &str, what: &str) -> CliResult<C64> {
    parse_complex(s).map_err(|e| CliError::Config(format!("--{what}: {e}")))
}

pub fn parse_point(s: &str, what: &str) -> CliResult<Vec<C64>> {
    s.split(',').map(|v| parse_c(v, what)).collect()
}

/// `"20x20"` → `(20, 20)`.
pub fn parse_grid(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Config(format!("--grid expects ROWSxCOLS, got '{s}'"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("20x20").unwrap(), (20, 20));
        assert_eq!(parse_grid("3X5").unwrap(), (3, 5));
        assert!(parse_grid("20").is_err());
        assert!(parse_grid("0x4").is_err());
    }

    #[test]
    fn map_files() {
        let m: MapFile = serde_json::from_str(r#"{"kind":"permutation","perm":[1,0]}"#).unwrap();
        assert!(build_map(m).is_ok());
        let m: MapFile = serde_json::from_str(r#"{"kind":"permutation","perm":[1,1]}"#).unwrap();
        assert!(build_map(m).is_err());
        let m: MapFile = serde_json::from_str(r#"{"kind":"parabolic","d":2,"c":[1,0]}"#).unwrap();
        assert!(matches!(build_map(m).unwrap(), EvaluableMap::OneVarParabolic { d: 2, .. }));
    }
}
