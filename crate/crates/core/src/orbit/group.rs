use nalgebra::DMatrix;
use serde::Serialize;

use super::{max_dist, EvaluableMap};
use crate::error::{Error, Result};
use crate::jet::{JetMap, C64};

/// Entries closer than this to a Gaussian integer or half-integer are
/// snapped before comparison.
const SNAP_TOL: f64 = 1e-12;
/// Matrices are identified when all entries agree to this tolerance.
const MATRIX_TOL: f64 = 1e-9;
/// Coefficientwise tolerance for jet periodicity.
const JET_PERIOD_TOL: f64 = 1e-10;
/// Pointwise tolerance for probe periodicity.
const PROBE_PERIOD_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct GroupClosure {
    /// `None` when the element budget was exceeded.
    pub order: Option<usize>,
    #[serde(skip)]
    pub elements: Vec<DMatrix<C64>>,
}

fn snap(m: &DMatrix<C64>) -> DMatrix<C64> {
    let s = |x: f64| {
        let r = (2.0 * x).round() / 2.0;
        if (x - r).abs() < SNAP_TOL {
            r
        } else {
            x
        }
    };
    m.map(|c| C64::new(s(c.re), s(c.im)))
}

fn same(a: &DMatrix<C64>, b: &DMatrix<C64>) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= MATRIX_TOL)
}

/// Breadth-first closure of the group generated by linear or permutation
/// maps. Finite groups are closed under products alone, so inverses are not
/// needed.
pub fn group_closure(gens: &[EvaluableMap], budget: usize) -> Result<GroupClosure> {
    let mats = gens
        .iter()
        .map(|g| {
            g.matrix()
                .ok_or_else(|| Error::Invalid("group closure needs linear or permutation maps".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let Some(first) = mats.first() else {
        return Err(Error::Invalid("no generators".into()));
    };
    let n = first.nrows();
    if mats.iter().any(|m| m.nrows() != n || m.ncols() != n) {
        return Err(Error::Invalid("generators have different sizes".into()));
    }
    let mut elements = vec![DMatrix::<C64>::identity(n, n)];
    let mut head = 0;
    while head < elements.len() {
        let e = elements[head].clone();
        head += 1;
        for g in &mats {
            let p = snap(&(&e * g));
            if elements.iter().any(|q| same(q, &p)) {
                continue;
            }
            if elements.len() >= budget {
                return Ok(GroupClosure { order: None, elements });
            }
            elements.push(p);
        }
    }
    Ok(GroupClosure {
        order: Some(elements.len()),
        elements,
    })
}

/// Indices of two elements that do not commute, if any.
pub fn noncommuting_pair(elements: &[DMatrix<C64>]) -> Option<(usize, usize)> {
    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            let ab = &elements[i] * &elements[j];
            let ba = &elements[j] * &elements[i];
            if !same(&ab, &ba) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Least `N ≤ n_max` with `h^N = id`: exact for matrices, on a fixed probe
/// set for the other variants.
pub fn periodicity_test(h: &EvaluableMap, n_max: usize) -> Option<usize> {
    if let Some(m) = h.matrix() {
        let n = m.nrows();
        let id = DMatrix::<C64>::identity(n, n);
        let mut p = id.clone();
        for k in 1..=n_max {
            p = snap(&(&p * &m));
            if same(&p, &id) {
                return Some(k);
            }
        }
        return None;
    }
    if let EvaluableMap::TruncatedJet { map, .. } = h {
        return periodicity_test_jet(map, n_max);
    }
    let probes = probe_points(h.dim());
    let mut cur = probes.clone();
    for k in 1..=n_max {
        for p in cur.iter_mut() {
            match h.apply(p) {
                Ok(q) => *p = q,
                Err(_) => return None,
            }
        }
        if cur
            .iter()
            .zip(&probes)
            .all(|(a, b)| max_dist(a, b) <= PROBE_PERIOD_TOL)
        {
            return Some(k);
        }
    }
    None
}

/// Least `N ≤ n_max` with `h^N` equal to the identity jet coefficientwise.
pub fn periodicity_test_jet(h: &JetMap, n_max: usize) -> Option<usize> {
    let id = JetMap::identity(h.n_vars(), h.order());
    let mut p = h.clone();
    for k in 1..=n_max {
        if p.max_abs_diff(&id) < JET_PERIOD_TOL {
            return Some(k);
        }
        p = h.compose(&p).ok()?;
    }
    None
}

/// Deterministic points of modulus ≤ 0.05 with nonzero, unrelated coordinates.
fn probe_points(dim: usize) -> Vec<Vec<C64>> {
    (0..4)
        .map(|k| {
            (0..dim)
                .map(|j| C64::from_polar(0.05 - 0.007 * j as f64, 0.7 + 1.3 * k as f64 + 2.1 * j as f64))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn h1() -> EvaluableMap {
        EvaluableMap::diagonal(&[C64::from_polar(1.0, PI / 3.0), C64::from_polar(1.0, 2.0 * PI / 3.0)])
    }

    #[test]
    fn small_closures() {
        let i = C64::new(0.0, 1.0);
        assert_eq!(group_closure(&[EvaluableMap::diagonal(&[i, i])], 100).unwrap().order, Some(4));
        let id = EvaluableMap::diagonal(&[C64::new(1.0, 0.0); 2]);
        assert_eq!(group_closure(&[id], 100).unwrap().order, Some(1));
    }

    #[test]
    fn closure_of_h1_h2_is_nonabelian_of_order_24() {
        let g = group_closure(&[h1(), EvaluableMap::permutation(vec![1, 0])], 1000).unwrap();
        assert_eq!(g.order, Some(24));
        assert!(noncommuting_pair(&g.elements).is_some());
    }

    #[test]
    fn budget_is_reported() {
        let g = EvaluableMap::diagonal(&[C64::from_polar(1.0, 2.0)]);
        assert_eq!(group_closure(&[g], 50).unwrap().order, None);
    }

    #[test]
    fn periods() {
        assert_eq!(periodicity_test(&h1(), 100), Some(6));
        assert_eq!(periodicity_test(&EvaluableMap::permutation(vec![1, 0]), 100), Some(2));
        let para = EvaluableMap::OneVarParabolic { d: 1, c: C64::new(1.0, 0.0) };
        assert_eq!(periodicity_test(&para, 50), None);
    }

    #[test]
    fn jet_period() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.0, 1.0), C64::new(-1.0, 0.0)]));
        let j = JetMap::from_linear(&m, 3).unwrap();
        assert_eq!(periodicity_test_jet(&j, 10), Some(4));
        assert_eq!(periodicity_test(&EvaluableMap::truncated_jet(j), 10), Some(4));
    }
}
