use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{max_dist, max_norm, DomainBall, EvaluableMap, OrbitOptions, PointSet};
use crate::error::{Error, Result};
use crate::jet::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitStatus {
    /// Forward and backward iteration both left the ball.
    Escaped,
    /// The seed recurred after `period` steps.
    Periodic(u64),
    /// Neither escape nor return within the budget: infinite orbit suspected.
    BudgetExhausted,
}

impl OrbitStatus {
    pub fn label(&self) -> &'static str {
        match self {
            OrbitStatus::Escaped => "escaped",
            OrbitStatus::Periodic(_) => "periodic",
            OrbitStatus::BudgetExhausted => "infinite-suspected",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub seed: Vec<C64>,
    /// `h(p), h²(p), …` while inside the ball (capped at `max_stored_points`).
    pub forward: Vec<Vec<C64>>,
    /// `h⁻¹(p), h⁻²(p), …` likewise.
    pub backward: Vec<Vec<C64>>,
    /// Successful iterations in both directions; `None` when unbounded
    /// (periodic) or unknown (budget exhausted).
    pub mu: Option<u64>,
    pub cardinality: usize,
    pub status: OrbitStatus,
    /// Backward iteration was refused (no trustworthy inverse).
    pub one_sided: bool,
    /// Largest max-norm met along the orbit.
    pub max_norm: f64,
}

enum Outcome {
    Left(u64),
    Returned(u64),
    Exhausted,
    Refused(u64),
}

struct Walk<'a> {
    h: &'a EvaluableMap,
    ball: DomainBall,
    opts: &'a OrbitOptions,
    seen: PointSet,
    max_norm: f64,
}

impl Walk<'_> {
    fn run(&mut self, seed: &[C64], backward: bool, stored: &mut Vec<Vec<C64>>) -> Outcome {
        let eps_cycle = self.opts.cycle_frac * self.ball.radius();
        let mut cur = seed.to_vec();
        for step in 1..=self.opts.budget {
            let next = if backward {
                self.h.apply_inverse(&cur)
            } else {
                self.h.apply(&cur)
            };
            let next = match next {
                Ok(q) => q,
                Err(Error::NoInverse(_)) if backward => return Outcome::Refused(step - 1),
                // integrator blow-up or overflow: the point has left
                Err(_) => return Outcome::Left(step - 1),
            };
            if !self.ball.contains(&next) {
                return Outcome::Left(step - 1);
            }
            if max_dist(&next, seed) <= eps_cycle {
                return Outcome::Returned(step);
            }
            self.max_norm = self.max_norm.max(max_norm(&next));
            self.seen.insert(&next);
            if stored.len() < self.opts.max_stored_points {
                stored.push(next.clone());
            }
            cur = next;
        }
        Outcome::Exhausted
    }
}

/// Iterates `h` forward and (with its inverse) backward from `p` until the
/// orbit leaves `ball`, returns to `p`, or exhausts the budget.
pub fn iterate_orbit(
    h: &EvaluableMap,
    p: &[C64],
    ball: DomainBall,
    opts: &OrbitOptions,
) -> Result<OrbitRecord> {
    if p.len() != h.dim() {
        return Err(Error::VarMismatch {
            expected: h.dim(),
            found: p.len(),
        });
    }
    if !ball.contains(p) {
        return Err(Error::Invalid("seed lies outside the ball".into()));
    }
    let mut seen = PointSet::new(opts.dedup_frac * ball.radius());
    seen.insert(p);
    let mut walk = Walk {
        h,
        ball,
        opts,
        seen,
        max_norm: max_norm(p),
    };
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    let fwd = walk.run(p, false, &mut forward);
    let (status, mu, one_sided) = match fwd {
        Outcome::Returned(k) => (OrbitStatus::Periodic(k), None, false),
        _ => match (fwd, walk.run(p, true, &mut backward)) {
            (_, Outcome::Returned(k)) => (OrbitStatus::Periodic(k), None, false),
            (Outcome::Left(nf), Outcome::Left(nb)) => (OrbitStatus::Escaped, Some(nf + nb), false),
            (Outcome::Left(nf), Outcome::Refused(nb)) => (OrbitStatus::Escaped, Some(nf + nb), true),
            (_, bwd) => (OrbitStatus::BudgetExhausted, None, matches!(bwd, Outcome::Refused(_))),
        },
    };
    Ok(OrbitRecord {
        seed: p.to_vec(),
        forward,
        backward,
        mu,
        cardinality: walk.seen.len(),
        status,
        one_sided,
        max_norm: walk.max_norm,
    })
}

/// Seed layout for [`classify_seed_grid`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum GridSpec {
    /// `n1·n2` seeds on a polar lattice. Seed `(i, j)` has
    /// `x = ρ r_i e^{2πi(j+½)/n2}` and `y = ρ r_j e^{2πi(i+¼)/n1}`, with the
    /// moduli `r` evenly spaced in `[r_min, r_max]`; further coordinates are 0.
    /// Both coordinates stay away from zero, so `xy ≠ 0`.
    Lattice { n1: usize, n2: usize, r_min: f64, r_max: f64 },
    /// `count` seeds with moduli uniform in `[r_min, r_max]·ρ` and uniform
    /// arguments, drawn from ChaCha8 seeded with `seed`.
    Random { count: usize, seed: u64, r_min: f64, r_max: f64 },
    Explicit(Vec<Vec<C64>>),
}

impl GridSpec {
    pub fn lattice(n1: usize, n2: usize) -> Self {
        GridSpec::Lattice {
            n1,
            n2,
            r_min: 0.3,
            r_max: 0.95,
        }
    }

    pub fn random(count: usize, seed: u64) -> Self {
        GridSpec::Random {
            count,
            seed,
            r_min: 0.3,
            r_max: 0.95,
        }
    }

    fn check_range(r_min: f64, r_max: f64) -> Result<()> {
        if 0.0 <= r_min && r_min <= r_max && r_max <= 1.0 {
            Ok(())
        } else {
            Err(Error::Invalid(format!("modulus range [{r_min}, {r_max}] must lie in [0, 1]")))
        }
    }

    pub fn seeds(&self, dim: usize, ball: DomainBall) -> Result<Vec<Vec<C64>>> {
        let rho = ball.radius();
        match self {
            GridSpec::Lattice { n1, n2, r_min, r_max } => {
                Self::check_range(*r_min, *r_max)?;
                if *n1 == 0 || *n2 == 0 {
                    return Err(Error::Invalid("grid dimensions must be positive".into()));
                }
                let r = |k: usize, n: usize| {
                    if n == 1 {
                        *r_max
                    } else {
                        r_min + (r_max - r_min) * k as f64 / (n - 1) as f64
                    }
                };
                let mut out = Vec::with_capacity(n1 * n2);
                for i in 0..*n1 {
                    for j in 0..*n2 {
                        let mut p = vec![C64::default(); dim];
                        p[0] = C64::from_polar(rho * r(i, *n1), 2.0 * PI * (j as f64 + 0.5) / *n2 as f64);
                        if dim > 1 {
                            p[1] = C64::from_polar(rho * r(j, *n2), 2.0 * PI * (i as f64 + 0.25) / *n1 as f64);
                        }
                        out.push(p);
                    }
                }
                Ok(out)
            }
            GridSpec::Random { count, seed, r_min, r_max } => {
                Self::check_range(*r_min, *r_max)?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*count)
                    .map(|_| {
                        (0..dim)
                            .map(|_| {
                                let m = rho * rng.gen_range(*r_min..=*r_max);
                                C64::from_polar(m, rng.gen_range(0.0..2.0 * PI))
                            })
                            .collect()
                    })
                    .collect())
            }
            GridSpec::Explicit(v) => {
                for p in v {
                    if p.len() != dim {
                        return Err(Error::VarMismatch {
                            expected: dim,
                            found: p.len(),
                        });
                    }
                    if !ball.contains(p) {
                        return Err(Error::Invalid("explicit seed lies outside the ball".into()));
                    }
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridSummary {
    pub radius: f64,
    pub budget: u64,
    pub escaped: usize,
    pub periodic: usize,
    /// Reported as infinite-suspected.
    pub exhausted: usize,
    pub records: Vec<OrbitRecord>,
}

impl GridSummary {
    pub fn total(&self) -> usize {
        self.records.len()
    }
}

/// Runs [`iterate_orbit`] on every seed of `grid` in parallel. Records come
/// back in seed order regardless of scheduling.
pub fn classify_seed_grid(
    h: &EvaluableMap,
    ball: DomainBall,
    grid: &GridSpec,
    opts: &OrbitOptions,
) -> Result<GridSummary> {
    let seeds = grid.seeds(h.dim(), ball)?;
    let records = seeds
        .par_iter()
        .map(|p| iterate_orbit(h, p, ball, opts))
        .collect::<Result<Vec<_>>>()?;
    let count = |f: fn(&OrbitStatus) -> bool| records.iter().filter(|r| f(&r.status)).count();
    Ok(GridSummary {
        radius: ball.radius(),
        budget: opts.budget,
        escaped: count(|s| matches!(s, OrbitStatus::Escaped)),
        periodic: count(|s| matches!(s, OrbitStatus::Periodic(_))),
        exhausted: count(|s| matches!(s, OrbitStatus::BudgetExhausted)),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(r: f64) -> DomainBall {
        DomainBall::new(r).unwrap()
    }

    #[test]
    fn rotation_is_periodic() {
        let h = EvaluableMap::diagonal(&[C64::from_polar(1.0, 2.0 * PI / 5.0)]);
        let r = iterate_orbit(&h, &[C64::new(0.3, 0.1)], ball(1.0), &OrbitOptions::default()).unwrap();
        assert_eq!(r.status, OrbitStatus::Periodic(5));
        assert_eq!(r.cardinality, 5);
    }

    #[test]
    fn doubling_leaves_forward_but_not_backward() {
        // Backward images p/2ⁿ stay in the ball forever, so the orbit is
        // infinite in V even though the forward half escapes.
        let h = EvaluableMap::diagonal(&[C64::new(2.0, 0.0)]);
        let opts = OrbitOptions::with_budget(2000);
        let r = iterate_orbit(&h, &[C64::new(0.3, 0.0)], ball(1.0), &opts).unwrap();
        assert_eq!(r.forward.len(), 1);
        assert_eq!(r.status, OrbitStatus::BudgetExhausted);
        let g = EvaluableMap::diagonal(&[C64::new(0.5, 0.0)]);
        let r = iterate_orbit(&g, &[C64::new(0.3, 0.0)], ball(1.0), &opts).unwrap();
        assert_eq!(r.backward.len(), 1);
        assert_eq!(r.status, OrbitStatus::BudgetExhausted);
    }

    #[test]
    fn expanding_and_contracting_product_escapes() {
        let h = EvaluableMap::diagonal(&[C64::new(2.0, 0.0), C64::new(0.5, 0.0)]);
        let r = iterate_orbit(&h, &[C64::new(0.3, 0.0), C64::new(0.2, 0.0)], ball(1.0), &OrbitOptions::default()).unwrap();
        assert_eq!(r.status, OrbitStatus::Escaped);
        assert_eq!(r.mu, Some(3));
        assert_eq!(r.cardinality, 4);
    }

    #[test]
    fn origin_orbit_is_trivial() {
        let h = EvaluableMap::diagonal(&[C64::new(2.0, 0.0), C64::new(0.5, 0.0)]);
        let r = iterate_orbit(&h, &[C64::default(); 2], ball(1.0), &OrbitOptions::default()).unwrap();
        assert_eq!(r.status, OrbitStatus::Periodic(1));
        assert_eq!(r.cardinality, 1);
    }

    #[test]
    fn identity_grid_is_all_period_one() {
        let h = EvaluableMap::diagonal(&[C64::new(1.0, 0.0); 2]);
        let s = classify_seed_grid(&h, ball(0.3), &GridSpec::lattice(3, 4), &OrbitOptions::default()).unwrap();
        assert_eq!(s.periodic, 12);
        assert!(s.records.iter().all(|r| r.status == OrbitStatus::Periodic(1)));
    }

    #[test]
    fn lattice_is_inside_and_off_axes() {
        let b = ball(0.3);
        let seeds = GridSpec::lattice(20, 20).seeds(2, b).unwrap();
        assert_eq!(seeds.len(), 400);
        assert!(seeds.iter().all(|p| b.contains(p) && p[0].norm() > 0.08 && p[1].norm() > 0.08));
    }

    #[test]
    fn random_grid_is_reproducible() {
        let b = ball(0.5);
        let a = GridSpec::random(10, 7).seeds(2, b).unwrap();
        assert_eq!(a, GridSpec::random(10, 7).seeds(2, b).unwrap());
        assert_ne!(a, GridSpec::random(10, 8).seeds(2, b).unwrap());
    }
}
