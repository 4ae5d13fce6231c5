//! Iteration of germs and pseudogroups inside a fixed polydisc.
//!
//! Verdicts are experimental: they hold for one radius and one budget.
//! `BudgetExhausted` means "infinite orbit suspected", never a proof.

mod group;
mod iterate;
mod maps;
mod petal;
mod points;
mod pseudogroup;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::C64;

pub use group::{group_closure, noncommuting_pair, periodicity_test, periodicity_test_jet, GroupClosure};
pub use iterate::{
    classify_seed_grid, iterate_orbit, GridSpec, GridSummary, OrbitRecord, OrbitStatus,
};
pub use maps::{EvaluableMap, INVERSE_CHECK_TOL};
pub use petal::{petal_analysis, petal_directions, PetalOptions, PetalReport, PetalRun};
pub use points::PointSet;
pub use pseudogroup::{pseudogroup_orbit, Letter, PseudogroupOptions, PseudogroupOrbit};

/// Closed polydisc `{max_i |x_i| ≤ ρ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DomainBall {
    radius: f64,
}

impl DomainBall {
    pub fn new(radius: f64) -> Result<Self> {
        if radius > 0.0 && radius.is_finite() {
            Ok(DomainBall { radius })
        } else {
            Err(Error::Invalid(format!("ball radius must be positive, got {radius}")))
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// False for non-finite points, so overflow counts as leaving the ball.
    pub fn contains(&self, p: &[C64]) -> bool {
        p.iter().all(|v| v.re.is_finite() && v.im.is_finite() && v.norm() <= self.radius)
    }
}

/// Max-norm of a point.
pub fn max_norm(p: &[C64]) -> f64 {
    p.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub(crate) fn max_dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Budgets and tolerances for single-map iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitOptions {
    /// Iteration budget per direction.
    pub budget: u64,
    /// Return-to-seed tolerance as a fraction of `ρ`.
    pub cycle_frac: f64,
    /// Point-identification tolerance as a fraction of `ρ`.
    pub dedup_frac: f64,
    /// Points kept per direction in the record (all points are still counted).
    pub max_stored_points: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            budget: 100_000,
            cycle_frac: 1e-9,
            dedup_frac: 1e-9,
            max_stored_points: 10_000,
        }
    }
}

impl OrbitOptions {
    pub fn with_budget(budget: u64) -> Self {
        OrbitOptions {
            budget,
            ..Default::default()
        }
    }
}
