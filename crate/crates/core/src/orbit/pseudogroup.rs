use std::fmt;

use serde::Serialize;

use super::{DomainBall, EvaluableMap, PointSet};
use crate::error::{Error, Result};
use crate::jet::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.generator + 1)?;
        if self.inverse {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PseudogroupOptions {
    pub word_budget: usize,
    pub point_budget: usize,
    /// Point-identification tolerance as a fraction of `ρ`.
    pub dedup_frac: f64,
}

impl Default for PseudogroupOptions {
    fn default() -> Self {
        PseudogroupOptions {
            word_budget: 40,
            point_budget: 10_000,
            dedup_frac: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudogroupOrbit {
    pub points: Vec<Vec<C64>>,
    /// `words[k]` applied letter by letter (first letter first) takes the
    /// seed to `points[k]` without leaving the ball.
    pub words: Vec<Vec<Letter>>,
    /// A budget stopped the search while new points were still reachable.
    pub truncated: bool,
}

impl PseudogroupOrbit {
    pub fn cardinality(&self) -> usize {
        self.points.len()
    }
}

/// Breadth-first search over words in the generators and their inverses.
/// A letter is applied only when its image stays in the ball, so every
/// prefix of a witnessing word maps the seed into the ball.
pub fn pseudogroup_orbit(
    gens: &[EvaluableMap],
    p: &[C64],
    ball: DomainBall,
    opts: &PseudogroupOptions,
) -> Result<PseudogroupOrbit> {
    if let Some(g) = gens.iter().find(|g| g.dim() != p.len()) {
        return Err(Error::VarMismatch {
            expected: g.dim(),
            found: p.len(),
        });
    }
    if !ball.contains(p) {
        return Err(Error::Invalid("seed lies outside the ball".into()));
    }
    let mut set = PointSet::new(opts.dedup_frac * ball.radius());
    set.insert(p);
    let mut words: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut truncated = false;
    let mut head = 0;
    'bfs: while head < set.len() {
        let cur = set.points()[head].clone();
        let word = words[head].clone();
        head += 1;
        for generator in 0..gens.len() {
            for inverse in [false, true] {
                let img = if inverse {
                    gens[generator].apply_inverse(&cur)
                } else {
                    gens[generator].apply(&cur)
                };
                let Ok(q) = img else { continue };
                if !ball.contains(&q) || set.find(&q).is_some() {
                    continue;
                }
                if word.len() >= opts.word_budget || set.len() >= opts.point_budget {
                    truncated = true;
                    if set.len() >= opts.point_budget {
                        break 'bfs;
                    }
                    continue;
                }
                set.insert(&q);
                let mut w = word.clone();
                w.push(Letter { generator, inverse });
                words.push(w);
            }
        }
    }
    Ok(PseudogroupOrbit {
        points: set.points().to_vec(),
        words,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{iterate_orbit, max_dist, OrbitOptions};
    use std::f64::consts::PI;

    fn ball(r: f64) -> DomainBall {
        DomainBall::new(r).unwrap()
    }

    #[test]
    fn dom_rule_prunes_leaving_steps() {
        let half = EvaluableMap::diagonal(&[C64::new(0.5, 0.0)]);
        let opts = PseudogroupOptions { word_budget: 5, ..Default::default() };
        let o = pseudogroup_orbit(&[half], &[C64::new(0.9, 0.0)], ball(1.0), &opts).unwrap();
        // 0.9 and its forward images; the inverse image 1.8 is pruned
        assert_eq!(o.cardinality(), 6);
        assert!(o.points.iter().all(|p| p[0].re <= 0.9));
        assert!(o.words.iter().flatten().all(|l| !l.inverse));
        assert!(o.truncated);
    }

    #[test]
    fn words_witness_points() {
        let gens = [
            EvaluableMap::diagonal(&[C64::from_polar(1.0, PI / 3.0), C64::from_polar(1.0, 2.0 * PI / 3.0)]),
            EvaluableMap::permutation(vec![1, 0]),
        ];
        let p = [C64::new(0.1, 0.02), C64::new(-0.03, 0.05)];
        let o = pseudogroup_orbit(&gens, &p, ball(1.0), &Default::default()).unwrap();
        assert_eq!(o.cardinality(), 24);
        assert!(!o.truncated);
        for (q, w) in o.points.iter().zip(&o.words) {
            let mut cur = p.to_vec();
            for l in w {
                cur = if l.inverse { gens[l.generator].apply_inverse(&cur) } else { gens[l.generator].apply(&cur) }.unwrap();
            }
            assert!(max_dist(&cur, q) < 1e-12);
        }
    }

    #[test]
    fn single_generator_matches_iteration() {
        let h = EvaluableMap::diagonal(&[C64::new(1.5, 0.0), C64::new(0.8, 0.0)]);
        let p = [C64::new(0.1, 0.0), C64::new(0.2, 0.0)];
        let b = ball(1.0);
        let o = pseudogroup_orbit(std::slice::from_ref(&h), &p, b, &Default::default()).unwrap();
        let r = iterate_orbit(&h, &p, b, &OrbitOptions::default()).unwrap();
        assert_eq!(o.cardinality(), r.cardinality);
        for q in r.forward.iter().chain(&r.backward) {
            assert!(o.points.iter().any(|x| max_dist(x, q) == 0.0));
        }
    }
}
