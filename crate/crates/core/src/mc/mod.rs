//! Seeded simulation of biased, drifted and reflected walks, and the
//! estimators built on them.
//!
//! Each walk consumes one uniform per step and picks its move by inverting
//! the cumulative weights in the fixed order `+e_1, -e_1, +e_2, …`. In the
//! open first orthant the biased and drifted weights coincide move by move,
//! so two walks fed the same stream stay together until the biased one
//! reaches a coordinate hyperplane.

mod estimators;
mod keys;

pub use estimators::{
    alpha_estimate, alpha_profile, axial_visit_stats, empirical_return, intersection_stats,
    orthant_interior_starts, orthant_starts, speed_estimate, tv_distance, AlphaProfile,
    AxialVisitStats, EstimatorReport, IntersectionCounter, IntersectionStats, SpeedReport, Z99,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{move_weight, total_weight, Lambda, Lattice, LatticePoint, StepRule};
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    Biased,
    Drifted,
    /// `(|X^1_n|, …, |X^d_n|)` for the biased walk `X`.
    Reflected,
}

impl WalkKind {
    fn rule(self) -> StepRule {
        match self {
            WalkKind::Drifted => StepRule::Drifted,
            WalkKind::Biased | WalkKind::Reflected => StepRule::Biased,
        }
    }
}

/// Mutable walk state for the hot loops.
#[derive(Debug, Clone)]
pub(crate) struct Walker {
    rule: StepRule,
    reflect: bool,
    lambda: f64,
    pos: Vec<i64>,
    nonzero: usize,
}

impl Walker {
    pub(crate) fn new(kind: WalkKind, lambda: f64, start: &[i64]) -> Walker {
        let reflect = kind == WalkKind::Reflected;
        let pos: Vec<i64> = if reflect {
            start.iter().map(|c| c.abs()).collect()
        } else {
            start.to_vec()
        };
        Walker {
            rule: kind.rule(),
            reflect,
            lambda,
            nonzero: pos.iter().filter(|&&c| c != 0).count(),
            pos,
        }
    }

    #[inline]
    pub(crate) fn pos(&self) -> &[i64] {
        &self.pos
    }

    #[inline]
    pub(crate) fn on_axial(&self) -> bool {
        self.nonzero < self.pos.len()
    }

    /// Advances by one step using the uniform `u ∈ [0, 1)`; returns the move index.
    #[inline]
    pub(crate) fn step_with(&mut self, u: f64) -> usize {
        let d = self.pos.len();
        let mut target = u * total_weight(self.rule, d, self.nonzero, self.lambda);
        let mut chosen = 2 * d - 1;
        for m in 0..2 * d {
            let (axis, positive) = (m / 2, m % 2 == 0);
            let w = move_weight(self.rule, self.pos[axis], positive, self.lambda);
            if target < w {
                chosen = m;
                break;
            }
            target -= w;
        }
        let axis = chosen / 2;
        let old = self.pos[axis];
        let mut new = old + if chosen % 2 == 0 { 1 } else { -1 };
        if self.reflect {
            new = new.abs();
        }
        self.pos[axis] = new;
        if old == 0 && new != 0 {
            self.nonzero += 1;
        } else if old != 0 && new == 0 {
            self.nonzero -= 1;
        }
        chosen
    }

    #[inline]
    pub(crate) fn step(&mut self, rng: &mut StreamRng) -> usize {
        self.step_with(rng::uniform(rng))
    }
}

/// One simulated walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: WalkKind,
    pub lambda: f64,
    pub seed: u64,
    points: Vec<Vec<i64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, t: usize) -> LatticePoint {
        LatticePoint::new(self.points[t].clone())
    }

    pub fn coords(&self, t: usize) -> &[i64] {
        &self.points[t]
    }

    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        self.points.iter().map(|p| LatticePoint::new(p.clone()))
    }

    /// Number of times `t ≥ 0` with the walk on a coordinate hyperplane.
    pub fn axial_visits(&self) -> usize {
        self.points.iter().filter(|p| p.contains(&0)).count()
    }

    /// First time the walk touches a coordinate hyperplane, if it does.
    pub fn first_axial_time(&self) -> Option<usize> {
        self.points.iter().position(|p| p.contains(&0))
    }
}

/// Simulates `steps` steps from `start`, driven by stream `(seed, 0, 0)`.
pub fn simulate(
    kind: WalkKind,
    lattice: &Lattice,
    lambda: Lambda,
    steps: usize,
    start: &LatticePoint,
    seed: u64,
) -> Result<Trajectory> {
    lattice.check(start)?;
    if kind == WalkKind::Drifted {
        lambda.require_transient()?;
    }
    let mut rng = rng::stream(seed, 0, 0);
    let mut w = Walker::new(kind, lambda.value(), start.coords());
    let mut points = Vec::with_capacity(steps + 1);
    points.push(w.pos().to_vec());
    for _ in 0..steps {
        w.step(&mut rng);
        points.push(w.pos().to_vec());
    }
    Ok(Trajectory {
        kind,
        lambda: lambda.value(),
        seed,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(d: usize) -> Lattice {
        Lattice::new(d).unwrap()
    }

    fn lam(v: f64) -> Lambda {
        Lambda::new(v).unwrap()
    }

    #[test]
    fn zero_steps() {
        let l = lat(3);
        let s = l.point([1, 0, -2]).unwrap();
        let t = simulate(WalkKind::Biased, &l, lam(0.5), 0, &s, 9).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.point(0), s);
    }

    #[test]
    fn deterministic_and_adjacent() {
        let l = lat(2);
        for kind in [WalkKind::Biased, WalkKind::Drifted, WalkKind::Reflected] {
            let a = simulate(kind, &l, lam(0.5), 500, &l.origin(), 42).unwrap();
            let b = simulate(kind, &l, lam(0.5), 500, &l.origin(), 42).unwrap();
            assert_eq!(a, b);
            let pts: Vec<LatticePoint> = a.points().collect();
            assert!(pts.windows(2).all(|w| w[0].is_adjacent(&w[1])));
            if kind == WalkKind::Reflected {
                assert!(pts.iter().all(|p| p.coords().iter().all(|&c| c >= 0)));
            }
        }
    }

    #[test]
    fn first_step_from_origin_is_uniform() {
        // 10^6 one-step draws from o; each direction has probability 1/4
        let n = 1_000_000u64;
        let mut rng = rng::stream(5, 0, 0);
        let mut counts = [0u64; 4];
        for _ in 0..n {
            let mut w = Walker::new(WalkKind::Biased, 0.5, &[0, 0]);
            counts[w.step(&mut rng)] += 1;
        }
        let sd = (n as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 / 4.0).abs() < 4.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn biased_and_drifted_couple_in_first_orthant() {
        let l = lat(2);
        for seed in 0..50 {
            let s = l.point([6, 9]).unwrap();
            let a = simulate(WalkKind::Biased, &l, lam(0.4), 400, &s, seed).unwrap();
            let b = simulate(WalkKind::Drifted, &l, lam(0.4), 400, &s, seed).unwrap();
            let until = a.first_axial_time().unwrap_or(a.len() - 1);
            for t in 0..=until {
                assert_eq!(a.coords(t), b.coords(t), "seed {seed} t {t}");
            }
        }
    }

    #[test]
    fn step_law_matches_kernel() {
        // inverse-cdf selection reproduces the one-step law at an axial point
        let l = lat(3);
        let x = l.point([2, 0, -1]).unwrap();
        let dist = l.biased_step(&x, lam(0.3)).unwrap();
        let grid = 200_000;
        let mut counts = vec![0usize; 6];
        for i in 0..grid {
            let mut w = Walker::new(WalkKind::Biased, 0.3, x.coords());
            counts[w.step_with((i as f64 + 0.5) / grid as f64)] += 1;
        }
        for (m, (_, p)) in dist.entries.iter().enumerate() {
            assert!((counts[m] as f64 / grid as f64 - p).abs() < 1e-4);
        }
    }
}
