//! The wired spanning forest of ℤ¹ and its finite approximations.
//!
//! Wiring the complement of `[-n, n]` turns the segment into a cycle through
//! the extra vertex. A spanning tree of a cycle is the cycle minus one edge,
//! and that edge is missing with probability proportional to `1/c(e)`.

use serde::{Deserialize, Serialize};

use super::graph::{build_box, Boundary, WeightedGraph};
use super::sample::wilson_with;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::lattice::{Lambda, Lattice};
use crate::par;
use crate::rng;

/// Which edge of the wired cycle is missing from the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CutPosition {
    /// The edge `{-n, ∂}`.
    BoundaryMinus,
    /// The edge `{i - 1, i}`, `-(n-1) ≤ i ≤ n`.
    Interior(i64),
    /// The edge `{n, ∂}`.
    BoundaryPlus,
}

impl std::fmt::Display for CutPosition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CutPosition::BoundaryMinus => write!(f, "boundary-"),
            CutPosition::Interior(i) => write!(f, "{i}"),
            CutPosition::BoundaryPlus => write!(f, "boundary+"),
        }
    }
}

fn level(i: i64) -> i32 {
    i.abs().min((i - 1).abs()) as i32
}

/// Limit law: the forest is `{T^-_{i-1}, T^+_i}` with probability `½(1-λ)λ^{|i| ∧ |i-1|}`.
pub fn wsf_z1_exact(lambda: Lambda, i: i64) -> Result<f64> {
    let l = lambda.require_transient()?.value();
    Ok(0.5 * (1.0 - l) * l.powi(level(i)))
}

/// Law of the missing edge in the wired cycle `G_n^*`, in cycle order.
pub fn wsf_z1_finite(lambda: Lambda, n: usize) -> Result<Vec<(CutPosition, f64)>> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    let l = lambda.value();
    let ni = n as i64;
    let mut law = vec![(CutPosition::BoundaryMinus, l.powi(ni as i32))];
    law.extend((-(ni - 1)..=ni).map(|i| (CutPosition::Interior(i), l.powi(level(i)))));
    law.push((CutPosition::BoundaryPlus, l.powi(ni as i32)));
    let total: f64 = law.iter().map(|(_, w)| w).sum();
    for (_, w) in &mut law {
        *w /= total;
    }
    Ok(law)
}

/// Empirical law of the missing edge from `trials` Wilson samples on `G_n^*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WsfZ1Sample {
    pub lambda: f64,
    pub n: usize,
    pub trials: usize,
    pub master_seed: u64,
    /// `(position, count, frequency, exact finite-n probability)` in cycle order.
    pub rows: Vec<(CutPosition, u64, f64, f64)>,
}

impl WsfZ1Sample {
    /// `|count - N p| / sqrt(N p (1 - p))` for each outcome.
    pub fn z_scores(&self) -> Vec<f64> {
        let n = self.trials as f64;
        self.rows
            .iter()
            .map(|&(_, c, _, p)| {
                let sd = (n * p * (1.0 - p)).sqrt();
                if sd == 0.0 {
                    if c as f64 == n * p {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (c as f64 - n * p).abs() / sd
                }
            })
            .collect()
    }
}

fn cut_of(g: &WeightedGraph, edge_index: usize) -> CutPosition {
    let e = &g.edges()[edge_index];
    let root = g.wired_root().expect("wired cycle");
    let coord = |v: usize| g.label(v).expect("lattice vertex").coords()[0];
    if e.a == root || e.b == root {
        let x = coord(if e.a == root { e.b } else { e.a });
        if x > 0 {
            CutPosition::BoundaryPlus
        } else {
            CutPosition::BoundaryMinus
        }
    } else {
        CutPosition::Interior(coord(e.a).max(coord(e.b)))
    }
}

pub fn wsf_z1_sample(
    lambda: Lambda,
    n: usize,
    trials: usize,
    master_seed: u64,
) -> Result<WsfZ1Sample> {
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    let exact = wsf_z1_finite(lambda, n)?;
    let g = build_box(
        &Lattice::new(1)?,
        n,
        lambda,
        Boundary::Wired,
        &Budget::default(),
    )?;
    let root = g.wired_root().expect("wired");
    let m = g.edges().len();
    let missing: Vec<usize> = par::map_indexed(trials, |t| {
        let mut rng = rng::stream(master_seed, t as u64, 0);
        let mut present = vec![false; m];
        for ei in wilson_with(&g, root, &mut rng) {
            present[ei] = true;
        }
        present
            .iter()
            .position(|&p| !p)
            .expect("a cycle tree misses one edge")
    });
    let mut counts = vec![0u64; m];
    for ei in missing {
        counts[ei] += 1;
    }
    let mut by_pos: Vec<(CutPosition, u64)> =
        (0..m).map(|ei| (cut_of(&g, ei), counts[ei])).collect();
    by_pos.sort();
    let rows = by_pos
        .into_iter()
        .zip(&exact)
        .map(|((pos, c), &(pos2, p))| {
            debug_assert_eq!(pos, pos2);
            (pos, c, c as f64 / trials as f64, p)
        })
        .collect();
    Ok(WsfZ1Sample {
        lambda: lambda.value(),
        n,
        trials,
        master_seed,
        rows,
    })
}
