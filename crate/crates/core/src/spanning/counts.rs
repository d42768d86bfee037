use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Lambda, Lattice};
use crate::mc::{alpha_profile, orthant_starts, AlphaProfile};

/// Share of `α̂` that must survive a doubling of the horizon for `k` walks to
/// count as non-intersecting with positive probability.
pub const PERSISTENCE: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeCountReport {
    pub d: usize,
    pub lambda: f64,
    pub horizon: usize,
    /// Largest `k` whose estimate passed both checks, with every smaller `k` passing too.
    pub lower_bound_k: usize,
    /// Profiles at horizons `H` and `2H`, keyed by `k`.
    pub alpha_table: BTreeMap<usize, AlphaProfile>,
}

/// Estimates how many walks can avoid each other forever by running
/// non-intersection estimates for `k = 2, …, k_max`.
///
/// Starts sit at `(±r, …, ±r)` with `r = ⌈√horizon⌉`, one per orthant, then
/// doubled up (see [`orthant_starts`]). A value of `k` is accepted when the
/// 99% interval at `H` excludes 0 and `α̂(2H) ≥ 0.9 α̂(H)`; the second test
/// rejects estimates that are positive only because the horizon is finite.
pub fn tree_count_estimate(
    lattice: &Lattice,
    lambda: Lambda,
    horizon: usize,
    trials: usize,
    k_max: usize,
    master_seed: u64,
) -> Result<TreeCountReport> {
    if lattice.dim() < 2 {
        return Err(Error::param("tree counts need d >= 2"));
    }
    if k_max < 2 || horizon == 0 {
        return Err(Error::param("need k_max >= 2 and a positive horizon"));
    }
    let r = (horizon as f64).sqrt().ceil() as i64;
    let mut table = BTreeMap::new();
    let mut lower = 1;
    let mut still_passing = true;
    for k in 2..=k_max {
        let starts = orthant_starts(lattice, k, r)?;
        let prof = alpha_profile(
            lattice,
            lambda,
            &starts,
            &[horizon, 2 * horizon],
            trials,
            master_seed,
        )?;
        let (at_h, at_2h) = (prof.reports[0], prof.reports[1]);
        let passes =
            at_h.ci_excludes_zero() && at_2h.point_estimate >= PERSISTENCE * at_h.point_estimate;
        if passes && still_passing {
            lower = k;
        } else {
            still_passing = false;
        }
        table.insert(k, prof);
    }
    Ok(TreeCountReport {
        d: lattice.dim(),
        lambda: lambda.value(),
        horizon,
        lower_bound_k: lower,
        alpha_table: table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_lattice_supports_four_walks() {
        let l = Lattice::new(2).unwrap();
        let rep = tree_count_estimate(&l, Lambda::new(0.5).unwrap(), 2500, 400, 5, 1).unwrap();
        assert_eq!(rep.lower_bound_k, 4, "{:#?}", rep.alpha_table);
        let five = &rep.alpha_table[&5];
        assert!(five.reports[1].point_estimate <= five.reports[0].point_estimate);
    }

    #[test]
    fn rejects_bad_arguments() {
        let lam = Lambda::new(0.5).unwrap();
        assert!(tree_count_estimate(&Lattice::new(1).unwrap(), lam, 10, 10, 3, 0).is_err());
        assert!(tree_count_estimate(&Lattice::new(2).unwrap(), lam, 10, 10, 1, 0).is_err());
    }
}
