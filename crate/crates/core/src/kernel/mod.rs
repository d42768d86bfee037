//! Exact n-step transition probabilities by forward dynamic programming.
//!
//! One step changes the ℓ¹ norm by exactly one, so after `n` steps all mass
//! sits in the ℓ¹ ball of radius `n` around the start. The propagator stores
//! the cube `[-n, n]^d` around the start densely and carries no truncation
//! error.

mod diagnostics;
pub mod exact;
mod intersections;

pub use diagnostics::{
    hk_band_width, llt_diagnostics, rho_diagnostics, LltReport, RegionKind, RegionSpec, RhoRow,
};
pub use intersections::{expected_intersections, expected_intersections_direct, CoincidenceTable};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::lattice::{move_weight, total_weight, Lambda, Lattice, LatticePoint, StepRule};
use crate::par;

/// Dense cube of sites centred on `center` with half-width `radius`.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    d: usize,
    side: usize,
    lo: Vec<i64>,
    strides: Vec<usize>,
    len: usize,
}

impl Grid {
    fn new(center: &[i64], radius: usize, budget: &Budget, steps: usize) -> Result<Grid> {
        let d = center.len();
        let side = 2 * radius + 1;
        let needed = (side as u128).saturating_pow(d as u32);
        if needed > budget.max_states as u128 {
            return Err(Error::Budget {
                what: "dense kernel states",
                d,
                n: steps,
                needed,
                limit: budget.max_states as u128,
            });
        }
        let mut strides = vec![1usize; d];
        for i in (0..d.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * side;
        }
        Ok(Grid {
            d,
            side,
            lo: center.iter().map(|c| c - radius as i64).collect(),
            strides,
            len: needed as usize,
        })
    }

    fn index(&self, x: &[i64]) -> Option<usize> {
        let mut idx = 0;
        for i in 0..self.d {
            let local = x[i] - self.lo[i];
            if local < 0 || local >= self.side as i64 {
                return None;
            }
            idx += local as usize * self.strides[i];
        }
        Some(idx)
    }

    fn local_coords(&self, mut idx: usize, out: &mut [usize]) {
        for i in 0..self.d {
            out[i] = idx / self.strides[i];
            idx %= self.strides[i];
        }
    }

    /// Calls `f(absolute_coords, index)` for every site in index order.
    fn for_each_site(&self, mut f: impl FnMut(&[i64], usize)) {
        let mut local = vec![0usize; self.d];
        let mut abs = self.lo.clone();
        for idx in 0..self.len {
            if idx > 0 {
                advance(&mut local, &mut abs, &self.lo, self.side);
            }
            f(&abs, idx);
        }
    }
}

#[inline]
fn advance(local: &mut [usize], abs: &mut [i64], lo: &[i64], side: usize) {
    for i in (0..local.len()).rev() {
        local[i] += 1;
        if local[i] < side {
            abs[i] = lo[i] + local[i] as i64;
            return;
        }
        local[i] = 0;
        abs[i] = lo[i];
    }
}

/// Forward evolution of a point mass under one of the step rules.
pub(crate) struct Propagator {
    rule: StepRule,
    lambda: f64,
    grid: Grid,
    mass: Vec<f64>,
    scratch: Vec<f64>,
    steps_taken: usize,
    max_steps: usize,
}

impl Propagator {
    pub(crate) fn new(
        rule: StepRule,
        lattice: &Lattice,
        lambda: Lambda,
        max_steps: usize,
        start: &LatticePoint,
        budget: &Budget,
    ) -> Result<Self> {
        lattice.check(start)?;
        if rule == StepRule::Drifted {
            lambda.require_transient()?;
        }
        let grid = Grid::new(start.coords(), max_steps, budget, max_steps)?;
        let mut mass = vec![0.0; grid.len];
        let origin = grid
            .index(start.coords())
            .expect("start is the grid centre");
        mass[origin] = 1.0;
        Ok(Propagator {
            rule,
            lambda: lambda.value(),
            scratch: vec![0.0; grid.len],
            grid,
            mass,
            steps_taken: 0,
            max_steps,
        })
    }

    pub(crate) fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub(crate) fn mass_at(&self, x: &[i64]) -> f64 {
        self.grid.index(x).map_or(0.0, |i| self.mass[i])
    }

    pub(crate) fn mass_slice(&self) -> &[f64] {
        &self.mass
    }

    /// One step, computed by gathering each site's incoming mass.
    pub(crate) fn advance(&mut self) {
        assert!(
            self.steps_taken < self.max_steps,
            "propagator grid exhausted"
        );
        let g = &self.grid;
        let d = g.d;
        let (rule, lambda) = (self.rule, self.lambda);

        // scratch[y] = mass[y] / total_weight(y)
        {
            let mass = &self.mass;
            let chunk = chunk_len(g);
            par::for_each_chunk_mut(&mut self.scratch, chunk, |ci, out| {
                let start = ci * chunk;
                let mut local = vec![0usize; d];
                g.local_coords(start, &mut local);
                let mut abs: Vec<i64> = (0..d).map(|i| g.lo[i] + local[i] as i64).collect();
                for (k, slot) in out.iter_mut().enumerate() {
                    if k > 0 {
                        advance(&mut local, &mut abs, &g.lo, g.side);
                    }
                    let m = mass[start + k];
                    *slot = if m == 0.0 {
                        0.0
                    } else {
                        let nonzero = abs.iter().filter(|&&c| c != 0).count();
                        m / total_weight(rule, d, nonzero, lambda)
                    };
                }
            });
        }

        {
            let scaled = &self.scratch;
            let chunk = chunk_len(g);
            let side = g.side;
            par::for_each_chunk_mut(&mut self.mass, chunk, |ci, out| {
                let start = ci * chunk;
                let mut local = vec![0usize; d];
                g.local_coords(start, &mut local);
                let mut abs: Vec<i64> = (0..d).map(|i| g.lo[i] + local[i] as i64).collect();
                for (k, slot) in out.iter_mut().enumerate() {
                    if k > 0 {
                        advance(&mut local, &mut abs, &g.lo, side);
                    }
                    let idx = start + k;
                    let mut acc = 0.0;
                    for axis in 0..d {
                        let s = g.strides[axis];
                        if local[axis] > 0 {
                            // arriving by a positive move from x - e_axis
                            let v = scaled[idx - s];
                            if v != 0.0 {
                                acc += v * move_weight(rule, abs[axis] - 1, true, lambda);
                            }
                        }
                        if local[axis] + 1 < side {
                            let v = scaled[idx + s];
                            if v != 0.0 {
                                acc += v * move_weight(rule, abs[axis] + 1, false, lambda);
                            }
                        }
                    }
                    *slot = acc;
                }
            });
        }
        self.steps_taken += 1;
    }
}

fn chunk_len(g: &Grid) -> usize {
    let base = g.strides[0];
    base * (4096 / base).max(1)
}

/// Exact law of the walk after `steps` steps.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    pub rule: StepRule,
    pub d: usize,
    pub lambda: f64,
    pub steps: usize,
    pub start: LatticePoint,
    grid: Grid,
    mass: Vec<f64>,
}

impl HeatKernel {
    pub fn compute(
        rule: StepRule,
        lattice: &Lattice,
        lambda: Lambda,
        steps: usize,
        start: &LatticePoint,
        budget: &Budget,
    ) -> Result<HeatKernel> {
        let mut p = Propagator::new(rule, lattice, lambda, steps, start, budget)?;
        for _ in 0..steps {
            p.advance();
        }
        Ok(HeatKernel {
            rule,
            d: lattice.dim(),
            lambda: lambda.value(),
            steps,
            start: start.clone(),
            grid: p.grid,
            mass: p.mass,
        })
    }

    pub fn mass(&self, x: &LatticePoint) -> f64 {
        if x.dim() != self.d {
            return 0.0;
        }
        self.grid.index(x.coords()).map_or(0.0, |i| self.mass[i])
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn max_mass(&self) -> f64 {
        self.mass.iter().copied().fold(0.0, f64::max)
    }

    /// Calls `f(coords, mass)` for every stored site (including zero-mass ones).
    pub fn for_each_site(&self, mut f: impl FnMut(&[i64], f64)) {
        self.grid.for_each_site(|x, i| f(x, self.mass[i]));
    }

    /// Sites carrying positive mass, in lexicographic order.
    pub fn support(&self) -> Vec<(LatticePoint, f64)> {
        let mut out = Vec::new();
        self.for_each_site(|x, m| {
            if m > 0.0 {
                out.push((LatticePoint::new(x.to_vec()), m));
            }
        });
        out
    }
}

/// `P_start(X_steps = ·)` for the chosen step rule.
pub fn heat_kernel(
    rule: StepRule,
    lattice: &Lattice,
    lambda: Lambda,
    steps: usize,
    start: &LatticePoint,
    budget: &Budget,
) -> Result<HeatKernel> {
    HeatKernel::compute(rule, lattice, lambda, steps, start, budget)
}

/// `p^{(t)}(o, o)` for `t = 0..=steps` from a single forward run.
pub fn return_probabilities(
    rule: StepRule,
    lattice: &Lattice,
    lambda: Lambda,
    steps: usize,
    budget: &Budget,
) -> Result<Vec<f64>> {
    let o = lattice.origin();
    let mut p = Propagator::new(rule, lattice, lambda, steps, &o, budget)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(1.0);
    for _ in 0..steps {
        p.advance();
        out.push(p.mass_at(o.coords()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::{with_backend, Backend};

    fn lat(d: usize) -> Lattice {
        Lattice::new(d).unwrap()
    }

    fn lam(v: f64) -> Lambda {
        Lambda::new(v).unwrap()
    }

    fn hk(rule: StepRule, d: usize, l: f64, n: usize) -> HeatKernel {
        let l_ = lat(d);
        heat_kernel(rule, &l_, lam(l), n, &l_.origin(), &Budget::default()).unwrap()
    }

    #[test]
    fn zero_steps_is_point_mass() {
        let l = lat(3);
        let s = l.point([2, -1, 4]).unwrap();
        let k = heat_kernel(StepRule::Biased, &l, lam(0.4), 0, &s, &Budget::default()).unwrap();
        assert_eq!(k.mass(&s), 1.0);
        assert_eq!(k.support().len(), 1);
    }

    #[test]
    fn two_step_return_is_one_seventh() {
        let k = hk(StepRule::Biased, 2, 0.5, 2);
        let p = k.mass(&lat(2).origin());
        assert!((p - 1.0 / 7.0).abs() < 1e-16);
        // general d: λ / (2d - 1 + λ)
        for d in 1..=4 {
            let k = hk(StepRule::Biased, d, 0.3, 2);
            let expected = 0.3 / (2.0 * d as f64 - 1.0 + 0.3);
            assert!((k.mass(&lat(d).origin()) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn one_drifted_step_matches_step_law() {
        for d in 1..=4 {
            let k = hk(StepRule::Drifted, d, 0.35, 1);
            let l = lat(d);
            for i in 0..d {
                assert!((k.mass(&l.unit(i, true)) - 1.0 / (d as f64 * 1.35)).abs() < 1e-15);
                assert!((k.mass(&l.unit(i, false)) - 0.35 / (d as f64 * 1.35)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn conservation_and_parity() {
        for (rule, d, n) in [
            (StepRule::Biased, 1, 40),
            (StepRule::Biased, 2, 25),
            (StepRule::Drifted, 2, 25),
            (StepRule::Biased, 3, 12),
            (StepRule::Drifted, 4, 7),
        ] {
            let k = hk(rule, d, 0.45, n);
            assert!((k.total_mass() - 1.0).abs() < 1e-9);
            k.for_each_site(|x, m| {
                let norm: i64 = x.iter().map(|c| c.abs()).sum();
                if (norm as usize) > n || (norm as usize + n) % 2 == 1 {
                    assert_eq!(m, 0.0, "mass at {x:?}");
                }
            });
        }
    }

    #[test]
    fn biased_kernel_symmetries() {
        let k = hk(StepRule::Biased, 3, 0.6, 9);
        let l = lat(3);
        let base = k.mass(&l.point([3, -2, 2]).unwrap());
        assert!(base > 0.0);
        for p in [[-3, 2, 2], [2, 3, -2], [-2, -2, 3], [2, -3, 2]] {
            let v = k.mass(&l.point(p).unwrap());
            assert!((v - base).abs() < 1e-15 * base.max(1e-300) + 1e-18);
        }
    }

    #[test]
    fn orthant_agreement_before_touching_axes() {
        // start deep in the open first orthant; after n < min coord steps the biased
        // and drifted kernels coincide exactly.
        let l = lat(2);
        let s = l.point([9, 11]).unwrap();
        let a = heat_kernel(StepRule::Biased, &l, lam(0.5), 8, &s, &Budget::default()).unwrap();
        let b = heat_kernel(StepRule::Drifted, &l, lam(0.5), 8, &s, &Budget::default()).unwrap();
        a.for_each_site(|x, m| {
            let other = b.mass(&LatticePoint::new(x.to_vec()));
            assert!((m - other).abs() < 1e-12);
        });
    }

    #[test]
    fn budget_error_names_d_and_n() {
        let l = lat(3);
        let tight = Budget {
            max_states: 1000,
            ..Budget::default()
        };
        let err = heat_kernel(StepRule::Biased, &l, lam(0.5), 10, &l.origin(), &tight).unwrap_err();
        match err {
            Error::Budget { d, n, .. } => assert_eq!((d, n), (3, 10)),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn drifted_rejects_lambda_one() {
        let l = lat(2);
        assert!(heat_kernel(
            StepRule::Drifted,
            &l,
            lam(1.0),
            3,
            &l.origin(),
            &Budget::default()
        )
        .is_err());
    }

    #[test]
    fn backend_independent() {
        let a = with_backend(Backend::Sequential, || hk(StepRule::Biased, 2, 0.5, 30));
        let b = with_backend(Backend::Parallel, || hk(StepRule::Biased, 2, 0.5, 30));
        assert_eq!(a.mass, b.mass);
    }

    #[test]
    fn return_probabilities_match_kernels() {
        let l = lat(2);
        let r =
            return_probabilities(StepRule::Biased, &l, lam(0.5), 12, &Budget::default()).unwrap();
        for t in [0usize, 2, 7, 12] {
            assert!((r[t] - hk(StepRule::Biased, 2, 0.5, t).mass(&l.origin())).abs() < 1e-15);
        }
    }
}
