//! Partial sums of `Σ_m Σ_n Σ_x p^{(m)}(o, x) p^{(n)}(o, x)` for the drifted walk.
//!
//! The drifted walk picks an axis uniformly and then moves `±1` along it, so
//! the coincidence probability factorises over coordinates once the number of
//! steps spent on each axis is fixed. Peeling off one axis at a time gives a
//! recurrence over `(m, n)` whose cost does not depend on `d` beyond a factor.

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::kernel::Propagator;
use crate::lattice::{Lambda, Lattice, StepRule};
use crate::par;

/// Rows `0..=n_max` of the binomial pmf with success probability `p`.
fn binomial_rows(n_max: usize, p: f64) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(n_max + 1);
    rows.push(vec![1.0]);
    for n in 1..=n_max {
        let prev: &Vec<f64> = &rows[n - 1];
        let mut row = vec![0.0; n + 1];
        for (k, slot) in row.iter_mut().enumerate() {
            let stay = if k < n { prev[k] * (1.0 - p) } else { 0.0 };
            let up = if k > 0 { prev[k - 1] * p } else { 0.0 };
            *slot = stay + up;
        }
        rows.push(row);
    }
    rows
}

/// `E_d(m, n) = Σ_x p^{(m)}(o, x) p^{(n)}(o, x)` for all `m ≤ M`, `n ≤ N`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoincidenceTable {
    pub d: usize,
    pub lambda: f64,
    pub m_max: usize,
    pub n_max: usize,
    values: Vec<f64>,
}

impl CoincidenceTable {
    pub fn compute(
        lattice: &Lattice,
        lambda: Lambda,
        m_max: usize,
        n_max: usize,
        budget: &Budget,
    ) -> Result<CoincidenceTable> {
        let lambda = lambda.require_transient()?;
        let d = lattice.dim();
        let cols = n_max + 1;
        let terms = (d as u128) * ((m_max as u128 + 1) * (n_max as u128 + 1)).pow(2);
        if terms > budget.max_table_terms {
            return Err(Error::Budget {
                what: "coincidence table terms",
                d,
                n: m_max.max(n_max),
                needed: terms,
                limit: budget.max_table_terms,
            });
        }
        let top = m_max.max(n_max);
        let up = 1.0 / (1.0 + lambda.value());
        let walk = binomial_rows(top, up);

        // A(a, b) = Σ_y q^a(y) q^b(y) for the one-dimensional ±1 walk.
        // Position y = 2k - a after k up-steps; equal positions need 2k - a = 2l - b.
        let one_dim: Vec<f64> = par::map_indexed(m_max + 1, |a| {
            let mut row = vec![0.0; cols];
            for (b, slot) in row.iter_mut().enumerate() {
                if (a + b) % 2 == 1 {
                    continue;
                }
                let mut s = 0.0;
                for k in 0..=a {
                    let twice_l = 2 * k as i64 - a as i64 + b as i64;
                    if twice_l < 0 {
                        continue;
                    }
                    let l = (twice_l / 2) as usize;
                    if l <= b {
                        s += walk[a][k] * walk[b][l];
                    }
                }
                *slot = s;
            }
            row
        })
        .concat();

        let mut table = one_dim.clone();
        for j in 2..=d {
            let split = binomial_rows(top, 1.0 / j as f64);
            let prev = &table;
            table = par::map_indexed(m_max + 1, |m| {
                let mut row = vec![0.0; cols];
                for (n, slot) in row.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for a in 0..=m {
                        let wa = split[m][a];
                        let base_a = a * cols;
                        let base_rest = (m - a) * cols;
                        let mut inner = 0.0;
                        for b in 0..=n {
                            let v = one_dim[base_a + b];
                            if v != 0.0 {
                                inner += split[n][b] * v * prev[base_rest + n - b];
                            }
                        }
                        s += wa * inner;
                    }
                    *slot = s;
                }
                row
            })
            .concat();
        }
        Ok(CoincidenceTable {
            d,
            lambda: lambda.value(),
            m_max,
            n_max,
            values: table,
        })
    }

    pub fn value(&self, m: usize, n: usize) -> f64 {
        self.values[m * (self.n_max + 1) + n]
    }

    /// `Σ_{m ≤ M} Σ_{n ≤ N} E_d(m, n)`.
    pub fn partial_sum(&self, m: usize, n: usize) -> f64 {
        assert!(
            m <= self.m_max && n <= self.n_max,
            "partial sum outside the table"
        );
        (0..=m)
            .map(|i| (0..=n).map(|k| self.value(i, k)).sum::<f64>())
            .sum()
    }

    /// Diagonal partial sums `S(t, t)` for `t = 0..=min(M, N)`.
    pub fn diagonal_partial_sums(&self) -> Vec<f64> {
        let t_max = self.m_max.min(self.n_max);
        let mut out = Vec::with_capacity(t_max + 1);
        let mut s = 0.0;
        for t in 0..=t_max {
            // add the new row t (columns 0..t) and the new column t (rows 0..t-1)
            for k in 0..=t {
                s += self.value(t, k);
            }
            for i in 0..t {
                s += self.value(i, t);
            }
            out.push(s);
        }
        out
    }
}

/// Expected number of time pairs `(m, n)`, `m ≤ M`, `n ≤ N`, with `Z_m = W_n`
/// for two independent drifted walks from the origin.
pub fn expected_intersections(
    lattice: &Lattice,
    lambda: Lambda,
    m: usize,
    n: usize,
    budget: &Budget,
) -> Result<f64> {
    Ok(CoincidenceTable::compute(lattice, lambda, m, n, budget)?.partial_sum(m, n))
}

/// The same quantity as `Σ_x G_M(x) G_N(x)` with `G_T = Σ_{t ≤ T} p^{(t)}(o, ·)`
/// accumulated by dense DP. Used as an independent check.
pub fn expected_intersections_direct(
    lattice: &Lattice,
    lambda: Lambda,
    m: usize,
    n: usize,
    budget: &Budget,
) -> Result<f64> {
    let top = m.max(n);
    let mut p = Propagator::new(
        StepRule::Drifted,
        lattice,
        lambda,
        top,
        &lattice.origin(),
        budget,
    )?;
    let len = p.mass_slice().len();
    let mut green_m = vec![0.0; len];
    let mut green_n = vec![0.0; len];
    loop {
        let t = p.steps_taken();
        let mass = p.mass_slice();
        if t <= m {
            green_m.iter_mut().zip(mass).for_each(|(g, v)| *g += v);
        }
        if t <= n {
            green_n.iter_mut().zip(mass).for_each(|(g, v)| *g += v);
        }
        if t == top {
            break;
        }
        p.advance();
    }
    Ok(green_m.iter().zip(&green_n).map(|(a, b)| a * b).sum())
}
