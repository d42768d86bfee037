//! Lattice-path counting: Catalan numbers, bridges with a prescribed number
//! of zeros, and one-step products along explicit paths.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::lattice::{move_weight, total_weight, Lambda, Lattice, LatticePoint, StepRule};
use crate::par;

/// `C_ℓ = binom(2ℓ, ℓ) / (ℓ + 1)`.
pub fn catalan(l: usize) -> BigUint {
    // binom(2ℓ, ℓ) built multiplicatively; every partial quotient is an integer
    let mut b = BigUint::one();
    for i in 0..l {
        b = b * BigUint::from(2 * l - i) / BigUint::from(i + 1);
    }
    b / BigUint::from(l + 1)
}

/// `C_0..=C_{ℓ_max}` from `C_{ℓ+1} = Σ_i C_i C_{ℓ-i}`.
pub fn catalan_by_recurrence(l_max: usize) -> Vec<BigUint> {
    let mut c = vec![BigUint::one()];
    for l in 0..l_max {
        let next = (0..=l).map(|i| &c[i] * &c[l - i]).sum();
        c.push(next);
    }
    c
}

/// `Σ_{ℓ=0}^{L} C_ℓ / 4^{ℓ+1}`, which increases to `1/2`.
pub fn catalan_tail(big_l: usize) -> f64 {
    // successive terms have ratio C_{ℓ+1} / (4 C_ℓ) = (2ℓ + 1) / (2ℓ + 4)
    let mut term = 0.25;
    let mut sum = term;
    for l in 0..big_l {
        term *= (2 * l + 1) as f64 / (2 * l + 4) as f64;
        sum += term;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BnkMode {
    /// Enumerate all `4^n` sign sequences of length `2n`.
    Brute,
    /// Split each bridge into its excursions away from 0.
    Excursion,
}

/// `|B_{n,k}|` for `k = 0..=n` by exhaustive enumeration, where `k` is the
/// number of times in `1..=2n` at which the bridge sits at 0.
fn brute_row(n: usize) -> Vec<u64> {
    let len = 2 * n;
    if n == 0 {
        return vec![1];
    }
    // shard on the top bits; each shard returns its own histogram
    let shard_bits = len.min(8);
    let low_bits = len - shard_bits;
    let hist: Vec<Vec<u64>> = par::map_indexed(1usize << shard_bits, |hi| {
        let mut h = vec![0u64; n + 1];
        for lo in 0..(1u64 << low_bits) {
            let word = ((hi as u64) << low_bits) | lo;
            if word.count_ones() as usize != n {
                continue;
            }
            let (mut x, mut zeros) = (0i64, 0usize);
            for t in 0..len {
                x += if (word >> t) & 1 == 1 { 1 } else { -1 };
                if x == 0 {
                    zeros += 1;
                }
            }
            h[zeros] += 1;
        }
        h
    });
    let mut row = vec![0u64; n + 1];
    for h in hist {
        for (r, v) in row.iter_mut().zip(h) {
            *r += v;
        }
    }
    row
}

/// Exact table `F_k(n) = |B_{n,k}|` for `0 ≤ k ≤ n ≤ n_max`.
///
/// An excursion of length `2j` has `2 C_{j-1}` shapes, so
/// `F_k(n) = Σ_{j=1}^{n} 2 C_{j-1} F_{k-1}(n - j)` with `F_0(n) = [n = 0]`.
#[derive(Debug, Clone)]
pub struct BnkTable {
    n_max: usize,
    rows: Vec<Vec<BigUint>>,
}

impl BnkTable {
    pub fn new(n_max: usize) -> BnkTable {
        let cat = catalan_by_recurrence(n_max);
        let excursions: Vec<BigUint> = (0..=n_max)
            .map(|j| {
                if j == 0 {
                    BigUint::zero()
                } else {
                    &cat[j - 1] * 2u32
                }
            })
            .collect();
        // by_k[k][n]
        let mut by_k: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
        let mut first = vec![BigUint::zero(); n_max + 1];
        first[0] = BigUint::one();
        by_k.push(first);
        for k in 1..=n_max {
            let prev = &by_k[k - 1];
            let row: Vec<BigUint> = par::map_indexed(n_max + 1, |n| {
                (1..=n)
                    .filter(|&j| !prev[n - j].is_zero())
                    .map(|j| &excursions[j] * &prev[n - j])
                    .sum()
            });
            by_k.push(row);
        }
        let rows = (0..=n_max)
            .map(|n| (0..=n).map(|k| by_k[k][n].clone()).collect())
            .collect();
        BnkTable { n_max, rows }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n: usize, k: usize) -> &BigUint {
        &self.rows[n][k]
    }

    pub fn row(&self, n: usize) -> &[BigUint] {
        &self.rows[n]
    }
}

/// `|B_{n,k}|`: bridges `x_0 = x_{2n} = 0` of length `2n` that are at 0 at
/// exactly `k` of the times `1, …, 2n`.
pub fn count_bnk(n: usize, k: usize, mode: BnkMode, budget: &Budget) -> Result<BigUint> {
    if k > n {
        return Err(Error::param(format!("k = {k} exceeds n = {n}")));
    }
    match mode {
        BnkMode::Brute => {
            if n > budget.max_brute_n {
                return Err(Error::Budget {
                    what: "brute-force bridge enumeration",
                    d: 1,
                    n,
                    needed: n as u128,
                    limit: budget.max_brute_n as u128,
                });
            }
            Ok(BigUint::from(brute_row(n)[k]))
        }
        BnkMode::Excursion => Ok(BnkTable::new(n).get(n, k).clone()),
    }
}

/// `|B_{n,k}| n^{3/2} / (k^{5/2} 4^n)`, the constant needed for one `(n, k)`.
fn needed_constant(count: &BigUint, n: usize, k: usize) -> f64 {
    let c = count.to_f64().unwrap_or(f64::INFINITY);
    c * (n as f64).powf(1.5) / ((k as f64).powf(2.5) * 4f64.powi(n as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BnkBoundReport {
    pub n_max: usize,
    /// Smallest `c` with `|B_{n,k}| ≤ c k^{5/2} 4^n / n^{3/2}` for all `1 ≤ k ≤ n ≤ n_max`.
    pub c_min: f64,
    /// Where the maximum is attained.
    pub argmax: (usize, usize),
}

pub fn bnk_bound_report(n_max: usize, mode: BnkMode, budget: &Budget) -> Result<BnkBoundReport> {
    if n_max == 0 {
        return Err(Error::param("n_max must be at least 1"));
    }
    let rows: Vec<Vec<BigUint>> = match mode {
        BnkMode::Brute => {
            if n_max > budget.max_brute_n {
                return Err(Error::Budget {
                    what: "brute-force bridge enumeration",
                    d: 1,
                    n: n_max,
                    needed: n_max as u128,
                    limit: budget.max_brute_n as u128,
                });
            }
            (0..=n_max)
                .map(|n| brute_row(n).into_iter().map(BigUint::from).collect())
                .collect()
        }
        BnkMode::Excursion => {
            let t = BnkTable::new(n_max);
            (0..=n_max).map(|n| t.row(n).to_vec()).collect()
        }
    };
    let mut best = (0.0, (1, 1));
    for (n, row) in rows.iter().enumerate().skip(1) {
        for (k, count) in row.iter().enumerate().skip(1) {
            let c = needed_constant(count, n, k);
            if c > best.0 {
                best = (c, (n, k));
            }
        }
    }
    Ok(BnkBoundReport {
        n_max,
        c_min: best.0,
        argmax: best.1,
    })
}

/// First `(n, k)` with `1 ≤ k ≤ n ≤ n_max` violating the bound with constant `c`.
pub fn bnk_bound_violation(table: &BnkTable, c: f64) -> Option<(usize, usize)> {
    (1..=table.n_max()).find_map(|n| {
        (1..=n)
            .find(|&k| needed_constant(table.get(n, k), n, k) > c)
            .map(|k| (n, k))
    })
}

/// A nearest-neighbour path on ℤ started at 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneDimPath {
    steps: Vec<i8>,
}

impl OneDimPath {
    pub fn new(steps: Vec<i8>) -> Result<OneDimPath> {
        if steps.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::param("one-dimensional steps must be +1 or -1"));
        }
        Ok(OneDimPath { steps })
    }

    /// The path through the given values, which must start at 0.
    pub fn from_values(values: &[i64]) -> Result<OneDimPath> {
        if values.first() != Some(&0) {
            return Err(Error::param("path must start at 0"));
        }
        let steps = values
            .windows(2)
            .map(|w| match w[1] - w[0] {
                1 => Ok(1),
                -1 => Ok(-1),
                _ => Err(Error::NotAdjacent {
                    a: w[0].to_string(),
                    b: w[1].to_string(),
                }),
            })
            .collect::<Result<Vec<i8>>>()?;
        Ok(OneDimPath { steps })
    }

    pub fn steps(&self) -> &[i8] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Prefix sums `x_0 = 0, x_1, …`.
    pub fn values(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut x = 0i64;
        out.push(x);
        for &s in &self.steps {
            x += s as i64;
            out.push(x);
        }
        out
    }

    /// Number of times after the start at which the path is at 0.
    pub fn zero_hits(&self) -> usize {
        self.values().iter().skip(1).filter(|&&x| x == 0).count()
    }
}

/// A nearest-neighbour path in ℤᵈ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePath {
    vertices: Vec<LatticePoint>,
}

impl LatticePath {
    pub fn new(lattice: &Lattice, vertices: Vec<LatticePoint>) -> Result<LatticePath> {
        if vertices.is_empty() {
            return Err(Error::param("path must contain at least one vertex"));
        }
        for v in &vertices {
            lattice.check(v)?;
        }
        for w in vertices.windows(2) {
            if !w[0].is_adjacent(&w[1]) {
                return Err(Error::NotAdjacent {
                    a: w[0].to_string(),
                    b: w[1].to_string(),
                });
            }
        }
        Ok(LatticePath { vertices })
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }

    /// Coordinate `i` of the path with null moves deleted.
    pub fn projection(&self, axis: usize) -> OneDimPath {
        let steps = self
            .vertices
            .windows(2)
            .filter_map(|w| match w[1].coords()[axis] - w[0].coords()[axis] {
                0 => None,
                s => Some(s as i8),
            })
            .collect();
        OneDimPath { steps }
    }

    /// Visits to the axial set after the start.
    pub fn axial_hits(&self) -> usize {
        self.vertices
            .iter()
            .skip(1)
            .filter(|v| v.is_axial())
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathProbability {
    pub probability: f64,
    /// `n(γ)`: visits to the axial set after the start.
    pub hits: usize,
    /// `n(γ_i)` for each coordinate projection.
    pub projected_hits: Vec<usize>,
    /// `η^{Σ n(γ_i)} (√λ/(d(1+λ)))^{2n}` for closed paths of length `2n`.
    pub eta_bound: Option<f64>,
}

/// Product of one-step biased-walk probabilities along `path`, which must start at `o`.
pub fn path_probability(
    lattice: &Lattice,
    path: &LatticePath,
    lambda: Lambda,
) -> Result<PathProbability> {
    let start = &path.vertices()[0];
    lattice.check(start)?;
    if !start.is_origin() {
        return Err(Error::param("path must start at the origin"));
    }
    let d = lattice.dim();
    let l = lambda.value();
    let mut probability = 1.0;
    for w in path.vertices().windows(2) {
        let (x, y) = (&w[0], &w[1]);
        let axis = (0..d)
            .find(|&i| x.coords()[i] != y.coords()[i])
            .expect("adjacent points differ in one coordinate");
        let positive = y.coords()[axis] > x.coords()[axis];
        let nonzero = x.coords().iter().filter(|&&c| c != 0).count();
        probability *= move_weight(StepRule::Biased, x.coords()[axis], positive, l)
            / total_weight(StepRule::Biased, d, nonzero, l);
    }
    let projected_hits: Vec<usize> = (0..d).map(|i| path.projection(i).zero_hits()).collect();
    let eta_bound = (path.is_closed() && path.len() % 2 == 0 && lambda.is_transient()).then(|| {
        let eta = d as f64 * (1.0 + l) / (d as f64 * (1.0 + l) + 1.0 - l);
        let s: usize = projected_hits.iter().sum();
        eta.powi(s as i32) * (l.sqrt() / (d as f64 * (1.0 + l))).powi(path.len() as i32)
    });
    Ok(PathProbability {
        probability,
        hits: path.axial_hits(),
        projected_hits,
        eta_bound,
    })
}

/// Calls `f` on every closed path of `len` steps from the origin.
pub fn for_each_closed_path(lattice: &Lattice, len: usize, mut f: impl FnMut(&LatticePath)) {
    fn go(
        lattice: &Lattice,
        remaining: usize,
        stack: &mut Vec<LatticePoint>,
        f: &mut dyn FnMut(&LatticePath),
    ) {
        let last = stack.last().expect("nonempty");
        if remaining == 0 {
            if last.is_origin() {
                let path = LatticePath {
                    vertices: stack.clone(),
                };
                f(&path);
            }
            return;
        }
        if last.norm() as usize > remaining {
            return;
        }
        let next: Vec<LatticePoint> = lattice.neighbors(last).collect();
        for y in next {
            stack.push(y);
            go(lattice, remaining - 1, stack, f);
            stack.pop();
        }
    }
    let mut stack = vec![lattice.origin()];
    go(lattice, len, &mut stack, &mut f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::binomial;
    use proptest::prelude::*;

    fn binom(n: u64, k: u64) -> BigUint {
        binomial(BigUint::from(n), BigUint::from(k))
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0), BigUint::one());
        assert_eq!(catalan(3), BigUint::from(5u32));
        assert_eq!(catalan(10), BigUint::from(16796u32));
        let rec = catalan_by_recurrence(60);
        for (l, c) in rec.iter().enumerate() {
            assert_eq!(&catalan(l), c);
            assert_eq!(c * BigUint::from(l + 1), binom(2 * l as u64, l as u64));
        }
    }

    #[test]
    fn catalan_tail_values() {
        assert_eq!(catalan_tail(0), 0.25);
        assert!((catalan_tail(1) - 0.3125).abs() < 1e-15);
        let t = catalan_tail(100);
        assert!(t > 0.45 && t < 0.5);
        // the tail beyond L is asymptotically 1/sqrt(pi L)/2 ... just check the order
        assert!((0.5 - t) < 0.05 && (0.5 - catalan_tail(400)) < (0.5 - t) / 1.9);
    }

    #[test]
    fn small_bridge_counts() {
        let b = Budget::default();
        for mode in [BnkMode::Brute, BnkMode::Excursion] {
            assert_eq!(count_bnk(1, 1, mode, &b).unwrap(), BigUint::from(2u32));
            assert_eq!(count_bnk(2, 2, mode, &b).unwrap(), BigUint::from(4u32));
            assert_eq!(count_bnk(1, 0, mode, &b).unwrap(), BigUint::zero());
            assert_eq!(count_bnk(0, 0, mode, &b).unwrap(), BigUint::one());
            // n = 2, k = 1: the two excursions of length 4
            assert_eq!(count_bnk(2, 1, mode, &b).unwrap(), BigUint::from(2u32));
        }
        assert!(count_bnk(3, 4, BnkMode::Excursion, &b).is_err());
    }

    #[test]
    fn brute_and_excursion_agree() {
        let table = BnkTable::new(9);
        for n in 1..=9 {
            let row = brute_row(n);
            let mut total = BigUint::zero();
            for k in 0..=n {
                assert_eq!(BigUint::from(row[k]), *table.get(n, k), "n={n} k={k}");
                total += BigUint::from(row[k]);
            }
            assert_eq!(total, binom(2 * n as u64, n as u64));
        }
    }

    #[test]
    fn brute_mode_budget() {
        let err = count_bnk(12, 3, BnkMode::Brute, &Budget::default()).unwrap_err();
        assert!(matches!(err, Error::Budget { n: 12, .. }));
    }

    #[test]
    fn bound_report() {
        let b = Budget::default();
        let r1 = bnk_bound_report(1, BnkMode::Brute, &b).unwrap();
        assert!((r1.c_min - 0.5).abs() < 1e-15);
        let r9 = bnk_bound_report(9, BnkMode::Brute, &b).unwrap();
        let r9e = bnk_bound_report(9, BnkMode::Excursion, &b).unwrap();
        assert_eq!(r9, r9e);
        assert!(r9.c_min.is_finite() && r9.c_min >= r1.c_min);
        let table = BnkTable::new(60);
        assert_eq!(bnk_bound_violation(&table, 2.0 * r9.c_min), None);
    }

    #[test]
    fn one_dim_paths() {
        let p = OneDimPath::from_values(&[0, 1, 0, -1, 0]).unwrap();
        assert_eq!(p.zero_hits(), 2);
        assert_eq!(p.steps(), &[1, -1, -1, 1]);
        assert!(OneDimPath::from_values(&[0, 2]).is_err());
        assert!(OneDimPath::new(vec![1, 0]).is_err());
    }

    fn pts(l: &Lattice, raw: &[&[i64]]) -> LatticePath {
        LatticePath::new(
            l,
            raw.iter().map(|c| l.point(c.to_vec()).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn path_probability_examples() {
        let l2 = Lattice::new(2).unwrap();
        let half = Lambda::new(0.5).unwrap();
        let back = pts(&l2, &[&[0, 0], &[1, 0], &[0, 0]]);
        let r = path_probability(&l2, &back, half).unwrap();
        assert!((r.probability - 1.0 / 28.0).abs() < 1e-16);
        assert_eq!(r.hits, 2);
        assert_eq!(r.projected_hits, vec![1, 0]);
        assert!(r.probability <= r.eta_bound.unwrap());

        // (1, 0) lies on a coordinate hyperplane in d = 2, so the single step counts one hit
        let one = pts(&l2, &[&[0, 0], &[1, 0]]);
        let r = path_probability(&l2, &one, half).unwrap();
        assert_eq!(
            (r.probability, r.hits, r.projected_hits.clone()),
            (0.25, 1, vec![0, 0])
        );
        assert_eq!(r.eta_bound, None);

        let l1 = Lattice::new(1).unwrap();
        let r = path_probability(&l1, &pts(&l1, &[&[0], &[1]]), half).unwrap();
        assert_eq!((r.probability, r.hits), (0.5, 0));
    }

    #[test]
    fn path_validation() {
        let l = Lattice::new(2).unwrap();
        let bad = vec![l.point([0, 0]).unwrap(), l.point([1, 1]).unwrap()];
        assert!(matches!(
            LatticePath::new(&l, bad),
            Err(Error::NotAdjacent { .. })
        ));
        let off = pts(&l, &[&[1, 0], &[0, 0]]);
        assert!(path_probability(&l, &off, Lambda::new(0.5).unwrap()).is_err());
    }

    #[test]
    fn closed_path_count() {
        let l = Lattice::new(2).unwrap();
        let mut count = 0u64;
        for_each_closed_path(&l, 6, |_| count += 1);
        // closed walks of length 2n on Z^2 number binom(2n, n)^2
        assert_eq!(count, 400);
    }

    fn closed_path_strategy(d: usize, max_half: usize) -> impl Strategy<Value = Vec<usize>> {
        // a closed path: n moves and their reversals, shuffled
        (1..=max_half).prop_flat_map(move |n| {
            proptest::collection::vec(0..2 * d, n).prop_flat_map(|moves| {
                let mut all = moves.clone();
                all.extend(moves.iter().map(|m| m ^ 1));
                Just(all).prop_shuffle()
            })
        })
    }

    proptest! {
        #[test]
        fn hits_dominate_projected_hits_and_bound_holds(
            (d, moves) in (1usize..=4).prop_flat_map(|d| (Just(d), closed_path_strategy(d, 8))),
            lv in 0.05f64..0.95,
        ) {
            let l = Lattice::new(d).unwrap();
            let mut verts = vec![l.origin()];
            for &m in &moves {
                verts.push(verts.last().unwrap().shifted(crate::lattice::Move::from_index(m)));
            }
            let path = LatticePath::new(&l, verts).unwrap();
            prop_assert!(path.is_closed());
            let r = path_probability(&l, &path, Lambda::new(lv).unwrap()).unwrap();
            prop_assert!(r.hits >= r.projected_hits.iter().sum::<usize>());
            prop_assert!(r.probability <= r.eta_bound.unwrap() * (1.0 + 1e-12));
        }
    }
}
