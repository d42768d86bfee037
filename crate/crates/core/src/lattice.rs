//! Geometry of `Z^d`, the biased and drifted one-step kernels, edge
//! conductances and the closed-form constants attached to a pair `(d, λ)`.
//!
//! Moves out of a point are always enumerated in the fixed order
//! `+e_1, -e_1, +e_2, -e_2, ..., -e_d`. Samplers and the exact kernels share
//! this order so that walks driven by the same uniforms can be coupled.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bias parameter. Always finite and in `(0, 1]`; `λ = 1` is the simple walk.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Lambda(f64);

impl Lambda {
    /// Accepts `λ ∈ (0, 1]`.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value <= 1.0 {
            Ok(Lambda(value))
        } else {
            Err(Error::Lambda {
                value,
                range: "(0, 1]",
            })
        }
    }

    /// Accepts only the transient regime `λ ∈ (0, 1)`.
    pub fn transient(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(Lambda(value))
        } else {
            Err(Error::Lambda {
                value,
                range: "(0, 1)",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_transient(self) -> bool {
        self.0 < 1.0
    }

    pub(crate) fn require_transient(self) -> Result<Self> {
        Lambda::transient(self.0)
    }
}

/// A point of `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    /// Graph distance to the origin (the ℓ¹ norm).
    pub fn norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Coordinate-wise absolute value, mapping `Z^d` onto the closed first orthant.
    pub fn reflect(&self) -> LatticePoint {
        LatticePoint(self.0.iter().map(|c| c.abs()).collect())
    }

    /// True when some coordinate vanishes.
    pub fn is_axial(&self) -> bool {
        self.0.iter().any(|&c| c == 0)
    }

    /// True when every coordinate is strictly positive.
    pub fn in_open_first_orthant(&self) -> bool {
        self.0.iter().all(|&c| c > 0)
    }

    pub fn orthant_signature(&self) -> Vec<Sign> {
        self.0.iter().map(|&c| Sign::of(c)).collect()
    }

    pub fn l1_distance(&self, other: &LatticePoint) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.abs_diff(*b))
            .sum()
    }

    pub fn is_adjacent(&self, other: &LatticePoint) -> bool {
        self.dim() == other.dim() && self.l1_distance(other) == 1
    }

    /// The point reached by move `m` in the canonical move order.
    pub fn shifted(&self, m: Move) -> LatticePoint {
        let mut c = self.0.clone();
        c[m.axis] += m.delta();
        LatticePoint(c)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of(c: i64) -> Sign {
        match c.signum() {
            -1 => Sign::Neg,
            0 => Sign::Zero,
            _ => Sign::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Zero => '0',
            Sign::Pos => '+',
        }
    }
}

/// One of the `2d` unit moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub axis: usize,
    pub positive: bool,
}

impl Move {
    /// Move with canonical index `m`: even indices are `+e_{m/2}`, odd are `-e_{m/2}`.
    pub fn from_index(m: usize) -> Move {
        Move {
            axis: m / 2,
            positive: m % 2 == 0,
        }
    }

    pub fn delta(self) -> i64 {
        if self.positive {
            1
        } else {
            -1
        }
    }
}

/// Which one-step law drives a walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepRule {
    /// The λ-biased walk: every neighbour closer to the origin has weight λ, all others weight 1.
    Biased,
    /// The i.i.d. drifted walk: `+e_i` has weight 1, `-e_i` weight λ.
    Drifted,
}

/// Unnormalised weight of move `m` from a point with coordinate `coord` on the move's axis.
#[inline]
pub(crate) fn move_weight(rule: StepRule, coord: i64, positive: bool, lambda: f64) -> f64 {
    match rule {
        StepRule::Biased => {
            let inward = (coord > 0 && !positive) || (coord < 0 && positive);
            if inward {
                lambda
            } else {
                1.0
            }
        }
        StepRule::Drifted => {
            if positive {
                1.0
            } else {
                lambda
            }
        }
    }
}

/// Sum of move weights out of a point with `inward` nonzero coordinates.
#[inline]
pub(crate) fn total_weight(rule: StepRule, d: usize, nonzero: usize, lambda: f64) -> f64 {
    match rule {
        StepRule::Biased => (2 * d - nonzero) as f64 + lambda * nonzero as f64,
        StepRule::Drifted => d as f64 * (1.0 + lambda),
    }
}

/// Degree split of a vertex by the norm of its neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub total: usize,
    pub inward: usize,
    pub level: usize,
    pub outward: usize,
}

/// Output of [`Lattice::geometry`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    pub norm: u64,
    pub reflected: LatticePoint,
    pub on_axial: bool,
    pub orthant_signature: Vec<Sign>,
}

/// A one-step law: neighbours with their probabilities, in canonical move order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDistribution {
    pub entries: Vec<(LatticePoint, f64)>,
}

impl StepDistribution {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn probability_of(&self, y: &LatticePoint) -> f64 {
        self.entries
            .iter()
            .find(|(z, _)| z == y)
            .map_or(0.0, |(_, p)| *p)
    }
}

/// Closed-form quantities for a pair `(d, λ)` with `λ < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    pub d: usize,
    pub lambda: f64,
    /// Spectral radius `2√λ/(1+λ)`.
    pub rho: f64,
    /// Speed `(1-λ)/(1+λ)`.
    pub speed: f64,
    /// `d(1+λ)/(d(1+λ)+1-λ)`, the per-visit penalty for steps taken on the axial set.
    pub eta: f64,
    /// Mean of the drifted step.
    pub drift: Vec<f64>,
    /// Covariance of the drifted step, row-major `d x d`.
    pub covariance: Vec<Vec<f64>>,
}

impl KernelConstants {
    /// Largest eigenvalue of the covariance. The matrix is `a I - b 11ᵀ` with `b > 0`,
    /// so the top eigenvalue is `a = 1/d`.
    pub fn covariance_top_eigenvalue(&self) -> f64 {
        1.0 / self.d as f64
    }

    pub fn covariance_determinant(&self) -> f64 {
        let d = self.d as f64;
        let a = 1.0 / d;
        let b = (1.0 - self.lambda).powi(2) / (d * d * (1.0 + self.lambda).powi(2));
        a.powi(self.d as i32 - 1) * (a - d * b)
    }

    /// Gaussian prefactor `(2π)^{-d/2} det(Σ)^{-1/2}` of the local limit approximation.
    /// Reported only.
    pub fn llt_prefactor(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powf(-(self.d as f64) / 2.0)
            / self.covariance_determinant().sqrt()
    }
}

/// Dimension context. Every point handed to the lattice is checked against it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
}

impl Lattice {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dimension must be at least 1"));
        }
        Ok(Lattice { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> LatticePoint {
        LatticePoint(vec![0; self.dim])
    }

    pub fn point(&self, coords: impl Into<Vec<i64>>) -> Result<LatticePoint> {
        let p = LatticePoint(coords.into());
        self.check(&p)?;
        Ok(p)
    }

    pub fn check(&self, x: &LatticePoint) -> Result<()> {
        if x.dim() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            })
        }
    }

    /// Unit vector `±e_axis`.
    pub fn unit(&self, axis: usize, positive: bool) -> LatticePoint {
        self.origin().shifted(Move { axis, positive })
    }

    pub fn moves(&self) -> impl Iterator<Item = Move> {
        (0..2 * self.dim).map(Move::from_index)
    }

    pub fn neighbors<'a>(&self, x: &'a LatticePoint) -> impl Iterator<Item = LatticePoint> + 'a {
        (0..2 * self.dim).map(move |m| x.shifted(Move::from_index(m)))
    }

    pub fn degrees(&self, x: &LatticePoint) -> Result<DegreeProfile> {
        self.check(x)?;
        let inward = x.coords().iter().filter(|&&c| c != 0).count();
        Ok(DegreeProfile {
            total: 2 * self.dim,
            inward,
            level: 0,
            outward: 2 * self.dim - inward,
        })
    }

    pub fn geometry(&self, x: &LatticePoint) -> Result<Geometry> {
        self.check(x)?;
        Ok(Geometry {
            norm: x.norm(),
            reflected: x.reflect(),
            on_axial: x.is_axial(),
            orthant_signature: x.orthant_signature(),
        })
    }

    fn step_distribution(&self, rule: StepRule, x: &LatticePoint, lambda: f64) -> StepDistribution {
        let nonzero = x.coords().iter().filter(|&&c| c != 0).count();
        let total = total_weight(rule, self.dim, nonzero, lambda);
        let entries = self
            .moves()
            .map(|m| {
                let w = move_weight(rule, x.coords()[m.axis], m.positive, lambda);
                (x.shifted(m), w / total)
            })
            .collect();
        StepDistribution { entries }
    }

    /// One step of the λ-biased walk from `x`.
    pub fn biased_step(&self, x: &LatticePoint, lambda: Lambda) -> Result<StepDistribution> {
        self.check(x)?;
        Ok(self.step_distribution(StepRule::Biased, x, lambda.value()))
    }

    /// One step of the drifted walk (independent of position).
    pub fn drifted_step(&self, lambda: Lambda) -> Result<StepDistribution> {
        let lambda = lambda.require_transient()?;
        Ok(self.step_distribution(StepRule::Drifted, &self.origin(), lambda.value()))
    }

    pub fn step(
        &self,
        rule: StepRule,
        x: &LatticePoint,
        lambda: Lambda,
    ) -> Result<StepDistribution> {
        match rule {
            StepRule::Biased => self.biased_step(x, lambda),
            StepRule::Drifted => {
                self.check(x)?;
                let mut dist = self.drifted_step(lambda)?;
                for (y, _) in dist.entries.iter_mut() {
                    for (c, o) in y.0.iter_mut().zip(x.coords()) {
                        *c += o;
                    }
                }
                Ok(dist)
            }
        }
    }

    /// `λ^{-|e|}` where `|e|` is the smaller endpoint norm.
    pub fn conductance(&self, a: &LatticePoint, b: &LatticePoint, lambda: Lambda) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        if !a.is_adjacent(b) {
            return Err(Error::NotAdjacent {
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        Ok(edge_conductance(a.norm().min(b.norm()), lambda.value()))
    }

    /// `(d_x^+ + λ d_x^-) λ^{-|x|}`, the total conductance at `x`.
    pub fn invariant_measure(&self, x: &LatticePoint, lambda: Lambda) -> Result<f64> {
        let deg = self.degrees(x)?;
        let l = lambda.value();
        Ok((deg.outward as f64 + deg.inward as f64 * l) * l.powi(-(x.norm() as i32)))
    }

    pub fn constants(&self, lambda: Lambda) -> Result<KernelConstants> {
        let l = lambda.require_transient()?.value();
        let d = self.dim as f64;
        let m = (1.0 - l) / (d * (1.0 + l));
        let off = (1.0 - l).powi(2) / (d * d * (1.0 + l).powi(2));
        let covariance = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| if i == j { 1.0 / d - off } else { -off })
                    .collect()
            })
            .collect();
        Ok(KernelConstants {
            d: self.dim,
            lambda: l,
            rho: 2.0 * l.sqrt() / (1.0 + l),
            speed: (1.0 - l) / (1.0 + l),
            eta: d * (1.0 + l) / (d * (1.0 + l) + 1.0 - l),
            drift: vec![m; self.dim],
            covariance,
        })
    }
}

/// Conductance of an edge at distance `level` from the origin.
#[inline]
pub(crate) fn edge_conductance(level: u64, lambda: f64) -> f64 {
    lambda.powi(-(level as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lat(d: usize) -> Lattice {
        Lattice::new(d).unwrap()
    }

    fn lam(v: f64) -> Lambda {
        Lambda::new(v).unwrap()
    }

    /// Degree profile by classifying each neighbour by its norm.
    fn degrees_by_classification(l: &Lattice, x: &LatticePoint) -> DegreeProfile {
        let (mut inward, mut level, mut outward) = (0, 0, 0);
        for y in l.neighbors(x) {
            match y.norm().cmp(&x.norm()) {
                std::cmp::Ordering::Less => inward += 1,
                std::cmp::Ordering::Equal => level += 1,
                std::cmp::Ordering::Greater => outward += 1,
            }
        }
        DegreeProfile {
            total: inward + level + outward,
            inward,
            level,
            outward,
        }
    }

    #[test]
    fn degree_examples() {
        let l2 = lat(2);
        let d = l2.degrees(&l2.origin()).unwrap();
        assert_eq!((d.total, d.inward, d.level, d.outward), (4, 0, 0, 4));
        let d = l2.degrees(&l2.point([3, 0]).unwrap()).unwrap();
        assert_eq!((d.total, d.inward, d.level, d.outward), (4, 1, 0, 3));
        let l3 = lat(3);
        let d = l3.degrees(&l3.point([1, -2, 5]).unwrap()).unwrap();
        assert_eq!((d.total, d.inward, d.level, d.outward), (6, 3, 0, 3));
    }

    #[test]
    fn rejects_mismatched_dimension() {
        let l2 = lat(2);
        let x = LatticePoint::new(vec![1, 2, 3]);
        assert_eq!(
            l2.degrees(&x),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
        assert!(Lattice::new(0).is_err());
    }

    #[test]
    fn biased_step_examples() {
        let l2 = lat(2);
        let at_o = l2.biased_step(&l2.origin(), lam(0.5)).unwrap();
        assert!(at_o.entries.iter().all(|(_, p)| (*p - 0.25).abs() < 1e-15));

        let x = l2.point([1, 0]).unwrap();
        let dist = l2.biased_step(&x, lam(0.5)).unwrap();
        assert!((dist.probability_of(&l2.origin()) - 1.0 / 7.0).abs() < 1e-15);
        for y in [[2, 0], [1, 1], [1, -1]] {
            let p = dist.probability_of(&l2.point(y).unwrap());
            assert!((p - 2.0 / 7.0).abs() < 1e-15);
        }

        let x = l2.point([4, -7]).unwrap();
        let simple = l2.biased_step(&x, lam(1.0)).unwrap();
        assert!(simple
            .entries
            .iter()
            .all(|(_, p)| (*p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn lambda_validation() {
        assert!(Lambda::new(0.0).is_err());
        assert!(Lambda::new(-0.3).is_err());
        assert!(Lambda::new(1.5).is_err());
        assert!(Lambda::new(f64::NAN).is_err());
        assert!(Lambda::new(1.0).is_ok());
        assert!(Lambda::transient(1.0).is_err());
        let l = lat(2);
        assert!(l.drifted_step(lam(1.0)).is_err());
        assert!(l.constants(lam(1.0)).is_err());
    }

    #[test]
    fn drifted_step_examples() {
        let l2 = lat(2);
        let dist = l2.drifted_step(lam(0.5)).unwrap();
        for i in 0..2 {
            assert!((dist.probability_of(&l2.unit(i, true)) - 1.0 / 3.0).abs() < 1e-15);
            assert!((dist.probability_of(&l2.unit(i, false)) - 1.0 / 6.0).abs() < 1e-15);
        }
        let l3 = lat(3);
        let dist = l3.drifted_step(lam(0.2)).unwrap();
        for i in 0..3 {
            assert!((dist.probability_of(&l3.unit(i, true)) - 1.0 / 3.6).abs() < 1e-15);
            assert!((dist.probability_of(&l3.unit(i, false)) - 0.2 / 3.6).abs() < 1e-15);
        }
        let near_one = l3.drifted_step(lam(1.0 - 1e-9)).unwrap();
        assert!(near_one
            .entries
            .iter()
            .all(|(_, p)| (*p - 1.0 / 6.0).abs() < 1e-8));
    }

    #[test]
    fn geometry_examples() {
        let l2 = lat(2);
        let g = l2.geometry(&l2.origin()).unwrap();
        assert_eq!(g.norm, 0);
        assert_eq!(g.reflected, l2.origin());
        assert!(g.on_axial);
        assert_eq!(g.orthant_signature, vec![Sign::Zero, Sign::Zero]);

        let g = l2.geometry(&l2.point([-2, 3]).unwrap()).unwrap();
        assert_eq!(g.norm, 5);
        assert_eq!(g.reflected.coords(), &[2, 3]);
        assert!(!g.on_axial);
        assert_eq!(g.orthant_signature, vec![Sign::Neg, Sign::Pos]);

        let l3 = lat(3);
        let g = l3.geometry(&l3.point([4, 0, -1]).unwrap()).unwrap();
        assert_eq!(g.norm, 5);
        assert_eq!(g.reflected.coords(), &[4, 0, 1]);
        assert!(g.on_axial);
        let sig: String = g.orthant_signature.iter().map(|s| s.symbol()).collect();
        assert_eq!(sig, "+0-");
    }

    #[test]
    fn conductance_examples() {
        let l2 = lat(2);
        let c = l2
            .conductance(&l2.origin(), &l2.unit(0, true), lam(0.5))
            .unwrap();
        assert_eq!(c, 1.0);
        let l1 = lat(1);
        for i in -6i64..=6 {
            let a = l1.point([i - 1]).unwrap();
            let b = l1.point([i]).unwrap();
            let expected = 0.5f64.powi(-(i.abs().min((i - 1).abs()) as i32));
            assert_eq!(l1.conductance(&a, &b, lam(0.5)).unwrap(), expected);
        }
        let a = l2.point([3, -4]).unwrap();
        let b = l2.point([3, -5]).unwrap();
        assert_eq!(l2.conductance(&a, &b, lam(1.0)).unwrap(), 1.0);
        assert!(matches!(
            l2.conductance(&a, &l2.origin(), lam(0.5)),
            Err(Error::NotAdjacent { .. })
        ));
    }

    #[test]
    fn invariant_measure_examples() {
        let l2 = lat(2);
        assert_eq!(l2.invariant_measure(&l2.origin(), lam(0.5)).unwrap(), 4.0);
        assert_eq!(
            l2.invariant_measure(&l2.point([1, 0]).unwrap(), lam(0.5))
                .unwrap(),
            7.0
        );
        for x in [[0, 0], [5, -2], [0, 9]] {
            let p = l2.point(x).unwrap();
            assert_eq!(l2.invariant_measure(&p, lam(1.0)).unwrap(), 4.0);
        }
    }

    #[test]
    fn constants_examples() {
        let l2 = lat(2);
        let k = l2.constants(lam(0.5)).unwrap();
        assert!((k.rho - 2.0 * 0.5f64.sqrt() / 1.5).abs() < 1e-15);
        assert!((k.rho - 0.9428090415820634).abs() < 1e-12);
        assert!((k.speed - 1.0 / 3.0).abs() < 1e-15);
        assert!((k.eta - 6.0 / 7.0).abs() < 1e-15);

        let l3 = lat(3);
        let k = l3.constants(lam(0.5)).unwrap();
        for m in &k.drift {
            assert!((m - 1.0 / 9.0).abs() < 1e-15);
        }
        assert!((k.covariance[0][0] - (1.0 / 3.0 - 1.0 / 81.0)).abs() < 1e-15);
        assert!((k.covariance[0][1] + 1.0 / 81.0).abs() < 1e-15);

        let k = l2.constants(lam(1.0 - 1e-12)).unwrap();
        assert!((k.rho - 1.0).abs() < 1e-9);
        assert!(k.speed.abs() < 1e-9);
    }

    #[test]
    fn constants_monotone_in_lambda() {
        let l = lat(3);
        let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
        for w in grid.windows(2) {
            let a = l.constants(lam(w[0])).unwrap();
            let b = l.constants(lam(w[1])).unwrap();
            assert!(a.rho < b.rho);
            assert!(a.speed > b.speed);
        }
    }

    #[test]
    fn covariance_eigen_structure() {
        // Σ·(1,..,1) has eigenvalue 1/d - d·b; any vector orthogonal to (1,..,1) has 1/d.
        let l = lat(4);
        let k = l.constants(lam(0.3)).unwrap();
        let v = [1.0, -1.0, 0.0, 0.0];
        for i in 0..4 {
            let sv: f64 = (0..4).map(|j| k.covariance[i][j] * v[j]).sum();
            assert!((sv - v[i] / 4.0).abs() < 1e-15);
        }
        let ones: f64 = (0..4).map(|j| k.covariance[0][j]).sum();
        assert!(ones < 0.25 && ones > 0.0);
        assert_eq!(k.covariance_top_eigenvalue(), 0.25);
        let det_by_eigs = 0.25f64.powi(3) * ones;
        assert!((k.covariance_determinant() - det_by_eigs).abs() < 1e-15);
    }

    fn point_strategy(d: usize) -> impl Strategy<Value = LatticePoint> {
        proptest::collection::vec(-6i64..=6, d).prop_map(LatticePoint::new)
    }

    proptest! {
        #[test]
        fn step_laws_are_normalised(
            (d, x) in (1usize..=5).prop_flat_map(|d| (Just(d), point_strategy(d))),
            l in 0.01f64..0.99,
        ) {
            let lat = lat(d);
            let dist = lat.biased_step(&x, lam(l)).unwrap();
            prop_assert!((dist.total() - 1.0).abs() < 1e-12);
            prop_assert_eq!(dist.entries.len(), 2 * d);
            for (y, p) in &dist.entries {
                prop_assert!(*p > 0.0);
                prop_assert!(y.is_adjacent(&x));
            }
            prop_assert_eq!(lat.degrees(&x).unwrap(), degrees_by_classification(&lat, &x));
            prop_assert_eq!(x.reflect().reflect(), x.reflect());
            prop_assert!(lat.invariant_measure(&x, lam(l)).unwrap() > 2.0 * d as f64 * l);
        }

        #[test]
        fn biased_equals_drifted_in_open_first_orthant(
            (d, x) in (1usize..=5).prop_flat_map(|d| (Just(d), proptest::collection::vec(1i64..=9, d))),
            l in 0.01f64..0.99,
        ) {
            let lat = lat(d);
            let x = LatticePoint::new(x);
            let biased = lat.biased_step(&x, lam(l)).unwrap();
            let drifted = lat.step(StepRule::Drifted, &x, lam(l)).unwrap();
            for ((y1, p1), (y2, p2)) in biased.entries.iter().zip(&drifted.entries) {
                prop_assert_eq!(y1, y2);
                prop_assert!((p1 - p2).abs() < 1e-15);
            }
        }

        // Reversibility holds on every edge of Z^d, including the origin and the axial set:
        // the biased walk is the conductance walk for c(e) = λ^{-|e|}.
        #[test]
        fn detailed_balance_and_conductance_consistency(
            (d, x, m) in (1usize..=4).prop_flat_map(|d| (Just(d), point_strategy(d), 0..2 * d)),
            l in 0.05f64..0.95,
        ) {
            let lat = lat(d);
            let y = x.shifted(Move::from_index(m));
            let pxy = lat.biased_step(&x, lam(l)).unwrap().probability_of(&y);
            let pyx = lat.biased_step(&y, lam(l)).unwrap().probability_of(&x);
            let pi_x = lat.invariant_measure(&x, lam(l)).unwrap();
            let pi_y = lat.invariant_measure(&y, lam(l)).unwrap();
            prop_assert!((pi_x * pxy - pi_y * pyx).abs() <= 1e-12 * pi_x * pxy);

            let c = lat.conductance(&x, &y, lam(l)).unwrap();
            prop_assert!((pxy - c / pi_x).abs() < 1e-12);
        }
    }
}
