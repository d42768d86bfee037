//! Exact-rational heat kernels for small `n` and `d`, used to bound the
//! floating-point error of the dense DP.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticePoint, StepRule};

pub const MAX_EXACT_STEPS: usize = 20;
pub const MAX_EXACT_DIM: usize = 2;

/// Parses `λ = numer/denom` as an exact rational in `(0, 1]`.
pub fn rational_lambda(numer: i64, denom: i64) -> Result<BigRational> {
    if denom <= 0 || numer <= 0 || numer > denom {
        return Err(Error::Lambda {
            value: numer as f64 / denom as f64,
            range: "(0, 1]",
        });
    }
    Ok(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
}

fn one_step(
    rule: StepRule,
    lattice: &Lattice,
    x: &LatticePoint,
    lambda: &BigRational,
) -> Vec<(LatticePoint, BigRational)> {
    let d = lattice.dim();
    let dd = BigRational::from_integer(BigInt::from(d as i64));
    match rule {
        StepRule::Drifted => {
            let denom = &dd * (BigRational::one() + lambda);
            lattice
                .moves()
                .map(|m| {
                    let w = if m.positive {
                        BigRational::one()
                    } else {
                        lambda.clone()
                    };
                    (x.shifted(m), w / &denom)
                })
                .collect()
        }
        StepRule::Biased => {
            let degree = BigRational::from_integer(BigInt::from(2 * d as i64));
            if x.is_origin() {
                let p = BigRational::one() / degree;
                return lattice.neighbors(x).map(|y| (y, p.clone())).collect();
            }
            let inward = x.coords().iter().filter(|&&c| c != 0).count();
            let denom = degree
                + (lambda - BigRational::one())
                    * BigRational::from_integer(BigInt::from(inward as i64));
            let xn = x.norm();
            lattice
                .neighbors(x)
                .map(|y| {
                    let num = if y.norm() + 1 == xn {
                        lambda.clone()
                    } else {
                        BigRational::one()
                    };
                    (y, num / &denom)
                })
                .collect()
        }
    }
}

/// Exact law after `steps` steps, as a map from site to probability.
pub fn heat_kernel_exact(
    rule: StepRule,
    lattice: &Lattice,
    lambda: &BigRational,
    steps: usize,
    start: &LatticePoint,
) -> Result<BTreeMap<LatticePoint, BigRational>> {
    lattice.check(start)?;
    if steps > MAX_EXACT_STEPS || lattice.dim() > MAX_EXACT_DIM {
        return Err(Error::Budget {
            what: "exact rational kernel",
            d: lattice.dim(),
            n: steps,
            needed: steps as u128,
            limit: MAX_EXACT_STEPS as u128,
        });
    }
    if lambda <= &BigRational::zero() || lambda > &BigRational::one() {
        return Err(Error::Lambda {
            value: f64::NAN,
            range: "(0, 1]",
        });
    }
    let mut current = BTreeMap::new();
    current.insert(start.clone(), BigRational::one());
    for _ in 0..steps {
        let mut next: BTreeMap<LatticePoint, BigRational> = BTreeMap::new();
        for (x, m) in &current {
            for (y, p) in one_step(rule, lattice, x, lambda) {
                let acc = next.entry(y).or_insert_with(BigRational::zero);
                *acc += m * p;
            }
        }
        current = next;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::kernel::heat_kernel;
    use crate::lattice::Lambda;
    use num_traits::ToPrimitive;

    #[test]
    fn exact_two_step_return() {
        let l = Lattice::new(2).unwrap();
        let half = rational_lambda(1, 2).unwrap();
        let k = heat_kernel_exact(StepRule::Biased, &l, &half, 2, &l.origin()).unwrap();
        assert_eq!(k[&l.origin()], BigRational::new(1.into(), 7.into()));
        let total: BigRational = k.values().cloned().sum();
        assert!(total.is_one());
    }

    #[test]
    fn float_dp_tracks_exact_values() {
        for d in 1..=2 {
            let l = Lattice::new(d).unwrap();
            for (num, den) in [(1, 2), (3, 10), (7, 10)] {
                let lr = rational_lambda(num, den).unwrap();
                let lf = Lambda::new(num as f64 / den as f64).unwrap();
                for rule in [StepRule::Biased, StepRule::Drifted] {
                    let exact = heat_kernel_exact(rule, &l, &lr, 20, &l.origin()).unwrap();
                    let float =
                        heat_kernel(rule, &l, lf, 20, &l.origin(), &Budget::default()).unwrap();
                    for (x, p) in &exact {
                        let pf = p.to_f64().unwrap();
                        let q = float.mass(x);
                        assert!((pf - q).abs() <= 1e-13 * pf + 1e-300, "{x} {pf} {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn exact_mode_limits() {
        let l3 = Lattice::new(3).unwrap();
        let half = rational_lambda(1, 2).unwrap();
        assert!(heat_kernel_exact(StepRule::Biased, &l3, &half, 2, &l3.origin()).is_err());
        let l2 = Lattice::new(2).unwrap();
        assert!(heat_kernel_exact(StepRule::Biased, &l2, &half, 21, &l2.origin()).is_err());
        assert!(rational_lambda(3, 2).is_err());
    }
}
