use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::kernel::{heat_kernel, return_probabilities};
use crate::lattice::{Lambda, Lattice, StepRule};

/// One row of the return-probability table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoRow {
    pub n: usize,
    /// `p^{(2n)}(o, o)`.
    pub p2n: f64,
    /// `p2n^{1/(2n)}`.
    pub root_estimate: f64,
    /// `(p^{(2n+2)}/p^{(2n)}) ((n+1)/n)^{3d/2}`; tends to `ρ²`.
    pub corrected_ratio: f64,
    /// `p2n ρ^{-2n} n^{3d/2}`; stays in a bounded band.
    pub hk_ratio: f64,
}

/// `2√λ/(1+λ)`, defined for every `λ ∈ (0, 1]`.
pub(crate) fn spectral_radius(lambda: f64) -> f64 {
    2.0 * lambda.sqrt() / (1.0 + lambda)
}

/// Return-probability diagnostics for `n = 1..=n_max`, from one biased DP run
/// of `2 n_max + 2` steps. `λ = 1` is accepted as the simple-walk reference.
pub fn rho_diagnostics(
    lattice: &Lattice,
    lambda: Lambda,
    n_max: usize,
    budget: &Budget,
) -> Result<Vec<RhoRow>> {
    if n_max < 2 {
        return Err(Error::param("n_max must be at least 2"));
    }
    let ret = return_probabilities(StepRule::Biased, lattice, lambda, 2 * n_max + 2, budget)?;
    let rho = spectral_radius(lambda.value());
    let exponent = 1.5 * lattice.dim() as f64;
    Ok((1..=n_max)
        .map(|n| {
            let p2n = ret[2 * n];
            let nf = n as f64;
            RhoRow {
                n,
                p2n,
                root_estimate: p2n.powf(1.0 / (2.0 * nf)),
                corrected_ratio: ret[2 * n + 2] / p2n * ((nf + 1.0) / nf).powf(exponent),
                hk_ratio: p2n * rho.powi(-2 * n as i32) * nf.powf(exponent),
            }
        })
        .collect())
}

/// `max / min` of `hk_ratio` over rows with `n ∈ [lo, hi]`.
pub fn hk_band_width(rows: &[RhoRow], lo: usize, hi: usize) -> f64 {
    let vals = rows
        .iter()
        .filter(|r| r.n >= lo && r.n <= hi)
        .map(|r| r.hk_ratio);
    let (mn, mx) = vals.fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
    mx / mn
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// `|x_i - n m| < n^{(1+ε)/2}` for every coordinate (strict).
    Concentration,
    /// `|x_i - n m| ≤ σ n^{1/2}` for every coordinate (non-strict).
    LocalBox,
}

/// Coordinate boxes around the mean position `n m` of the drifted walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub kind: RegionKind,
    pub n: usize,
    /// `ε` for [`RegionKind::Concentration`], `σ` for [`RegionKind::LocalBox`].
    pub parameter: f64,
    pub d: usize,
    pub lambda: f64,
}

impl RegionSpec {
    pub fn concentration(lattice: &Lattice, lambda: Lambda, n: usize, eps: f64) -> RegionSpec {
        RegionSpec {
            kind: RegionKind::Concentration,
            n,
            parameter: eps,
            d: lattice.dim(),
            lambda: lambda.value(),
        }
    }

    pub fn local_box(lattice: &Lattice, lambda: Lambda, n: usize, sigma: f64) -> RegionSpec {
        RegionSpec {
            kind: RegionKind::LocalBox,
            n,
            parameter: sigma,
            d: lattice.dim(),
            lambda: lambda.value(),
        }
    }

    /// Per-coordinate mean `n (1-λ)/(d(1+λ))`.
    pub fn center(&self) -> f64 {
        self.n as f64 * (1.0 - self.lambda) / (self.d as f64 * (1.0 + self.lambda))
    }

    pub fn half_width(&self) -> f64 {
        let n = self.n as f64;
        match self.kind {
            RegionKind::Concentration => n.powf((1.0 + self.parameter) / 2.0),
            RegionKind::LocalBox => self.parameter * n.sqrt(),
        }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        let (c, w) = (self.center(), self.half_width());
        x.iter().all(|&xi| {
            let dev = (xi as f64 - c).abs();
            match self.kind {
                RegionKind::Concentration => dev < w,
                RegionKind::LocalBox => dev <= w,
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LltReport {
    pub n: usize,
    /// `n^{d/2} max_x p^{(n)}(0, x)`.
    pub sup_scaled: f64,
    /// `n^{d/2} min p^{(n)}(0, x)` over parity-admissible `x` in the local box.
    pub box_min_scaled: f64,
    /// Mass outside the concentration box.
    pub tail_mass: f64,
    /// Number of parity-admissible sites in the local box.
    pub box_sites: usize,
}

/// Local-limit and concentration diagnostics for the drifted walk from the origin.
pub fn llt_diagnostics(
    lattice: &Lattice,
    lambda: Lambda,
    n: usize,
    sigma: f64,
    eps: f64,
    budget: &Budget,
) -> Result<LltReport> {
    let lambda = lambda.require_transient()?;
    if n < 2 {
        return Err(Error::param("n must be at least 2"));
    }
    if !(sigma > 0.0) || !(eps > 0.0) {
        return Err(Error::param("sigma and eps must be positive"));
    }
    let k = heat_kernel(
        StepRule::Drifted,
        lattice,
        lambda,
        n,
        &lattice.origin(),
        budget,
    )?;
    let boxr = RegionSpec::local_box(lattice, lambda, n, sigma);
    let conc = RegionSpec::concentration(lattice, lambda, n, eps);

    let (mut sup, mut box_min, mut tail, mut box_sites) = (0.0f64, f64::INFINITY, 0.0, 0usize);
    k.for_each_site(|x, p| {
        sup = sup.max(p);
        let norm: i64 = x.iter().map(|c| c.abs()).sum();
        if (norm as usize + n) % 2 == 0 && boxr.contains(x) {
            box_min = box_min.min(p);
            box_sites += 1;
        }
        if !conc.contains(x) {
            tail += p;
        }
    });
    if box_sites == 0 {
        return Err(Error::EmptyRegion { n, sigma });
    }
    let scale = (n as f64).powf(lattice.dim() as f64 / 2.0);
    Ok(LltReport {
        n,
        sup_scaled: scale * sup,
        box_min_scaled: scale * box_min,
        tail_mass: tail,
        box_sites,
    })
}
