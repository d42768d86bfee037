use std::collections::hash_map::Entry;
use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::keys::{with_range_key, RangeKey};
use super::{WalkKind, Walker};
use crate::error::{Error, Result};
use crate::lattice::{Lambda, Lattice, LatticePoint};
use crate::par;
use crate::rng;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Mean of per-trial samples with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub point_estimate: f64,
    /// Sample standard deviation (with `N - 1`) over `√N`.
    pub std_error: f64,
    pub trials: usize,
    /// Finite horizon the samples were truncated at.
    pub horizon: usize,
    pub master_seed: u64,
}

impl EstimatorReport {
    pub fn from_samples(samples: &[f64], horizon: usize, master_seed: u64) -> EstimatorReport {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        EstimatorReport {
            point_estimate: mean,
            std_error: (var / n as f64).sqrt(),
            trials: n,
            horizon,
            master_seed,
        }
    }

    pub fn ci99(&self) -> (f64, f64) {
        let h = Z99 * self.std_error;
        (self.point_estimate - h, self.point_estimate + h)
    }

    pub fn ci_excludes_zero(&self) -> bool {
        let (lo, hi) = self.ci99();
        lo > 0.0 || hi < 0.0
    }

    /// `|estimate - target| ≤ k · std_error`.
    pub fn within_sigmas(&self, target: f64, k: f64) -> bool {
        (self.point_estimate - target).abs() <= k * self.std_error
    }
}

fn check_trials(trials: usize, min: usize) -> Result<()> {
    if trials < min {
        return Err(Error::param(format!(
            "need at least {min} trials, got {trials}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedReport {
    /// `|X_n| / n`.
    pub scalar: EstimatorReport,
    /// `|X^i_n| / n` for each coordinate.
    pub per_axis: Vec<EstimatorReport>,
}

/// Speed of the biased walk from the origin after `steps` steps.
pub fn speed_estimate(
    lattice: &Lattice,
    lambda: Lambda,
    steps: usize,
    trials: usize,
    master_seed: u64,
) -> Result<SpeedReport> {
    check_trials(trials, 2)?;
    if steps == 0 {
        return Err(Error::param("steps must be positive"));
    }
    let d = lattice.dim();
    let finals: Vec<Vec<i64>> = par::map_indexed(trials, |t| {
        let mut rng = rng::stream(master_seed, t as u64, 0);
        let mut w = Walker::new(WalkKind::Biased, lambda.value(), &vec![0; d]);
        for _ in 0..steps {
            w.step(&mut rng);
        }
        w.pos().to_vec()
    });
    let n = steps as f64;
    let scalar: Vec<f64> = finals
        .iter()
        .map(|x| x.iter().map(|c| c.abs()).sum::<i64>() as f64 / n)
        .collect();
    let per_axis = (0..d)
        .map(|i| {
            let s: Vec<f64> = finals.iter().map(|x| x[i].abs() as f64 / n).collect();
            EstimatorReport::from_samples(&s, steps, master_seed)
        })
        .collect();
    Ok(SpeedReport {
        scalar: EstimatorReport::from_samples(&scalar, steps, master_seed),
        per_axis,
    })
}

/// Times at which each trial's biased walk from the origin is on a coordinate hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxialVisitStats {
    pub d: usize,
    pub lambda: f64,
    pub horizon: usize,
    pub master_seed: u64,
    visit_times: Vec<Vec<u32>>,
}

impl AxialVisitStats {
    pub fn trials(&self) -> usize {
        self.visit_times.len()
    }

    /// `#{n ≤ h : X_n ∈ 𝒳}` for each trial.
    pub fn counts_at(&self, h: usize) -> Vec<u64> {
        assert!(
            h <= self.horizon,
            "horizon {h} beyond the simulated {}",
            self.horizon
        );
        self.visit_times
            .iter()
            .map(|v| v.partition_point(|&t| t as usize <= h) as u64)
            .collect()
    }

    pub fn counts(&self) -> Vec<u64> {
        self.counts_at(self.horizon)
    }

    /// Last visit time up to `h`, per trial.
    pub fn last_visits_at(&self, h: usize) -> Vec<Option<u32>> {
        self.visit_times
            .iter()
            .map(|v| {
                let k = v.partition_point(|&t| t as usize <= h);
                (k > 0).then(|| v[k - 1])
            })
            .collect()
    }

    /// Fraction of trials whose last visit up to `h` falls in `[0, h/2]`.
    pub fn saturation_at(&self, h: usize) -> f64 {
        let sat = self
            .last_visits_at(h)
            .iter()
            .filter(|l| l.is_none_or(|t| 2 * t as usize <= h))
            .count();
        sat as f64 / self.trials() as f64
    }

    pub fn saturation(&self) -> f64 {
        self.saturation_at(self.horizon)
    }
}

pub fn axial_visit_stats(
    lattice: &Lattice,
    lambda: Lambda,
    horizon: usize,
    trials: usize,
    master_seed: u64,
) -> Result<AxialVisitStats> {
    if lattice.dim() < 2 {
        return Err(Error::param("axial visits need d >= 2"));
    }
    check_trials(trials, 1)?;
    let d = lattice.dim();
    let visit_times = par::map_indexed(trials, |t| {
        let mut rng = rng::stream(master_seed, t as u64, 0);
        let mut w = Walker::new(WalkKind::Biased, lambda.value(), &vec![0; d]);
        let mut times = vec![0u32];
        for n in 1..=horizon {
            w.step(&mut rng);
            if w.on_axial() {
                times.push(n as u32);
            }
        }
        times
    });
    Ok(AxialVisitStats {
        d,
        lambda: lambda.value(),
        horizon,
        master_seed,
        visit_times,
    })
}

/// Total-variation distance between the empirical laws of two integer samples.
pub fn tv_distance(a: &[u64], b: &[u64]) -> f64 {
    let mut law: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    for &x in a {
        law.entry(x).or_default().0 += 1.0 / a.len() as f64;
    }
    for &x in b {
        law.entry(x).or_default().1 += 1.0 / b.len() as f64;
    }
    0.5 * law.values().map(|(p, q)| (p - q).abs()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntersectionCounter {
    /// `|{Z_m : m ≤ h} ∩ {W_n : n ≤ h}|`.
    Range,
    /// `Σ_{m, n ≤ h} 1{Z_m = W_n}`.
    Pairs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionStats {
    pub kind: WalkKind,
    pub counter: IntersectionCounter,
    pub horizons: Vec<usize>,
    pub master_seed: u64,
    /// `counts[h][trial]` for each horizon in `horizons`.
    pub counts: Vec<Vec<u64>>,
}

impl IntersectionStats {
    pub fn median(&self, horizon_index: usize) -> f64 {
        let mut v = self.counts[horizon_index].clone();
        v.sort_unstable();
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2] as f64
        } else {
            (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
        }
    }

    pub fn mean(&self, horizon_index: usize) -> f64 {
        let v = &self.counts[horizon_index];
        v.iter().sum::<u64>() as f64 / v.len() as f64
    }
}

fn sorted_horizons(horizons: &[usize]) -> Result<Vec<usize>> {
    if horizons.is_empty() {
        return Err(Error::param("at least one horizon is required"));
    }
    let mut h = horizons.to_vec();
    h.sort_unstable();
    h.dedup();
    if h.len() != horizons.len() || h != horizons {
        return Err(Error::param("horizons must be strictly increasing"));
    }
    if *h.last().unwrap() >= u32::MAX as usize {
        return Err(Error::param("horizon too large"));
    }
    Ok(h)
}

fn max_reach(starts: &[&LatticePoint], horizon: usize) -> u64 {
    starts
        .iter()
        .flat_map(|s| s.coords().iter().map(|c| c.unsigned_abs()))
        .max()
        .unwrap_or(0)
        + horizon as u64
}

/// Adds one to `counts[j]` for every horizon `horizons[j] ≥ act`.
#[inline]
fn bump(counts: &mut [u64], horizons: &[usize], act: u32) {
    let first = horizons.partition_point(|&h| h < act as usize);
    if first < counts.len() {
        counts[first] += 1;
    }
}

fn cumulate(mut counts: Vec<u64>) -> Vec<u64> {
    for j in 1..counts.len() {
        counts[j] += counts[j - 1];
    }
    counts
}

#[allow(clippy::too_many_arguments)]
fn intersection_trial<K: RangeKey>(
    keys: &K,
    kind: WalkKind,
    lambda: f64,
    counter: IntersectionCounter,
    horizons: &[usize],
    a: &[i64],
    b: &[i64],
    seed: u64,
    trial: u64,
) -> Vec<u64> {
    let top = *horizons.last().unwrap();
    let mut counts = vec![0u64; horizons.len()];
    let mut ra = rng::stream(seed, trial, 0);
    let mut rb = rng::stream(seed, trial, 1);
    let mut wa = Walker::new(kind, lambda, a);
    let mut wb = Walker::new(kind, lambda, b);
    match counter {
        IntersectionCounter::Range => {
            const NONE: u32 = u32::MAX;
            let mut seen: FxHashMap<K::Key, (u32, u32)> = FxHashMap::default();
            for t in 0..=top {
                if t > 0 {
                    wa.step(&mut ra);
                }
                seen.entry(keys.key(wa.pos())).or_insert((t as u32, NONE));
            }
            for t in 0..=top {
                if t > 0 {
                    wb.step(&mut rb);
                }
                if let Some(e) = seen.get_mut(&keys.key(wb.pos())) {
                    if e.1 == NONE {
                        e.1 = t as u32;
                        bump(&mut counts, horizons, e.0.max(e.1));
                    }
                }
            }
        }
        IntersectionCounter::Pairs => {
            let mut visits: FxHashMap<K::Key, Vec<u32>> = FxHashMap::default();
            for t in 0..=top {
                if t > 0 {
                    wa.step(&mut ra);
                }
                visits.entry(keys.key(wa.pos())).or_default().push(t as u32);
            }
            for t in 0..=top {
                if t > 0 {
                    wb.step(&mut rb);
                }
                if let Some(times) = visits.get(&keys.key(wb.pos())) {
                    for &s in times {
                        bump(&mut counts, horizons, s.max(t as u32));
                    }
                }
            }
        }
    }
    cumulate(counts)
}

/// Intersection counts of two independent walks, read off at each horizon.
#[allow(clippy::too_many_arguments)]
pub fn intersection_stats(
    kind: WalkKind,
    lattice: &Lattice,
    lambda: Lambda,
    horizons: &[usize],
    trials: usize,
    starts: (&LatticePoint, &LatticePoint),
    counter: IntersectionCounter,
    master_seed: u64,
) -> Result<IntersectionStats> {
    lattice.check(starts.0)?;
    lattice.check(starts.1)?;
    if kind == WalkKind::Drifted {
        lambda.require_transient()?;
    }
    check_trials(trials, 1)?;
    let horizons = sorted_horizons(horizons)?;
    let top = *horizons.last().unwrap();
    let reach = max_reach(&[starts.0, starts.1], top);
    let (a, b) = (starts.0.coords(), starts.1.coords());
    let per_trial: Vec<Vec<u64>> = with_range_key!(lattice.dim(), reach, |keys| {
        par::map_indexed(trials, |t| {
            intersection_trial(
                &keys,
                kind,
                lambda.value(),
                counter,
                &horizons,
                a,
                b,
                master_seed,
                t as u64,
            )
        })
    });
    let counts = (0..horizons.len())
        .map(|j| per_trial.iter().map(|c| c[j]).collect())
        .collect();
    Ok(IntersectionStats {
        kind,
        counter,
        horizons,
        master_seed,
        counts,
    })
}

/// Earliest horizon at which some pair of the walks has intersecting ranges,
/// or `None` if none do by `top`. Stops as soon as the answer is at most `stop_below`.
fn first_intersection<K: RangeKey>(
    keys: &K,
    lambda: f64,
    starts: &[Vec<i64>],
    top: usize,
    stop_below: usize,
    seed: u64,
    trial: u64,
) -> Option<usize> {
    // point -> (walker with the earliest first visit, that time)
    let mut owner: FxHashMap<K::Key, (u32, u32)> = FxHashMap::default();
    let mut earliest = usize::MAX;
    for (i, s) in starts.iter().enumerate() {
        let mut rng = rng::stream(seed, trial, i as u64);
        let mut w = Walker::new(WalkKind::Biased, lambda, s);
        // visits after the current earliest time cannot improve it
        let limit = top.min(earliest);
        for t in 0..=limit {
            if t > 0 {
                w.step(&mut rng);
            }
            match owner.entry(keys.key(w.pos())) {
                Entry::Vacant(v) => {
                    v.insert((i as u32, t as u32));
                }
                Entry::Occupied(mut o) => {
                    let (who, when) = *o.get();
                    if who != i as u32 {
                        earliest = earliest.min(t.max(when as usize));
                        if (t as u32) < when {
                            o.insert((i as u32, t as u32));
                        }
                    }
                }
            }
        }
        if earliest <= stop_below {
            break;
        }
    }
    (earliest <= top).then_some(earliest)
}

/// Non-intersection probability estimates at several horizons from the same trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaProfile {
    pub d: usize,
    pub lambda: f64,
    pub starts: Vec<Vec<i64>>,
    pub horizons: Vec<usize>,
    pub reports: Vec<EstimatorReport>,
}

/// Probability that `k = starts.len()` independent biased walks have pairwise
/// disjoint ranges up to each horizon.
pub fn alpha_profile(
    lattice: &Lattice,
    lambda: Lambda,
    starts: &[LatticePoint],
    horizons: &[usize],
    trials: usize,
    master_seed: u64,
) -> Result<AlphaProfile> {
    if starts.is_empty() {
        return Err(Error::param("at least one start is required"));
    }
    for (i, s) in starts.iter().enumerate() {
        lattice.check(s)?;
        if starts[..i].contains(s) {
            return Err(Error::param(format!("start {s} is repeated")));
        }
    }
    check_trials(trials, 1)?;
    let horizons = sorted_horizons(horizons)?;
    let top = *horizons.last().unwrap();
    let refs: Vec<&LatticePoint> = starts.iter().collect();
    let reach = max_reach(&refs, top);
    let raw: Vec<Vec<i64>> = starts.iter().map(|s| s.coords().to_vec()).collect();
    let first: Vec<Option<usize>> = with_range_key!(lattice.dim(), reach, |keys| {
        par::map_indexed(trials, |t| {
            first_intersection(
                &keys,
                lambda.value(),
                &raw,
                top,
                horizons[0],
                master_seed,
                t as u64,
            )
        })
    });
    let reports = horizons
        .iter()
        .map(|&h| {
            let s: Vec<f64> = first
                .iter()
                .map(|f| if f.is_some_and(|e| e <= h) { 0.0 } else { 1.0 })
                .collect();
            EstimatorReport::from_samples(&s, h, master_seed)
        })
        .collect();
    Ok(AlphaProfile {
        d: lattice.dim(),
        lambda: lambda.value(),
        starts: raw,
        horizons,
        reports,
    })
}

pub fn alpha_estimate(
    lattice: &Lattice,
    lambda: Lambda,
    starts: &[LatticePoint],
    horizon: usize,
    trials: usize,
    master_seed: u64,
) -> Result<EstimatorReport> {
    Ok(alpha_profile(lattice, lambda, starts, &[horizon], trials, master_seed)?.reports[0])
}

/// `k` starts in distinct open orthants at `(±r, …, ±r)`, visiting sign patterns
/// in binary order. Past `2^d`, further starts reuse the orthants in the same
/// order, each shifted one further unit away from the hyperplane `x_1 = 0`.
pub fn orthant_starts(lattice: &Lattice, k: usize, r: i64) -> Result<Vec<LatticePoint>> {
    if r < 1 {
        return Err(Error::param("orthant distance must be at least 1"));
    }
    let d = lattice.dim();
    let orthants = 1usize.checked_shl(d as u32).unwrap_or(usize::MAX);
    let mut out: Vec<LatticePoint> = Vec::with_capacity(k);
    for j in 0..k {
        let pattern = j % orthants;
        let layer = (j / orthants) as i64;
        let mut c: Vec<i64> = (0..d)
            .map(|i| if (pattern >> i) & 1 == 0 { r } else { -r })
            .collect();
        c[0] += c[0].signum() * layer;
        out.push(LatticePoint::new(c));
    }
    Ok(out)
}

/// Like [`orthant_starts`], but starts that share an orthant are spread through
/// its interior: layer `L ≥ 1` moves coordinate `(L - 1) mod d` a further
/// `r (1 + (L - 1) / d)` away from 0, so walkers in one orthant stay about `r` apart.
pub fn orthant_interior_starts(lattice: &Lattice, k: usize, r: i64) -> Result<Vec<LatticePoint>> {
    let d = lattice.dim();
    let orthants = 1usize.checked_shl(d as u32).unwrap_or(usize::MAX);
    let mut out = orthant_starts(lattice, k, r)?;
    for (j, p) in out.iter_mut().enumerate() {
        let layer = j / orthants;
        if layer == 0 {
            continue;
        }
        let mut c = p.coords().to_vec();
        // undo the unit shift of the stacked layout
        c[0] -= c[0].signum() * layer as i64;
        let axis = (layer - 1) % d;
        c[axis] += c[axis].signum() * r * (1 + ((layer - 1) / d) as i64);
        *p = LatticePoint::new(c);
    }
    Ok(out)
}

/// Fraction of trials with `X_n = o` for the biased walk from `o`.
pub fn empirical_return(
    lattice: &Lattice,
    lambda: Lambda,
    n: usize,
    trials: usize,
    master_seed: u64,
) -> Result<EstimatorReport> {
    if n % 2 == 1 {
        return Err(Error::param("n must be even"));
    }
    check_trials(trials, 1)?;
    let d = lattice.dim();
    let hits: Vec<f64> = par::map_indexed(trials, |t| {
        let mut rng = rng::stream(master_seed, t as u64, 0);
        let mut w = Walker::new(WalkKind::Biased, lambda.value(), &vec![0; d]);
        for _ in 0..n {
            w.step(&mut rng);
        }
        if w.pos().iter().all(|&c| c == 0) {
            1.0
        } else {
            0.0
        }
    });
    Ok(EstimatorReport::from_samples(&hits, n, master_seed))
}
