//! Dispatch from a subcommand and its resolved parameters to a result table.

use biased_usf::combinatorics::{
    catalan, catalan_tail, count_bnk, path_probability, BnkMode, LatticePath,
};
use biased_usf::kernel::{
    expected_intersections_direct, llt_diagnostics, return_probabilities, rho_diagnostics,
    CoincidenceTable,
};
use biased_usf::mc::{
    alpha_profile, axial_visit_stats, empirical_return, intersection_stats,
    orthant_interior_starts, orthant_starts, speed_estimate, IntersectionCounter, WalkKind,
};
use biased_usf::spanning::{
    build_box, tree_count_estimate, ust_exact, wilson_samples, wsf_z1_exact, wsf_z1_sample,
    Boundary, CutPosition, WeightedGraph,
};
use biased_usf::{Budget, Lambda, Lattice, LatticePoint, StepRule};
use serde_json::{json, Value};

use crate::config::{Command, Params, DEFAULT_SEED};
use crate::error::CliError;
use crate::output::Table;

/// Reads parameters with their defaults and records each one for the echo.
struct Resolver<'a> {
    p: &'a Params,
    command: Command,
    echo: Vec<(String, Value)>,
}

impl<'a> Resolver<'a> {
    fn record(&mut self, key: &str, value: impl Into<Value>) {
        self.echo.push((key.to_string(), value.into()));
    }

    fn usize_or(&mut self, key: &str, v: Option<usize>, default: usize) -> usize {
        let v = v.unwrap_or(default);
        self.record(key, v);
        v
    }

    fn f64_or(&mut self, key: &str, v: Option<f64>, default: f64) -> f64 {
        let v = v.unwrap_or(default);
        self.record(key, v);
        v
    }

    fn lattice(&mut self, default: usize) -> Result<Lattice, CliError> {
        let d = self.usize_or("d", self.p.d, default);
        Ok(Lattice::new(d)?)
    }

    fn lambda(&mut self) -> Result<Lambda, CliError> {
        let v = self.f64_or("lambda", self.p.lambda, 0.5);
        let l = if self.command.allows_unit_lambda() {
            Lambda::new(v)
        } else {
            Lambda::transient(v)
        };
        Ok(l?)
    }

    fn n(&mut self, default: usize) -> usize {
        self.usize_or("n", self.p.n, default)
    }

    fn n_max(&mut self, default: usize) -> usize {
        self.usize_or("n_max", self.p.n_max, default)
    }

    fn trials(&mut self, default: usize) -> usize {
        self.usize_or("trials", self.p.trials, default)
    }

    fn k(&mut self, default: usize) -> usize {
        self.usize_or("k", self.p.k, default)
    }

    fn seed(&mut self) -> u64 {
        let s = self.p.seed.unwrap_or(DEFAULT_SEED);
        self.record("seed", s);
        s
    }

    fn horizons(&mut self, default: usize) -> Vec<usize> {
        let h = self.p.horizon.clone().unwrap_or_else(|| vec![default]);
        let text: Vec<String> = h.iter().map(|x| x.to_string()).collect();
        self.record("horizon", text.join(","));
        h
    }

    fn horizon(&mut self, default: usize) -> Result<usize, CliError> {
        match self.horizons(default).as_slice() {
            [h] => Ok(*h),
            _ => Err(CliError::domain(format!(
                "{} takes a single horizon",
                self.command.name()
            ))),
        }
    }

    fn text(&mut self, key: &str, v: &Option<String>, default: &str) -> String {
        let v = v.clone().unwrap_or_else(|| default.to_string());
        self.record(key, v.clone());
        v
    }

    fn mode(&mut self, default: &str) -> String {
        let v = self.p.mode.clone();
        self.text("mode", &v, default)
    }

    fn budget(&mut self) -> Budget {
        let mut b = Budget::default();
        b.max_states = self.usize_or("max_states", self.p.max_states, b.max_states);
        b.max_brute_n = self.usize_or("max_brute_n", self.p.max_brute_n, b.max_brute_n);
        b
    }
}

fn unknown_mode(command: Command, mode: &str) -> CliError {
    CliError::domain(format!("unknown mode `{mode}` for {}", command.name()))
}

fn coords_text(x: &[i64]) -> String {
    x.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_path(text: &str) -> Result<Vec<LatticePoint>, CliError> {
    text.split(';')
        .map(|pt| {
            pt.split(',')
                .map(|c| c.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map(LatticePoint::new)
                .map_err(|_| CliError::parse(format!("bad path point `{pt}`")))
        })
        .collect()
}

pub fn execute(command: Command, p: &Params) -> Result<Table, CliError> {
    let mut r = Resolver {
        p,
        command,
        echo: Vec::new(),
    };
    r.record("command", command.name());
    let mut table = match command {
        Command::RhoDiag => {
            let l = r.lattice(2)?;
            let lam = r.lambda()?;
            let n_max = r.n_max(40);
            let budget = r.budget();
            let mut t = Table::new(&["n", "p2n", "root_estimate", "corrected_ratio", "hk_ratio"]);
            for row in rho_diagnostics(&l, lam, n_max, &budget)? {
                t.push(vec![
                    json!(row.n),
                    json!(row.p2n),
                    json!(row.root_estimate),
                    json!(row.corrected_ratio),
                    json!(row.hk_ratio),
                ]);
            }
            t
        }
        Command::Speed => {
            let l = r.lattice(2)?;
            let lam = r.lambda()?;
            let steps = r.horizon(100_000)?;
            let trials = r.trials(200);
            let seed = r.seed();
            let rep = speed_estimate(&l, lam, steps, trials, seed)?;
            let target = (1.0 - lam.value()) / (1.0 + lam.value());
            let mut t = Table::new(&["quantity", "target", "estimate", "std_error"]);
            t.push(vec![
                json!("scalar"),
                json!(target),
                json!(rep.scalar.point_estimate),
                json!(rep.scalar.std_error),
            ]);
            for (i, a) in rep.per_axis.iter().enumerate() {
                t.push(vec![
                    json!(format!("axis{}", i + 1)),
                    json!(target / l.dim() as f64),
                    json!(a.point_estimate),
                    json!(a.std_error),
                ]);
            }
            t
        }
        Command::AxialVisits => {
            let l = r.lattice(2)?;
            let lam = r.lambda()?;
            let h = r.horizon(100_000)?;
            let trials = r.trials(1000);
            let seed = r.seed();
            let s = axial_visit_stats(&l, lam, h, trials, seed)?;
            let (half, full) = (s.counts_at(h / 2), s.counts_at(h));
            let top = half.iter().chain(&full).copied().max().unwrap_or(0) as usize;
            let histogram = |c: &[u64]| {
                let mut out = vec![0u64; top + 1];
                for &v in c {
                    out[v as usize] += 1;
                }
                out
            };
            let (hh, hf) = (histogram(&half), histogram(&full));
            let mut t = Table::new(&["visits", "trials_at_half_horizon", "trials_at_horizon"]);
            for v in 0..=top {
                t.push(vec![json!(v), json!(hh[v]), json!(hf[v])]);
            }
            t
        }
        Command::Intersections => {
            let l = r.lattice(2)?;
            let lam = r.lambda()?;
            let walk = r.text("walk", &p.walk, "drifted");
            let kind = match walk.as_str() {
                "biased" => WalkKind::Biased,
                "drifted" => WalkKind::Drifted,
                "reflected" => WalkKind::Reflected,
                other => return Err(CliError::domain(format!("unknown walk `{other}`"))),
            };
            let mode = r.mode("range");
            let counter = match mode.as_str() {
                "range" => IntersectionCounter::Range,
                "pairs" => IntersectionCounter::Pairs,
                other => return Err(unknown_mode(command, other)),
            };
            let horizons = r.horizons(10_000);
            let trials = r.trials(200);
            let seed = r.seed();
            let o = l.origin();
            let s = intersection_stats(kind, &l, lam, &horizons, trials, (&o, &o), counter, seed)?;
            let mut t = Table::new(&["trial", "horizon", "count"]);
            for trial in 0..trials {
                for (hi, h) in horizons.iter().enumerate() {
                    t.push(vec![json!(trial), json!(h), json!(s.counts[hi][trial])]);
                }
            }
            t
        }
        Command::ExpectedIntersections => {
            let l = r.lattice(3)?;
            let lam = r.lambda()?;
            let n = r.n(50);
            let mode = r.mode("factorised");
            let budget = r.budget();
            let mut t = Table::new(&["m", "n", "partial_sum"]);
            match mode.as_str() {
                "factorised" => {
                    let table = CoincidenceTable::compute(&l, lam, n, n, &budget)?;
                    for (m, s) in table.diagonal_partial_sums().into_iter().enumerate() {
                        t.push(vec![json!(m), json!(m), json!(s)]);
                    }
                }
                "direct" => {
                    let s = expected_intersections_direct(&l, lam, n, n, &budget)?;
                    t.push(vec![json!(n), json!(n), json!(s)]);
                }
                other => return Err(unknown_mode(command, other)),
            }
            t
        }
        Command::LltDiag => {
            let l = r.lattice(2)?;
            let lam = r.lambda()?;
            let ns: Vec<usize> = match p.n_max {
                Some(_) => (2..=r.n_max(0)).collect(),
                None => vec![r.n(32)],
            };
            let sigma = r.f64_or("sigma", p.sigma, 1.0);
            let eps = r.f64_or("eps", p.eps, 0.5);
            let budget = r.budget();
            let mut t = Table::new(&[
                "n",
                "sup_scaled",
                "box_min_scaled",
                "tail_mass",
                "box_sites",
            ]);
            for n in ns {
                let rep = llt_diagnostics(&l, lam, n, sigma, eps, &budget)?;
                t.push(vec![
                    json!(rep.n),
                    json!(rep.sup_scaled),
                    json!(rep.box_min_scaled),
                    json!(rep.tail_mass),
                    json!(rep.box_sites),
                ]);
            }
            t
        }
        Command::Catalan => {
            let n_max = r.n_max(20);
            let mut t = Table::new(&["l", "catalan", "tail"]);
            for l in 0..=n_max {
                t.push(vec![
                    json!(l),
                    json!(catalan(l).to_string()),
                    json!(catalan_tail(l)),
                ]);
            }
            t
        }
        Command::Bnk => {
            let n_max = r.n_max(9);
            let mode = r.mode("excursion");
            let mode = match mode.as_str() {
                "brute" => BnkMode::Brute,
                "excursion" => BnkMode::Excursion,
                other => return Err(unknown_mode(command, other)),
            };
            let budget = r.budget();
            let mut t = Table::new(&["n", "k", "count", "scaled"]);
            for n in 1..=n_max {
                for k in 1..=n {
                    let c = count_bnk(n, k, mode, &budget)?.to_string();
                    // |B_{n,k}| n^{3/2} / (k^{5/2} 4^n)
                    let approx: f64 = c.parse().unwrap_or(f64::INFINITY);
                    let scaled = approx * (n as f64).powf(1.5)
                        / ((k as f64).powf(2.5) * 4f64.powi(n as i32));
                    t.push(vec![json!(n), json!(k), json!(c), json!(scaled)]);
                }
            }
            t
        }
        Command::PathProb => {
            let text = p
                .path
                .clone()
                .ok_or_else(|| CliError::parse("path-prob needs --path"))?;
            let vertices = parse_path(&text)?;
            r.record("path", text);
            let d = vertices.first().map(|v| v.dim()).unwrap_or(0);
            let l = Lattice::new(d)?;
            r.record("d", d);
            let lam = r.lambda()?;
            let path = LatticePath::new(&l, vertices)?;
            let pp = path_probability(&l, &path, lam)?;
            let mut t = Table::new(&[
                "length",
                "probability",
                "hits",
                "projected_hits",
                "eta_bound",
            ]);
            let proj: Vec<String> = pp.projected_hits.iter().map(|h| h.to_string()).collect();
            t.push(vec![
                json!(path.len()),
                json!(pp.probability),
                json!(pp.hits),
                json!(proj.join(" ")),
                pp.eta_bound.map_or(Value::Null, |b| json!(b)),
            ]);
            t
        }
        Command::Alpha => {
            let l = r.lattice(2)?;
            let lam = r.lambda()?;
            let k = r.k(4);
            let horizons = r.horizons(10_000);
            let last = horizons.iter().copied().max().unwrap_or(1);
            let dist = p.r.unwrap_or_else(|| (last as f64).sqrt().ceil() as i64);
            r.record("r", dist);
            let layout = r.mode("orthant");
            let trials = r.trials(1000);
            let seed = r.seed();
            let starts = match layout.as_str() {
                "orthant" => orthant_starts(&l, k, dist)?,
                "interior" => orthant_interior_starts(&l, k, dist)?,
                other => return Err(unknown_mode(command, other)),
            };
            let prof = alpha_profile(&l, lam, &starts, &horizons, trials, seed)?;
            let mut t = Table::new(&[
                "horizon",
                "estimate",
                "std_error",
                "ci_low",
                "ci_high",
                "trials",
            ]);
            for rep in prof.reports {
                let (lo, hi) = rep.ci99();
                t.push(vec![
                    json!(rep.horizon),
                    json!(rep.point_estimate),
                    json!(rep.std_error),
                    json!(lo),
                    json!(hi),
                    json!(rep.trials),
                ]);
            }
            t
        }
        Command::TreeCount => {
            let l = r.lattice(2)?;
            let lam = r.lambda()?;
            let h = r.horizon(2500)?;
            let trials = r.trials(400);
            let k_max = r.k(5);
            let seed = r.seed();
            let rep = tree_count_estimate(&l, lam, h, trials, k_max, seed)?;
            let mut t = Table::new(&[
                "k",
                "alpha_h",
                "std_error_h",
                "alpha_2h",
                "std_error_2h",
                "accepted",
            ]);
            for (k, prof) in &rep.alpha_table {
                let (a, b) = (prof.reports[0], prof.reports[1]);
                t.push(vec![
                    json!(k),
                    json!(a.point_estimate),
                    json!(a.std_error),
                    json!(b.point_estimate),
                    json!(b.std_error),
                    json!(*k <= rep.lower_bound_k),
                ]);
            }
            t
        }
        Command::Box => {
            let g = box_graph(&mut r)?;
            let mut t = Table::new(&["tag", "a", "b", "a_coords", "b_coords", "conductance"]);
            let coords = |v: usize| {
                g.label(v)
                    .map_or_else(|| "root".to_string(), |x| coords_text(x.coords()))
            };
            for e in g.edges() {
                t.push(vec![
                    json!(e.tag),
                    json!(e.a),
                    json!(e.b),
                    json!(coords(e.a)),
                    json!(coords(e.b)),
                    json!(e.conductance),
                ]);
            }
            t
        }
        Command::Ust => {
            let g = match &p.graph {
                Some(path) => {
                    r.record("graph", path.display().to_string());
                    let text = std::fs::read_to_string(path)?;
                    let budget = r.budget();
                    WeightedGraph::from_text(&text, &budget)?
                }
                None => box_graph(&mut r)?,
            };
            let mode = r.mode("sample");
            match mode.as_str() {
                "sample" => {
                    let trials = r.trials(10);
                    let seed = r.seed();
                    let root = g.wired_root().unwrap_or(0);
                    let mut t = Table::new(&["trial", "edges", "components", "component_sizes"]);
                    for (i, s) in wilson_samples(&g, root, trials, seed)?.iter().enumerate() {
                        let tags: Vec<String> =
                            s.chosen_edges.iter().map(|x| x.to_string()).collect();
                        let sizes: Vec<String> =
                            s.components.iter().map(|c| c.len().to_string()).collect();
                        t.push(vec![
                            json!(i),
                            json!(tags.join(" ")),
                            json!(s.components.len()),
                            json!(sizes.join(" ")),
                        ]);
                    }
                    t
                }
                "exact" => {
                    let budget = r.budget();
                    let mut t = Table::new(&["edges", "weight", "probability"]);
                    for tree in ust_exact(&g, &budget)? {
                        let tags: Vec<String> = tree.tags.iter().map(|x| x.to_string()).collect();
                        t.push(vec![
                            json!(tags.join(" ")),
                            json!(tree.weight),
                            json!(tree.probability),
                        ]);
                    }
                    t
                }
                other => return Err(unknown_mode(command, other)),
            }
        }
        Command::WsfZ1 => {
            let lam = r.lambda()?;
            let n = r.n(30);
            let trials = r.trials(100_000);
            let seed = r.seed();
            let s = wsf_z1_sample(lam, n, trials, seed)?;
            let z = s.z_scores();
            let mut t = Table::new(&[
                "position",
                "count",
                "frequency",
                "exact_finite",
                "exact_limit",
                "z",
            ]);
            for ((pos, count, freq, exact), z) in s.rows.iter().zip(z) {
                let limit = match pos {
                    CutPosition::Interior(i) => json!(wsf_z1_exact(lam, *i)?),
                    _ => Value::Null,
                };
                t.push(vec![
                    json!(pos.to_string()),
                    json!(count),
                    json!(freq),
                    json!(exact),
                    limit,
                    json!(z),
                ]);
            }
            t
        }
        Command::EmpiricalReturn => {
            let l = r.lattice(2)?;
            let lam = r.lambda()?;
            let n = r.n(2);
            let trials = r.trials(100_000);
            let seed = r.seed();
            let budget = r.budget();
            let rep = empirical_return(&l, lam, n, trials, seed)?;
            let exact = return_probabilities(StepRule::Biased, &l, lam, n, &budget)?[n];
            let mut t = Table::new(&["n", "estimate", "std_error", "exact"]);
            t.push(vec![
                json!(n),
                json!(rep.point_estimate),
                json!(rep.std_error),
                json!(exact),
            ]);
            t
        }
    };
    table.params = r.echo;
    Ok(table)
}

fn box_graph(r: &mut Resolver<'_>) -> Result<WeightedGraph, CliError> {
    let l = r.lattice(2)?;
    let n = r.n(2);
    let lam = r.lambda()?;
    let boundary = r.text("boundary", &r.p.boundary.clone(), "wired");
    let boundary: Boundary = boundary.parse()?;
    let budget = r.budget();
    Ok(build_box(&l, n, lam, boundary, &budget)?)
}
