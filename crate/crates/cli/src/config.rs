//! Flag vocabulary shared by every subcommand, plus `key=value` config files.
//! Flags win over the file; the file wins over the built-in defaults.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Subcommand, ValueEnum};

use crate::error::CliError;

/// Seed used when neither a flag nor the config file gives one.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Return probabilities and spectral-radius ratios from the exact DP.
    RhoDiag,
    /// Monte Carlo speed of the biased walk.
    Speed,
    /// Number of visits to the coordinate axes.
    AxialVisits,
    /// Intersection counts of two independent walks.
    Intersections,
    /// Partial sums of the expected number of coincidences.
    ExpectedIntersections,
    /// Local-limit and concentration diagnostics of the drifted walk.
    LltDiag,
    /// Catalan numbers and their normalised tail.
    Catalan,
    /// Counts of bridges by number of zeros.
    Bnk,
    /// Probability of a single lattice path.
    PathProb,
    /// Probability that k walks never intersect.
    Alpha,
    /// Lower bound on the number of trees of the forest.
    TreeCount,
    /// Edge list of the weighted box graph.
    Box,
    /// Spanning trees of a box (or of a graph file).
    Ust,
    /// Wired spanning forest of Z: exact and sampled missing-edge law.
    #[command(name = "wsf-z1")]
    WsfZ1,
    /// Monte Carlo return probability compared with the DP.
    EmpiricalReturn,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::RhoDiag => "rho-diag",
            Command::Speed => "speed",
            Command::AxialVisits => "axial-visits",
            Command::Intersections => "intersections",
            Command::ExpectedIntersections => "expected-intersections",
            Command::LltDiag => "llt-diag",
            Command::Catalan => "catalan",
            Command::Bnk => "bnk",
            Command::PathProb => "path-prob",
            Command::Alpha => "alpha",
            Command::TreeCount => "tree-count",
            Command::Box => "box",
            Command::Ust => "ust",
            Command::WsfZ1 => "wsf-z1",
            Command::EmpiricalReturn => "empirical-return",
        }
    }

    /// Whether `λ = 1` is accepted as a reference value.
    pub fn allows_unit_lambda(self) -> bool {
        matches!(
            self,
            Command::RhoDiag
                | Command::PathProb
                | Command::Box
                | Command::Ust
                | Command::EmpiricalReturn
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Every flag is optional so that the config file can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    #[arg(long, global = true)]
    pub d: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,
    /// One horizon, or a comma-separated increasing list where several are used.
    #[arg(long, global = true, value_delimiter = ',')]
    pub horizon: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Distance of alpha starting points from the origin.
    #[arg(long, global = true)]
    pub r: Option<i64>,
    #[arg(long, global = true)]
    pub boundary: Option<String>,
    /// Sub-mode: bnk `brute|excursion`, intersections `range|pairs`,
    /// expected-intersections `factorised|direct`, ust `sample|exact`,
    /// alpha `orthant|interior`.
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Walk for `intersections`: `biased`, `drifted` or `reflected`.
    #[arg(long, global = true)]
    pub walk: Option<String>,
    /// Path for `path-prob`, as `x,y;x,y;...`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub path: Option<String>,
    /// Graph file for `ust` in the text format written by the library.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long = "max-states", global = true)]
    pub max_states: Option<usize>,
    #[arg(long = "max-brute-n", global = true)]
    pub max_brute_n: Option<usize>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value.parse().map_err(|_| {
        CliError::parse(format!(
            "config line {line}: bad value `{value}` for `{key}`"
        ))
    })
}

fn fill<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

impl Params {
    /// Fills unset fields from `key=value` lines. Blank lines and `#` comments are skipped.
    pub fn merge_config(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let (key, value) = s.split_once('=').ok_or_else(|| {
                CliError::parse(format!("config line {line}: expected key=value"))
            })?;
            let (key, value) = (key.trim().replace('_', "-"), value.trim());
            match key.as_str() {
                "d" => fill(&mut self.d, parse_value(&key, value, line)?),
                "lambda" => fill(&mut self.lambda, parse_value(&key, value, line)?),
                "n" => fill(&mut self.n, parse_value(&key, value, line)?),
                "n-max" => fill(&mut self.n_max, parse_value(&key, value, line)?),
                "horizon" => {
                    let hs = value
                        .split(',')
                        .map(|v| parse_value(&key, v.trim(), line))
                        .collect::<Result<Vec<usize>, _>>()?;
                    fill(&mut self.horizon, hs)
                }
                "trials" => fill(&mut self.trials, parse_value(&key, value, line)?),
                "seed" => fill(&mut self.seed, parse_value(&key, value, line)?),
                "sigma" => fill(&mut self.sigma, parse_value(&key, value, line)?),
                "eps" => fill(&mut self.eps, parse_value(&key, value, line)?),
                "k" => fill(&mut self.k, parse_value(&key, value, line)?),
                "r" => fill(&mut self.r, parse_value(&key, value, line)?),
                "boundary" => fill(&mut self.boundary, value.to_string()),
                "mode" => fill(&mut self.mode, value.to_string()),
                "walk" => fill(&mut self.walk, value.to_string()),
                "path" => fill(&mut self.path, value.to_string()),
                "graph" => fill(&mut self.graph, PathBuf::from(value)),
                "output" => {
                    let f = OutputFormat::from_str(value, true).map_err(|_| {
                        CliError::parse(format!("config line {line}: bad output `{value}`"))
                    })?;
                    fill(&mut self.output, f)
                }
                "out" => fill(&mut self.out, PathBuf::from(value)),
                "workers" => fill(&mut self.workers, parse_value(&key, value, line)?),
                "max-states" => fill(&mut self.max_states, parse_value(&key, value, line)?),
                "max-brute-n" => fill(&mut self.max_brute_n, parse_value(&key, value, line)?),
                other => {
                    return Err(CliError::parse(format!(
                        "config line {line}: unknown key `{other}`"
                    )))
                }
            }
        }
        Ok(())
    }
}
