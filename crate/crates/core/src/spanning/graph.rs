use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::lattice::{edge_conductance, Lambda, Lattice, LatticePoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub conductance: f64,
    /// Identity of the edge; distinct even between parallel edges.
    pub tag: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Free,
    Wired,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Free => "free",
            Boundary::Wired => "wired",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Boundary> {
        match s {
            "free" => Ok(Boundary::Free),
            "wired" => Ok(Boundary::Wired),
            other => Err(Error::param(format!("unknown boundary `{other}`"))),
        }
    }
}

/// Where a box graph came from; needed to write and re-read it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxOrigin {
    pub d: usize,
    pub n: usize,
    pub lambda: f64,
    pub boundary: Boundary,
}

/// Connected multigraph with positive conductances and no self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<Option<LatticePoint>>,
    edges: Vec<Edge>,
    /// `(neighbour, edge index)` per vertex.
    adjacency: Vec<Vec<(usize, usize)>>,
    /// Running sums of incident conductances, aligned with `adjacency`.
    cumulative: Vec<Vec<f64>>,
    multigraph: bool,
    wired_root: Option<usize>,
    origin: Option<BoxOrigin>,
}

impl WeightedGraph {
    pub fn new(vertex_count: usize, edges: Vec<Edge>) -> Result<WeightedGraph> {
        WeightedGraph::with_labels(vec![None; vertex_count], edges, None)
    }

    /// Like [`WeightedGraph::new`], marking `root` as the wired vertex.
    pub fn with_wired_root(
        vertex_count: usize,
        edges: Vec<Edge>,
        root: usize,
    ) -> Result<WeightedGraph> {
        if root >= vertex_count {
            return Err(Error::Graph(format!("root {root} out of range")));
        }
        let mut g = WeightedGraph::new(vertex_count, edges)?;
        g.wired_root = Some(root);
        Ok(g)
    }

    fn with_labels(
        labels: Vec<Option<LatticePoint>>,
        edges: Vec<Edge>,
        wired_root: Option<usize>,
    ) -> Result<WeightedGraph> {
        let v = labels.len();
        if v == 0 {
            return Err(Error::Graph("graph has no vertices".into()));
        }
        let mut tags: Vec<u64> = edges.iter().map(|e| e.tag).collect();
        tags.sort_unstable();
        if tags.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Graph("edge tags must be distinct".into()));
        }
        let mut adjacency = vec![Vec::new(); v];
        for (i, e) in edges.iter().enumerate() {
            if e.a >= v || e.b >= v {
                return Err(Error::Graph(format!(
                    "edge {} has an endpoint out of range",
                    e.tag
                )));
            }
            if e.a == e.b {
                return Err(Error::Graph(format!("edge {} is a self-loop", e.tag)));
            }
            if !(e.conductance > 0.0 && e.conductance.is_finite()) {
                return Err(Error::Graph(format!(
                    "edge {} has conductance {}",
                    e.tag, e.conductance
                )));
            }
            adjacency[e.a].push((e.b, i));
            adjacency[e.b].push((e.a, i));
        }
        let mut pairs: Vec<(usize, usize)> =
            edges.iter().map(|e| (e.a.min(e.b), e.a.max(e.b))).collect();
        pairs.sort_unstable();
        let multigraph = pairs.windows(2).any(|w| w[0] == w[1]);
        let cumulative = adjacency
            .iter()
            .map(|nbrs| {
                let mut s = 0.0;
                nbrs.iter()
                    .map(|&(_, ei)| {
                        s += edges[ei].conductance;
                        s
                    })
                    .collect()
            })
            .collect();
        let g = WeightedGraph {
            labels,
            edges,
            adjacency,
            cumulative,
            multigraph,
            wired_root,
            origin: None,
        };
        if !g.is_connected() {
            return Err(Error::Graph("graph is not connected".into()));
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(w, _) in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn label(&self, v: usize) -> Option<&LatticePoint> {
        self.labels[v].as_ref()
    }

    pub fn is_multigraph(&self) -> bool {
        self.multigraph
    }

    pub fn wired_root(&self) -> Option<usize> {
        self.wired_root
    }

    pub fn box_origin(&self) -> Option<BoxOrigin> {
        self.origin
    }

    pub(crate) fn adjacency(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub(crate) fn cumulative(&self, v: usize) -> &[f64] {
        &self.cumulative[v]
    }

    /// Index of the vertex labelled `x`, if any.
    pub fn vertex_of(&self, x: &LatticePoint) -> Option<usize> {
        self.labels.iter().position(|l| l.as_ref() == Some(x))
    }

    /// Line-oriented text form: a header `d n lambda boundary`, then one
    /// `edge a b conductance tag` line per edge. Only box graphs have a header.
    pub fn to_text(&self) -> Result<String> {
        let o = self
            .origin
            .ok_or_else(|| Error::Graph("only box graphs have a text form".into()))?;
        let mut out = format!("{} {} {} {}\n", o.d, o.n, o.lambda, o.boundary.as_str());
        for e in &self.edges {
            writeln!(out, "edge {} {} {} {}", e.a, e.b, e.conductance, e.tag)
                .expect("write to String");
        }
        Ok(out)
    }

    /// Parses [`WeightedGraph::to_text`] output. Vertex labels are rebuilt from the header.
    pub fn from_text(text: &str, budget: &Budget) -> Result<WeightedGraph> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let parse_err = |line: usize, message: String| Error::Parse {
            line: line + 1,
            message,
        };
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 {
            return Err(parse_err(0, "header must be `d n lambda boundary`".into()));
        }
        let d: usize = h[0].parse().map_err(|e| parse_err(0, format!("d: {e}")))?;
        let n: usize = h[1].parse().map_err(|e| parse_err(0, format!("n: {e}")))?;
        let lambda: f64 = h[2]
            .parse()
            .map_err(|e| parse_err(0, format!("lambda: {e}")))?;
        let boundary: Boundary = h[3]
            .parse()
            .map_err(|e: Error| parse_err(0, e.to_string()))?;
        let lattice = Lattice::new(d)?;
        let lambda = Lambda::new(lambda)?;
        let template = build_box(&lattice, n, lambda, boundary, budget)?;

        let mut edges = Vec::new();
        for (i, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 || f[0] != "edge" {
                return Err(parse_err(i, "expected `edge a b conductance tag`".into()));
            }
            let num = |s: &str, what: &str| -> Result<usize> {
                s.parse().map_err(|e| parse_err(i, format!("{what}: {e}")))
            };
            edges.push(Edge {
                a: num(f[1], "a")?,
                b: num(f[2], "b")?,
                conductance: f[3]
                    .parse()
                    .map_err(|e| parse_err(i, format!("conductance: {e}")))?,
                tag: f[4]
                    .parse()
                    .map_err(|e| parse_err(i, format!("tag: {e}")))?,
            });
        }
        let mut g =
            WeightedGraph::with_labels(template.labels.clone(), edges, template.wired_root)?;
        g.origin = template.origin;
        Ok(g)
    }
}

/// The cube `[-n, n]^d` with conductances `λ^{-|e|}`. With a wired boundary,
/// every edge leaving the cube is redirected to one extra vertex (the last
/// index), keeping parallel edges separate.
pub fn build_box(
    lattice: &Lattice,
    n: usize,
    lambda: Lambda,
    boundary: Boundary,
    budget: &Budget,
) -> Result<WeightedGraph> {
    if n == 0 {
        return Err(Error::param("box size n must be at least 1"));
    }
    let d = lattice.dim();
    let side = 2 * n + 1;
    let count = (side as u128).saturating_pow(d as u32);
    if count > budget.max_states as u128 {
        return Err(Error::Budget {
            what: "box vertices",
            d,
            n,
            needed: count,
            limit: budget.max_states as u128,
        });
    }
    let count = count as usize;
    let ni = n as i64;
    let coords_of = |mut idx: usize| -> Vec<i64> {
        let mut c = vec![0i64; d];
        for i in (0..d).rev() {
            c[i] = (idx % side) as i64 - ni;
            idx /= side;
        }
        c
    };
    let index_of =
        |c: &[i64]| -> usize { c.iter().fold(0, |acc, &x| acc * side + (x + ni) as usize) };
    let l = lambda.value();
    let root = count;
    let mut edges = Vec::new();
    let mut push = |a: usize, b: usize, level: u64| {
        let tag = edges.len() as u64;
        edges.push(Edge {
            a,
            b,
            conductance: edge_conductance(level, l),
            tag,
        });
    };
    for v in 0..count {
        let x = coords_of(v);
        let norm: u64 = x.iter().map(|c| c.unsigned_abs()).sum();
        for axis in 0..d {
            if x[axis] < ni {
                let mut y = x.clone();
                y[axis] += 1;
                let ny: u64 = y.iter().map(|c| c.unsigned_abs()).sum();
                push(v, index_of(&y), norm.min(ny));
            }
            if boundary == Boundary::Wired {
                // the outside neighbour is one step further from the origin
                if x[axis] == ni {
                    push(v, root, norm);
                }
                if x[axis] == -ni {
                    push(v, root, norm);
                }
            }
        }
    }
    let mut labels: Vec<Option<LatticePoint>> = (0..count)
        .map(|v| Some(LatticePoint::new(coords_of(v))))
        .collect();
    let wired_root = (boundary == Boundary::Wired).then(|| {
        labels.push(None);
        root
    });
    let mut g = WeightedGraph::with_labels(labels, edges, wired_root)?;
    g.origin = Some(BoxOrigin {
        d,
        n,
        lambda: l,
        boundary,
    });
    Ok(g)
}
