use serde::{Deserialize, Serialize};

use super::graph::WeightedGraph;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

/// A spanning tree of a (possibly wired) graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestSample {
    /// Sorted tags of the tree edges.
    pub chosen_edges: Vec<u64>,
    /// The wired vertex, if the graph has one.
    pub root: Option<usize>,
    /// Vertex sets of the tree with the wired vertex removed, largest first.
    pub components: Vec<Vec<usize>>,
    edge_indices: Vec<usize>,
}

impl ForestSample {
    fn from_edges(g: &WeightedGraph, mut edge_indices: Vec<usize>) -> ForestSample {
        edge_indices.sort_unstable();
        let mut chosen_edges: Vec<u64> = edge_indices.iter().map(|&i| g.edges()[i].tag).collect();
        chosen_edges.sort_unstable();
        let root = g.wired_root();
        let components = match root {
            None => Vec::new(),
            Some(r) => {
                let mut uf = UnionFind::new(g.vertex_count());
                for &i in &edge_indices {
                    let e = &g.edges()[i];
                    if e.a != r && e.b != r {
                        uf.union(e.a, e.b);
                    }
                }
                let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
                for v in (0..g.vertex_count()).filter(|&v| v != r) {
                    groups.entry(uf.find(v)).or_default().push(v);
                }
                let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
                comps.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
                comps
            }
        };
        ForestSample {
            chosen_edges,
            root,
            components,
            edge_indices,
        }
    }

    /// Indices into `g.edges()` of the chosen edges.
    pub fn edge_indices(&self) -> &[usize] {
        &self.edge_indices
    }

    /// Union–find check that the chosen edges form a spanning tree of `g`.
    pub fn is_spanning_tree(&self, g: &WeightedGraph) -> bool {
        if self.edge_indices.len() + 1 != g.vertex_count() {
            return false;
        }
        let mut uf = UnionFind::new(g.vertex_count());
        self.edge_indices.iter().all(|&i| {
            let e = &g.edges()[i];
            uf.union(e.a, e.b)
        })
    }

    /// Tags joined by spaces, the serialised form of a forest.
    pub fn to_text(&self) -> String {
        self.chosen_edges
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Wilson's algorithm: loop-erased walks, each run until it hits the tree grown so far.
pub(crate) fn wilson_with(g: &WeightedGraph, root: usize, rng: &mut StreamRng) -> Vec<usize> {
    let v = g.vertex_count();
    let mut in_tree = vec![false; v];
    let mut next_edge = vec![usize::MAX; v];
    in_tree[root] = true;
    let mut chosen = Vec::with_capacity(v.saturating_sub(1));
    for start in 0..v {
        let mut u = start;
        while !in_tree[u] {
            let cum = g.cumulative(u);
            let target = rng::uniform(rng) * cum[cum.len() - 1];
            let k = cum.partition_point(|&c| c <= target).min(cum.len() - 1);
            let (w, ei) = g.adjacency(u)[k];
            next_edge[u] = ei;
            u = w;
        }
        // retrace the loop-erased path
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            let ei = next_edge[u];
            chosen.push(ei);
            let e = &g.edges()[ei];
            u = if e.a == u { e.b } else { e.a };
        }
    }
    chosen
}

/// Samples a spanning tree with probability proportional to the product of
/// its conductances, using stream `(seed, 0, 0)`.
pub fn wilson_ust(g: &WeightedGraph, root: usize, seed: u64) -> Result<ForestSample> {
    if root >= g.vertex_count() {
        return Err(Error::Graph(format!("root {root} out of range")));
    }
    let mut rng = rng::stream(seed, 0, 0);
    Ok(ForestSample::from_edges(g, wilson_with(g, root, &mut rng)))
}

/// Independent samples, the `t`-th driven by stream `(seed, t, 0)`.
pub fn wilson_samples(
    g: &WeightedGraph,
    root: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<ForestSample>> {
    if root >= g.vertex_count() {
        return Err(Error::Graph(format!("root {root} out of range")));
    }
    Ok(crate::par::map_indexed(trials, |t| {
        let mut rng = rng::stream(seed, t as u64, 0);
        ForestSample::from_edges(g, wilson_with(g, root, &mut rng))
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestStats {
    pub component_count: usize,
    /// Component sizes, largest first.
    pub component_sizes: Vec<usize>,
}

/// Components of the sampled tree after deleting the wired vertex.
pub fn forest_stats(sample: &ForestSample) -> Result<ForestStats> {
    if sample.root.is_none() {
        return Err(Error::NoWiredRoot);
    }
    Ok(ForestStats {
        component_count: sample.components.len(),
        component_sizes: sample.components.iter().map(|c| c.len()).collect(),
    })
}

/// One spanning tree with its exact probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeProbability {
    pub tags: Vec<u64>,
    pub weight: f64,
    pub probability: f64,
}

/// The weighted spanning-tree law by exhaustive enumeration, sorted by tag list.
pub fn ust_exact(g: &WeightedGraph, budget: &Budget) -> Result<Vec<TreeProbability>> {
    let v = g.vertex_count();
    if v > budget.max_exact_vertices {
        return Err(Error::Budget {
            what: "spanning-tree enumeration vertices",
            d: 0,
            n: v,
            needed: v as u128,
            limit: budget.max_exact_vertices as u128,
        });
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(v);
    enumerate(g, 0, &mut chosen, &mut out);
    let total: f64 = out.iter().map(|t: &TreeProbability| t.weight).sum();
    for t in &mut out {
        t.probability = t.weight / total;
    }
    out.sort_by(|a, b| a.tags.cmp(&b.tags));
    Ok(out)
}

fn enumerate(
    g: &WeightedGraph,
    from: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<TreeProbability>,
) {
    let need = g.vertex_count() - 1;
    if chosen.len() == need {
        let mut uf = UnionFind::new(g.vertex_count());
        if chosen
            .iter()
            .all(|&i| uf.union(g.edges()[i].a, g.edges()[i].b))
        {
            let mut tags: Vec<u64> = chosen.iter().map(|&i| g.edges()[i].tag).collect();
            tags.sort_unstable();
            out.push(TreeProbability {
                tags,
                weight: chosen.iter().map(|&i| g.edges()[i].conductance).product(),
                probability: 0.0,
            });
        }
        return;
    }
    let m = g.edges().len();
    if m - from < need - chosen.len() {
        return;
    }
    for i in from..m {
        // prune as soon as the partial set has a cycle
        chosen.push(i);
        let mut uf = UnionFind::new(g.vertex_count());
        let acyclic = chosen
            .iter()
            .all(|&j| uf.union(g.edges()[j].a, g.edges()[j].b));
        if acyclic {
            enumerate(g, i + 1, chosen, out);
        }
        chosen.pop();
    }
}

/// Total-variation distance between sampled trees and the exact law.
pub fn tree_tv_distance(samples: &[ForestSample], exact: &[TreeProbability]) -> f64 {
    let mut counts: std::collections::HashMap<&[u64], usize> = Default::default();
    for s in samples {
        *counts.entry(&s.chosen_edges).or_default() += 1;
    }
    let n = samples.len() as f64;
    let mut tv = 0.0;
    let mut matched = 0usize;
    for t in exact {
        let c = counts.get(t.tags.as_slice()).copied().unwrap_or(0);
        matched += c;
        tv += (c as f64 / n - t.probability).abs();
    }
    // samples outside the support of the exact law
    tv += (samples.len() - matched) as f64 / n;
    tv / 2.0
}
