//! Weighted spanning trees and forests: box exhaustions of ℤᵈ, Wilson's
//! algorithm, exact enumeration, and the wired forest of ℤ¹.

mod counts;
mod graph;
mod sample;
mod z1;

pub use counts::{tree_count_estimate, TreeCountReport, PERSISTENCE};
pub use graph::{build_box, Boundary, BoxOrigin, Edge, WeightedGraph};
pub use sample::{
    forest_stats, tree_tv_distance, ust_exact, wilson_samples, wilson_ust, ForestSample,
    ForestStats, TreeProbability,
};
pub use z1::{wsf_z1_exact, wsf_z1_finite, wsf_z1_sample, CutPosition, WsfZ1Sample};
