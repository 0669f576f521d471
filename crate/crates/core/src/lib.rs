//! Triangle counting over BFS cover-edge sets.
//!
//! A breadth-first search labels every vertex with its level. Edges joining two
//! vertices on the same level (horizontal edges) cover every triangle, so the
//! counter only intersects adjacency lists for those edges. The crate also
//! simulates the distributed variant with an XOR exchange schedule, keeps a
//! bit-level communication ledger, and evaluates the closed-form volume models
//! used to compare against wedge-checking baselines.

pub mod bfs;
pub mod dist;
pub mod error;
pub mod graph;
pub mod intersect;
pub mod model;
pub mod report;
pub mod rmat;
pub mod triangles;
pub mod units;

pub use bfs::{
    bfs_forest, classify_edges, diameter_proxy, BfsForest, BfsLabels, EdgeClass,
    EdgeClassification, RootPolicy,
};
pub use dist::{charge_ledger, partition_vertices, simulate_comm_cetc, CommLedger, Partition, SimResult};
pub use error::{Error, Result};
pub use graph::{degree_stats, load_edge_list, DegreeStats, EdgeListOptions, Graph, LoadedGraph, VertexId};
pub use intersect::{intersect, Kernel};
pub use triangles::{count_bruteforce, count_cetc, count_edge_iterator, Algorithm, TriangleCountReport};
