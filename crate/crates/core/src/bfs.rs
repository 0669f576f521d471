//! BFS forest construction, edge classification and cover-edge extraction.
//!
//! A full traversal assigns every vertex a level inside its component. Edges
//! then fall into three classes: tree edges (parent links), struts (non-tree,
//! levels differ by one) and horizontals (non-tree, same level). Each
//! triangle has an odd cycle length, so it always contains one or three
//! horizontal edges, which makes the horizontal set a cover-edge set.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// How each component's BFS root is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootPolicy {
    /// The smallest vertex id in each component.
    LowestId,
    /// Roots tried in the given order; components none of them reach fall
    /// back to their lowest id.
    Given(Vec<VertexId>),
    /// Roots taken in the order of a seeded shuffle of all vertices.
    SeededRandom(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BfsLabels {
    pub level: Vec<u32>,
    /// Root of the component each vertex belongs to.
    pub component: Vec<VertexId>,
    /// Roots in traversal order.
    pub roots: Vec<VertexId>,
    /// Eccentricity of each root within its component, parallel to `roots`.
    pub max_depth: Vec<u32>,
}

impl BfsLabels {
    pub fn n(&self) -> usize {
        self.level.len()
    }

    pub fn components(&self) -> usize {
        self.roots.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BfsForest {
    pub labels: BfsLabels,
    /// `None` for roots.
    pub parent: Vec<Option<VertexId>>,
}

pub fn bfs_forest(g: &Graph, policy: &RootPolicy) -> Result<BfsForest> {
    let n = g.n();
    let order: Vec<VertexId> = match policy {
        RootPolicy::LowestId => g.vertices().collect(),
        RootPolicy::Given(roots) => {
            for &r in roots {
                if r as usize >= n {
                    return Err(Error::VertexOutOfRange { vertex: r as u64, n });
                }
            }
            roots.iter().copied().chain(g.vertices()).collect()
        }
        RootPolicy::SeededRandom(seed) => {
            let mut order: Vec<VertexId> = g.vertices().collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
            order
        }
    };

    const UNSEEN: u32 = u32::MAX;
    let mut level = vec![UNSEEN; n];
    let mut component = vec![0; n];
    let mut parent = vec![None; n];
    let mut roots = Vec::new();
    let mut max_depth = Vec::new();
    let mut queue = VecDeque::new();

    for root in order {
        if level[root as usize] != UNSEEN {
            continue;
        }
        level[root as usize] = 0;
        component[root as usize] = root;
        queue.push_back(root);
        let mut depth = 0;
        while let Some(u) = queue.pop_front() {
            let next = level[u as usize] + 1;
            for &w in g.neighbors(u) {
                if level[w as usize] == UNSEEN {
                    level[w as usize] = next;
                    component[w as usize] = root;
                    parent[w as usize] = Some(u);
                    depth = next;
                    queue.push_back(w);
                }
            }
        }
        roots.push(root);
        max_depth.push(depth);
    }

    Ok(BfsForest {
        labels: BfsLabels {
            level,
            component,
            roots,
            max_depth,
        },
        parent,
    })
}

/// Largest BFS depth over all components, used in place of the diameter.
pub fn diameter_proxy(labels: &BfsLabels) -> u32 {
    labels.max_depth.iter().copied().max().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    Tree,
    Strut,
    Horizontal,
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeClass::Tree => "tree",
            EdgeClass::Strut => "strut",
            EdgeClass::Horizontal => "horizontal",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeClassification {
    /// One tag per undirected edge, in [`Graph::edges`] order.
    pub class_of: Vec<EdgeClass>,
    /// Horizontal edges as `(u, v)` with `u < v`, ascending.
    pub cover_edges: Vec<(VertexId, VertexId)>,
    pub tree: usize,
    pub strut: usize,
    pub horizontal: usize,
    /// `|cover_edges| / m`, zero for edgeless graphs.
    pub k: f64,
}

pub fn classify_edges(g: &Graph, forest: &BfsForest) -> Result<EdgeClassification> {
    let level = &forest.labels.level;
    if level.len() != g.n() || forest.parent.len() != g.n() {
        return Err(Error::domain(format!(
            "labels cover {} vertices but the graph has {}",
            level.len(),
            g.n()
        )));
    }
    let mut class_of = Vec::with_capacity(g.m());
    let mut cover_edges = Vec::new();
    let (mut tree, mut strut) = (0, 0);
    for (u, v) in g.edges() {
        let (lu, lv) = (level[u as usize], level[v as usize]);
        let class = if forest.parent[v as usize] == Some(u) || forest.parent[u as usize] == Some(v) {
            if lu.abs_diff(lv) != 1 {
                return Err(Error::Inconsistent(format!(
                    "tree edge ({u}, {v}) joins levels {lu} and {lv}"
                )));
            }
            tree += 1;
            EdgeClass::Tree
        } else if lu == lv {
            cover_edges.push((u, v));
            EdgeClass::Horizontal
        } else if lu.abs_diff(lv) == 1 {
            strut += 1;
            EdgeClass::Strut
        } else {
            return Err(Error::Inconsistent(format!(
                "edge ({u}, {v}) joins levels {lu} and {lv}"
            )));
        };
        class_of.push(class);
    }
    let horizontal = cover_edges.len();
    let k = if class_of.is_empty() {
        0.0
    } else {
        horizontal as f64 / class_of.len() as f64
    };
    Ok(EdgeClassification {
        class_of,
        cover_edges,
        tree,
        strut,
        horizontal,
        k,
    })
}

/// Debug dump: one `id level parent` line per vertex, `-` for roots.
pub fn write_levels<W: Write>(forest: &BfsForest, mut out: W) -> Result<()> {
    for (v, (level, parent)) in forest
        .labels
        .level
        .iter()
        .zip(&forest.parent)
        .enumerate()
    {
        match parent {
            Some(p) => writeln!(out, "{v} {level} {p}")?,
            None => writeln!(out, "{v} {level} -")?,
        }
    }
    Ok(())
}

/// Debug dump: one `u v class` line per edge.
pub fn write_edge_classes<W: Write>(g: &Graph, cls: &EdgeClassification, mut out: W) -> Result<()> {
    for ((u, v), class) in g.edges().zip(&cls.class_of) {
        writeln!(out, "{u} {v} {class}")?;
    }
    Ok(())
}
