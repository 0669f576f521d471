//! Sequential triangle counters: the cover-edge counter and two independent
//! baselines used as oracles.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::bfs::{BfsLabels, EdgeClassification};
use crate::error::{Error, Result};
use crate::graph::{degree_precedes, Graph, VertexId};
use crate::intersect::{for_each_common, Kernel};

/// Largest graph the all-triples oracle accepts.
pub const BRUTEFORCE_MAX_N: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Cetc,
    EdgeIterator,
    BruteForce,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Cetc => "cetc",
            Algorithm::EdgeIterator => "edge-iter",
            Algorithm::BruteForce => "brute",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cetc" => Ok(Algorithm::Cetc),
            "edge-iter" | "edge-iterator" => Ok(Algorithm::EdgeIterator),
            "brute" | "bruteforce" => Ok(Algorithm::BruteForce),
            other => Err(Error::domain(format!(
                "unknown algorithm {other:?} (expected cetc, edge-iter or brute)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleCountReport {
    pub total: u64,
    pub algorithm: Algorithm,
    /// Cover edges visited; zero for the baselines.
    pub horizontal_edges_scanned: u64,
    pub intersections_performed: u64,
    pub elapsed: Duration,
}

impl TriangleCountReport {
    /// `algorithm=<tag> triangles=<T> m=<m> k=<k>`; timing is printed separately.
    pub fn summary_line(&self, m: usize, k: Option<f64>) -> String {
        let k = k.map_or_else(|| "n/a".to_string(), |k| format!("{k:.4}"));
        format!(
            "algorithm={} triangles={} m={} k={}",
            self.algorithm, self.total, m, k
        )
    }
}

/// Whether apex `w` closes a counted triangle over horizontal edge `(u, v)`.
///
/// An apex on another level makes `{u, v}` the triangle's only horizontal
/// edge. An apex on the same level means all three edges are horizontal, and
/// only the ordering `u < v < w` is counted.
#[inline]
pub(crate) fn apex_counts(level: &[u32], v: VertexId, u_level: u32, w: VertexId) -> bool {
    u_level != level[w as usize] || v < w
}

fn check_inputs(g: &Graph, cls: &EdgeClassification, labels: &BfsLabels) -> Result<()> {
    if labels.n() != g.n() {
        return Err(Error::domain(format!(
            "labels cover {} vertices but the graph has {}",
            labels.n(),
            g.n()
        )));
    }
    if cls.class_of.len() != g.m() {
        return Err(Error::domain(format!(
            "classification covers {} edges but the graph has {}",
            cls.class_of.len(),
            g.m()
        )));
    }
    Ok(())
}

/// Counts triangles at one horizontal edge, calling `emit` for each.
#[inline]
fn count_at_edge<F>(g: &Graph, level: &[u32], kernel: Kernel, u: VertexId, v: VertexId, emit: &mut F) -> u64
where
    F: FnMut(VertexId, VertexId, VertexId),
{
    let lu = level[u as usize];
    let mut t = 0;
    for_each_common(g.neighbors(u), g.neighbors(v), kernel, |w| {
        if apex_counts(level, v, lu, w) {
            emit(u, v, w);
            t += 1;
        }
    });
    t
}

/// Cover-edge triangle counting.
pub fn count_cetc(
    g: &Graph,
    cls: &EdgeClassification,
    labels: &BfsLabels,
    kernel: Kernel,
) -> Result<TriangleCountReport> {
    count_cetc_with(g, cls, labels, kernel, |_, _, _| {})
}

/// [`count_cetc`] that also reports every counted triangle as `(u, v, w)`
/// where `(u, v)` is the horizontal edge it was found from.
pub fn count_cetc_with<F>(
    g: &Graph,
    cls: &EdgeClassification,
    labels: &BfsLabels,
    kernel: Kernel,
    mut on_triangle: F,
) -> Result<TriangleCountReport>
where
    F: FnMut(VertexId, VertexId, VertexId),
{
    check_inputs(g, cls, labels)?;
    let start = Instant::now();
    let level = &labels.level;
    let mut total = 0;
    for &(u, v) in &cls.cover_edges {
        debug_assert!(u < v && level[u as usize] == level[v as usize]);
        total += count_at_edge(g, level, kernel, u, v, &mut on_triangle);
    }
    let scanned = cls.cover_edges.len() as u64;
    Ok(TriangleCountReport {
        total,
        algorithm: Algorithm::Cetc,
        horizontal_edges_scanned: scanned,
        intersections_performed: scanned,
        elapsed: start.elapsed(),
    })
}

/// [`count_cetc`] with the cover-edge loop split across up to `threads`
/// workers. Per-chunk counts are summed, so the total matches the sequential one.
pub fn count_cetc_parallel(
    g: &Graph,
    cls: &EdgeClassification,
    labels: &BfsLabels,
    kernel: Kernel,
    threads: usize,
) -> Result<TriangleCountReport> {
    check_inputs(g, cls, labels)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let level = &labels.level;
    let total = pool.install(|| {
        cls.cover_edges
            .par_chunks(1024)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|&(u, v)| count_at_edge(g, level, kernel, u, v, &mut |_, _, _| {}))
                    .sum::<u64>()
            })
            .sum()
    });
    let scanned = cls.cover_edges.len() as u64;
    Ok(TriangleCountReport {
        total,
        algorithm: Algorithm::Cetc,
        horizontal_edges_scanned: scanned,
        intersections_performed: scanned,
        elapsed: start.elapsed(),
    })
}

/// Degree-oriented edge iterator. Each edge is directed from lower to higher
/// `(degree, id)`, and a triangle is counted once at its two lowest-ranked
/// vertices.
pub fn count_edge_iterator(g: &Graph) -> TriangleCountReport {
    let start = Instant::now();
    let n = g.n();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0usize);
    let mut out: Vec<VertexId> = Vec::with_capacity(g.m());
    for u in g.vertices() {
        out.extend(g.neighbors(u).iter().filter(|&&w| degree_precedes(g, u, w)));
        offsets.push(out.len());
    }
    let fwd = |u: VertexId| &out[offsets[u as usize]..offsets[u as usize + 1]];

    let mut total = 0u64;
    let mut intersections = 0u64;
    for u in g.vertices() {
        for &v in fwd(u) {
            intersections += 1;
            total += for_each_common(fwd(u), fwd(v), Kernel::Merge, |_| {}) as u64;
        }
    }
    TriangleCountReport {
        total,
        algorithm: Algorithm::EdgeIterator,
        horizontal_edges_scanned: 0,
        intersections_performed: intersections,
        elapsed: start.elapsed(),
    }
}

fn bruteforce_guard(g: &Graph) -> Result<()> {
    if g.n() > BRUTEFORCE_MAX_N {
        return Err(Error::TooLarge {
            what: "brute-force oracle vertex count",
            size: g.n() as u64,
            limit: BRUTEFORCE_MAX_N as u64,
            hint: "use the edge-iterator counter for larger graphs",
        });
    }
    Ok(())
}

/// Every triangle as `[a, b, c]` with `a < b < c`, found by testing all
/// vertex triples for edge membership.
pub fn bruteforce_triangles(g: &Graph) -> Result<Vec<[VertexId; 3]>> {
    bruteforce_guard(g)?;
    let n = g.n() as VertexId;
    let mut found = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let ab = g.contains_edge(a, b);
            for c in (b + 1)..n {
                if ab && g.contains_edge(a, c) && g.contains_edge(b, c) {
                    found.push([a, b, c]);
                }
            }
        }
    }
    Ok(found)
}

pub fn count_bruteforce(g: &Graph) -> Result<TriangleCountReport> {
    let start = Instant::now();
    let total = bruteforce_triangles(g)?.len() as u64;
    Ok(TriangleCountReport {
        total,
        algorithm: Algorithm::BruteForce,
        horizontal_edges_scanned: 0,
        intersections_performed: 0,
        elapsed: start.elapsed(),
    })
}
