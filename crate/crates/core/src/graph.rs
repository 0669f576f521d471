//! Undirected simple graphs in CSR form, SNAP edge-list ingestion and degree
//! statistics.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = u32;

/// Immutable undirected simple graph.
///
/// Every undirected edge `{u, v}` is stored twice, once in each endpoint's
/// adjacency range. Ranges are strictly increasing and never contain the
/// owning vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    row_offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
}

/// What normalization threw away while building a [`Graph`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeSummary {
    /// Edge records fed to the builder, self-loops included.
    pub input_edges: u64,
    pub self_loops: u64,
    /// Records that repeated an edge already seen in either direction.
    pub duplicates: u64,
}

impl Graph {
    /// Builds a graph on `n` vertices from an arbitrary edge stream, dropping
    /// self-loops and merging duplicate or reversed edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<(Graph, NormalizeSummary)>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        if n > VertexId::MAX as usize {
            return Err(Error::TooLarge {
                what: "vertex count",
                size: n as u64,
                limit: VertexId::MAX as u64,
                hint: "vertex ids are 32-bit",
            });
        }
        let mut summary = NormalizeSummary::default();
        let mut canon: Vec<(VertexId, VertexId)> = Vec::new();
        for (u, v) in edges {
            summary.input_edges += 1;
            for x in [u, v] {
                if x as usize >= n {
                    return Err(Error::VertexOutOfRange { vertex: x as u64, n });
                }
            }
            if u == v {
                summary.self_loops += 1;
                continue;
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        summary.duplicates = (before - canon.len()) as u64;

        let mut degree = vec![0usize; n];
        for &(u, v) in &canon {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut row_offsets = Vec::with_capacity(n + 1);
        row_offsets.push(0);
        let mut acc = 0;
        for d in &degree {
            acc += d;
            row_offsets.push(acc);
        }
        // Canonical pairs arrive sorted by (u, v): all (y, x) with y < x are seen
        // before any (x, z), so each row fills in ascending order.
        let mut cursor = row_offsets[..n].to_vec();
        let mut neighbors = vec![0; acc];
        for &(u, v) in &canon {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        let g = Graph {
            row_offsets,
            neighbors,
        };
        debug_assert!(g.validate().is_ok());
        Ok((g, summary))
    }

    /// Wraps raw CSR arrays after checking every structural invariant.
    pub fn from_csr(row_offsets: Vec<usize>, neighbors: Vec<VertexId>) -> Result<Graph> {
        let g = Graph {
            row_offsets,
            neighbors,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn empty() -> Graph {
        Graph {
            row_offsets: vec![0],
            neighbors: Vec::new(),
        }
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.row_offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn neighbor_array(&self) -> &[VertexId] {
        &self.neighbors
    }

    /// Sorted adjacency of `v`.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.row_offsets[v]..self.row_offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.row_offsets[v + 1] - self.row_offsets[v]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.n() as VertexId
    }

    /// Every undirected edge once as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            let adj = self.neighbors(u);
            let start = adj.partition_point(|&w| w < u);
            adj[start..].iter().map(move |&v| (u, v))
        })
    }

    /// Edge membership by binary search over the shorter adjacency range.
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> Result<bool> {
        let n = self.n();
        for x in [u, v] {
            if x as usize >= n {
                return Err(Error::VertexOutOfRange { vertex: x as u64, n });
            }
        }
        Ok(self.contains_edge(u, v))
    }

    /// Unchecked variant of [`Graph::has_edge`] for in-range ids.
    #[inline]
    pub(crate) fn contains_edge(&self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Checks sortedness, absence of self-loops, symmetry and the offset sum.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Inconsistent(msg));
        if self.row_offsets.first() != Some(&0) {
            return bad("row_offsets must start at 0".into());
        }
        if *self.row_offsets.last().unwrap() != self.neighbors.len() {
            return bad("row_offsets[n] must equal the neighbor array length".into());
        }
        if self.neighbors.len() % 2 != 0 {
            return bad("neighbor array length must be even".into());
        }
        if self.row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return bad("row_offsets must be non-decreasing".into());
        }
        let n = self.n();
        for u in self.vertices() {
            let adj = self.neighbors(u);
            if adj.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("adjacency of {u} is not strictly increasing"));
            }
            for &v in adj {
                if v as usize >= n {
                    return bad(format!("neighbor {v} of {u} out of range"));
                }
                if v == u {
                    return bad(format!("self-loop at {u}"));
                }
                if self.neighbors(v).binary_search(&u).is_err() {
                    return bad(format!("edge ({u}, {v}) has no reverse entry"));
                }
            }
        }
        Ok(())
    }

    /// Writes one `u v` line per edge with `u < v`, ascending.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeListOptions {
    /// Treat lines starting with `#` as comments. When off they are parse errors.
    pub skip_comments: bool,
    /// Input ids start at 1; the id map records them shifted down by one.
    pub one_indexed: bool,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            skip_comments: true,
            one_indexed: false,
        }
    }
}

/// A graph together with the external ids of its dense vertices.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `id_map[v]` is the external id of dense vertex `v`.
    pub id_map: Vec<u64>,
    pub summary: NormalizeSummary,
}

/// Parses a SNAP-style whitespace edge list.
///
/// Dense ids are handed out in order of first appearance, so a vertex that only
/// occurs in a self-loop still counts towards `n`.
pub fn load_edge_list<R: BufRead>(reader: R, options: EdgeListOptions) -> Result<LoadedGraph> {
    let mut dense: HashMap<u64, VertexId> = HashMap::new();
    let mut id_map: Vec<u64> = Vec::new();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if options.skip_comments {
                continue;
            }
            return Err(Error::Parse {
                line: line_no,
                message: "comment line while comments are disabled".into(),
            });
        }
        let mut tokens = trimmed.split_whitespace();
        let mut ids = [0u64; 2];
        for slot in ids.iter_mut() {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two vertex ids".into(),
            })?;
            let raw: u64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid vertex id {tok:?}"),
            })?;
            *slot = if options.one_indexed {
                raw.checked_sub(1).ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: "vertex id 0 in one-indexed input".into(),
                })?
            } else {
                raw
            };
        }
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unexpected trailing token {extra:?}"),
            });
        }
        let mut intern = |ext: u64| -> Result<VertexId> {
            if let Some(&v) = dense.get(&ext) {
                return Ok(v);
            }
            let v = VertexId::try_from(id_map.len()).map_err(|_| Error::TooLarge {
                what: "vertex count",
                size: id_map.len() as u64,
                limit: VertexId::MAX as u64,
                hint: "vertex ids are 32-bit",
            })?;
            dense.insert(ext, v);
            id_map.push(ext);
            Ok(v)
        };
        let u = intern(ids[0])?;
        let v = intern(ids[1])?;
        edges.push((u, v));
    }

    let (graph, summary) = Graph::from_edges(id_map.len(), edges)?;
    Ok(LoadedGraph {
        graph,
        id_map,
        summary,
    })
}

/// Which wedge count a report quotes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WedgeDefinition {
    /// Every unordered 2-path: sum of C(d(v), 2).
    #[default]
    Total,
    /// 2-paths whose legs both leave the center under degree ordering.
    Oriented,
}

impl std::str::FromStr for WedgeDefinition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(WedgeDefinition::Total),
            "oriented" => Ok(WedgeDefinition::Oriented),
            other => Err(Error::domain(format!(
                "unknown wedge definition {other:?} (expected total or oriented)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    pub degrees: Vec<u32>,
    pub d_max: u32,
    pub wedge_total: u64,
    /// Edges point from lower to higher `(degree, id)`.
    pub wedge_oriented: u64,
}

impl DegreeStats {
    pub fn wedges(&self, def: WedgeDefinition) -> u64 {
        match def {
            WedgeDefinition::Total => self.wedge_total,
            WedgeDefinition::Oriented => self.wedge_oriented,
        }
    }
}

fn choose2(d: u64) -> Option<u64> {
    if d < 2 {
        return Some(0);
    }
    // One of d, d-1 is even, so halve that one first.
    if d % 2 == 0 {
        (d / 2).checked_mul(d - 1)
    } else {
        d.checked_mul((d - 1) / 2)
    }
}

/// `true` when `a` precedes `b` in the degree ordering.
#[inline]
pub(crate) fn degree_precedes(g: &Graph, a: VertexId, b: VertexId) -> bool {
    (g.degree(a), a) < (g.degree(b), b)
}

pub fn degree_stats(g: &Graph) -> Result<DegreeStats> {
    let mut degrees = Vec::with_capacity(g.n());
    let mut wedge_total: u64 = 0;
    let mut wedge_oriented: u64 = 0;
    for v in g.vertices() {
        let d = g.degree(v) as u64;
        degrees.push(u32::try_from(d).map_err(|_| Error::Overflow("vertex degree"))?);
        let out = g
            .neighbors(v)
            .iter()
            .filter(|&&w| degree_precedes(g, v, w))
            .count() as u64;
        wedge_total = choose2(d)
            .and_then(|c| wedge_total.checked_add(c))
            .ok_or(Error::Overflow("total wedge count"))?;
        wedge_oriented = choose2(out)
            .and_then(|c| wedge_oriented.checked_add(c))
            .ok_or(Error::Overflow("oriented wedge count"))?;
    }
    let d_max = degrees.iter().copied().max().unwrap_or(0);
    Ok(DegreeStats {
        degrees,
        d_max,
        wedge_total,
        wedge_oriented,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn graph(n: usize, edges: &[(u32, u32)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap().0
    }

    pub(crate) fn k3() -> Graph {
        graph(3, &[(0, 1), (1, 2), (2, 0)])
    }

    pub(crate) fn path(n: u32) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        graph(n as usize, &edges)
    }

    fn load(text: &str) -> Result<LoadedGraph> {
        load_edge_list(text.as_bytes(), EdgeListOptions::default())
    }

    #[test]
    fn loads_triangle() {
        let lg = load("0 1\n1 2\n2 0\n").unwrap();
        assert_eq!(lg.graph.n(), 3);
        assert_eq!(lg.graph.m(), 3);
    }

    #[test]
    fn normalizes_duplicates_and_loops() {
        let lg = load("0 1\n1 0\n1 1\n0 1\n").unwrap();
        assert_eq!((lg.graph.n(), lg.graph.m()), (2, 1));
        assert_eq!(lg.summary.self_loops, 1);
        assert_eq!(lg.summary.duplicates, 2);
        assert_eq!(lg.summary.input_edges, 4);
    }

    #[test]
    fn compacts_ids_in_first_appearance_order() {
        let lg = load("# header\n100 7\n\n7 42\n").unwrap();
        assert_eq!(lg.id_map, vec![100, 7, 42]);
        assert_eq!(lg.graph.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn self_loop_only_vertex_is_kept() {
        let lg = load("0 1\n5 5\n").unwrap();
        assert_eq!(lg.graph.n(), 3);
        assert_eq!(lg.graph.degree(2), 0);
    }

    #[test]
    fn one_indexed_shifts_external_ids() {
        let opts = EdgeListOptions {
            one_indexed: true,
            ..Default::default()
        };
        let lg = load_edge_list("1 2\n2 3\n".as_bytes(), opts).unwrap();
        assert_eq!(lg.id_map, vec![0, 1, 2]);
        let err = load_edge_list("0 1\n".as_bytes(), opts).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match load("0 1\n# c\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(load("0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("0 -1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("0 1 2\n"), Err(Error::Parse { line: 1, .. })));
        let strict = EdgeListOptions {
            skip_comments: false,
            ..Default::default()
        };
        assert!(load_edge_list("# c\n0 1\n".as_bytes(), strict).is_err());
    }

    #[test]
    fn empty_input_is_empty_graph() {
        let lg = load("").unwrap();
        assert_eq!((lg.graph.n(), lg.graph.m()), (0, 0));
        let lg = load("# only comments\n").unwrap();
        assert_eq!(lg.graph.n(), 0);
    }

    #[test]
    fn triangle_degree_stats() {
        let s = degree_stats(&k3()).unwrap();
        assert_eq!(s.degrees, vec![2, 2, 2]);
        assert_eq!(s.d_max, 2);
        assert_eq!(s.wedge_total, 3);
        // id tie-break orients 0->1, 0->2, 1->2
        assert_eq!(s.wedge_oriented, 1);
    }

    #[test]
    fn path_degree_stats() {
        // degrees 1,2,1: both edges point into the middle vertex, so no vertex
        // has two outgoing legs.
        let s = degree_stats(&path(3)).unwrap();
        assert_eq!(s.wedge_total, 1);
        assert_eq!(s.wedge_oriented, 0);
    }

    #[test]
    fn choose2_detects_overflow() {
        assert_eq!(choose2(0), Some(0));
        assert_eq!(choose2(5), Some(10));
        assert_eq!(choose2(u64::MAX), None);
    }

    #[test]
    fn edge_membership() {
        let g = k3();
        assert!(g.has_edge(0, 1).unwrap());
        assert!(!g.has_edge(0, 0).unwrap());
        assert!(!path(3).has_edge(0, 2).unwrap());
        assert!(matches!(
            g.has_edge(0, 3),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn from_csr_rejects_asymmetry() {
        assert!(Graph::from_csr(vec![0, 1, 1], vec![1]).is_err());
        assert!(Graph::from_csr(vec![0, 1, 2], vec![1, 0]).is_ok());
        assert!(Graph::from_csr(vec![0, 1, 1], vec![0]).is_err());
    }

    fn brute_wedges(g: &Graph) -> u64 {
        let n = g.n() as u32;
        let mut count = 0;
        for c in 0..n {
            for a in 0..n {
                for b in (a + 1)..n {
                    if a != c && b != c && g.contains_edge(c, a) && g.contains_edge(c, b) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    fn arb_edges(max_n: u32) -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
        (1..=max_n).prop_flat_map(|n| {
            (
                Just(n as usize),
                prop::collection::vec((0..n, 0..n), 0..(3 * n as usize)),
            )
        })
    }

    proptest! {
        #[test]
        fn construction_invariants((n, edges) in arb_edges(64)) {
            let (g, summary) = Graph::from_edges(n, edges.iter().copied()).unwrap();
            prop_assert!(g.validate().is_ok());
            let stats = degree_stats(&g).unwrap();
            let deg_sum: u64 = stats.degrees.iter().map(|&d| d as u64).sum();
            prop_assert_eq!(deg_sum, 2 * g.m() as u64);
            prop_assert!(stats.wedge_oriented <= stats.wedge_total);
            prop_assert_eq!(stats.wedge_total, brute_wedges(&g));
            prop_assert_eq!(
                summary.input_edges,
                g.m() as u64 + summary.self_loops + summary.duplicates
            );
        }

        #[test]
        fn canonical_edge_list_round_trips((n, edges) in arb_edges(48)) {
            let (g, _) = Graph::from_edges(n, edges.iter().copied()).unwrap();
            // Reloading renumbers vertices by first appearance; mapping back
            // through id_map must give the same canonical text.
            let mut buf = Vec::new();
            g.write_edge_list(&mut buf).unwrap();
            let reloaded = load_edge_list(&buf[..], EdgeListOptions::default()).unwrap();
            let mapped: Vec<(u64, u64)> = reloaded
                .graph
                .edges()
                .map(|(u, v)| {
                    let (a, b) = (reloaded.id_map[u as usize], reloaded.id_map[v as usize]);
                    (a.min(b), a.max(b))
                })
                .collect();
            let mut mapped = mapped;
            mapped.sort_unstable();
            let original: Vec<(u64, u64)> = g.edges().map(|(u, v)| (u as u64, v as u64)).collect();
            let text: String = mapped.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
            prop_assert_eq!(mapped, original);
            prop_assert_eq!(text.as_bytes(), &buf[..]);
        }
    }
}
