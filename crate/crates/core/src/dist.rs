//! Deterministic single-process simulation of distributed cover-edge counting.
//!
//! Vertices are split into `p` contiguous ranges of roughly `2m/p` edge
//! endpoints. Processor `i` owns the horizontal edges whose smaller endpoint
//! it owns and counts triangles whose apex it owns. Cover-edge sets travel in
//! `p − 1` rounds: in round `j`, processor `i` swaps with `i ⊕ j`. Every
//! (cover edge, apex) pair is therefore examined exactly once, by the apex's
//! owner, and the global count equals the sequential one.

use std::fmt::Write as _;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::bfs::{diameter_proxy, BfsLabels, EdgeClassification};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::intersect::{for_each_common, Kernel};
use crate::triangles::apex_counts;
use crate::units::ceil_log2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub p: usize,
    /// Owning processor of each vertex.
    pub owner: Vec<u32>,
    /// Processor `i` owns vertices `bounds[i]..bounds[i + 1]`.
    bounds: Vec<VertexId>,
    /// Sum of owned vertex degrees per processor.
    pub endpoint_load: Vec<u64>,
}

impl Partition {
    pub fn local_vertices(&self, proc: usize) -> Range<VertexId> {
        self.bounds[proc]..self.bounds[proc + 1]
    }

    pub fn n(&self) -> usize {
        self.owner.len()
    }
}

/// Contiguous greedy cut: walking vertices in id order, processor `i` closes
/// as soon as the running degree sum reaches `(i + 1)·2m/p`. Each load then
/// lies within `d_max` of `2m/p`.
pub fn partition_vertices(g: &Graph, p: usize) -> Result<Partition> {
    if p == 0 || !p.is_power_of_two() {
        return Err(Error::domain(format!(
            "processor count {p} must be a power of two for the XOR exchange schedule"
        )));
    }
    let n = g.n();
    if p > n {
        return Err(Error::domain(format!(
            "processor count {p} exceeds vertex count {n}"
        )));
    }
    let total = 2 * g.m() as u128;
    let mut bounds: Vec<VertexId> = vec![0];
    let mut owner = vec![0u32; n];
    let mut endpoint_load = vec![0u64; p];
    let mut prefix: u128 = 0;
    let mut proc = 0usize;
    for v in g.vertices() {
        owner[v as usize] = proc as u32;
        let d = g.degree(v) as u64;
        endpoint_load[proc] += d;
        prefix += d as u128;
        // prefix ≥ (proc + 1)·total/p, kept in integers
        if proc + 1 < p && prefix * p as u128 >= (proc as u128 + 1) * total {
            proc += 1;
            bounds.push(v + 1);
        }
    }
    while bounds.len() < p + 1 {
        bounds.push(n as VertexId);
    }
    Ok(Partition {
        p,
        owner,
        bounds,
        endpoint_load,
    })
}

/// Partners of every processor in each of the `p − 1` exchange rounds:
/// `schedule[j - 1][i] = i ⊕ j`.
pub fn xor_schedule(p: usize) -> Vec<Vec<usize>> {
    (1..p).map(|j| (0..p).map(|i| i ^ j).collect()).collect()
}

/// Bit counts per communication category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CommLedger {
    /// Charged analytically: `m·(⌈log₂ D̂⌉ + 3⌈log₂ n⌉)`.
    pub bfs_bits: u128,
    /// Edges actually shipped, two vertex ids each.
    pub cover_exchange_bits: u128,
    /// `(p − 1)·⌈log₂ n⌉` for the final sum.
    pub reduction_bits: u128,
    pub total_bits: u128,
    pub rounds: u32,
    pub shipped_edges: u128,
    /// The same shipment priced as `|S|·p·⌈log₂ n⌉`, one id per edge per
    /// processor. Reported only; not part of `total_bits`.
    pub cover_bits_single_id: u128,
}

impl CommLedger {
    /// `key=value` lines in a fixed order.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "bfs_bits={}", self.bfs_bits);
        let _ = writeln!(s, "cover_exchange_bits={}", self.cover_exchange_bits);
        let _ = writeln!(s, "reduction_bits={}", self.reduction_bits);
        let _ = writeln!(s, "total_bits={}", self.total_bits);
        let _ = writeln!(s, "rounds={}", self.rounds);
        let _ = writeln!(s, "shipped_edges={}", self.shipped_edges);
        let _ = writeln!(s, "cover_bits_single_id={}", self.cover_bits_single_id);
        s
    }
}

/// One machine-readable ledger line per run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerRecord<'a> {
    pub graph: &'a str,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub k: f64,
    pub d_hat: u32,
    pub triangles: u64,
    #[serde(flatten)]
    pub ledger: CommLedger,
}

impl LedgerRecord<'_> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn check_inputs(g: &Graph, labels: &BfsLabels, cls: &EdgeClassification, part: &Partition) -> Result<()> {
    if part.n() != g.n() || labels.n() != g.n() {
        return Err(Error::domain(format!(
            "partition covers {} vertices and labels {} but the graph has {}",
            part.n(),
            labels.n(),
            g.n()
        )));
    }
    if cls.class_of.len() != g.m() {
        return Err(Error::domain("classification does not match the graph"));
    }
    Ok(())
}

/// Cover-edge sets per processor, owned by the smaller endpoint's owner.
fn split_cover_edges(cls: &EdgeClassification, part: &Partition) -> Vec<Vec<(VertexId, VertexId)>> {
    let mut sets = vec![Vec::new(); part.p];
    for &(u, v) in &cls.cover_edges {
        sets[part.owner[u as usize] as usize].push((u, v));
    }
    sets
}

/// Prices a run from its inputs. The simulator checks its own shipment
/// counts against this.
pub fn charge_ledger(
    g: &Graph,
    part: &Partition,
    cls: &EdgeClassification,
    labels: &BfsLabels,
) -> Result<CommLedger> {
    let overflow = || Error::Overflow("communication ledger");
    let n = g.n() as u128;
    let m = g.m() as u128;
    let p = part.p as u128;
    let log_n = ceil_log2(n) as u128;
    let log_d = ceil_log2(diameter_proxy(labels) as u128) as u128;
    let s = cls.cover_edges.len() as u128;

    let bfs_bits = m.checked_mul(log_d + 3 * log_n).ok_or_else(overflow)?;
    let shipped_edges = s * (p - 1);
    let cover_exchange_bits = shipped_edges.checked_mul(2 * log_n).ok_or_else(overflow)?;
    let reduction_bits = (p - 1) * log_n;
    let total_bits = bfs_bits
        .checked_add(cover_exchange_bits)
        .and_then(|x| x.checked_add(reduction_bits))
        .ok_or_else(overflow)?;
    Ok(CommLedger {
        bfs_bits,
        cover_exchange_bits,
        reduction_bits,
        total_bits,
        rounds: (part.p - 1) as u32,
        shipped_edges,
        cover_bits_single_id: s.checked_mul(p * log_n).ok_or_else(overflow)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub total_triangles: u64,
    pub per_processor_counts: Vec<u64>,
    pub ledger: CommLedger,
    /// Largest number of cover edges any processor held at once: its own set
    /// plus the one received in a round.
    pub peak_resident_edges: usize,
}

/// Counts triangles over `edges` whose apex lies in `local`.
fn count_local<F>(
    g: &Graph,
    level: &[u32],
    edges: &[(VertexId, VertexId)],
    local: Range<VertexId>,
    kernel: Kernel,
    on_triangle: &mut F,
) -> u64
where
    F: FnMut(VertexId, VertexId, VertexId),
{
    fn clip<'a>(adj: &'a [VertexId], local: &Range<VertexId>) -> &'a [VertexId] {
        let lo = adj.partition_point(|&w| w < local.start);
        let hi = adj.partition_point(|&w| w < local.end);
        &adj[lo..hi]
    }
    let mut t = 0;
    for &(u, v) in edges {
        let lu = level[u as usize];
        for_each_common(clip(g.neighbors(u), &local), clip(g.neighbors(v), &local), kernel, |w| {
            if apex_counts(level, v, lu, w) {
                on_triangle(u, v, w);
                t += 1;
            }
        });
    }
    t
}

pub fn simulate_comm_cetc(
    g: &Graph,
    labels: &BfsLabels,
    cls: &EdgeClassification,
    part: &Partition,
) -> Result<SimResult> {
    simulate_comm_cetc_with(g, labels, cls, part, Kernel::Merge, |_, _, _, _| {})
}

/// Sequential lockstep schedule. `on_triangle(proc, u, v, w)` fires for every
/// counted triangle in processor order within each round.
pub fn simulate_comm_cetc_with<F>(
    g: &Graph,
    labels: &BfsLabels,
    cls: &EdgeClassification,
    part: &Partition,
    kernel: Kernel,
    mut on_triangle: F,
) -> Result<SimResult>
where
    F: FnMut(usize, VertexId, VertexId, VertexId),
{
    check_inputs(g, labels, cls, part)?;
    let p = part.p;
    let level = &labels.level;
    let sets = split_cover_edges(cls, part);
    let mut counts = vec![0u64; p];
    let mut peak = sets.iter().map(Vec::len).max().unwrap_or(0);

    for (i, count) in counts.iter_mut().enumerate() {
        *count += count_local(g, level, &sets[i], part.local_vertices(i), kernel, &mut |u, v, w| {
            on_triangle(i, u, v, w)
        });
    }

    let mut shipped: u128 = 0;
    for partners in xor_schedule(p) {
        for (i, &partner) in partners.iter().enumerate() {
            let received = &sets[partner];
            shipped += received.len() as u128;
            peak = peak.max(sets[i].len() + received.len());
            counts[i] += count_local(g, level, received, part.local_vertices(i), kernel, &mut |u, v, w| {
                on_triangle(i, u, v, w)
            });
        }
    }

    let ledger = charge_ledger(g, part, cls, labels)?;
    if ledger.shipped_edges != shipped {
        return Err(Error::Inconsistent(format!(
            "ledger prices {} shipped edges but the schedule moved {}",
            ledger.shipped_edges, shipped
        )));
    }
    Ok(SimResult {
        total_triangles: counts.iter().sum(),
        per_processor_counts: counts,
        ledger,
        peak_resident_edges: peak,
    })
}

/// Runs each round's processor steps on worker threads. Counts are gathered
/// per processor and summed in processor order, so the result is identical
/// to [`simulate_comm_cetc`].
pub fn simulate_comm_cetc_parallel(
    g: &Graph,
    labels: &BfsLabels,
    cls: &EdgeClassification,
    part: &Partition,
    threads: usize,
) -> Result<SimResult> {
    check_inputs(g, labels, cls, part)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
    let p = part.p;
    let level = &labels.level;
    let sets = split_cover_edges(cls, part);
    let noop = |_: VertexId, _: VertexId, _: VertexId| {};

    let mut counts: Vec<u64> = pool.install(|| {
        (0..p)
            .into_par_iter()
            .map(|i| count_local(g, level, &sets[i], part.local_vertices(i), Kernel::Merge, &mut { noop }))
            .collect()
    });
    let mut peak = sets.iter().map(Vec::len).max().unwrap_or(0);
    let mut shipped: u128 = 0;
    for partners in xor_schedule(p) {
        // barrier: the whole round completes before the next starts
        let round: Vec<u64> = pool.install(|| {
            partners
                .par_iter()
                .enumerate()
                .map(|(i, &partner)| {
                    count_local(g, level, &sets[partner], part.local_vertices(i), Kernel::Merge, &mut { noop })
                })
                .collect()
        });
        for (i, &partner) in partners.iter().enumerate() {
            counts[i] += round[i];
            shipped += sets[partner].len() as u128;
            peak = peak.max(sets[i].len() + sets[partner].len());
        }
    }
    let ledger = charge_ledger(g, part, cls, labels)?;
    debug_assert_eq!(ledger.shipped_edges, shipped);
    Ok(SimResult {
        total_triangles: counts.iter().sum(),
        per_processor_counts: counts,
        ledger,
        peak_resident_edges: peak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfs::{bfs_forest, classify_edges, RootPolicy};
    use crate::graph::tests::{graph, k3, path};
    use crate::triangles::{bruteforce_triangles, count_cetc};
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn k4() -> Graph {
        graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    fn setup(g: &Graph, seed: Option<u64>) -> (BfsLabels, EdgeClassification) {
        let policy = seed.map_or(RootPolicy::LowestId, RootPolicy::SeededRandom);
        let forest = bfs_forest(g, &policy).unwrap();
        let cls = classify_edges(g, &forest).unwrap();
        (forest.labels, cls)
    }

    #[test]
    fn single_processor_owns_everything() {
        let g = k4();
        let part = partition_vertices(&g, 1).unwrap();
        assert_eq!(part.local_vertices(0), 0..4);
        assert!(part.owner.iter().all(|&o| o == 0));
        let (labels, cls) = setup(&g, None);
        let sim = simulate_comm_cetc(&g, &labels, &cls, &part).unwrap();
        assert_eq!(sim.total_triangles, 4);
        assert_eq!(sim.ledger.cover_exchange_bits, 0);
        assert_eq!(sim.ledger.reduction_bits, 0);
        assert_eq!(sim.ledger.rounds, 0);
    }

    #[test]
    fn k4_on_two_processors() {
        let g = k4();
        let part = partition_vertices(&g, 2).unwrap();
        assert_eq!(part.endpoint_load, vec![6, 6]);
        assert_eq!(part.owner, vec![0, 0, 1, 1]);
        let (labels, cls) = setup(&g, None);
        // Levels [0,1,1,1]; S_0 = {(1,2), (1,3)}, S_1 = {(2,3)}.
        // Local phase: p0 counts apex 0 for both of its edges, p1 owns no
        // common neighbor of 2 and 3.
        // Swap: p0 gets (2,3) and counts apex 0 (apex 1 fails 3 < 1);
        // p1 gets (1,2) and counts apex 3 (2 < 3), while (1,3) with apex 2 fails.
        let sim = simulate_comm_cetc(&g, &labels, &cls, &part).unwrap();
        assert_eq!(sim.per_processor_counts, vec![3, 1]);
        assert_eq!(sim.total_triangles, 4);
        assert_eq!(sim.ledger.rounds, 1);
        assert_eq!(sim.ledger.shipped_edges, 3);
        // n = 4: two ids of 2 bits each per shipped edge
        assert_eq!(sim.ledger.cover_exchange_bits, 12);
        assert_eq!(sim.ledger.reduction_bits, 2);
        assert_eq!(sim.peak_resident_edges, 3);
    }

    #[test]
    fn triangle_reduction_bits() {
        let g = k3();
        let part = partition_vertices(&g, 2).unwrap();
        let (labels, cls) = setup(&g, None);
        let ledger = charge_ledger(&g, &part, &cls, &labels).unwrap();
        assert_eq!(ledger.reduction_bits, 2);
        assert_eq!(cls.cover_edges.len(), 1);
        // m·(⌈log 1⌉ + 3·2)
        assert_eq!(ledger.bfs_bits, 18);
        assert_eq!(
            ledger.total_bits,
            ledger.bfs_bits + ledger.cover_exchange_bits + ledger.reduction_bits
        );
    }

    #[test]
    fn partition_errors() {
        let g = k4();
        let err = partition_vertices(&g, 3).unwrap_err();
        assert!(err.to_string().contains("XOR"));
        assert!(partition_vertices(&g, 0).is_err());
        assert!(partition_vertices(&g, 8).is_err());
    }

    #[test]
    fn mismatched_partition_rejected() {
        let part = partition_vertices(&k4(), 2).unwrap();
        let (labels, cls) = setup(&k3(), None);
        assert!(matches!(
            simulate_comm_cetc(&k3(), &labels, &cls, &part),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn schedule_pairs_every_ordered_pair_once() {
        for p in [1usize, 2, 4, 8, 16] {
            let mut seen = HashMap::new();
            for (round, partners) in xor_schedule(p).iter().enumerate() {
                for (i, &partner) in partners.iter().enumerate() {
                    assert_ne!(i, partner);
                    // symmetric within a round
                    assert_eq!(partners[partner], i);
                    assert!(seen.insert((i, partner), round).is_none());
                }
            }
            assert_eq!(seen.len(), p * (p - 1));
        }
    }

    #[test]
    fn ledger_grows_with_p() {
        let g = path(64);
        let g = Graph::from_edges(
            64,
            g.edges().chain((0..62).map(|i| (i, i + 2))),
        )
        .unwrap()
        .0;
        let (labels, cls) = setup(&g, None);
        let mut last = 0;
        for p in [1, 2, 4, 8, 16] {
            let part = partition_vertices(&g, p).unwrap();
            let l = charge_ledger(&g, &part, &cls, &labels).unwrap();
            assert!(l.cover_exchange_bits >= last);
            assert_eq!(l.rounds as usize, p - 1);
            last = l.cover_exchange_bits;
        }
    }

    #[test]
    fn kv_and_json_dumps() {
        let g = k4();
        let part = partition_vertices(&g, 2).unwrap();
        let (labels, cls) = setup(&g, None);
        let sim = simulate_comm_cetc(&g, &labels, &cls, &part).unwrap();
        let kv = sim.ledger.to_kv();
        assert!(kv.starts_with("bfs_bits="));
        assert!(kv.contains("rounds=1\n"));
        let rec = LedgerRecord {
            graph: "k4",
            n: 4,
            m: 6,
            p: 2,
            k: cls.k,
            d_hat: 1,
            triangles: sim.total_triangles,
            ledger: sim.ledger,
        };
        let v: serde_json::Value = serde_json::from_str(&rec.to_json().unwrap()).unwrap();
        assert_eq!(v["graph"], "k4");
        assert_eq!(v["rounds"], 1);
        assert_eq!(v["cover_exchange_bits"], 12);
    }

    fn arb_graph(max_n: u32) -> impl Strategy<Value = Graph> {
        (8..=max_n)
            .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..(5 * n as usize))))
            .prop_map(|(n, e)| Graph::from_edges(n as usize, e).unwrap().0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn distribution_invariance(g in arb_graph(64), seed in any::<u64>()) {
            let (labels, cls) = setup(&g, Some(seed));
            let seq = count_cetc(&g, &cls, &labels, Kernel::Merge).unwrap().total;
            for p in [1, 2, 4, 8] {
                let part = partition_vertices(&g, p).unwrap();
                let sim = simulate_comm_cetc(&g, &labels, &cls, &part).unwrap();
                prop_assert_eq!(sim.total_triangles, seq);
                prop_assert_eq!(sim.per_processor_counts.iter().sum::<u64>(), seq);
                let par = simulate_comm_cetc_parallel(&g, &labels, &cls, &part, 3).unwrap();
                prop_assert_eq!(&par, &sim);
            }
        }

        #[test]
        fn each_triangle_fires_once(g in arb_graph(48), seed in any::<u64>()) {
            let (labels, cls) = setup(&g, Some(seed));
            let oracle = bruteforce_triangles(&g).unwrap();
            for p in [2, 4, 8] {
                let part = partition_vertices(&g, p).unwrap();
                let mut fired: HashMap<[u32; 3], usize> = HashMap::new();
                simulate_comm_cetc_with(&g, &labels, &cls, &part, Kernel::Merge, |_, u, v, w| {
                    let mut t = [u, v, w];
                    t.sort_unstable();
                    *fired.entry(t).or_default() += 1;
                }).unwrap();
                prop_assert_eq!(fired.len(), oracle.len());
                for t in &oracle {
                    prop_assert_eq!(fired.get(t).copied(), Some(1));
                }
            }
        }

        #[test]
        fn partition_balance(g in arb_graph(96), p_exp in 0u32..4) {
            let p = 1usize << p_exp;
            let part = partition_vertices(&g, p).unwrap();
            let target = 2.0 * g.m() as f64 / p as f64;
            let d_max = g.max_degree() as f64;
            prop_assert_eq!(part.endpoint_load.iter().sum::<u64>(), 2 * g.m() as u64);
            for &load in &part.endpoint_load {
                prop_assert!((load as f64 - target).abs() <= d_max);
            }
            let max = *part.endpoint_load.iter().max().unwrap() as f64;
            let min = *part.endpoint_load.iter().min().unwrap() as f64;
            prop_assert!(max - min <= 2.0 * d_max);
            for i in 0..p {
                for v in part.local_vertices(i) {
                    prop_assert_eq!(part.owner[v as usize] as usize, i);
                }
            }
        }
    }
}
