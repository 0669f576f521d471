//! Seeded RMAT generator.
//!
//! Each edge slot descends `scale` levels of the adjacency matrix, picking a
//! quadrant with probabilities `(a, b, c, d)` at every level. Slots are
//! grouped into fixed-size blocks, and each block draws from its own ChaCha8
//! stream, so the output is identical however the blocks are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NormalizeSummary, VertexId};

/// Largest scale generated in memory.
pub const MAX_SCALE: u32 = 24;
/// Edge slots per RNG stream.
const SLOTS_PER_STREAM: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmatParams {
    pub scale: u32,
    pub edge_factor: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub seed: u64,
}

impl Default for RmatParams {
    /// Graph500 quadrant probabilities with 16 edge slots per vertex.
    fn default() -> Self {
        RmatParams {
            scale: 10,
            edge_factor: 16,
            a: 0.57,
            b: 0.19,
            c: 0.19,
            d: 0.05,
            seed: 1,
        }
    }
}

impl RmatParams {
    pub fn new(scale: u32, seed: u64) -> Self {
        RmatParams {
            scale,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale == 0 {
            return Err(Error::domain("RMAT scale must be at least 1"));
        }
        if self.scale > MAX_SCALE {
            return Err(Error::TooLarge {
                what: "RMAT scale",
                size: self.scale as u64,
                limit: MAX_SCALE as u64,
                hint: "larger instances are handled by the volume model, not generated",
            });
        }
        let probs = [self.a, self.b, self.c, self.d];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::domain("quadrant probabilities must lie in [0, 1]"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "quadrant probabilities sum to {sum}, not 1"
            )));
        }
        Ok(())
    }

    pub fn vertices(&self) -> u64 {
        1u64 << self.scale
    }

    pub fn slots(&self) -> u64 {
        self.edge_factor as u64 * self.vertices()
    }
}

/// Draws one directed edge slot.
pub fn sample_slot<R: Rng>(params: &RmatParams, rng: &mut R) -> (VertexId, VertexId) {
    let (ab, abc) = (params.a + params.b, params.a + params.b + params.c);
    let (mut u, mut v) = (0u32, 0u32);
    for _ in 0..params.scale {
        let r: f64 = rng.gen();
        let (row, col) = if r < params.a {
            (0, 0)
        } else if r < ab {
            (0, 1)
        } else if r < abc {
            (1, 0)
        } else {
            (1, 1)
        };
        u = (u << 1) | row;
        v = (v << 1) | col;
    }
    (u, v)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// All `edge_factor · 2^scale` slots in slot order.
pub fn sample_slots(params: &RmatParams) -> Result<Vec<(VertexId, VertexId)>> {
    params.validate()?;
    let slots = params.slots();
    let streams = slots.div_ceil(SLOTS_PER_STREAM);
    let blocks: Vec<Vec<(VertexId, VertexId)>> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(params.seed, s);
            let len = SLOTS_PER_STREAM.min(slots - s * SLOTS_PER_STREAM);
            (0..len).map(|_| sample_slot(params, &mut rng)).collect()
        })
        .collect();
    Ok(blocks.concat())
}

#[derive(Clone, Debug)]
pub struct RmatGraph {
    pub graph: Graph,
    pub sampled_slots: u64,
    pub summary: NormalizeSummary,
}

/// Generates the graph on `2^scale` vertices (isolated ones included) with
/// self-loops and duplicate slots removed.
pub fn generate_rmat(params: &RmatParams) -> Result<RmatGraph> {
    let slots = sample_slots(params)?;
    let sampled_slots = slots.len() as u64;
    let (graph, summary) = Graph::from_edges(params.vertices() as usize, slots)?;
    Ok(RmatGraph {
        graph,
        sampled_slots,
        summary,
    })
}
