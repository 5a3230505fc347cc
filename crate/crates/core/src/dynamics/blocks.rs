use std::sync::Arc;

use petgraph::unionfind::UnionFind;

use super::cftp::Cftp;
use super::chain::Chain;
use super::stream::UpdateStream;
use crate::connectivity::BackendKind;
use crate::edgeconfig::EdgeConfig;
use crate::error::{Error, Result};
use crate::exactref::HeatBath;
use crate::graph::FkGraph;
use crate::lattice::{Lattice, LatticeKind, Rect};

/// A set of state edges updated together.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub name: String,
    pub mask: Vec<bool>,
    /// The rectangle the block was cut from, when it is one.
    pub rect: Option<Rect>,
}

impl Block {
    pub fn all(m: usize) -> Self {
        Block { name: "all".into(), mask: vec![true; m], rect: None }
    }

    pub fn from_mask(name: impl Into<String>, mask: Vec<bool>) -> Self {
        Block { name: name.into(), mask, rect: None }
    }

    /// Updatable edges with both endpoints in the closed rectangle.
    pub fn within(lattice: &Lattice, rect: Rect) -> Result<Self> {
        lattice.check_rect(rect)?;
        let mask = lattice
            .updatable_edges()
            .iter()
            .map(|&e| lattice.endpoints(e).iter().all(|&s| rect.contains(lattice.coord(s))))
            .collect();
        Ok(Block { name: rect.to_string(), mask, rect: Some(rect) })
    }

    /// Updatable edges with at least one endpoint strictly inside the rectangle.
    pub fn interior_of(lattice: &Lattice, rect: Rect) -> Result<Self> {
        lattice.check_rect(rect)?;
        let mask = lattice
            .updatable_edges()
            .iter()
            .map(|&e| lattice.endpoints(e).iter().any(|&s| rect.contains_interior(lattice.coord(s))))
            .collect();
        Ok(Block { name: format!("interior{rect}"), mask, rect: Some(rect) })
    }

    /// Updatable edges of a lattice periodic in the second coordinate whose
    /// endpoints both lie in the cyclic band `[y0, y1]`, with `y1` allowed
    /// to exceed the period.
    pub fn band(lattice: &Lattice, y0: usize, y1: usize) -> Result<Self> {
        if lattice.kind() == LatticeKind::Rectangle {
            return Err(Error::InvalidParams("bands need a lattice periodic in the second coordinate".into()));
        }
        let period = lattice.n_prime() as i64;
        if y1 < y0 || (y1 - y0) as i64 >= period {
            return Err(Error::InvalidParams(format!("band [{y0}, {y1}] does not fit period {period}")));
        }
        let inside = |y: i64| (y - y0 as i64).rem_euclid(period) <= (y1 - y0) as i64;
        let mask = lattice
            .updatable_edges()
            .iter()
            .map(|&e| lattice.endpoints(e).iter().all(|&s| inside(lattice.coord(s).y)))
            .collect();
        Ok(Block { name: format!("band[{y0},{y1}]"), mask, rect: None })
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The mask packed in a word, for exact computations.
    pub fn bits(&self) -> u64 {
        assert!(self.mask.len() <= 64);
        self.mask.iter().enumerate().filter(|(_, &b)| b).fold(0, |acc, (i, _)| acc | 1 << i)
    }
}

/// East and west blocks `[n/4, n] x [0, n']` and `[0, 3n/4] x [0, n']`,
/// east first.
pub fn halves(lattice: &Lattice) -> Result<Vec<Block>> {
    if lattice.kind() != LatticeKind::Rectangle {
        return Err(Error::InvalidParams("halves blocks need a rectangle".into()));
    }
    let (n, np) = (lattice.n(), lattice.n_prime());
    let east = Rect::new(n.div_ceil(4), n, 0, np);
    let west = Rect::new(0, 3 * n / 4, 0, np);
    Ok(vec![Block::within(lattice, east)?, Block::within(lattice, west)?])
}

/// Two overlapping bands of height `4n'/5` on a lattice periodic in the
/// second coordinate: `[2n'/5, n' + n'/5]` and `[4n'/5, n' + 3n'/5]`.
pub fn cylinder_fifths(lattice: &Lattice) -> Result<Vec<Block>> {
    let np = lattice.n_prime();
    Ok(vec![
        Block::band(lattice, 2 * np / 5, np + np / 5)?,
        Block::band(lattice, 4 * np / 5, np + 3 * np / 5)?,
    ])
}

#[derive(Clone, Debug)]
pub struct BlockSchedule {
    pub blocks: Vec<Block>,
    /// Duration of each phase.
    pub phase: f64,
    /// Restore the initial configuration on a block when its phase starts.
    pub reset: bool,
}

impl BlockSchedule {
    pub fn new(blocks: Vec<Block>, phase: f64, reset: bool) -> Result<Self> {
        if blocks.is_empty() || !(phase > 0.0) {
            return Err(Error::InvalidParams("schedule needs blocks and a positive phase length".into()));
        }
        let m = blocks[0].mask.len();
        if blocks.iter().any(|b| b.mask.len() != m) {
            return Err(Error::InvalidParams("blocks disagree on the edge count".into()));
        }
        if (0..m).any(|e| !blocks.iter().any(|b| b.mask[e])) {
            return Err(Error::InvalidParams("blocks do not cover every updatable edge".into()));
        }
        Ok(BlockSchedule { blocks, phase, reset })
    }

    pub fn block(&self, phase: usize) -> &Block {
        &self.blocks[phase % self.blocks.len()]
    }
}

/// Run `phases` phases of censored dynamics: in phase `k` only updates in
/// block `k mod s` are kept.
pub fn censored_run(chain: &mut Chain, schedule: &BlockSchedule, phases: usize, omega0: &EdgeConfig) {
    for k in 0..phases {
        let b = schedule.block(k);
        if schedule.reset {
            chain.restore(omega0, &b.mask);
        }
        chain.run_censored(schedule.phase, &b.mask);
    }
}

/// The graph on which the block edges live once everything else is frozen:
/// nodes joined by open edges outside the block (or by the boundary) are
/// contracted. Returns it with the state indices of the block edges.
pub fn block_graph(graph: &FkGraph, omega: &EdgeConfig, block: &Block) -> (FkGraph, Vec<usize>) {
    let mut uf = UnionFind::<u32>::new(graph.num_nodes());
    for e in omega.iter_open() {
        if !block.mask[e] {
            let [a, b] = graph.edge_nodes(e);
            uf.union(a, b);
        }
    }
    let ids: Vec<usize> = (0..graph.num_edges()).filter(|&e| block.mask[e]).collect();
    let pairs: Vec<[u32; 2]> = ids.iter().map(|&e| graph.edge_nodes(e)).collect();
    let g = FkGraph::new(graph.num_nodes(), &pairs, |v| uf.find_mut(v));
    (g, ids)
}

/// Replace the block edges of `y` by an exact sample from the conditional
/// law given the rest. Returns the look-back horizon of the sampler.
pub fn systematic_block_step(
    graph: &FkGraph,
    y: &mut EdgeConfig,
    block: &Block,
    kernel: HeatBath,
    backend: BackendKind,
    stream_seed: u64,
    stream_id: u64,
    cap: u64,
) -> Result<u64> {
    let (g, ids) = block_graph(graph, y, block);
    if ids.is_empty() {
        return Ok(0);
    }
    let stream = UpdateStream::new(stream_seed, stream_id, ids.len());
    let s = Cftp::new(Arc::new(g), kernel, backend).with_cap(cap).sample(&stream)?;
    for (i, &e) in ids.iter().enumerate() {
        y.set(e, s.config.get(i));
    }
    Ok(s.horizon)
}
