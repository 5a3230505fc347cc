//! Dynamic connectivity for the heat-bath predicate: are the endpoints of an
//! edge joined by open edges other than itself, boundary classes included?

mod forest;
mod naive;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use forest::ForestConnectivity;
pub use naive::NaiveConnectivity;

use crate::edgeconfig::EdgeConfig;
use crate::error::{Error, Result};
use crate::graph::FkGraph;

pub trait Connectivity {
    fn graph(&self) -> &Arc<FkGraph>;
    fn config(&self) -> &EdgeConfig;
    /// Replace the whole configuration.
    fn reset(&mut self, omega: &EdgeConfig);
    fn open(&mut self, e: usize);
    fn close(&mut self, e: usize);
    /// Whether nodes `u` and `v` are joined by open edges, ignoring `avoid`.
    /// Takes `&mut self` for scratch space only; the configuration is unchanged.
    fn connected_avoiding(&mut self, u: u32, v: u32, avoid: Option<usize>) -> bool;
    fn component_count(&mut self) -> usize;

    fn is_open(&self, e: usize) -> bool {
        self.config().get(e)
    }

    fn set(&mut self, e: usize, open: bool) {
        if open {
            self.open(e)
        } else {
            self.close(e)
        }
    }

    /// The heat-bath predicate for edge `e`.
    fn query(&mut self, e: usize) -> bool {
        let [a, b] = self.graph().edge_nodes(e);
        self.connected_avoiding(a, b, Some(e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    /// Bidirectional breadth-first search per query.
    Naive,
    /// Spanning forest with replacement-edge search on deletion.
    #[default]
    Fast,
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(BackendKind::Naive),
            "fast" => Ok(BackendKind::Fast),
            _ => Err(Error::Config(format!("unknown backend {s:?} (expected naive or fast)"))),
        }
    }
}

/// Either backend behind one concrete type.
#[derive(Clone, Debug)]
pub enum Backend {
    Naive(NaiveConnectivity),
    Fast(ForestConnectivity),
}

impl Backend {
    pub fn new(kind: BackendKind, graph: Arc<FkGraph>, omega: &EdgeConfig) -> Self {
        match kind {
            BackendKind::Naive => Backend::Naive(NaiveConnectivity::new(graph, omega)),
            BackendKind::Fast => Backend::Fast(ForestConnectivity::new(graph, omega)),
        }
    }

    pub fn kind(&self) -> BackendKind {
        match self {
            Backend::Naive(_) => BackendKind::Naive,
            Backend::Fast(_) => BackendKind::Fast,
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $b:ident => $e:expr) => {
        match $self {
            Backend::Naive($b) => $e,
            Backend::Fast($b) => $e,
        }
    };
}

impl Connectivity for Backend {
    fn graph(&self) -> &Arc<FkGraph> {
        dispatch!(self, b => b.graph())
    }
    fn config(&self) -> &EdgeConfig {
        dispatch!(self, b => b.config())
    }
    fn reset(&mut self, omega: &EdgeConfig) {
        dispatch!(self, b => b.reset(omega))
    }
    #[inline]
    fn open(&mut self, e: usize) {
        dispatch!(self, b => b.open(e))
    }
    #[inline]
    fn close(&mut self, e: usize) {
        dispatch!(self, b => b.close(e))
    }
    #[inline]
    fn connected_avoiding(&mut self, u: u32, v: u32, avoid: Option<usize>) -> bool {
        dispatch!(self, b => b.connected_avoiding(u, v, avoid))
    }
    fn component_count(&mut self) -> usize {
        dispatch!(self, b => b.component_count())
    }
    #[inline]
    fn query(&mut self, e: usize) -> bool {
        dispatch!(self, b => b.query(e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Open(usize),
    Close(usize),
    Query(usize),
}

/// Replay a trace on two backends and compare every query answer and the
/// component count after every operation.
pub fn backend_equivalence<A: Connectivity, B: Connectivity>(a: &mut A, b: &mut B, trace: &[Op]) -> Result<()> {
    for (index, &op) in trace.iter().enumerate() {
        match op {
            Op::Open(e) => {
                a.open(e);
                b.open(e);
            }
            Op::Close(e) => {
                a.close(e);
                b.close(e);
            }
            Op::Query(e) => {
                let (x, y) = (a.query(e), b.query(e));
                if x != y {
                    return Err(Error::BackendDivergence { index, detail: format!("query({e}): {x} vs {y}") });
                }
            }
        }
        let (ka, kb) = (a.component_count(), b.component_count());
        if ka != kb {
            return Err(Error::BackendDivergence { index, detail: format!("component count {ka} vs {kb}") });
        }
    }
    Ok(())
}

/// Random trace: each step picks a uniform edge and either queries it or
/// sets it open with probability `density`.
pub fn random_trace(rng: &mut impl rand::Rng, m: usize, len: usize, density: f64) -> Vec<Op> {
    (0..len)
        .map(|_| {
            let e = rng.random_range(0..m);
            if rng.random_bool(0.5) {
                Op::Query(e)
            } else if rng.random_bool(density) {
                Op::Open(e)
            } else {
                Op::Close(e)
            }
        })
        .collect()
}

/// Stamped visited marks that survive many searches without clearing.
#[derive(Clone, Debug)]
pub(crate) struct Marks {
    stamp: Vec<u32>,
    gen: u32,
}

impl Marks {
    pub(crate) fn new(n: usize) -> Self {
        Marks { stamp: vec![0; n], gen: 0 }
    }

    /// Two fresh, distinct stamps.
    pub(crate) fn fresh_pair(&mut self) -> (u32, u32) {
        if self.gen >= u32::MAX - 2 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.gen = 0;
        }
        self.gen += 2;
        (self.gen - 1, self.gen)
    }

    #[inline]
    pub(crate) fn get(&self, v: u32) -> u32 {
        self.stamp[v as usize]
    }

    #[inline]
    pub(crate) fn set(&mut self, v: u32, s: u32) {
        self.stamp[v as usize] = s;
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::boundary::BoundaryCondition;
    use crate::lattice::Lattice;

    fn graph(spec: &str, n: usize) -> Arc<FkGraph> {
        let l = Arc::new(Lattice::rectangle(n, n).unwrap());
        let xi = BoundaryCondition::parse(&l, spec).unwrap();
        Arc::new(FkGraph::from_lattice(&l, Some(&xi)).unwrap())
    }

    fn both(g: &Arc<FkGraph>, omega: &EdgeConfig) -> [Backend; 2] {
        [Backend::new(BackendKind::Naive, g.clone(), omega), Backend::new(BackendKind::Fast, g.clone(), omega)]
    }

    #[test]
    fn closed_configurations_answer_false() {
        for spec in ["free", "wired"] {
            let g = graph(spec, 4);
            for mut b in both(&g, &EdgeConfig::all_closed(g.num_edges())) {
                for e in 0..g.num_edges() {
                    assert!(!b.query(e), "{spec} {e}");
                }
            }
        }
    }

    #[test]
    fn cycle_and_bridge() {
        let l = Lattice::rectangle(2, 2).unwrap();
        let g = Arc::new(FkGraph::bare(&l));
        let ring = [(0, 0, 1, 0), (1, 0, 1, 1), (1, 1, 0, 1), (0, 1, 0, 0)];
        let ids: Vec<usize> = ring
            .iter()
            .map(|&(a, b, c, d)| l.edge_between(l.site(a, b), l.site(c, d)).unwrap() as usize)
            .collect();
        let mut omega = EdgeConfig::all_closed(g.num_edges());
        for &e in &ids {
            omega.set(e, true);
        }
        for mut b in both(&g, &omega) {
            assert!(b.query(ids[0]));
            b.close(ids[2]);
            assert!(!b.query(ids[0]));
            b.open(ids[2]);
            b.open(ids[2]);
            assert!(b.query(ids[0]));
        }
    }

    #[test]
    fn empty_trace_agrees() {
        let g = graph("wired", 3);
        let [mut a, mut b] = both(&g, &EdgeConfig::all_closed(g.num_edges()));
        backend_equivalence(&mut a, &mut b, &[]).unwrap();
    }

    #[test]
    fn random_traces_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in ["free", "wired", "sides:1,0,1,0", "sides:1,2,1,2"] {
            for n in [2, 3, 6, 9] {
                for density in [0.2, 0.55, 0.8] {
                    let g = graph(spec, n);
                    let trace = random_trace(&mut rng, g.num_edges(), 3000, density);
                    let [mut a, mut b] = both(&g, &EdgeConfig::all_closed(g.num_edges()));
                    backend_equivalence(&mut a, &mut b, &trace).unwrap();
                }
            }
        }
    }

    #[test]
    fn opens_only_trace_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = graph("free", 8);
        let trace: Vec<Op> = random_trace(&mut rng, g.num_edges(), 2000, 1.0)
            .into_iter()
            .filter(|op| !matches!(op, Op::Close(_)))
            .collect();
        let [mut a, mut b] = both(&g, &EdgeConfig::all_closed(g.num_edges()));
        backend_equivalence(&mut a, &mut b, &trace).unwrap();
    }

    #[test]
    fn component_count_matches_cluster_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = graph("sides:1,0,2,0", 5);
        for _ in 0..50 {
            let omega = EdgeConfig::from_fn(g.num_edges(), |_| rand::Rng::random_bool(&mut rng, 0.5));
            for mut b in both(&g, &omega) {
                assert_eq!(b.component_count(), g.cluster_count(&omega));
            }
        }
    }

    #[test]
    fn torus_with_parallel_edges() {
        let t = Lattice::torus(2, 2).unwrap();
        let g = Arc::new(FkGraph::from_lattice(&t, None).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let trace = random_trace(&mut rng, g.num_edges(), 5000, 0.5);
        let [mut a, mut b] = both(&g, &EdgeConfig::all_closed(g.num_edges()));
        backend_equivalence(&mut a, &mut b, &trace).unwrap();
    }
}
