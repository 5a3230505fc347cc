use std::sync::Arc;

use petgraph::unionfind::UnionFind;

use super::{Connectivity, Marks};
use crate::edgeconfig::EdgeConfig;
use crate::graph::FkGraph;

/// Reference backend: every query is a fresh bidirectional search.
#[derive(Clone, Debug)]
pub struct NaiveConnectivity {
    graph: Arc<FkGraph>,
    omega: EdgeConfig,
    marks: Marks,
    qa: Vec<u32>,
    qb: Vec<u32>,
}

impl NaiveConnectivity {
    pub fn new(graph: Arc<FkGraph>, omega: &EdgeConfig) -> Self {
        assert_eq!(omega.len(), graph.num_edges());
        let n = graph.num_nodes();
        NaiveConnectivity { graph, omega: omega.clone(), marks: Marks::new(n), qa: Vec::new(), qb: Vec::new() }
    }

    /// Expand one node of a frontier. Returns true when it touches the other side.
    fn expand(&mut self, from_a: bool, head: usize, mine: u32, theirs: u32, avoid: usize) -> bool {
        let v = if from_a { self.qa[head] } else { self.qb[head] };
        for &(f, w) in self.graph.incident(v) {
            if f as usize == avoid || !self.omega.get(f as usize) {
                continue;
            }
            let m = self.marks.get(w);
            if m == theirs {
                return true;
            }
            if m != mine {
                self.marks.set(w, mine);
                if from_a {
                    self.qa.push(w)
                } else {
                    self.qb.push(w)
                }
            }
        }
        false
    }
}

impl Connectivity for NaiveConnectivity {
    fn graph(&self) -> &Arc<FkGraph> {
        &self.graph
    }

    fn config(&self) -> &EdgeConfig {
        &self.omega
    }

    fn reset(&mut self, omega: &EdgeConfig) {
        assert_eq!(omega.len(), self.graph.num_edges());
        self.omega.clone_from(omega);
    }

    fn open(&mut self, e: usize) {
        self.omega.set(e, true);
    }

    fn close(&mut self, e: usize) {
        self.omega.set(e, false);
    }

    fn connected_avoiding(&mut self, u: u32, v: u32, avoid: Option<usize>) -> bool {
        if u == v {
            return true;
        }
        let avoid = avoid.unwrap_or(usize::MAX);
        let (ga, gb) = self.marks.fresh_pair();
        self.qa.clear();
        self.qb.clear();
        self.qa.push(u);
        self.qb.push(v);
        self.marks.set(u, ga);
        self.marks.set(v, gb);
        let (mut ha, mut hb) = (0, 0);
        loop {
            if ha == self.qa.len() || hb == self.qb.len() {
                return false;
            }
            // Grow the side with the smaller pending frontier.
            if self.qa.len() - ha <= self.qb.len() - hb {
                if self.expand(true, ha, ga, gb, avoid) {
                    return true;
                }
                ha += 1;
            } else {
                if self.expand(false, hb, gb, ga, avoid) {
                    return true;
                }
                hb += 1;
            }
        }
    }

    fn component_count(&mut self) -> usize {
        let mut uf = UnionFind::<u32>::new(self.graph.num_nodes());
        let mut k = self.graph.num_nodes();
        for e in self.omega.iter_open() {
            let [a, b] = self.graph.edge_nodes(e);
            if uf.union(a, b) {
                k -= 1;
            }
        }
        k
    }
}
