use std::sync::Arc;

use super::{Connectivity, Marks};
use crate::edgeconfig::EdgeConfig;
use crate::graph::FkGraph;

/// Spanning forest of the open subgraph with component labels.
///
/// Opening an edge between two components relabels the smaller one.
/// Closing a tree edge searches both halves of the cut tree in lockstep,
/// stops at the smaller half and scans it for a replacement edge; only if
/// none exists is the component split. Queries on closed or non-tree edges
/// are label lookups.
#[derive(Clone, Debug)]
pub struct ForestConnectivity {
    graph: Arc<FkGraph>,
    omega: EdgeConfig,
    tree: EdgeConfig,
    label: Vec<u32>,
    size: Vec<u32>,
    spare: Vec<u32>,
    components: usize,
    marks: Marks,
    qa: Vec<u32>,
    qb: Vec<u32>,
}

/// Result of cutting a tree edge: which half is smaller, and its stamp.
struct Cut {
    small_is_a: bool,
    stamp: u32,
}

impl ForestConnectivity {
    pub fn new(graph: Arc<FkGraph>, omega: &EdgeConfig) -> Self {
        let n = graph.num_nodes();
        let m = graph.num_edges();
        let mut f = ForestConnectivity {
            graph,
            omega: EdgeConfig::all_closed(m),
            tree: EdgeConfig::all_closed(m),
            label: Vec::new(),
            size: Vec::new(),
            spare: Vec::new(),
            components: 0,
            marks: Marks::new(n),
            qa: Vec::new(),
            qb: Vec::new(),
        };
        f.reset(omega);
        f
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.tree.get(e)
    }

    /// Search the two trees left after removing tree edge `cut` in lockstep
    /// from its endpoints; the first to run out is the smaller half and is
    /// left in its queue, marked with the returned stamp.
    fn split_halves(&mut self, cut: usize) -> Cut {
        let [a, b] = self.graph.edge_nodes(cut);
        let (ga, gb) = self.marks.fresh_pair();
        self.qa.clear();
        self.qb.clear();
        self.qa.push(a);
        self.qb.push(b);
        self.marks.set(a, ga);
        self.marks.set(b, gb);
        let (mut ha, mut hb) = (0, 0);
        loop {
            if ha == self.qa.len() {
                return Cut { small_is_a: true, stamp: ga };
            }
            let v = self.qa[ha];
            ha += 1;
            for &(f, w) in self.graph.incident(v) {
                if f as usize != cut && self.tree.get(f as usize) && self.marks.get(w) != ga {
                    self.marks.set(w, ga);
                    self.qa.push(w);
                }
            }
            if hb == self.qb.len() {
                return Cut { small_is_a: false, stamp: gb };
            }
            let v = self.qb[hb];
            hb += 1;
            for &(f, w) in self.graph.incident(v) {
                if f as usize != cut && self.tree.get(f as usize) && self.marks.get(w) != gb {
                    self.marks.set(w, gb);
                    self.qb.push(w);
                }
            }
        }
    }

    fn small_half(&self, cut: &Cut) -> &[u32] {
        if cut.small_is_a {
            &self.qa
        } else {
            &self.qb
        }
    }

    /// An open non-tree edge leaving the smaller half.
    fn replacement(&self, cut: &Cut, skip: usize) -> Option<usize> {
        for &v in self.small_half(cut) {
            for &(f, w) in self.graph.incident(v) {
                let f = f as usize;
                if f != skip && self.omega.get(f) && !self.tree.get(f) && self.marks.get(w) != cut.stamp {
                    return Some(f);
                }
            }
        }
        None
    }

    fn new_label(&mut self) -> u32 {
        self.spare.pop().unwrap_or_else(|| {
            self.size.push(0);
            (self.size.len() - 1) as u32
        })
    }

    /// Relabel the tree containing `start` to `to`.
    fn relabel_tree(&mut self, start: u32, to: u32) {
        let from = self.label[start as usize];
        self.qa.clear();
        self.qa.push(start);
        self.label[start as usize] = to;
        let mut h = 0;
        while h < self.qa.len() {
            let v = self.qa[h];
            h += 1;
            for &(f, w) in self.graph.incident(v) {
                if self.tree.get(f as usize) && self.label[w as usize] == from {
                    self.label[w as usize] = to;
                    self.qa.push(w);
                }
            }
        }
    }

    /// Whether an open tree edge lies on a cycle.
    fn tree_edge_has_cycle(&mut self, e: usize) -> bool {
        let cut = self.split_halves(e);
        self.replacement(&cut, e).is_some()
    }
}

impl Connectivity for ForestConnectivity {
    fn graph(&self) -> &Arc<FkGraph> {
        &self.graph
    }

    fn config(&self) -> &EdgeConfig {
        &self.omega
    }

    fn reset(&mut self, omega: &EdgeConfig) {
        let n = self.graph.num_nodes();
        assert_eq!(omega.len(), self.graph.num_edges());
        self.omega = EdgeConfig::all_closed(omega.len());
        self.tree = EdgeConfig::all_closed(omega.len());
        self.label = (0..n as u32).collect();
        self.size = vec![1; n];
        self.spare.clear();
        self.components = n;
        for e in omega.iter_open() {
            self.open(e);
        }
    }

    fn open(&mut self, e: usize) {
        if self.omega.get(e) {
            return;
        }
        self.omega.set(e, true);
        let [a, b] = self.graph.edge_nodes(e);
        let (la, lb) = (self.label[a as usize], self.label[b as usize]);
        if la == lb {
            return;
        }
        let (small_root, small, big) =
            if self.size[la as usize] <= self.size[lb as usize] { (a, la, lb) } else { (b, lb, la) };
        self.relabel_tree(small_root, big);
        self.size[big as usize] += self.size[small as usize];
        self.size[small as usize] = 0;
        self.spare.push(small);
        self.tree.set(e, true);
        self.components -= 1;
    }

    fn close(&mut self, e: usize) {
        if !self.omega.get(e) {
            return;
        }
        self.omega.set(e, false);
        if !self.tree.get(e) {
            return;
        }
        self.tree.set(e, false);
        let cut = self.split_halves(e);
        if let Some(f) = self.replacement(&cut, e) {
            self.tree.set(f, true);
            return;
        }
        let old = self.label[self.graph.edge_nodes(e)[0] as usize];
        let fresh = self.new_label();
        let moved = self.small_half(&cut).len() as u32;
        let half = if cut.small_is_a { std::mem::take(&mut self.qa) } else { std::mem::take(&mut self.qb) };
        for &v in &half {
            self.label[v as usize] = fresh;
        }
        if cut.small_is_a {
            self.qa = half;
        } else {
            self.qb = half;
        }
        self.size[fresh as usize] = moved;
        self.size[old as usize] -= moved;
        self.components += 1;
    }

    fn connected_avoiding(&mut self, u: u32, v: u32, avoid: Option<usize>) -> bool {
        if u == v {
            return true;
        }
        if self.label[u as usize] != self.label[v as usize] {
            return false;
        }
        let e = match avoid {
            Some(e) if self.omega.get(e) && self.tree.get(e) => e,
            _ => return true,
        };
        let cut = self.split_halves(e);
        let u_small = self.marks.get(u) == cut.stamp;
        let v_small = self.marks.get(v) == cut.stamp;
        if u_small == v_small {
            // Both in the small half, or both outside it: the smaller half
            // lists every node on its side, so both lie in the other one.
            return true;
        }
        self.replacement(&cut, e).is_some()
    }

    fn query(&mut self, e: usize) -> bool {
        let [a, b] = self.graph.edge_nodes(e);
        if a == b {
            return true;
        }
        if !self.omega.get(e) {
            return self.label[a as usize] == self.label[b as usize];
        }
        if !self.tree.get(e) {
            return true;
        }
        self.tree_edge_has_cycle(e)
    }

    fn component_count(&mut self) -> usize {
        self.components
    }
}
