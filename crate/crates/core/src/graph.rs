//! The graph an FK measure actually lives on: a set of state edges between
//! nodes, where every boundary class has been contracted to a single node.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;

use crate::boundary::BoundaryCondition;
use crate::edgeconfig::EdgeConfig;
use crate::error::{Error, Result};
use crate::lattice::{EdgeId, Lattice, SiteId};

#[derive(Clone, Debug)]
pub struct FkGraph {
    node_of: Vec<u32>,
    num_nodes: usize,
    edges: Vec<[u32; 2]>,
    offsets: Vec<u32>,
    incident: Vec<(u32, u32)>,
    lattice_edges: Option<Vec<EdgeId>>,
}

impl FkGraph {
    /// General constructor. `edges` join sites; `node_key` assigns every
    /// site a key, and sites sharing a key are contracted.
    pub fn new<K: std::hash::Hash + Eq>(
        num_sites: usize,
        edges: &[[SiteId; 2]],
        mut node_key: impl FnMut(SiteId) -> K,
    ) -> Self {
        let mut ids: HashMap<K, u32> = HashMap::new();
        let node_of: Vec<u32> = (0..num_sites as SiteId)
            .map(|s| {
                let next = ids.len() as u32;
                *ids.entry(node_key(s)).or_insert(next)
            })
            .collect();
        let num_nodes = ids.len();
        let edges: Vec<[u32; 2]> = edges
            .iter()
            .map(|&[a, b]| [node_of[a as usize], node_of[b as usize]])
            .collect();
        let mut degree = vec![0u32; num_nodes + 1];
        for &[a, b] in &edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = vec![0u32; num_nodes + 1];
        for v in 0..num_nodes {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut incident = vec![(0, 0); offsets[num_nodes] as usize];
        for (e, &[a, b]) in edges.iter().enumerate() {
            incident[fill[a as usize] as usize] = (e as u32, b);
            fill[a as usize] += 1;
            incident[fill[b as usize] as usize] = (e as u32, a);
            fill[b as usize] += 1;
        }
        FkGraph { node_of, num_nodes, edges, offsets, incident, lattice_edges: None }
    }

    /// Updatable edges of a lattice, with the classes of `xi` contracted.
    /// Pass `None` on a torus.
    pub fn from_lattice(lattice: &Lattice, xi: Option<&BoundaryCondition>) -> Result<Self> {
        if let Some(xi) = xi {
            if **xi.lattice() != *lattice {
                return Err(Error::LatticeMismatch);
            }
        } else if lattice.has_boundary() {
            return Err(Error::InvalidParams("a lattice with boundary needs a boundary condition".into()));
        }
        let ids = lattice.updatable_edges().to_vec();
        let pairs: Vec<[SiteId; 2]> = ids.iter().map(|&e| lattice.endpoints(e)).collect();
        let mut g = Self::new(lattice.num_sites(), &pairs, |s| match xi.and_then(|x| x.label(s)) {
            Some(l) => l,
            None => s,
        });
        g.lattice_edges = Some(ids);
        Ok(g)
    }

    /// Every lattice edge, nothing contracted.
    pub fn bare(lattice: &Lattice) -> Self {
        let ids: Vec<EdgeId> = (0..lattice.num_edges() as EdgeId).collect();
        let pairs: Vec<[SiteId; 2]> = ids.iter().map(|&e| lattice.endpoints(e)).collect();
        let mut g = Self::new(lattice.num_sites(), &pairs, |s| s);
        g.lattice_edges = Some(ids);
        g
    }

    pub fn with_lattice_edges(mut self, ids: Vec<EdgeId>) -> Self {
        assert_eq!(ids.len(), self.edges.len());
        self.lattice_edges = Some(ids);
        self
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_sites(&self) -> usize {
        self.node_of.len()
    }

    pub fn node_of(&self, s: SiteId) -> u32 {
        self.node_of[s as usize]
    }

    #[inline]
    pub fn edge_nodes(&self, e: usize) -> [u32; 2] {
        self.edges[e]
    }

    #[inline]
    pub fn incident(&self, v: u32) -> &[(u32, u32)] {
        &self.incident[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    /// Lattice edge id of each state edge, when the graph came from a lattice.
    pub fn lattice_edges(&self) -> Option<&[EdgeId]> {
        self.lattice_edges.as_deref()
    }

    /// Number of clusters: connected components of the contracted graph with
    /// the open edges of `omega`, isolated nodes included.
    pub fn cluster_count(&self, omega: &EdgeConfig) -> usize {
        let mut uf = UnionFind::<u32>::new(self.num_nodes);
        let mut k = self.num_nodes;
        for e in omega.iter_open() {
            let [a, b] = self.edges[e];
            if uf.union(a, b) {
                k -= 1;
            }
        }
        k
    }

    /// Same as [`FkGraph::cluster_count`] for a configuration packed in a word.
    pub fn cluster_count_bits(&self, bits: u64) -> usize {
        let mut uf = UnionFind::<u32>::new(self.num_nodes);
        let mut k = self.num_nodes;
        let mut w = bits;
        while w != 0 {
            let e = w.trailing_zeros() as usize;
            w &= w - 1;
            let [a, b] = self.edges[e];
            if uf.union(a, b) {
                k -= 1;
            }
        }
        k
    }
}
