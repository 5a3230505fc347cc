use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::lattice::{Coord, Lattice, Side, SiteId};

/// A partition of the boundary sites of a lattice.
///
/// Each class is labelled by its smallest member site id, which is also its
/// lexicographically smallest `(x, y)`, so equal partitions have equal
/// label vectors.
#[derive(Clone)]
pub struct BoundaryCondition {
    lattice: Arc<Lattice>,
    labels: Vec<SiteId>,
}

impl PartialEq for BoundaryCondition {
    fn eq(&self, other: &Self) -> bool {
        *self.lattice == *other.lattice && self.labels == other.labels
    }
}

impl Eq for BoundaryCondition {}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundaryCondition({})", self.to_spec())
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_spec())
    }
}

impl BoundaryCondition {
    fn require_boundary(lattice: &Lattice) -> Result<()> {
        if lattice.has_boundary() {
            Ok(())
        } else {
            Err(Error::NoBoundary)
        }
    }

    /// Build from an arbitrary class key per boundary site; sites with equal
    /// keys share a class.
    pub fn from_keys<K, F>(lattice: &Arc<Lattice>, mut key: F) -> Result<Self>
    where
        K: std::hash::Hash + Eq,
        F: FnMut(SiteId) -> K,
    {
        Self::require_boundary(lattice)?;
        let mut first: HashMap<K, SiteId> = HashMap::new();
        let labels = lattice
            .boundary_sites()
            .iter()
            .map(|&s| *first.entry(key(s)).or_insert(s))
            .collect();
        Ok(BoundaryCondition { lattice: lattice.clone(), labels })
    }

    pub fn wired(lattice: &Arc<Lattice>) -> Result<Self> {
        Self::from_keys(lattice, |_| ())
    }

    pub fn free(lattice: &Arc<Lattice>) -> Result<Self> {
        Self::from_keys(lattice, |s| s)
    }

    /// Classes given explicitly; boundary sites not listed are singletons.
    pub fn from_classes(lattice: &Arc<Lattice>, classes: &[Vec<SiteId>]) -> Result<Self> {
        Self::require_boundary(lattice)?;
        let mut owner: Vec<Option<usize>> = vec![None; lattice.boundary_sites().len()];
        for (c, class) in classes.iter().enumerate() {
            for &s in class {
                let i = lattice.boundary_index(s).ok_or_else(|| {
                    let p = lattice.coord(s);
                    Error::OffBoundary { x: p.x, y: p.y }
                })?;
                if owner[i].is_some_and(|o| o != c) {
                    return Err(Error::InvalidPartition(format!("site {} listed in two classes", lattice.coord(s))));
                }
                owner[i] = Some(c);
            }
        }
        Self::from_keys(lattice, |s| {
            let i = lattice.boundary_index(s).expect("boundary site");
            match owner[i] {
                Some(c) => (0u8, c),
                None => (1u8, i),
            }
        })
    }

    pub fn from_coords(lattice: &Arc<Lattice>, classes: &[Vec<(i64, i64)>]) -> Result<Self> {
        let sites = classes
            .iter()
            .map(|class| {
                class
                    .iter()
                    .map(|&(x, y)| lattice.site_at(Coord::new(x, y)).ok_or(Error::OffBoundary { x, y }))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_classes(lattice, &sites)
    }

    /// Side wiring, labels listed north, east, south, west. Label 0 leaves a
    /// side free; sides with equal nonzero labels are wired together. Each
    /// corner belongs to the side that follows it clockwise.
    pub fn from_sides(lattice: &Arc<Lattice>, labels: [u32; 4]) -> Result<Self> {
        Self::from_keys(lattice, |s| {
            let side = lattice.side_of(s).expect("boundary site has a side");
            match labels[side.index()] {
                0 => (0, s),
                l => (l, 0),
            }
        })
    }

    /// Parse `wired`, `free`, `sides:a,b,c,d` or `partition:<classes>`.
    ///
    /// Partition classes are separated by `|`, sites within a class by
    /// whitespace, each site written `x,y`. Unlisted sites are singletons.
    pub fn parse(lattice: &Arc<Lattice>, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "wired" {
            return Self::wired(lattice);
        }
        if spec == "free" {
            return Self::free(lattice);
        }
        if let Some(rest) = spec.strip_prefix("sides:") {
            let parts: Vec<u32> = rest
                .split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidPartition(format!("bad sides spec {spec:?}: {e}")))?;
            let labels: [u32; 4] = parts
                .try_into()
                .map_err(|_| Error::InvalidPartition(format!("sides spec needs four labels: {spec:?}")))?;
            return Self::from_sides(lattice, labels);
        }
        if let Some(rest) = spec.strip_prefix("partition:") {
            let mut classes = Vec::new();
            for class in rest.split('|').map(str::trim).filter(|c| !c.is_empty()) {
                let mut sites = Vec::new();
                for tok in class.split_whitespace() {
                    let (x, y) = tok
                        .split_once(',')
                        .and_then(|(x, y)| Some((x.parse::<i64>().ok()?, y.parse::<i64>().ok()?)))
                        .ok_or_else(|| Error::InvalidPartition(format!("bad site {tok:?}")))?;
                    sites.push((x, y));
                }
                classes.push(sites);
            }
            return Self::from_coords(lattice, &classes);
        }
        Err(Error::InvalidPartition(format!("unknown boundary spec {spec:?}")))
    }

    /// Canonical text form, `partition:` followed by every class.
    pub fn to_spec(&self) -> String {
        let classes: Vec<String> = self
            .classes()
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&s| {
                        let p = self.lattice.coord(s);
                        format!("{},{}", p.x, p.y)
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        format!("partition:{}", classes.join("|"))
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    /// Canonical labels, parallel to [`Lattice::boundary_sites`].
    pub fn labels(&self) -> &[SiteId] {
        &self.labels
    }

    /// Class label of a boundary site.
    pub fn label(&self, s: SiteId) -> Option<SiteId> {
        self.lattice.boundary_index(s).map(|i| self.labels[i])
    }

    pub fn same_class(&self, a: SiteId, b: SiteId) -> bool {
        match (self.label(a), self.label(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// Number of classes.
    pub fn k(&self) -> usize {
        let sites = self.lattice.boundary_sites();
        sites.iter().zip(&self.labels).filter(|(s, l)| s == l).count()
    }

    /// Classes as sorted site lists, ordered by label.
    pub fn classes(&self) -> Vec<Vec<SiteId>> {
        let mut by_label: Vec<(SiteId, Vec<SiteId>)> = Vec::new();
        let mut slot: HashMap<SiteId, usize> = HashMap::new();
        for (&s, &l) in self.lattice.boundary_sites().iter().zip(&self.labels) {
            let i = *slot.entry(l).or_insert_with(|| {
                by_label.push((l, Vec::new()));
                by_label.len() - 1
            });
            by_label[i].1.push(s);
        }
        by_label.into_iter().map(|(_, c)| c).collect()
    }

    pub fn is_wired(&self) -> bool {
        self.k() == 1
    }

    pub fn is_free(&self) -> bool {
        self.k() == self.labels.len()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if *self.lattice == *other.lattice {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    fn label_index(&self, i: usize) -> usize {
        self.lattice.boundary_index(self.labels[i]).expect("label is a boundary site")
    }

    /// Refinement order: every class of `self` lies inside a class of `other`.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok((0..self.labels.len()).all(|i| other.labels[i] == other.labels[self.label_index(i)]))
    }

    /// Finest partition coarser than both.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let m = self.labels.len();
        let mut uf = UnionFind::<usize>::new(m);
        for i in 0..m {
            uf.union(i, self.label_index(i));
            uf.union(i, other.label_index(i));
        }
        Self::from_keys(&self.lattice, |s| {
            let i = self.lattice.boundary_index(s).expect("boundary site");
            uf.find_mut(i)
        })
    }

    /// `(k(a) - k(a v b)) + (k(b) - k(a v b))`.
    pub fn distance(&self, other: &Self) -> Result<usize> {
        let j = self.join(other)?.k();
        Ok(self.k() - j + other.k() - j)
    }

    /// Boundary sites of a class, restricted to a closed side, as sorted
    /// side coordinates.
    pub(crate) fn side_members(&self, side: Side) -> Result<Vec<(SiteId, Vec<i64>)>> {
        let line = self.lattice.side_sites(side)?;
        let mut out: Vec<(SiteId, Vec<i64>)> = Vec::new();
        let mut slot: HashMap<SiteId, usize> = HashMap::new();
        for &s in &line {
            let l = self.label(s).expect("side site is on the boundary");
            let i = *slot.entry(l).or_insert_with(|| {
                out.push((l, Vec::new()));
                out.len() - 1
            });
            out[i].1.push(self.lattice.side_coordinate(s, side));
        }
        Ok(out)
    }
}
