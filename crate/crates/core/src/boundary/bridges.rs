use crate::error::{Error, Result};
use crate::lattice::{HalfPoint, Lattice, Segment, Side, SiteId};

use super::BoundaryCondition;

/// What a bridge must straddle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BridgeTarget {
    /// A boundary edge, given by its side and doubled side coordinate of the
    /// midpoint (always odd).
    Edge { side: Side, mid2: i64 },
    Segment(Segment),
}

impl BridgeTarget {
    /// Edge between side coordinates `k` and `k + 1`.
    pub fn edge(side: Side, k: usize) -> Self {
        BridgeTarget::Edge { side, mid2: 2 * k as i64 + 1 }
    }

    /// Locate an edge midpoint on the boundary of a rectangle.
    pub fn from_midpoint(lattice: &Lattice, m: HalfPoint) -> Result<Self> {
        let (n2, np2) = (2 * lattice.n() as i64, 2 * lattice.n_prime() as i64);
        let off = || Error::OffBoundary { x: m.x2.div_euclid(2), y: m.y2.div_euclid(2) };
        if lattice.edge_at_midpoint(m).is_none() {
            return Err(off());
        }
        let hits = [
            (Side::North, m.y2 == np2 && m.x2 % 2 != 0, m.x2),
            (Side::South, m.y2 == 0 && m.x2 % 2 != 0, m.x2),
            (Side::East, m.x2 == n2 && m.y2 % 2 != 0, m.y2),
            (Side::West, m.x2 == 0 && m.y2 % 2 != 0, m.y2),
        ];
        hits.iter()
            .find(|h| h.1 && lattice.kind() == crate::lattice::LatticeKind::Rectangle)
            .map(|&(side, _, mid2)| BridgeTarget::Edge { side, mid2 })
            .ok_or_else(off)
    }

    pub fn side(&self) -> Side {
        match self {
            BridgeTarget::Edge { side, .. } => *side,
            BridgeTarget::Segment(s) => s.side,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BridgeOrdering {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bridge {
    /// Canonical label of the class.
    pub label: SiteId,
    /// Inclusive side-coordinate intervals.
    pub hull_l: (i64, i64),
    pub hull_r: (i64, i64),
    pub len_l: usize,
    pub len_r: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeSet {
    pub target: BridgeTarget,
    pub ordering: BridgeOrdering,
    pub bridges: Vec<Bridge>,
    /// Whether the two endpoints of an edge target share a class.
    pub endpoint_pair_wired: bool,
}

impl BridgeSet {
    pub fn len(&self) -> usize {
        self.bridges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bridges.is_empty()
    }

    pub fn reorder(&mut self, ordering: BridgeOrdering) {
        match ordering {
            BridgeOrdering::Right => self.bridges.sort_by_key(|b| (b.len_r, b.label)),
            BridgeOrdering::Left => self.bridges.sort_by_key(|b| (b.len_l, b.label)),
        }
        self.ordering = ordering;
    }
}

/// Side members of every class, precomputed so that many edge targets on
/// one side can be queried cheaply.
pub struct SideView {
    side: Side,
    classes: Vec<(SiteId, Vec<i64>)>,
}

impl SideView {
    pub fn new(xi: &BoundaryCondition, side: Side) -> Result<Self> {
        let mut classes = xi.side_members(side)?;
        classes.retain(|c| c.1.len() >= 2);
        Ok(SideView { side, classes })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Bridges over the doubled coordinate `mid2`, unordered.
    pub fn bridges_over_edge(&self, mid2: i64) -> (Vec<Bridge>, bool) {
        let lo = (mid2 - 1) / 2;
        let hi = lo + 1;
        let mut out = Vec::new();
        let mut pair = false;
        for (label, xs) in &self.classes {
            let below = xs.partition_point(|&x| 2 * x < mid2);
            if below > 0 && xs[below - 1] == lo && below < xs.len() && xs[below] == hi {
                pair = true;
            }
            if below == 0 || below == xs.len() {
                continue;
            }
            let (l, r) = (xs[below - 1], xs[below]);
            out.push(Bridge {
                label: *label,
                hull_l: (l, lo),
                hull_r: (hi, r),
                len_l: (lo - l + 1) as usize,
                len_r: (r - hi + 1) as usize,
            });
        }
        (out, pair)
    }

    pub fn count_over_edge(&self, mid2: i64) -> usize {
        self.classes
            .iter()
            .filter(|(_, xs)| 2 * xs[0] < mid2 && 2 * xs[xs.len() - 1] > mid2)
            .count()
    }

    pub fn bridges_over_segment(&self, a: i64, b: i64) -> Vec<Bridge> {
        let mut out = Vec::new();
        for (label, xs) in &self.classes {
            if !(xs[0] < a && xs[xs.len() - 1] > b) {
                continue;
            }
            let l = xs[xs.partition_point(|&x| x <= a) - 1];
            let r = xs[xs.partition_point(|&x| x < b)];
            out.push(Bridge {
                label: *label,
                hull_l: (l, a),
                hull_r: (b, r),
                len_l: (a - l + 1) as usize,
                len_r: (r - b + 1) as usize,
            });
        }
        out
    }
}

/// All classes straddling the target, sorted in the requested order.
///
/// Only members on the target's closed side (both corners included) are
/// considered; for an edge target a class straddles when it has members
/// strictly on both sides of the midpoint.
pub fn bridges_over(xi: &BoundaryCondition, target: BridgeTarget, ordering: BridgeOrdering) -> Result<BridgeSet> {
    let lattice = xi.lattice();
    let view = SideView::new(xi, target.side())?;
    let side_len = lattice.side_length(target.side()) as i64;
    let (bridges, pair) = match target {
        BridgeTarget::Edge { mid2, .. } => {
            if mid2 % 2 == 0 || mid2 < 1 || mid2 > 2 * side_len - 1 {
                return Err(Error::InvalidSegment(format!("edge midpoint {}/2 is not on the side", mid2)));
            }
            view.bridges_over_edge(mid2)
        }
        BridgeTarget::Segment(seg) => {
            if seg.lo > seg.hi || seg.hi as i64 > side_len {
                return Err(Error::InvalidSegment(format!("[{}, {}] on {:?}", seg.lo, seg.hi, seg.side)));
            }
            (view.bridges_over_segment(seg.lo as i64, seg.hi as i64), false)
        }
    };
    let mut set = BridgeSet { target, ordering, bridges, endpoint_pair_wired: pair };
    set.reorder(ordering);
    Ok(set)
}

/// Indices `i >= 1` (into the ordered bridges, 1-based) of the two bridge
/// classes used in the multi-scale argument.
///
/// `x` is the side coordinate of the edge and `n` the side length. The
/// length of the fictitious innermost bridge made by the edge endpoints is
/// one. For right-ordered sets lengths are `len_r` and the room left is
/// `n - x`; left-ordered sets use `len_l` and `x`.
pub fn classify_bridges(set: &BridgeSet, n: usize, x: f64) -> (Vec<usize>, Vec<usize>) {
    let lengths: Vec<f64> = std::iter::once(1.0)
        .chain(set.bridges.iter().map(|b| match set.ordering {
            BridgeOrdering::Right => b.len_r as f64,
            BridgeOrdering::Left => b.len_l as f64,
        }))
        .collect();
    let room = match set.ordering {
        BridgeOrdering::Right => n as f64 - x,
        BridgeOrdering::Left => x,
    };
    classify_lengths(&lengths, n, room)
}

/// Same as [`classify_bridges`] on an explicit length sequence whose first
/// entry is the innermost (index 0) length.
pub fn classify_lengths(lengths: &[f64], n: usize, room: f64) -> (Vec<usize>, Vec<usize>) {
    let sixth = n as f64 / 6.0;
    let mut g1 = Vec::new();
    let mut g2 = Vec::new();
    for i in 1..lengths.len() {
        let (prev, cur) = (lengths[i - 1], lengths[i]);
        if prev <= sixth && cur <= 2.0 * prev {
            g1.push(i);
        }
        if prev >= sixth && cur <= 0.5 * (prev + room) {
            g2.push(i);
        }
    }
    (g1, g2)
}
