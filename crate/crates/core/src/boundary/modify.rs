use crate::error::Result;
use crate::lattice::{Segment, SiteId};

use super::{BoundaryCondition, BridgeTarget, SideView};

/// Remove the segment's sites from their classes and wire them together.
pub fn modify_segment(xi: &BoundaryCondition, delta: Segment) -> Result<BoundaryCondition> {
    let lattice = xi.lattice();
    let mut in_delta = vec![false; lattice.num_sites()];
    for s in lattice.segment_sites(delta)? {
        in_delta[s as usize] = true;
    }
    BoundaryCondition::from_keys(lattice, |s| {
        if in_delta[s as usize] {
            SiteId::MAX
        } else {
            xi.label(s).expect("boundary site")
        }
    })
}

/// Split every class bridging the edge into its parts before and after the
/// midpoint, measured along the edge's side.
pub fn modify_bridges(xi: &BoundaryCondition, target: BridgeTarget) -> Result<BoundaryCondition> {
    let BridgeTarget::Edge { side, mid2 } = target else {
        return Err(crate::error::Error::InvalidSegment("bridge modification needs an edge target".into()));
    };
    let lattice = xi.lattice();
    let view = SideView::new(xi, side)?;
    let (bridges, _) = view.bridges_over_edge(mid2);
    let split: std::collections::HashSet<SiteId> = bridges.iter().map(|b| b.label).collect();
    BoundaryCondition::from_keys(lattice, |s| {
        let l = xi.label(s).expect("boundary site");
        let east = split.contains(&l) && 2 * lattice.side_coordinate(s, side) > mid2;
        (l, east)
    })
}

/// Cut every class along the sides, corners going to the side that follows
/// them clockwise.
pub fn modify_sides(xi: &BoundaryCondition) -> Result<BoundaryCondition> {
    let lattice = xi.lattice();
    BoundaryCondition::from_keys(lattice, |s| (xi.label(s).expect("boundary site"), lattice.side_of(s)))
}

/// Number of classes with members on at least two sides (clockwise corners).
pub fn cross_side_classes(xi: &BoundaryCondition) -> usize {
    let lattice = xi.lattice();
    let mut seen: std::collections::HashMap<SiteId, u8> = std::collections::HashMap::new();
    for (&s, &l) in lattice.boundary_sites().iter().zip(xi.labels()) {
        let bit = 1u8 << lattice.side_of(s).expect("boundary site").index();
        *seen.entry(l).or_default() |= bit;
    }
    seen.values().filter(|m| m.count_ones() >= 2).count()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::boundary::{bridges_over, BridgeOrdering};
    use crate::lattice::{Lattice, Side};

    #[test]
    fn segment_on_free() {
        let l = Arc::new(Lattice::rectangle(4, 4).unwrap());
        let f = BoundaryCondition::free(&l).unwrap();
        let one = modify_segment(&f, Segment { side: Side::North, lo: 2, hi: 2 }).unwrap();
        assert_eq!(one, f);
        let north = modify_segment(&f, Segment { side: Side::North, lo: 0, hi: 4 }).unwrap();
        assert_eq!(north.k(), f.k() - 4);
        assert!(north.same_class(l.site(0, 4), l.site(4, 4)));
    }

    #[test]
    fn bridge_split_at_midpoint() {
        let l = Arc::new(Lattice::rectangle(4, 4).unwrap());
        let xi = BoundaryCondition::from_coords(&l, &[vec![(0, 4), (4, 4)]]).unwrap();
        let t = BridgeTarget::edge(Side::North, 1);
        let m = modify_bridges(&xi, t).unwrap();
        assert_eq!(m, BoundaryCondition::free(&l).unwrap());
        assert!(bridges_over(&m, t, BridgeOrdering::Right).unwrap().is_empty());
        let f = BoundaryCondition::free(&l).unwrap();
        assert_eq!(modify_bridges(&f, t).unwrap(), f);
    }

    #[test]
    fn sides_of_wired() {
        let l = Arc::new(Lattice::rectangle(2, 2).unwrap());
        let w = BoundaryCondition::wired(&l).unwrap();
        let s = modify_sides(&w).unwrap();
        assert_eq!(s.k(), 4);
        assert!(s.same_class(l.site(0, 2), l.site(1, 2)));
        assert!(s.same_class(l.site(2, 2), l.site(2, 1)));
        assert!(s.same_class(l.site(2, 0), l.site(1, 0)));
        assert!(s.same_class(l.site(0, 0), l.site(0, 1)));
        assert_eq!(w.distance(&s).unwrap(), 3);
        assert_eq!(cross_side_classes(&w), 1);
        assert_eq!(cross_side_classes(&s), 0);
        for n in 1..=5 {
            let l = Arc::new(Lattice::rectangle(n, n + 1).unwrap());
            let w = BoundaryCondition::wired(&l).unwrap();
            assert_eq!(w.distance(&modify_sides(&w).unwrap()).unwrap(), 3);
        }
    }
}
