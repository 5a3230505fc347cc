use std::sync::Arc;

use petgraph::unionfind::UnionFind;

use crate::edgeconfig::EdgeConfig;
use crate::error::{Error, Result};
use crate::lattice::{Coord, Lattice, LatticeKind, Rect};

use super::BoundaryCondition;

/// Boundary condition on `rect` induced by the open edges of `omega` that
/// avoid the interior of `rect`, together with the wiring of `xi`.
///
/// `omega` is indexed by the updatable edges of `lattice`; the result lives
/// on a fresh rectangle lattice in coordinates local to `rect`.
pub fn induced_boundary(
    lattice: &Arc<Lattice>,
    rect: Rect,
    omega: &EdgeConfig,
    xi: Option<&BoundaryCondition>,
) -> Result<BoundaryCondition> {
    if lattice.kind() != LatticeKind::Rectangle && xi.is_some() {
        return Err(Error::InvalidParams("boundary wiring given for a lattice without boundary".into()));
    }
    lattice.check_rect(rect)?;
    if rect.width() == 0 || rect.height() == 0 {
        return Err(Error::RectOutside(format!("{rect} is degenerate")));
    }
    if omega.len() != lattice.updatable_edges().len() {
        return Err(Error::InvalidParams("configuration size does not match the lattice".into()));
    }
    if let Some(xi) = xi {
        if **xi.lattice() != **lattice {
            return Err(Error::LatticeMismatch);
        }
    }
    let mut uf = UnionFind::<u32>::new(lattice.num_sites());
    if let Some(xi) = xi {
        for (&s, &l) in lattice.boundary_sites().iter().zip(xi.labels()) {
            uf.union(s, l);
        }
    }
    let inside = |s: u32| rect.contains_interior(lattice.coord(s));
    for i in omega.iter_open() {
        let [a, b] = lattice.endpoints(lattice.updatable_edges()[i]);
        if !inside(a) && !inside(b) {
            uf.union(a, b);
        }
    }
    let local = Arc::new(Lattice::rectangle(rect.width(), rect.height())?);
    BoundaryCondition::from_keys(&local, |s| {
        let c = local.coord(s);
        let g = lattice.site(c.x as usize + rect.x0, c.y as usize + rect.y0);
        uf.find_mut(g)
    })
}

/// Map a site of the rectangle-local lattice back to the enclosing lattice.
pub fn to_global(lattice: &Lattice, rect: Rect, local: Coord) -> Option<u32> {
    lattice.site_at(Coord::new(local.x + rect.x0 as i64, local.y + rect.y0 as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_free_gives_free() {
        let l = Arc::new(Lattice::rectangle(3, 3).unwrap());
        let m = l.updatable_edges().len();
        let xi = BoundaryCondition::free(&l).unwrap();
        let r = Rect::new(0, 3, 0, 1);
        let z = induced_boundary(&l, r, &EdgeConfig::all_closed(m), Some(&xi)).unwrap();
        assert!(z.is_free());
    }

    #[test]
    fn open_wires_everything_but_isolated_corners() {
        let l = Arc::new(Lattice::rectangle(3, 3).unwrap());
        let m = l.updatable_edges().len();
        let xi = BoundaryCondition::free(&l).unwrap();
        let r = Rect::new(0, 3, 0, 1);
        let z = induced_boundary(&l, r, &EdgeConfig::all_open(m), Some(&xi)).unwrap();
        // The two lattice corners on the bottom row touch only boundary edges.
        assert_eq!(z.k(), 3);
        let zl = z.lattice();
        assert!(z.same_class(zl.site(1, 0), zl.site(2, 1)));
        let w = BoundaryCondition::wired(&l).unwrap();
        let zw = induced_boundary(&l, r, &EdgeConfig::all_open(m), Some(&w)).unwrap();
        assert!(zw.is_wired());
        let inner = Rect::new(1, 2, 1, 2);
        assert!(induced_boundary(&l, inner, &EdgeConfig::all_open(m), Some(&xi)).unwrap().is_wired());
    }

    #[test]
    fn rect_outside_rejected() {
        let l = Arc::new(Lattice::rectangle(3, 3).unwrap());
        let m = l.updatable_edges().len();
        assert!(induced_boundary(&l, Rect::new(0, 4, 0, 1), &EdgeConfig::all_open(m), None).is_err());
    }
}
