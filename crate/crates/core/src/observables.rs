//! Crossing and circuit events, bridge statistics of induced boundaries and
//! counts of disjoint crossing clusters.
//!
//! Functions here take a configuration on every edge of the lattice. Chain
//! states live on updatable edges only; [`full_config`] extends them with
//! the remaining edges closed.

use std::collections::VecDeque;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::boundary::{bridges_over, classify_bridges, induced_boundary, BoundaryCondition, BridgeOrdering, BridgeTarget, SideView};
use crate::edgeconfig::EdgeConfig;
use crate::error::{Error, Result};
use crate::lattice::{EdgeId, HalfPoint, Lattice, LatticeKind, Rect, Side, SiteId};

/// Extend a configuration on the updatable edges to all lattice edges.
pub fn full_config(lattice: &Lattice, state: &EdgeConfig) -> EdgeConfig {
    let mut out = EdgeConfig::all_closed(lattice.num_edges());
    for i in state.iter_open() {
        out.set(lattice.updatable_edges()[i] as usize, true);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// South side to north side.
    Vertical,
    /// West side to east side.
    Horizontal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plane {
    Primal,
    Dual,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossingReport {
    pub vertical: bool,
    pub horizontal: bool,
    pub dual_vertical: bool,
    pub dual_horizontal: bool,
}

fn require_rectangle(lattice: &Lattice) -> Result<()> {
    if lattice.kind() == LatticeKind::Rectangle {
        Ok(())
    } else {
        Err(Error::InvalidParams("crossings are defined on rectangles".into()))
    }
}

fn horizontal_edge(l: &Lattice, x: i64, y: i64) -> EdgeId {
    l.edge_at_midpoint(HalfPoint::new(2 * x + 1, 2 * y)).expect("horizontal edge in range")
}

fn vertical_edge(l: &Lattice, x: i64, y: i64) -> EdgeId {
    l.edge_at_midpoint(HalfPoint::new(2 * x, 2 * y + 1)).expect("vertical edge in range")
}

/// Open path joining the two sides across the direction. The witness, when
/// requested, lists the sites of one such path.
pub fn primal_crossing(lattice: &Lattice, omega: &EdgeConfig, dir: Direction, witness: bool) -> Result<(bool, Option<Vec<SiteId>>)> {
    require_rectangle(lattice)?;
    let (n, np) = (lattice.n(), lattice.n_prime());
    let (start, goal) = match dir {
        Direction::Vertical => (lattice.side_sites(Side::South)?, Side::North),
        Direction::Horizontal => (lattice.side_sites(Side::West)?, Side::East),
    };
    let reached = |s: SiteId| {
        let c = lattice.coord(s);
        match goal {
            Side::North => c.y == np as i64,
            _ => c.x == n as i64,
        }
    };
    let mut parent: Vec<u32> = vec![u32::MAX; lattice.num_sites()];
    let mut queue = VecDeque::new();
    for &s in &start {
        parent[s as usize] = s;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        if reached(v) {
            let path = witness.then(|| {
                let mut p = vec![v];
                let mut cur = v;
                while parent[cur as usize] != cur {
                    cur = parent[cur as usize];
                    p.push(cur);
                }
                p.reverse();
                p
            });
            return Ok((true, path));
        }
        for &(e, w) in lattice.neighbors(v) {
            if omega.get(e as usize) && parent[w as usize] == u32::MAX {
                parent[w as usize] = v;
                queue.push_back(w);
            }
        }
    }
    Ok((false, None))
}

/// Dual-open path (crossing only closed primal edges) across the direction.
///
/// The dual faces are the unit squares of the rectangle plus one extra
/// column (for horizontal crossings) on each outer side, which serve as the
/// two targets. Faces in the extra columns are not joined to each other.
pub fn dual_crossing(lattice: &Lattice, omega: &EdgeConfig, dir: Direction) -> Result<bool> {
    require_rectangle(lattice)?;
    let (n, np) = (lattice.n() as i64, lattice.n_prime() as i64);
    // Work in coordinates where the crossing goes along `a`; `b` is across.
    let (alen, blen) = match dir {
        Direction::Horizontal => (n, np),
        Direction::Vertical => (np, n),
    };
    // Face (a, b) for a in -1..=alen, b in 0..blen.
    let idx = |a: i64, b: i64| ((a + 1) * blen + b) as usize;
    let closed_along = |a: i64, b: i64| {
        // Between faces (a, b) and (a + 1, b): primal edge perpendicular to the direction at a + 1.
        let e = match dir {
            Direction::Horizontal => vertical_edge(lattice, a + 1, b),
            Direction::Vertical => horizontal_edge(lattice, b, a + 1),
        };
        !omega.get(e as usize)
    };
    let closed_across = |a: i64, b: i64| {
        // Between faces (a, b) and (a, b + 1), for 0 <= a < alen.
        let e = match dir {
            Direction::Horizontal => horizontal_edge(lattice, a, b + 1),
            Direction::Vertical => vertical_edge(lattice, b + 1, a),
        };
        !omega.get(e as usize)
    };
    let mut seen = vec![false; ((alen + 2) * blen) as usize];
    let mut queue = VecDeque::new();
    for b in 0..blen {
        seen[idx(-1, b)] = true;
        queue.push_back((-1i64, b));
    }
    while let Some((a, b)) = queue.pop_front() {
        if a == alen {
            return Ok(true);
        }
        let mut push = |a2: i64, b2: i64, q: &mut VecDeque<(i64, i64)>| {
            if !seen[idx(a2, b2)] {
                seen[idx(a2, b2)] = true;
                q.push_back((a2, b2));
            }
        };
        if a + 1 <= alen && closed_along(a, b) {
            push(a + 1, b, &mut queue);
        }
        if a - 1 >= -1 && closed_along(a - 1, b) {
            push(a - 1, b, &mut queue);
        }
        if a >= 0 && a < alen {
            if b + 1 < blen && closed_across(a, b) {
                push(a, b + 1, &mut queue);
            }
            if b >= 1 && closed_across(a, b - 1) {
                push(a, b - 1, &mut queue);
            }
        }
    }
    Ok(false)
}

pub fn crossing(lattice: &Lattice, omega: &EdgeConfig, dir: Direction, plane: Plane) -> Result<bool> {
    match plane {
        Plane::Primal => Ok(primal_crossing(lattice, omega, dir, false)?.0),
        Plane::Dual => dual_crossing(lattice, omega, dir),
    }
}

pub fn crossing_report(lattice: &Lattice, omega: &EdgeConfig) -> Result<CrossingReport> {
    Ok(CrossingReport {
        vertical: crossing(lattice, omega, Direction::Vertical, Plane::Primal)?,
        horizontal: crossing(lattice, omega, Direction::Horizontal, Plane::Primal)?,
        dual_vertical: crossing(lattice, omega, Direction::Vertical, Plane::Dual)?,
        dual_horizontal: crossing(lattice, omega, Direction::Horizontal, Plane::Dual)?,
    })
}

/// Whether an open circuit in the annulus between `inner` and the lattice
/// boundary surrounds `inner`.
///
/// Decided on the dual: the faces of `inner` form one node, the outside of
/// the lattice another, and a circuit exists exactly when no dual-open path
/// joins them.
pub fn open_circuit(lattice: &Lattice, omega: &EdgeConfig, inner: Rect) -> Result<bool> {
    require_rectangle(lattice)?;
    let (n, np) = (lattice.n(), lattice.n_prime());
    if !(inner.x0 > 0 && inner.y0 > 0 && inner.x1 < n && inner.y1 < np && inner.x0 < inner.x1 && inner.y0 < inner.y1) {
        return Err(Error::RectOutside(format!("{inner} is not strictly inside the lattice with positive area")));
    }
    let faces = n * np;
    let inner_node = faces;
    let outer_node = faces + 1;
    let face = |x: i64, y: i64| -> usize {
        if x < 0 || y < 0 || x >= n as i64 || y >= np as i64 {
            outer_node
        } else if x as usize >= inner.x0 && (x as usize) < inner.x1 && y as usize >= inner.y0 && (y as usize) < inner.y1 {
            inner_node
        } else {
            (x as usize) * np + y as usize
        }
    };
    let mut uf = UnionFind::<usize>::new(faces + 2);
    for e in 0..lattice.num_edges() as EdgeId {
        if omega.get(e as usize) {
            continue;
        }
        let m = lattice.midpoint(e);
        let (f1, f2) = if lattice.is_horizontal(e) {
            let x = (m.x2 - 1) / 2;
            let y = m.y2 / 2;
            (face(x, y - 1), face(x, y))
        } else {
            let x = m.x2 / 2;
            let y = (m.y2 - 1) / 2;
            (face(x - 1, y), face(x, y))
        };
        uf.union(f1, f2);
    }
    Ok(!uf.equiv(inner_node, outer_node))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeStats {
    /// Bridge count over each edge of the north side of the inner rectangle.
    pub per_edge: Vec<usize>,
    pub max: usize,
    pub mean: f64,
    /// Largest sizes of the two multi-scale bridge classes over any edge.
    pub max_gamma1: usize,
    pub max_gamma2: usize,
}

/// Bridge counts over the north side of `inner` for the boundary condition
/// induced there by `state` (on updatable edges) and `xi`.
pub fn bridge_stats(lattice: &Arc<Lattice>, state: &EdgeConfig, xi: Option<&BoundaryCondition>, inner: Rect) -> Result<BridgeStats> {
    let z = induced_boundary(lattice, inner, state, xi)?;
    bridge_stats_of(&z)
}

/// Bridge counts over the north side of a boundary condition.
pub fn bridge_stats_of(z: &BoundaryCondition) -> Result<BridgeStats> {
    let w = z.lattice().n();
    let view = SideView::new(z, Side::North)?;
    let per_edge: Vec<usize> = (0..w as i64).map(|k| view.count_over_edge(2 * k + 1)).collect();
    let max = per_edge.iter().copied().max().unwrap_or(0);
    let mean = if w == 0 { 0.0 } else { per_edge.iter().sum::<usize>() as f64 / w as f64 };
    let (mut g1, mut g2) = (0, 0);
    for (k, &c) in per_edge.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let x = k as f64 + 0.5;
        let ordering = if x < w as f64 / 2.0 { BridgeOrdering::Right } else { BridgeOrdering::Left };
        let set = bridges_over(z, BridgeTarget::edge(Side::North, k), ordering)?;
        let (a, b) = classify_bridges(&set, w, x);
        g1 = g1.max(a.len());
        g2 = g2.max(b.len());
    }
    Ok(BridgeStats { per_edge, max, mean, max_gamma1: g1, max_gamma2: g2 })
}

/// Number of clusters of the configuration restricted to the horizontal
/// band `y0 <= y <= y1` that touch both of its horizontal sides.
pub fn psi_count(lattice: &Lattice, omega: &EdgeConfig, y0: usize, y1: usize) -> Result<usize> {
    if y0 >= y1 || y1 >= lattice.n_prime() + usize::from(lattice.kind() == LatticeKind::Rectangle) {
        return Err(Error::InvalidParams(format!("band [{y0}, {y1}] is not inside the lattice")));
    }
    let in_band = |s: SiteId| {
        let y = lattice.coord(s).y as usize;
        y >= y0 && y <= y1
    };
    let mut uf = UnionFind::<u32>::new(lattice.num_sites());
    for e in omega.iter_open() {
        let [a, b] = lattice.endpoints(e as EdgeId);
        if in_band(a) && in_band(b) && lattice.coord(a).y.abs_diff(lattice.coord(b).y) <= 1 {
            uf.union(a, b);
        }
    }
    let width = match lattice.kind() {
        LatticeKind::Torus => lattice.n(),
        _ => lattice.n() + 1,
    };
    let bottom: std::collections::HashSet<u32> = (0..width).map(|x| uf.find_mut(lattice.site(x, y0))).collect();
    let top: std::collections::HashSet<u32> = (0..width).map(|x| uf.find_mut(lattice.site(x, y1))).collect();
    Ok(bottom.intersection(&top).count())
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn extremes() {
        let l = Lattice::rectangle(3, 2).unwrap();
        let m = l.num_edges();
        let open = crossing_report(&l, &EdgeConfig::all_open(m)).unwrap();
        assert!(open.vertical && open.horizontal && !open.dual_vertical && !open.dual_horizontal);
        let closed = crossing_report(&l, &EdgeConfig::all_closed(m)).unwrap();
        assert!(!closed.vertical && !closed.horizontal && closed.dual_vertical && closed.dual_horizontal);
    }

    #[test]
    fn xor_exhaustive_small() {
        for (n, np) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2), (2, 3)] {
            let l = Lattice::rectangle(n, np).unwrap();
            let m = l.num_edges();
            for b in 0..1u64 << m {
                let w = EdgeConfig::from_bits(m, b);
                let r = crossing_report(&l, &w).unwrap();
                assert!(r.vertical ^ r.dual_horizontal, "{n}x{np} {b:b}");
                assert!(r.horizontal ^ r.dual_vertical, "{n}x{np} {b:b}");
            }
        }
    }

    #[test]
    fn witness_is_an_open_path() {
        let l = Lattice::rectangle(6, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let w = EdgeConfig::from_fn(l.num_edges(), |_| rng.random_bool(0.6));
            if let (true, Some(path)) = primal_crossing(&l, &w, Direction::Vertical, true).unwrap() {
                assert_eq!(l.coord(path[0]).y, 0);
                assert_eq!(l.coord(*path.last().unwrap()).y, 6);
                for pair in path.windows(2) {
                    let e = l.edge_between(pair[0], pair[1]).unwrap();
                    assert!(w.get(e as usize));
                }
            }
        }
    }

    #[test]
    fn vertical_crossing_is_increasing() {
        let l = Lattice::rectangle(5, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let mut w = EdgeConfig::from_fn(l.num_edges(), |_| rng.random_bool(0.5));
            let before = crossing(&l, &w, Direction::Vertical, Plane::Primal).unwrap();
            w.set(rng.random_range(0..l.num_edges()), true);
            let after = crossing(&l, &w, Direction::Vertical, Plane::Primal).unwrap();
            assert!(!before || after);
        }
    }

    #[test]
    fn circuits() {
        let l = Lattice::rectangle(6, 6).unwrap();
        let m = l.num_edges();
        let inner = Rect::new(2, 4, 2, 4);
        assert!(open_circuit(&l, &EdgeConfig::all_open(m), inner).unwrap());
        assert!(!open_circuit(&l, &EdgeConfig::all_closed(m), inner).unwrap());
        let ring = Rect::new(1, 5, 1, 5);
        let w = EdgeConfig::from_fn(m, |e| {
            let [a, b] = l.endpoints(e as EdgeId);
            let on = |s: SiteId| {
                let c = l.coord(s);
                ring.contains(c) && !ring.contains_interior(c)
            };
            on(a) && on(b)
        });
        assert!(open_circuit(&l, &w, inner).unwrap());
        let mut broken = w.clone();
        broken.set(horizontal_edge(&l, 2, 1) as usize, false);
        assert!(!open_circuit(&l, &broken, inner).unwrap());
        assert!(open_circuit(&l, &w, Rect::new(0, 4, 2, 4)).is_err());
    }

    #[test]
    fn psi_examples() {
        let l = Lattice::rectangle(6, 9).unwrap();
        let m = l.num_edges();
        assert_eq!(psi_count(&l, &EdgeConfig::all_open(m), 3, 6).unwrap(), 1);
        assert_eq!(psi_count(&l, &EdgeConfig::all_closed(m), 3, 6).unwrap(), 0);
        let cols = EdgeConfig::from_fn(m, |e| {
            let e = e as EdgeId;
            let [a, _] = l.endpoints(e);
            !l.is_horizontal(e) && [1, 4].contains(&l.coord(a).x)
        });
        assert_eq!(psi_count(&l, &cols, 3, 6).unwrap(), 2);
        assert!(psi_count(&l, &cols, 6, 3).is_err());
    }

    #[test]
    fn bridge_stats_extremes() {
        let l = Arc::new(Lattice::rectangle(6, 6).unwrap());
        let free = BoundaryCondition::free(&l).unwrap();
        let m = l.updatable_edges().len();
        let half = Rect::new(0, 6, 0, 3);
        let s = bridge_stats(&l, &EdgeConfig::all_closed(m), Some(&free), half).unwrap();
        assert_eq!(s.max, 0);
        let wired = BoundaryCondition::wired(&l).unwrap();
        let s = bridge_stats(&l, &EdgeConfig::all_open(m), Some(&wired), half).unwrap();
        assert!(s.per_edge.iter().all(|&c| c == 1));
    }
}
