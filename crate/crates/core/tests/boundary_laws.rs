use std::collections::VecDeque;
use std::sync::Arc;

use fklab::boundary::{
    bridges_over, cross_side_classes, induced_boundary, modify_bridges, modify_segment, modify_sides, BridgeOrdering,
    BridgeTarget,
};
use fklab::lattice::{Rect, Segment, Side, SiteId};
use fklab::observables::bridge_stats;
use fklab::{BoundaryCondition, EdgeConfig, Lattice};
use proptest::prelude::*;

/// Every set partition of `0..k`, as restricted growth strings.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        let top = prefix.iter().copied().max().map_or(0, |m| m + 1);
        for b in 0..=top {
            prefix.push(b);
            grow(prefix, k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), k, &mut out);
    out
}

fn from_blocks(lattice: &Arc<Lattice>, blocks: &[usize]) -> BoundaryCondition {
    BoundaryCondition::from_keys(lattice, |s| blocks[lattice.boundary_index(s).unwrap()]).unwrap()
}

fn all_conditions(lattice: &Arc<Lattice>) -> Vec<BoundaryCondition> {
    set_partitions(lattice.boundary_sites().len()).iter().map(|b| from_blocks(lattice, b)).collect()
}

#[test]
fn order_and_join_laws_on_four_sites() {
    let l = Arc::new(Lattice::rectangle(1, 1).unwrap());
    let all = all_conditions(&l);
    assert_eq!(all.len(), 15);
    for a in &all {
        assert!(a.leq(a).unwrap());
        assert_eq!(&a.join(a).unwrap(), a);
        assert_eq!(a.distance(a).unwrap(), 0);
        for b in &all {
            let ab = a.join(b).unwrap();
            assert_eq!(ab, b.join(a).unwrap());
            assert!(a.leq(&ab).unwrap() && b.leq(&ab).unwrap());
            if a.leq(b).unwrap() && b.leq(a).unwrap() {
                assert_eq!(a, b);
            }
            let d = a.distance(b).unwrap();
            assert_eq!(d, b.distance(a).unwrap());
            assert_eq!(d == 0, a == b);
            if a.leq(b).unwrap() {
                assert_eq!(d, a.k() - b.k());
            }
            for c in &all {
                assert_eq!(ab.join(c).unwrap(), a.join(&b.join(c).unwrap()).unwrap());
                if a.leq(b).unwrap() && b.leq(c).unwrap() {
                    assert!(a.leq(c).unwrap());
                }
                // The join is the least upper bound.
                if a.leq(c).unwrap() && b.leq(c).unwrap() {
                    assert!(ab.leq(c).unwrap());
                }
            }
        }
    }
}

#[test]
fn distance_between_extremes() {
    let l = Arc::new(Lattice::rectangle(2, 2).unwrap());
    let wired = BoundaryCondition::wired(&l).unwrap();
    let free = BoundaryCondition::free(&l).unwrap();
    assert_eq!(wired.distance(&free).unwrap(), 7);
    assert!(free.leq(&wired).unwrap() && !wired.leq(&free).unwrap());
}

#[test]
fn side_modification_never_spans_two_sides() {
    for n in [1, 2] {
        let l = Arc::new(Lattice::rectangle(n, n).unwrap());
        for xi in all_conditions(&l) {
            let s = modify_sides(&xi).unwrap();
            assert_eq!(cross_side_classes(&s), 0);
            assert!(s.leq(&xi).unwrap());
            assert!(xi.distance(&s).unwrap() <= 3 * cross_side_classes(&xi));
        }
    }
    for n in 1..=4 {
        let l = Arc::new(Lattice::rectangle(n, n + 1).unwrap());
        let w = BoundaryCondition::wired(&l).unwrap();
        assert_eq!(w.distance(&modify_sides(&w).unwrap()).unwrap(), 3);
    }
}

fn random_condition(lattice: Arc<Lattice>, alphabet: usize) -> impl Strategy<Value = BoundaryCondition> {
    let k = lattice.boundary_sites().len();
    prop::collection::vec(0..alphabet, k).prop_map(move |keys| from_blocks(&lattice, &keys))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sides_cut_on_three_by_three(xi in random_condition(Arc::new(Lattice::rectangle(3, 3).unwrap()), 5)) {
        let s = modify_sides(&xi).unwrap();
        prop_assert_eq!(cross_side_classes(&s), 0);
        prop_assert!(xi.distance(&s).unwrap() <= 3 * cross_side_classes(&xi));
    }

    #[test]
    fn bridge_modification_removes_bridges(
        xi in random_condition(Arc::new(Lattice::rectangle(4, 4).unwrap()), 4),
        side in 0usize..4,
        k in 0usize..4,
    ) {
        let side = Side::ALL[side];
        let target = BridgeTarget::edge(side, k);
        let before = bridges_over(&xi, target, BridgeOrdering::Right).unwrap();
        let modified = modify_bridges(&xi, target).unwrap();
        prop_assert!(bridges_over(&modified, target, BridgeOrdering::Right).unwrap().is_empty());
        prop_assert!(modified.leq(&xi).unwrap());
        prop_assert_eq!(xi.distance(&modified).unwrap(), before.len());
    }

    #[test]
    fn segment_modification_distance_bounds(
        xi in random_condition(Arc::new(Lattice::rectangle(4, 4).unwrap()), 4),
        side in 0usize..4,
        a in 0usize..5,
        len in 0usize..5,
    ) {
        let side = Side::ALL[side];
        let hi = (a + len).min(4);
        let seg = Segment { side, lo: a, hi };
        let modified = modify_segment(&xi, seg).unwrap();
        let sites = xi.lattice().segment_sites(seg).unwrap();
        let d = xi.distance(&modified).unwrap();
        // Each touched class contributes at most two merges in the join.
        prop_assert!(d < 2 * sites.len());
        if sites.iter().all(|&s| xi.same_class(s, sites[0])) {
            prop_assert!(d <= sites.len());
        }
        prop_assert!(sites.iter().all(|&s| modified.same_class(s, sites[0])));
    }
}

#[test]
fn segment_modification_can_exceed_its_site_count() {
    // Wiring the segment merges three old classes while its sites also leave
    // two of them behind, so the distance reaches 2|V| - 2.
    let l = Arc::new(Lattice::rectangle(4, 4).unwrap());
    let far = l.site(4, 2);
    let xi = BoundaryCondition::from_keys(&l, |s| match l.coord(s) {
        c if c.x == 0 && c.y == 0 => 0,
        c if c.x == 0 && c.y == 1 => 1,
        _ if s == far => 1,
        _ => 2,
    })
    .unwrap();
    let seg = Segment { side: Side::West, lo: 0, hi: 2 };
    let modified = modify_segment(&xi, seg).unwrap();
    assert_eq!(l.segment_sites(seg).unwrap().len(), 3);
    assert_eq!(xi.distance(&modified).unwrap(), 4);
}

/// Components of the sites outside the open interior of `rect`, joined by
/// open updatable edges avoiding that interior and by the classes of `xi`.
fn flood_labels(l: &Lattice, rect: Rect, omega: &EdgeConfig, xi: &BoundaryCondition) -> Vec<usize> {
    let n = l.num_sites();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let inside = |s: SiteId| rect.contains_interior(l.coord(s));
    for (i, &e) in l.updatable_edges().iter().enumerate() {
        let [a, b] = l.endpoints(e);
        if omega.get(i) && !inside(a) && !inside(b) {
            adj[a as usize].push(b as usize);
            adj[b as usize].push(a as usize);
        }
    }
    let bsites = l.boundary_sites();
    for &a in bsites {
        for &b in bsites {
            if a != b && xi.same_class(a, b) {
                adj[a as usize].push(b as usize);
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = start;
                    queue.push_back(w);
                }
            }
        }
    }
    comp
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn induced_boundary_matches_flood_fill(bits in any::<u64>(), spec in 0usize..3) {
        let l = Arc::new(Lattice::rectangle(3, 3).unwrap());
        let xi = BoundaryCondition::parse(&l, ["free", "wired", "sides:1,0,2,0"][spec]).unwrap();
        let m = l.updatable_edges().len();
        let omega = EdgeConfig::from_fn(m, |i| bits >> i & 1 == 1);
        let rect = Rect::new(0, 3, 0, 1);
        let z = induced_boundary(&l, rect, &omega, Some(&xi)).unwrap();
        let comp = flood_labels(&l, rect, &omega, &xi);
        let zl = z.lattice();
        for &a in zl.boundary_sites() {
            for &b in zl.boundary_sites() {
                let ga = l.site(zl.coord(a).x as usize, zl.coord(a).y as usize);
                let gb = l.site(zl.coord(b).x as usize, zl.coord(b).y as usize);
                prop_assert_eq!(z.same_class(a, b), comp[ga as usize] == comp[gb as usize]);
            }
        }
    }

    #[test]
    fn bridge_counts_match_enumeration(bits in any::<u64>(), spec in 0usize..2) {
        let l = Arc::new(Lattice::rectangle(6, 6).unwrap());
        let xi = BoundaryCondition::parse(&l, ["free", "wired"][spec]).unwrap();
        let m = l.updatable_edges().len();
        let mut state = bits;
        let omega = EdgeConfig::from_fn(m, |_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % 100 < 55
        });
        let half = Rect::new(0, 6, 0, 3);
        let stats = bridge_stats(&l, &omega, Some(&xi), half).unwrap();
        let comp = flood_labels(&l, half, &omega, &xi);
        // Clusters of the annulus seen from the north side of the half box.
        let north: Vec<(i64, usize)> = (0..=6).map(|x| (x as i64, comp[l.site(x, 3) as usize])).collect();
        for k in 0..6i64 {
            let mid = k as f64 + 0.5;
            let mut straddling: Vec<usize> = north
                .iter()
                .filter(|(x, c)| (*x as f64) < mid && north.iter().any(|(y, d)| d == c && (*y as f64) > mid))
                .map(|&(_, c)| c)
                .collect();
            straddling.sort_unstable();
            straddling.dedup();
            prop_assert_eq!(stats.per_edge[k as usize], straddling.len());
        }
    }
}
