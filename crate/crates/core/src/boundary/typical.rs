use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Side;

use super::{cross_side_classes, BoundaryCondition, SideView};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalityReport {
    /// Largest bridge count over the edges of each side, north, east, south, west.
    pub max_bridges: [usize; 4],
    pub cross_side: usize,
    /// Per-side bounded-bridges predicate.
    pub side_ok: [bool; 4],
    pub typical: bool,
}

/// Largest number of bridges over any edge of one side.
pub fn max_bridges_on_side(xi: &BoundaryCondition, side: Side) -> Result<usize> {
    let view = SideView::new(xi, side)?;
    let len = xi.lattice().side_length(side) as i64;
    Ok((0..len).map(|k| view.count_over_edge(2 * k + 1)).max().unwrap_or(0))
}

/// Check the bridge bound `K1 ln N` on every side and the cross-side class
/// bound `K2 ln N`.
pub fn is_typical(xi: &BoundaryCondition, k1: f64, k2: f64, big_n: f64) -> Result<TypicalityReport> {
    if !(k1 > 0.0 && k2 > 0.0 && big_n >= 2.0) {
        return Err(Error::InvalidParams(format!("need K1, K2 > 0 and N >= 2 (got {k1}, {k2}, {big_n})")));
    }
    let ln = big_n.ln();
    let mut max_bridges = [0; 4];
    let mut side_ok = [true; 4];
    for side in Side::ALL {
        let m = max_bridges_on_side(xi, side)?;
        max_bridges[side.index()] = m;
        side_ok[side.index()] = m as f64 <= k1 * ln;
    }
    let cross_side = cross_side_classes(xi);
    let typical = side_ok.iter().all(|&b| b) && cross_side as f64 <= k2 * ln;
    Ok(TypicalityReport { max_bridges, cross_side, side_ok, typical })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::lattice::Lattice;

    #[test]
    fn extremes_are_typical() {
        let l = Arc::new(Lattice::rectangle(6, 5).unwrap());
        let k = 1.0 / 2f64.ln();
        for xi in [BoundaryCondition::wired(&l).unwrap(), BoundaryCondition::free(&l).unwrap()] {
            let r = is_typical(&xi, k, k, 2.0).unwrap();
            assert!(r.typical, "{xi:?} {r:?}");
        }
    }

    #[test]
    fn nested_pairs_break_side_bound() {
        let (k1, big_n) = (1.0, 8.0);
        let pairs = (2.0 * k1 * f64::ln(big_n)).ceil() as i64;
        let n = (2 * pairs + 1) as usize;
        let l = Arc::new(Lattice::rectangle(n, 3).unwrap());
        let classes: Vec<Vec<(i64, i64)>> = (0..pairs).map(|i| vec![(i, 3), (n as i64 - i, 3)]).collect();
        let xi = BoundaryCondition::from_coords(&l, &classes).unwrap();
        let r = is_typical(&xi, k1, 100.0, big_n).unwrap();
        assert_eq!(r.max_bridges[Side::North.index()], pairs as usize);
        assert!(!r.side_ok[Side::North.index()]);
        assert!(!r.typical);
    }

    #[test]
    fn bad_parameters_rejected() {
        let l = Arc::new(Lattice::rectangle(2, 2).unwrap());
        let xi = BoundaryCondition::free(&l).unwrap();
        assert!(is_typical(&xi, 0.0, 1.0, 4.0).is_err());
        assert!(is_typical(&xi, 1.0, 1.0, 1.0).is_err());
    }
}
