//! Geometry of rectangles `[0,n] x [0,n']`, tori and cylinders.
//!
//! Sites are indexed column-major, `id = x * height + y`, so increasing site
//! id is the lexicographic order on `(x, y)`. Horizontal edges come first,
//! `(x, y)-(x+1, y)` at `x * height + y`, then vertical edges
//! `(x, y)-(x, y+1)`. Every edge is also identified by its midpoint, stored
//! in doubled coordinates so half-integers stay exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type SiteId = u32;
pub type EdgeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Rectangle,
    /// Periodic in both coordinates.
    Torus,
    /// Periodic in the second coordinate; boundary on the west and east sides.
    Cylinder,
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LatticeKind::Rectangle => "rectangle",
            LatticeKind::Torus => "torus",
            LatticeKind::Cylinder => "cylinder",
        };
        f.write_str(s)
    }
}

/// Sides of a rectangle, listed clockwise starting from north.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    North,
    East,
    South,
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::North, Side::East, Side::South, Side::West];

    pub fn index(self) -> usize {
        self as usize
    }

    /// True for north and south, whose sites are ordered by first coordinate.
    pub fn is_horizontal(self) -> bool {
        matches!(self, Side::North | Side::South)
    }
}

/// Integer lattice point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub x: i64,
    pub y: i64,
}

impl Coord {
    pub fn new(x: i64, y: i64) -> Self {
        Coord { x, y }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// A point with half-integer resolution, stored as twice its coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfPoint {
    pub x2: i64,
    pub y2: i64,
}

impl HalfPoint {
    pub fn new(x2: i64, y2: i64) -> Self {
        HalfPoint { x2, y2 }
    }

    pub fn from_coord(c: Coord) -> Self {
        HalfPoint { x2: 2 * c.x, y2: 2 * c.y }
    }

    pub fn x(self) -> f64 {
        self.x2 as f64 / 2.0
    }

    pub fn y(self) -> f64 {
        self.y2 as f64 / 2.0
    }
}

impl fmt::Display for HalfPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x(), self.y())
    }
}

/// An edge as a pair of geometric endpoints. Primal edges have integer
/// endpoints; dual edges join face centres.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeomEdge {
    pub a: HalfPoint,
    pub b: HalfPoint,
}

impl GeomEdge {
    pub fn new(a: HalfPoint, b: HalfPoint) -> Self {
        if a <= b {
            GeomEdge { a, b }
        } else {
            GeomEdge { a: b, b: a }
        }
    }

    pub fn midpoint(&self) -> HalfPoint {
        HalfPoint::new((self.a.x2 + self.b.x2) / 2, (self.a.y2 + self.b.y2) / 2)
    }

    /// The unique crossing edge: rotate by a quarter turn about the midpoint.
    pub fn dual(&self) -> GeomEdge {
        let m = self.midpoint();
        let dx = (self.b.x2 - self.a.x2) / 2;
        let dy = (self.b.y2 - self.a.y2) / 2;
        GeomEdge::new(
            HalfPoint::new(m.x2 + dy, m.y2 - dx),
            HalfPoint::new(m.x2 - dy, m.y2 + dx),
        )
    }
}

/// Inclusive sub-rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
}

impl Rect {
    pub fn new(x0: usize, x1: usize, y0: usize, y1: usize) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }

    pub fn contains(&self, c: Coord) -> bool {
        c.x >= self.x0 as i64 && c.x <= self.x1 as i64 && c.y >= self.y0 as i64 && c.y <= self.y1 as i64
    }

    pub fn contains_interior(&self, c: Coord) -> bool {
        c.x > self.x0 as i64 && c.x < self.x1 as i64 && c.y > self.y0 as i64 && c.y < self.y1 as i64
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]x[{},{}]", self.x0, self.x1, self.y0, self.y1)
    }
}

/// Connected run of sites `[lo, hi]` along one side, in side coordinates
/// (first coordinate on north/south, second on east/west).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub side: Side,
    pub lo: usize,
    pub hi: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    pub kind: LatticeKind,
    pub n: usize,
    pub n_prime: usize,
}

/// The four sides of a rectangle, in coordinate order. Corners appear twice.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sides {
    pub north: Vec<SiteId>,
    pub east: Vec<SiteId>,
    pub south: Vec<SiteId>,
    pub west: Vec<SiteId>,
}

impl Sides {
    pub fn get(&self, side: Side) -> &[SiteId] {
        match side {
            Side::North => &self.north,
            Side::East => &self.east,
            Side::South => &self.south,
            Side::West => &self.west,
        }
    }
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct Lattice {
    shape: Shape,
    width: usize,
    height: usize,
    horizontal: usize,
    vrows: usize,
    edges: Vec<[SiteId; 2]>,
    adjacency: Vec<Vec<(EdgeId, SiteId)>>,
    boundary: Vec<SiteId>,
    boundary_index: Vec<u32>,
    on_boundary: Vec<bool>,
    updatable: Vec<EdgeId>,
    state_index: Vec<u32>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape
    }
}

impl Eq for Lattice {}

impl Lattice {
    pub fn new(kind: LatticeKind, n: usize, n_prime: usize) -> Result<Self> {
        if n == 0 || n_prime == 0 {
            return Err(Error::ZeroDimension { n, n_prime });
        }
        let (width, height) = match kind {
            LatticeKind::Rectangle => (n + 1, n_prime + 1),
            LatticeKind::Torus => (n, n_prime),
            LatticeKind::Cylinder => (n + 1, n_prime),
        };
        let hcols = n;
        let vrows = n_prime;
        let site = |x: usize, y: usize| (x * height + y) as SiteId;

        let mut edges = Vec::with_capacity(hcols * height + width * vrows);
        for x in 0..hcols {
            for y in 0..height {
                edges.push([site(x, y), site((x + 1) % width, y)]);
            }
        }
        let horizontal = edges.len();
        for x in 0..width {
            for y in 0..vrows {
                edges.push([site(x, y), site(x, (y + 1) % height)]);
            }
        }

        let num_sites = width * height;
        let mut adjacency = vec![Vec::with_capacity(4); num_sites];
        for (e, &[a, b]) in edges.iter().enumerate() {
            adjacency[a as usize].push((e as EdgeId, b));
            adjacency[b as usize].push((e as EdgeId, a));
        }

        let on_boundary: Vec<bool> = (0..num_sites)
            .map(|s| {
                let (x, y) = (s / height, s % height);
                match kind {
                    LatticeKind::Rectangle => x == 0 || x == n || y == 0 || y == n_prime,
                    LatticeKind::Cylinder => x == 0 || x == n,
                    LatticeKind::Torus => false,
                }
            })
            .collect();
        let boundary: Vec<SiteId> = (0..num_sites as SiteId).filter(|&s| on_boundary[s as usize]).collect();
        let mut boundary_index = vec![NONE; num_sites];
        for (i, &s) in boundary.iter().enumerate() {
            boundary_index[s as usize] = i as u32;
        }

        let mut updatable = Vec::new();
        let mut state_index = vec![NONE; edges.len()];
        for (e, &[a, b]) in edges.iter().enumerate() {
            if !(on_boundary[a as usize] && on_boundary[b as usize]) {
                state_index[e] = updatable.len() as u32;
                updatable.push(e as EdgeId);
            }
        }

        Ok(Lattice {
            shape: Shape { kind, n, n_prime },
            width,
            height,
            horizontal,
            vrows,
            edges,
            adjacency,
            boundary,
            boundary_index,
            on_boundary,
            updatable,
            state_index,
        })
    }

    pub fn rectangle(n: usize, n_prime: usize) -> Result<Self> {
        Self::new(LatticeKind::Rectangle, n, n_prime)
    }

    pub fn torus(n: usize, n_prime: usize) -> Result<Self> {
        Self::new(LatticeKind::Torus, n, n_prime)
    }

    pub fn cylinder(n: usize, n_prime: usize) -> Result<Self> {
        Self::new(LatticeKind::Cylinder, n, n_prime)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn kind(&self) -> LatticeKind {
        self.shape.kind
    }

    pub fn n(&self) -> usize {
        self.shape.n
    }

    pub fn n_prime(&self) -> usize {
        self.shape.n_prime
    }

    pub fn num_sites(&self) -> usize {
        self.width * self.height
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn site(&self, x: usize, y: usize) -> SiteId {
        debug_assert!(x < self.width && y < self.height);
        (x * self.height + y) as SiteId
    }

    pub fn site_at(&self, c: Coord) -> Option<SiteId> {
        if c.x < 0 || c.y < 0 || c.x as usize >= self.width || c.y as usize >= self.height {
            return None;
        }
        Some(self.site(c.x as usize, c.y as usize))
    }

    pub fn coord(&self, s: SiteId) -> Coord {
        let s = s as usize;
        Coord::new((s / self.height) as i64, (s % self.height) as i64)
    }

    pub fn endpoints(&self, e: EdgeId) -> [SiteId; 2] {
        self.edges[e as usize]
    }

    pub fn is_horizontal(&self, e: EdgeId) -> bool {
        (e as usize) < self.horizontal
    }

    /// Endpoints in unwrapped coordinates; the second endpoint is always the
    /// one in the positive direction.
    pub fn geom_edge(&self, e: EdgeId) -> GeomEdge {
        let [a, _] = self.edges[e as usize];
        let c = self.coord(a);
        let p = HalfPoint::from_coord(c);
        let q = if self.is_horizontal(e) {
            HalfPoint::from_coord(Coord::new(c.x + 1, c.y))
        } else {
            HalfPoint::from_coord(Coord::new(c.x, c.y + 1))
        };
        GeomEdge::new(p, q)
    }

    pub fn midpoint(&self, e: EdgeId) -> HalfPoint {
        self.geom_edge(e).midpoint()
    }

    pub fn edge_at_midpoint(&self, m: HalfPoint) -> Option<EdgeId> {
        let (xo, yo) = (m.x2.rem_euclid(2) == 1, m.y2.rem_euclid(2) == 1);
        match (xo, yo) {
            (true, false) => {
                let x = (m.x2 - 1) / 2;
                let y = m.y2 / 2;
                if x < 0 || y < 0 || x as usize >= self.shape.n || y as usize >= self.height {
                    return None;
                }
                Some((x as usize * self.height + y as usize) as EdgeId)
            }
            (false, true) => {
                let x = m.x2 / 2;
                let y = (m.y2 - 1) / 2;
                if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.vrows {
                    return None;
                }
                Some((self.horizontal + x as usize * self.vrows + y as usize) as EdgeId)
            }
            _ => None,
        }
    }

    /// First edge joining `a` and `b`. On a torus of side two there are two
    /// such edges; use midpoints to tell them apart.
    pub fn edge_between(&self, a: SiteId, b: SiteId) -> Option<EdgeId> {
        self.adjacency[a as usize].iter().find(|&&(_, t)| t == b).map(|&(e, _)| e)
    }

    pub fn neighbors(&self, s: SiteId) -> &[(EdgeId, SiteId)] {
        &self.adjacency[s as usize]
    }

    pub fn is_boundary(&self, s: SiteId) -> bool {
        self.on_boundary[s as usize]
    }

    /// Boundary sites in increasing site id (lexicographic) order.
    pub fn boundary_sites(&self) -> &[SiteId] {
        &self.boundary
    }

    /// Position of a boundary site in [`Lattice::boundary_sites`].
    pub fn boundary_index(&self, s: SiteId) -> Option<usize> {
        match self.boundary_index[s as usize] {
            NONE => None,
            i => Some(i as usize),
        }
    }

    pub fn has_boundary(&self) -> bool {
        !self.boundary.is_empty()
    }

    /// Edges that carry state: everything except edges with both endpoints
    /// on the boundary, whose effect is fixed by the boundary condition.
    pub fn updatable_edges(&self) -> &[EdgeId] {
        &self.updatable
    }

    /// Position of `e` in [`Lattice::updatable_edges`].
    pub fn state_index(&self, e: EdgeId) -> Option<usize> {
        match self.state_index[e as usize] {
            NONE => None,
            i => Some(i as usize),
        }
    }

    pub fn boundary_sides(&self) -> Result<Sides> {
        let (n, np) = (self.shape.n, self.shape.n_prime);
        match self.shape.kind {
            LatticeKind::Torus => Err(Error::NoBoundary),
            LatticeKind::Rectangle => Ok(Sides {
                north: (0..=n).map(|x| self.site(x, np)).collect(),
                east: (0..=np).map(|y| self.site(n, y)).collect(),
                south: (0..=n).map(|x| self.site(x, 0)).collect(),
                west: (0..=np).map(|y| self.site(0, y)).collect(),
            }),
            LatticeKind::Cylinder => Ok(Sides {
                north: Vec::new(),
                east: (0..np).map(|y| self.site(n, y)).collect(),
                south: Vec::new(),
                west: (0..np).map(|y| self.site(0, y)).collect(),
            }),
        }
    }

    /// Sites of one side in coordinate order (closed: both corners included).
    pub fn side_sites(&self, side: Side) -> Result<Vec<SiteId>> {
        Ok(self.boundary_sides()?.get(side).to_vec())
    }

    /// The side owning a boundary site, with each corner assigned to the
    /// side that follows it clockwise.
    pub fn side_of(&self, s: SiteId) -> Option<Side> {
        if !self.is_boundary(s) {
            return None;
        }
        let c = self.coord(s);
        let (n, np) = (self.shape.n as i64, self.shape.n_prime as i64);
        if self.shape.kind == LatticeKind::Cylinder {
            return Some(if c.x == 0 { Side::West } else { Side::East });
        }
        Some(match (c.x, c.y) {
            (0, y) if y == np => Side::North,
            (x, y) if x == n && y == np => Side::East,
            (x, 0) if x == n => Side::South,
            (0, 0) => Side::West,
            (_, y) if y == np => Side::North,
            (x, _) if x == n => Side::East,
            (_, 0) => Side::South,
            _ => Side::West,
        })
    }

    /// Whether a site lies on the closed side (corners belong to both sides).
    pub fn on_side(&self, s: SiteId, side: Side) -> bool {
        if !self.is_boundary(s) {
            return false;
        }
        let c = self.coord(s);
        let (n, np) = (self.shape.n as i64, self.shape.n_prime as i64);
        match (self.shape.kind, side) {
            (LatticeKind::Torus, _) => false,
            (LatticeKind::Cylinder, Side::North | Side::South) => false,
            (_, Side::North) => c.y == np,
            (_, Side::South) => c.y == 0,
            (_, Side::East) => c.x == n,
            (_, Side::West) => c.x == 0,
        }
    }

    /// Coordinate of a site along a side.
    pub fn side_coordinate(&self, s: SiteId, side: Side) -> i64 {
        let c = self.coord(s);
        if side.is_horizontal() {
            c.x
        } else {
            c.y
        }
    }

    /// Number of unit edges along a side.
    pub fn side_length(&self, side: Side) -> usize {
        match (self.shape.kind, side.is_horizontal()) {
            (LatticeKind::Cylinder, true) | (LatticeKind::Torus, _) => 0,
            (LatticeKind::Cylinder, false) => self.shape.n_prime.saturating_sub(1),
            (_, true) => self.shape.n,
            (_, false) => self.shape.n_prime,
        }
    }

    pub fn segment_sites(&self, seg: Segment) -> Result<Vec<SiteId>> {
        if seg.lo > seg.hi {
            return Err(Error::InvalidSegment(format!("lo {} > hi {}", seg.lo, seg.hi)));
        }
        let line = self.side_sites(seg.side)?;
        if seg.hi >= line.len() {
            return Err(Error::InvalidSegment(format!(
                "[{}, {}] exceeds side {:?} of length {}",
                seg.lo,
                seg.hi,
                seg.side,
                line.len()
            )));
        }
        Ok(line[seg.lo..=seg.hi].to_vec())
    }

    /// The whole lattice as a rectangle (rectangles only).
    pub fn full_rect(&self) -> Rect {
        Rect::new(0, self.width - 1, 0, self.height - 1)
    }

    pub fn check_rect(&self, r: Rect) -> Result<()> {
        if r.x0 > r.x1 || r.y0 > r.y1 || r.x1 >= self.width || r.y1 >= self.height {
            return Err(Error::RectOutside(r.to_string()));
        }
        Ok(())
    }
}

/// Dual of a rectangle or torus, realised as an ordinary lattice whose site
/// `(i, j)` sits at `(i, j) + offset`.
///
/// For a rectangle `[0,n] x [0,n']` the dual is the `(n+1) x (n'+1)`
/// rectangle of face centres including the outer ring, shifted by
/// `(-1/2, -1/2)`; its updatable edges are exactly the duals of all primal
/// edges. For a torus the dual is the same torus shifted by `(1/2, 1/2)`.
#[derive(Clone, Debug)]
pub struct DualLattice {
    lattice: Lattice,
    offset2: (i64, i64),
    primal_to_dual: Vec<EdgeId>,
    dual_to_primal: Vec<Option<EdgeId>>,
}

impl DualLattice {
    pub fn of(primal: &Lattice) -> Result<Self> {
        let (lattice, offset2) = match primal.kind() {
            LatticeKind::Rectangle => (Lattice::rectangle(primal.n() + 1, primal.n_prime() + 1)?, (-1, -1)),
            LatticeKind::Torus => (Lattice::torus(primal.n(), primal.n_prime())?, (1, 1)),
            LatticeKind::Cylinder => {
                return Err(Error::InvalidParams("dual of a cylinder is not supported".into()))
            }
        };
        let mut primal_to_dual = Vec::with_capacity(primal.num_edges());
        let mut dual_to_primal = vec![None; lattice.num_edges()];
        for e in 0..primal.num_edges() as EdgeId {
            let m = primal.midpoint(e);
            let local = HalfPoint::new(m.x2 - offset2.0, m.y2 - offset2.1);
            let local = if primal.kind() == LatticeKind::Torus {
                HalfPoint::new(
                    local.x2.rem_euclid(2 * primal.n() as i64),
                    local.y2.rem_euclid(2 * primal.n_prime() as i64),
                )
            } else {
                local
            };
            let d = lattice
                .edge_at_midpoint(local)
                .expect("every primal edge has a crossing dual edge");
            primal_to_dual.push(d);
            dual_to_primal[d as usize] = Some(e);
        }
        Ok(DualLattice { lattice, offset2, primal_to_dual, dual_to_primal })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Real-plane position of a dual site.
    pub fn position(&self, s: SiteId) -> HalfPoint {
        let c = self.lattice.coord(s);
        HalfPoint::new(2 * c.x + self.offset2.0, 2 * c.y + self.offset2.1)
    }

    pub fn dual_of(&self, primal: EdgeId) -> EdgeId {
        self.primal_to_dual[primal as usize]
    }

    pub fn primal_of(&self, dual: EdgeId) -> Option<EdgeId> {
        self.dual_to_primal[dual as usize]
    }

    pub fn geom_edge(&self, dual: EdgeId) -> GeomEdge {
        let g = self.lattice.geom_edge(dual);
        let shift = |p: HalfPoint| HalfPoint::new(p.x2 + self.offset2.0, p.y2 + self.offset2.1);
        GeomEdge::new(shift(g.a), shift(g.b))
    }
}
