//! Geometry of `Z^d`: sites, canonical edges, boxes, annuli and path predicates.
//!
//! Points are ordered lexicographically on their coordinates; every vertex
//! listing produced here follows that order, and dense indices of a
//! [`Cuboid`] are row-major in the same order.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A site of `Z^D`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point<const D: usize>(pub [i32; D]);

impl<const D: usize> fmt::Debug for Point<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl<const D: usize> fmt::Display for Point<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<const D: usize> Point<D> {
    pub const fn origin() -> Self {
        Point([0; D])
    }

    /// `t · e_axis`.
    pub fn on_axis(axis: usize, t: i32) -> Self {
        let mut c = [0; D];
        c[axis] = t;
        Point(c)
    }

    pub fn coords(&self) -> [i32; D] {
        self.0
    }

    pub fn l1_norm(&self) -> u32 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub fn linf_norm(&self) -> u32 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn l1_dist(&self, other: &Self) -> u32 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.abs_diff(*b))
            .sum()
    }

    pub fn linf_dist(&self, other: &Self) -> u32 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0)
    }

    pub fn shifted(&self, axis: usize, delta: i32) -> Self {
        let mut c = self.0;
        c[axis] += delta;
        Point(c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Point(c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(other.0.iter()) {
            *a -= *b;
        }
        Point(c)
    }

    pub fn is_adjacent(&self, other: &Self) -> bool {
        self.l1_dist(other) == 1
    }

    /// The `2D` nearest neighbours, in lexicographic order.
    pub fn neighbors(&self) -> impl Iterator<Item = Point<D>> {
        // For each axis the `-1` neighbour sorts before the point and the
        // `+1` neighbour after it; earlier axes dominate the order.
        let p = *self;
        let lower = (0..D).map(move |a| p.shifted(a, -1));
        let upper = (0..D).rev().map(move |a| p.shifted(a, 1));
        lower.chain(upper)
    }
}

/// A nearest-neighbour edge written `e = (x_e, y_e)` with `‖x_e‖₁ < ‖y_e‖₁`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge<const D: usize> {
    x: Point<D>,
    y: Point<D>,
}

impl<const D: usize> fmt::Display for Edge<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.x, self.y)
    }
}

impl<const D: usize> Edge<D> {
    pub fn canonicalize(a: Point<D>, b: Point<D>) -> Result<Self> {
        if !a.is_adjacent(&b) {
            return Err(Error::NotAdjacent(format!("{a} and {b}")));
        }
        // ℓ1 norms of neighbours differ by exactly one.
        if a.l1_norm() < b.l1_norm() {
            Ok(Edge { x: a, y: b })
        } else {
            Ok(Edge { x: b, y: a })
        }
    }

    /// Edge from `p` to `p + e_axis`.
    pub fn along(p: Point<D>, axis: usize) -> Self {
        Edge::canonicalize(p, p.shifted(axis, 1)).expect("unit step is adjacent")
    }

    pub fn x(&self) -> Point<D> {
        self.x
    }

    pub fn y(&self) -> Point<D> {
        self.y
    }

    /// The endpoint with the smaller coordinate along the edge axis.
    pub fn low(&self) -> Point<D> {
        self.x.min(self.y)
    }

    pub fn high(&self) -> Point<D> {
        self.x.max(self.y)
    }

    pub fn axis(&self) -> usize {
        (0..D)
            .find(|&a| self.x.0[a] != self.y.0[a])
            .expect("edge endpoints differ")
    }

    pub fn has_endpoint(&self, p: &Point<D>) -> bool {
        self.x == *p || self.y == *p
    }

    pub fn other(&self, p: &Point<D>) -> Option<Point<D>> {
        if self.x == *p {
            Some(self.y)
        } else if self.y == *p {
            Some(self.x)
        } else {
            None
        }
    }
}

/// An axis-aligned box `[lo, hi]` (inclusive) of lattice sites.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Cuboid<const D: usize> {
    lo: Point<D>,
    hi: Point<D>,
}

impl<const D: usize> Cuboid<D> {
    pub fn new(lo: Point<D>, hi: Point<D>) -> Self {
        assert!(
            lo.0.iter().zip(hi.0.iter()).all(|(a, b)| a <= b),
            "empty cuboid {lo}..{hi}"
        );
        Cuboid { lo, hi }
    }

    pub fn lo(&self) -> Point<D> {
        self.lo
    }

    pub fn hi(&self) -> Point<D> {
        self.hi
    }

    pub fn side(&self, axis: usize) -> usize {
        (self.hi.0[axis] - self.lo.0[axis]) as usize + 1
    }

    pub fn vertex_count(&self) -> usize {
        (0..D).map(|a| self.side(a)).product()
    }

    pub fn contains(&self, p: &Point<D>) -> bool {
        (0..D).all(|a| self.lo.0[a] <= p.0[a] && p.0[a] <= self.hi.0[a])
    }

    pub fn contains_cuboid(&self, other: &Cuboid<D>) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    /// Row-major index, first coordinate most significant.
    pub fn index_of(&self, p: &Point<D>) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let mut idx = 0usize;
        for a in 0..D {
            idx = idx * self.side(a) + (p.0[a] - self.lo.0[a]) as usize;
        }
        Some(idx)
    }

    pub fn point_at(&self, mut idx: usize) -> Point<D> {
        let mut c = [0; D];
        for a in (0..D).rev() {
            let s = self.side(a);
            c[a] = self.lo.0[a] + (idx % s) as i32;
            idx /= s;
        }
        Point(c)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point<D>> + '_ {
        (0..self.vertex_count()).map(move |i| self.point_at(i))
    }

    /// Number of edges with both endpoints in the cuboid.
    pub fn edge_count(&self) -> usize {
        (0..D)
            .map(|axis| {
                (0..D)
                    .map(|a| if a == axis { self.side(a) - 1 } else { self.side(a) })
                    .product::<usize>()
            })
            .sum()
    }

    /// Dense edge index: row-major over the low endpoint, then axis.
    pub fn edge_index(&self, e: &Edge<D>) -> Option<usize> {
        let low = e.low();
        let high = e.high();
        if !self.contains(&high) {
            return None;
        }
        self.index_of(&low).map(|i| i * D + e.axis())
    }

    /// Inverse of [`Cuboid::edge_index`] over the full index range `0..vertex_count()*D`;
    /// slots whose far endpoint leaves the cuboid return `None`.
    pub fn edge_at(&self, idx: usize) -> Option<Edge<D>> {
        let low = self.point_at(idx / D);
        let axis = idx % D;
        let high = low.shifted(axis, 1);
        self.contains(&high).then(|| Edge::along(low, axis))
    }

    /// All edges inside the cuboid, ordered by dense index.
    pub fn edges(&self) -> impl Iterator<Item = Edge<D>> + '_ {
        (0..self.vertex_count() * D).filter_map(move |i| self.edge_at(i))
    }

    /// Whether `p` lies on the low (`upper == false`) or high face normal to `axis`.
    pub fn on_face(&self, p: &Point<D>, axis: usize, upper: bool) -> bool {
        if upper {
            p.0[axis] == self.hi.0[axis]
        } else {
            p.0[axis] == self.lo.0[axis]
        }
    }

    pub fn linf_radius_span(&self) -> u32 {
        (0..D).map(|a| (self.side(a) - 1) as u32).max().unwrap_or(0)
    }
}

/// `Λ_t(x) = x + [-t, t]^d`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct BoxRegion<const D: usize> {
    pub center: Point<D>,
    pub radius: u32,
}

impl<const D: usize> BoxRegion<D> {
    pub fn new(center: Point<D>, radius: u32) -> Self {
        BoxRegion { center, radius }
    }

    pub fn cuboid(&self) -> Cuboid<D> {
        let r = self.radius as i32;
        let mut lo = self.center.0;
        let mut hi = self.center.0;
        for a in 0..D {
            lo[a] -= r;
            hi[a] += r;
        }
        Cuboid::new(Point(lo), Point(hi))
    }

    pub fn contains(&self, p: &Point<D>) -> bool {
        p.linf_dist(&self.center) <= self.radius
    }

    /// `∂Λ_t = Λ_t \ Λ_{t-1}`; for `t = 0` the whole box.
    pub fn on_boundary(&self, p: &Point<D>) -> bool {
        p.linf_dist(&self.center) == self.radius
    }

    pub fn vertex_count(&self) -> usize {
        (2 * self.radius as usize + 1).pow(D as u32)
    }

    pub fn vertices(&self) -> Vec<Point<D>> {
        self.cuboid().vertices().collect()
    }

    pub fn boundary(&self) -> Vec<Point<D>> {
        self.cuboid()
            .vertices()
            .filter(|p| self.on_boundary(p))
            .collect()
    }

    pub fn contains_box(&self, other: &BoxRegion<D>) -> bool {
        other.center.linf_dist(&self.center) + other.radius <= self.radius
    }
}

/// `A_N(e) = Λ_{3N}(x_e) \ Λ_N(x_e)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct AnnulusRegion<const D: usize> {
    pub edge: Edge<D>,
    pub inner: u32,
}

impl<const D: usize> AnnulusRegion<D> {
    pub fn new(edge: Edge<D>, inner: u32) -> Self {
        assert!(inner > 0, "annulus needs a positive inner radius");
        AnnulusRegion { edge, inner }
    }

    pub fn center(&self) -> Point<D> {
        self.edge.x()
    }

    pub fn outer(&self) -> u32 {
        3 * self.inner
    }

    pub fn outer_box(&self) -> BoxRegion<D> {
        BoxRegion::new(self.center(), self.outer())
    }

    pub fn inner_box(&self) -> BoxRegion<D> {
        BoxRegion::new(self.center(), self.inner)
    }

    fn level(&self, p: &Point<D>) -> u32 {
        p.linf_dist(&self.center())
    }

    /// Membership in `A_N(e)` proper: `N < ‖p - x_e‖∞ ≤ 3N`.
    pub fn contains(&self, p: &Point<D>) -> bool {
        let r = self.level(p);
        self.inner < r && r <= self.outer()
    }

    /// Membership in the closed annulus `Λ_{3N} \ Λ_{N-1}`, which adds the
    /// inner shell `∂Λ_N` where crossing paths start.
    pub fn contains_closed(&self, p: &Point<D>) -> bool {
        let r = self.level(p);
        self.inner <= r && r <= self.outer()
    }

    pub fn on_inner_shell(&self, p: &Point<D>) -> bool {
        self.level(p) == self.inner
    }

    pub fn on_outer_shell(&self, p: &Point<D>) -> bool {
        self.level(p) == self.outer()
    }

    /// Strictly between the two shells.
    pub fn in_interior(&self, p: &Point<D>) -> bool {
        let r = self.level(p);
        self.inner < r && r < self.outer()
    }

    pub fn vertices(&self) -> Vec<Point<D>> {
        self.outer_box()
            .cuboid()
            .vertices()
            .filter(|p| self.contains(p))
            .collect()
    }
}

/// Anything that can list its vertices in lexicographic order.
pub trait Region<const D: usize> {
    fn region_vertices(&self) -> Vec<Point<D>>;
}

impl<const D: usize> Region<D> for BoxRegion<D> {
    fn region_vertices(&self) -> Vec<Point<D>> {
        self.vertices()
    }
}

impl<const D: usize> Region<D> for AnnulusRegion<D> {
    fn region_vertices(&self) -> Vec<Point<D>> {
        self.vertices()
    }
}

pub fn region_vertices<const D: usize, R: Region<D>>(r: &R) -> Vec<Point<D>> {
    r.region_vertices()
}

/// A finite vertex set used to confine paths: membership plus a bounding box.
pub trait Domain<const D: usize> {
    fn contains(&self, p: &Point<D>) -> bool;
    fn bounds(&self) -> Cuboid<D>;
}

impl<const D: usize> Domain<D> for Cuboid<D> {
    fn contains(&self, p: &Point<D>) -> bool {
        Cuboid::contains(self, p)
    }
    fn bounds(&self) -> Cuboid<D> {
        *self
    }
}

impl<const D: usize> Domain<D> for BoxRegion<D> {
    fn contains(&self, p: &Point<D>) -> bool {
        BoxRegion::contains(self, p)
    }
    fn bounds(&self) -> Cuboid<D> {
        self.cuboid()
    }
}

impl<const D: usize, T: Domain<D> + ?Sized> Domain<D> for &T {
    fn contains(&self, p: &Point<D>) -> bool {
        (**self).contains(p)
    }
    fn bounds(&self) -> Cuboid<D> {
        (**self).bounds()
    }
}

/// The closed annulus `Λ_{3N}(e) \ Λ_{N-1}(e)`: `A_N(e)` plus the inner shell.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ClosedAnnulus<const D: usize>(pub AnnulusRegion<D>);

impl<const D: usize> Domain<D> for ClosedAnnulus<D> {
    fn contains(&self, p: &Point<D>) -> bool {
        self.0.contains_closed(p)
    }
    fn bounds(&self) -> Cuboid<D> {
        self.0.outer_box().cuboid()
    }
}

/// A cuboid with an explicit membership mask over its dense indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MaskedDomain<const D: usize> {
    cuboid: Cuboid<D>,
    mask: Vec<bool>,
}

impl<const D: usize> MaskedDomain<D> {
    pub fn from_fn(cuboid: Cuboid<D>, mut keep: impl FnMut(&Point<D>) -> bool) -> Self {
        let mask = cuboid.vertices().map(|p| keep(&p)).collect();
        MaskedDomain { cuboid, mask }
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|m| *m)
    }
}

impl<const D: usize> Domain<D> for MaskedDomain<D> {
    fn contains(&self, p: &Point<D>) -> bool {
        self.cuboid.index_of(p).is_some_and(|i| self.mask[i])
    }
    fn bounds(&self) -> Cuboid<D> {
        self.cuboid
    }
}

/// Checks that `path` is a non-empty self-avoiding nearest-neighbour path.
pub fn validate_path<const D: usize>(path: &[Point<D>]) -> Result<()> {
    if path.is_empty() {
        return Err(Error::EmptySet);
    }
    for w in path.windows(2) {
        if !w[0].is_adjacent(&w[1]) {
            return Err(Error::InvalidPath(format!("step {}→{} is not a unit step", w[0], w[1])));
        }
    }
    let mut sorted: Vec<Point<D>> = path.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidPath(format!("vertex {} repeats", w[0])));
    }
    Ok(())
}

/// Edges traversed by a vertex path.
pub fn path_edges<const D: usize>(path: &[Point<D>]) -> Result<Vec<Edge<D>>> {
    path.windows(2)
        .map(|w| Edge::canonicalize(w[0], w[1]))
        .collect()
}

/// Whether `path` crosses the annulus: all vertices in the closed annulus,
/// one endpoint on `∂Λ_N(e)` and the other on `∂Λ_{3N}(e)`.
pub fn is_crossing_path<const D: usize>(path: &[Point<D>], a: &AnnulusRegion<D>) -> Result<bool> {
    validate_path(path)?;
    if !path.iter().all(|p| a.contains_closed(p)) {
        return Ok(false);
    }
    let first = path[0];
    let last = path[path.len() - 1];
    Ok((a.on_inner_shell(&first) && a.on_outer_shell(&last))
        || (a.on_outer_shell(&first) && a.on_inner_shell(&last)))
}

/// `max_{u,v} ‖u - v‖∞`, computed per axis.
pub fn linf_diameter<const D: usize>(vertices: &[Point<D>]) -> Result<u32> {
    let first = vertices.first().ok_or(Error::EmptySet)?;
    let mut lo = first.0;
    let mut hi = first.0;
    for p in vertices {
        for a in 0..D {
            lo[a] = lo[a].min(p.0[a]);
            hi[a] = hi[a].max(p.0[a]);
        }
    }
    Ok((0..D).map(|a| hi[a].abs_diff(lo[a])).max().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    type P2 = Point<2>;

    #[test]
    fn canonicalize_orders_by_l1_norm() {
        let e = Edge::canonicalize(P2::origin(), Point([1, 0])).unwrap();
        assert_eq!((e.x(), e.y()), (Point([0, 0]), Point([1, 0])));
        let e = Edge::canonicalize(Point([1, 0]), P2::origin()).unwrap();
        assert_eq!((e.x(), e.y()), (Point([0, 0]), Point([1, 0])));
        let e = Edge::canonicalize(Point([-1, 0]), Point([-2, 0])).unwrap();
        assert_eq!((e.x(), e.y()), (Point([-1, 0]), Point([-2, 0])));
    }

    #[test]
    fn canonicalize_rejects_non_adjacent() {
        assert!(matches!(
            Edge::canonicalize(P2::origin(), Point([1, 1])),
            Err(Error::NotAdjacent(_))
        ));
        assert!(Edge::canonicalize(P2::origin(), P2::origin()).is_err());
    }

    #[test]
    fn region_vertex_counts() {
        let b = BoxRegion::new(P2::origin(), 1);
        assert_eq!(region_vertices(&b).len(), 9);
        let b0 = BoxRegion::new(Point([4, -2]), 0);
        assert_eq!(region_vertices(&b0), vec![Point([4, -2])]);
        let e = Edge::along(P2::origin(), 0);
        let a = AnnulusRegion::new(e, 1);
        assert_eq!(region_vertices(&a).len(), 40);
        let vs = region_vertices(&a);
        assert!(vs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn neighbors_are_lexicographic() {
        let p = Point([2, 5, -1]);
        let ns: Vec<_> = p.neighbors().collect();
        assert_eq!(ns.len(), 6);
        assert!(ns.windows(2).all(|w| w[0] < w[1]));
        assert!(ns.iter().all(|q| q.is_adjacent(&p)));
    }

    #[test]
    fn crossing_paths() {
        let n = 3;
        let e = Edge::along(P2::origin(), 0);
        let a = AnnulusRegion::new(e, n);
        let radial: Vec<P2> = (n as i32..=3 * n as i32).map(|x| Point([x, 0])).collect();
        assert!(is_crossing_path(&radial, &a).unwrap());
        let mut reversed = radial.clone();
        reversed.reverse();
        assert!(is_crossing_path(&reversed, &a).unwrap());

        let inside: Vec<P2> = (0..n as i32).map(|x| Point([x, 0])).collect();
        assert!(!is_crossing_path(&inside, &a).unwrap());

        // Touches both shells but leaves Λ_{3N} on the way: 7 vertices with N = 1.
        let a1 = AnnulusRegion::new(e, 1);
        let excursion: Vec<P2> = vec![
            Point([1, 1]),
            Point([2, 1]),
            Point([3, 1]),
            Point([4, 1]),
            Point([4, 2]),
            Point([3, 2]),
            Point([3, 3]),
        ];
        // Oracle: the path leaves the closed annulus iff some vertex has ℓ∞ level > 3.
        let leaves = excursion.iter().any(|p| p.linf_norm() > 3 || p.linf_norm() < 1);
        assert!(leaves);
        assert!(!is_crossing_path(&excursion, &a1).unwrap());
    }

    #[test]
    fn crossing_rejects_structural_errors() {
        let a = AnnulusRegion::new(Edge::along(P2::origin(), 0), 1);
        let gap = vec![Point([1, 0]), Point([3, 0])];
        assert!(matches!(is_crossing_path(&gap, &a), Err(Error::InvalidPath(_))));
        let repeat = vec![Point([1, 0]), Point([2, 0]), Point([1, 0])];
        assert!(matches!(is_crossing_path(&repeat, &a), Err(Error::InvalidPath(_))));
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(linf_diameter(&[P2::origin()]).unwrap(), 0);
        assert_eq!(linf_diameter(&[P2::origin(), Point([3, 1])]).unwrap(), 3);
        assert_eq!(linf_diameter::<2>(&[]), Err(Error::EmptySet));
        let mut stair = vec![P2::origin()];
        for i in 0..8 {
            stair.push(Point([i + 1, i]));
            stair.push(Point([i + 1, i + 1]));
        }
        assert_eq!(stair.len(), 17);
        let brute = stair
            .iter()
            .flat_map(|u| stair.iter().map(move |v| u.linf_dist(v)))
            .max()
            .unwrap();
        assert_eq!(brute, 8);
        assert_eq!(linf_diameter(&stair).unwrap(), brute);
    }

    #[test]
    fn box_edge_count_formula() {
        for t in 1..6u32 {
            let c2 = BoxRegion::new(Point::<2>::origin(), t).cuboid();
            let s = (2 * t + 1) as usize;
            assert_eq!(c2.edge_count(), 2 * s * (s - 1));
            assert_eq!(c2.edges().count(), c2.edge_count());
            let c3 = BoxRegion::new(Point::<3>::origin(), t).cuboid();
            assert_eq!(c3.edge_count(), 3 * s * s * (s - 1));
            assert_eq!(c3.edges().count(), c3.edge_count());
        }
    }

    #[test]
    fn boundary_partitions_box() {
        for t in 1..5u32 {
            let outer = BoxRegion::new(Point([1, -2]), t);
            let inner = BoxRegion::new(Point([1, -2]), t - 1);
            let shell = outer.boundary();
            for p in outer.vertices() {
                assert!(shell.contains(&p) ^ inner.contains(&p));
            }
            assert_eq!(shell.len() + inner.vertex_count(), outer.vertex_count());
        }
    }

    proptest! {
        #[test]
        fn edge_norms_differ_by_one(x in -50i32..50, y in -50i32..50, z in -50i32..50, axis in 0usize..3, sign in proptest::bool::ANY) {
            let p = Point([x, y, z]);
            let q = p.shifted(axis, if sign { 1 } else { -1 });
            let e = Edge::canonicalize(p, q).unwrap();
            prop_assert_eq!(e.y().l1_norm(), e.x().l1_norm() + 1);
            prop_assert_eq!(Edge::canonicalize(q, p).unwrap(), e);
        }

        #[test]
        fn cuboid_index_roundtrip(x in -9i32..9, y in -9i32..9) {
            let c = BoxRegion::new(Point([0, 0]), 9).cuboid();
            let p = Point([x, y]);
            let i = c.index_of(&p).unwrap();
            prop_assert_eq!(c.point_at(i), p);
            let e = Edge::along(p, 1);
            if let Some(j) = c.edge_index(&e) {
                prop_assert_eq!(c.edge_at(j), Some(e));
            }
        }
    }
}
