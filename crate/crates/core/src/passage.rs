//! Passage times `T_H^A`, canonical geodesics and the regularized time `T̃`.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashMap;

use crate::environment::CoupledEnvironment;
use crate::error::{Error, Result};
use crate::lattice::{validate_path, Cuboid, Domain, Edge, Point};
use crate::percolation::{label_clusters, Openness};

/// Relative tolerance for comparing accumulated passage times.
pub const GEODESIC_TOLERANCE: f64 = 1e-12;

/// `|a - b| ≤ 1e-12 · max(1, |a|, |b|)`; infinities compare by identity.
#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= GEODESIC_TOLERANCE * 1f64.max(a.abs()).max(b.abs())
}

/// Weights `τ_e ∧ H` on edges with both endpoints in `region`.
#[derive(Clone, Debug)]
pub struct WeightView<'a, const D: usize, R: Domain<D> = Cuboid<D>> {
    env: &'a CoupledEnvironment<D>,
    p: f64,
    cap: f64,
    region: R,
    overrides: Vec<(Edge<D>, f64)>,
}

impl<'a, const D: usize, R: Domain<D>> WeightView<'a, D, R> {
    /// `cap = None` keeps the untruncated weights.
    pub fn new(env: &'a CoupledEnvironment<D>, p: f64, cap: Option<f64>, region: R) -> Result<Self> {
        let b = region.bounds();
        if !env.cuboid().contains_cuboid(&b) {
            return Err(Error::OutOfWindow(format!("region {}..{}", b.lo(), b.hi())));
        }
        let cap = cap.unwrap_or(f64::INFINITY);
        if !(cap > 0.0) {
            return Err(Error::Precondition(format!("truncation level {cap} must be positive")));
        }
        Ok(WeightView { env, p, cap, region, overrides: Vec::new() })
    }

    /// Replaces `τ_e` by `w` before truncation.
    pub fn with_override(mut self, e: Edge<D>, w: f64) -> Self {
        self.overrides.retain(|(x, _)| *x != e);
        self.overrides.push((e, w));
        self
    }

    pub fn env(&self) -> &'a CoupledEnvironment<D> {
        self.env
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn region(&self) -> &R {
        &self.region
    }

    pub fn contains(&self, v: &Point<D>) -> bool {
        self.region.contains(v)
    }

    #[inline]
    pub fn weight(&self, e: &Edge<D>) -> f64 {
        let raw = match self.overrides.iter().find(|(x, _)| x == e) {
            Some((_, w)) => *w,
            None => self.env.weight_unchecked(e, self.p),
        };
        raw.min(self.cap)
    }

    fn check_inside(&self, v: &Point<D>) -> Result<()> {
        if self.region.contains(v) {
            Ok(())
        } else {
            Err(Error::OutsideRegion(format!("{v}")))
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapKey<const D: usize> {
    dist: f64,
    point: Point<D>,
}

impl<const D: usize> Eq for HeapKey<D> {}

impl<const D: usize> Ord for HeapKey<D> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (distance, point).
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.point.cmp(&self.point))
    }
}

impl<const D: usize> PartialOrd for HeapKey<D> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Read access shared by dense and sparse shortest-path results.
pub trait Field<const D: usize> {
    fn source(&self) -> Point<D>;
    /// `+∞` when unreached.
    fn distance(&self, v: &Point<D>) -> f64;
    /// Position of `v` in the settling order.
    fn rank(&self, v: &Point<D>) -> Option<u32>;
}

/// Complete single-source distances over the whole region.
#[derive(Clone, Debug)]
pub struct DistanceField<const D: usize> {
    source: Point<D>,
    bounds: Cuboid<D>,
    dist: Vec<f64>,
    rank: Vec<u32>,
}

impl<const D: usize> DistanceField<D> {
    pub fn bounds(&self) -> &Cuboid<D> {
        &self.bounds
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }
}

impl<const D: usize> Field<D> for DistanceField<D> {
    fn source(&self) -> Point<D> {
        self.source
    }
    fn distance(&self, v: &Point<D>) -> f64 {
        self.bounds.index_of(v).map_or(f64::INFINITY, |i| self.dist[i])
    }
    fn rank(&self, v: &Point<D>) -> Option<u32> {
        self.bounds
            .index_of(v)
            .and_then(|i| (self.rank[i] != u32::MAX).then_some(self.rank[i]))
    }
}

/// Distances of vertices settled before an early stop; hash-backed so the
/// region may be far larger than the explored ball.
#[derive(Clone, Debug)]
pub struct SparseField<const D: usize> {
    source: Point<D>,
    settled: HashMap<Point<D>, (f64, u32)>,
}

impl<const D: usize> SparseField<D> {
    pub fn settled_count(&self) -> usize {
        self.settled.len()
    }
}

impl<const D: usize> Field<D> for SparseField<D> {
    fn source(&self) -> Point<D> {
        self.source
    }
    fn distance(&self, v: &Point<D>) -> f64 {
        self.settled.get(v).map_or(f64::INFINITY, |x| x.0)
    }
    fn rank(&self, v: &Point<D>) -> Option<u32> {
        self.settled.get(v).map(|x| x.1)
    }
}

/// Dijkstra from `source` over the entire region.
pub fn distance_field<const D: usize, R: Domain<D>>(
    view: &WeightView<'_, D, R>,
    source: &Point<D>,
) -> Result<DistanceField<D>> {
    view.check_inside(source)?;
    let bounds = view.region.bounds();
    let n = bounds.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut rank = vec![u32::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[bounds.index_of(source).expect("inside")] = 0.0;
    heap.push(HeapKey { dist: 0.0, point: *source });
    let mut next = 0u32;
    while let Some(HeapKey { dist: d, point: v }) = heap.pop() {
        let i = bounds.index_of(&v).expect("inside");
        if rank[i] != u32::MAX || d > dist[i] {
            continue;
        }
        rank[i] = next;
        next += 1;
        for u in v.neighbors() {
            if !view.region.contains(&u) {
                continue;
            }
            let j = bounds.index_of(&u).expect("region lies in bounds");
            if rank[j] != u32::MAX {
                continue;
            }
            let w = view.weight(&Edge::canonicalize(v, u).expect("adjacent"));
            let nd = d + w;
            if nd < dist[j] {
                dist[j] = nd;
                heap.push(HeapKey { dist: nd, point: u });
            }
        }
    }
    Ok(DistanceField { source: *source, bounds, dist, rank })
}

/// Dijkstra from `source` that stops once `target` is settled.
pub fn distance_field_until<const D: usize, R: Domain<D>>(
    view: &WeightView<'_, D, R>,
    source: &Point<D>,
    target: &Point<D>,
) -> Result<SparseField<D>> {
    distance_field_covering(view, source, core::slice::from_ref(target))
}

/// Dijkstra from `source` that stops once every vertex of `targets` is settled.
pub fn distance_field_covering<const D: usize, R: Domain<D>>(
    view: &WeightView<'_, D, R>,
    source: &Point<D>,
    targets: &[Point<D>],
) -> Result<SparseField<D>> {
    view.check_inside(source)?;
    let mut pending: hashbrown::HashSet<Point<D>> = hashbrown::HashSet::new();
    for t in targets {
        view.check_inside(t)?;
        pending.insert(*t);
    }
    let mut tentative: HashMap<Point<D>, f64> = HashMap::new();
    let mut settled: HashMap<Point<D>, (f64, u32)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    tentative.insert(*source, 0.0);
    heap.push(HeapKey { dist: 0.0, point: *source });
    let mut next = 0u32;
    while let Some(HeapKey { dist: d, point: v }) = heap.pop() {
        if settled.contains_key(&v) || d > tentative[&v] {
            continue;
        }
        settled.insert(v, (d, next));
        next += 1;
        pending.remove(&v);
        if pending.is_empty() {
            break;
        }
        for u in v.neighbors() {
            if !view.region.contains(&u) || settled.contains_key(&u) {
                continue;
            }
            let nd = d + view.weight(&Edge::canonicalize(v, u).expect("adjacent"));
            let slot = tentative.entry(u).or_insert(f64::INFINITY);
            if nd < *slot {
                *slot = nd;
                heap.push(HeapKey { dist: nd, point: u });
            }
        }
    }
    Ok(SparseField { source: *source, settled })
}

/// `T_H^A(x, y)`.
pub fn passage_time<const D: usize, R: Domain<D>>(
    view: &WeightView<'_, D, R>,
    x: &Point<D>,
    y: &Point<D>,
) -> Result<f64> {
    Ok(distance_field_until(view, x, y)?.distance(y))
}

/// A canonical geodesic and its passage time.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPath<const D: usize> {
    pub vertices: Vec<Point<D>>,
    pub weight: f64,
}

impl<const D: usize> GeodesicPath<D> {
    pub fn edges(&self) -> Vec<Edge<D>> {
        self.vertices
            .windows(2)
            .map(|w| Edge::canonicalize(w[0], w[1]).expect("geodesic steps are adjacent"))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Walks predecessors back from `target`. At each vertex the predecessor is
/// the lexicographically smallest neighbour settled earlier whose distance
/// plus edge weight reproduces the vertex distance.
pub fn extract_geodesic<const D: usize, R: Domain<D>, F: Field<D>>(
    field: &F,
    view: &WeightView<'_, D, R>,
    target: &Point<D>,
) -> Result<GeodesicPath<D>> {
    let total = field.distance(target);
    if !total.is_finite() {
        return Err(Error::NoPath(format!("{target}")));
    }
    let mut path = vec![*target];
    let mut v = *target;
    while v != field.source() {
        let rv = field.rank(&v).expect("finite distance implies settled");
        let dv = field.distance(&v);
        let pred = v.neighbors().find(|u| {
            view.region.contains(u)
                && field.rank(u).is_some_and(|ru| ru < rv)
                && approx_eq(field.distance(u) + view.weight(&Edge::canonicalize(*u, v).expect("adjacent")), dv)
        });
        v = pred.ok_or_else(|| Error::NoPath(format!("predecessor chain broken at {v}")))?;
        path.push(v);
    }
    path.reverse();
    Ok(GeodesicPath { vertices: path, weight: total })
}

/// `T_H(π)`: sum of view weights along a path.
pub fn path_weight<const D: usize, R: Domain<D>>(path: &[Point<D>], view: &WeightView<'_, D, R>) -> Result<f64> {
    validate_path(path)?;
    for v in path {
        view.check_inside(v)?;
    }
    Ok(path
        .windows(2)
        .map(|w| view.weight(&Edge::canonicalize(w[0], w[1]).expect("validated")))
        .sum())
}

/// Whether `π` attains `T_H^A` between its endpoints.
pub fn is_geodesic<const D: usize, R: Domain<D>>(path: &[Point<D>], view: &WeightView<'_, D, R>) -> Result<bool> {
    let w = path_weight(path, view)?;
    let t = passage_time(view, &path[0], &path[path.len() - 1])?;
    Ok(approx_eq(w, t))
}

/// `T̃(x, y) = T([x]_p, [y]_p)` with the proxy cluster of the p-open labeling of `window`.
pub fn regularized_time<const D: usize>(
    env: &CoupledEnvironment<D>,
    p: f64,
    window: &Cuboid<D>,
    x: &Point<D>,
    y: &Point<D>,
) -> Result<RegularizedTime<D>> {
    let lab = label_clusters(env, window, Openness::P { p })?;
    let id = lab.proxy()?;
    let rx = lab.closest_in(x, id)?;
    let ry = lab.closest_in(y, id)?;
    let view = WeightView::new(env, p, None, *window)?;
    let time = passage_time(&view, &rx, &ry)?;
    if !time.is_finite() {
        return Err(Error::NoPath(format!("{ry}")));
    }
    Ok(RegularizedTime { from: rx, to: ry, time })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizedTime<const D: usize> {
    pub from: Point<D>,
    pub to: Point<D>,
    pub time: f64,
}
