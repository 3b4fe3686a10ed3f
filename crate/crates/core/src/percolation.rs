//! Open clusters, crossing clusters, `[x]` regularization and chemical distance.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::environment::CoupledEnvironment;
use crate::error::{Error, Result};
use crate::lattice::{Cuboid, Domain, Edge, Point};

/// Which edges count as open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Openness {
    /// `τ_e ≤ λ`.
    Q { p: f64, lambda: f64 },
    /// `τ_e < ∞`.
    P { p: f64 },
}

impl Openness {
    #[inline]
    pub fn is_open<const D: usize>(&self, env: &CoupledEnvironment<D>, e: &Edge<D>) -> bool {
        match *self {
            Openness::Q { p, lambda } => env.weight_unchecked(e, p) <= lambda,
            Openness::P { p } => {
                let (u, _) = env.uniforms_unchecked(e);
                u <= p
            }
        }
    }
}

/// Fraction of the window a non-crossing cluster must fill to act as the proxy.
pub const DEFAULT_PROXY_FRACTION: f64 = 0.1;

fn ensure_inside<const D: usize>(env: &CoupledEnvironment<D>, c: &Cuboid<D>) -> Result<()> {
    if env.cuboid().contains_cuboid(c) {
        Ok(())
    } else {
        Err(Error::OutOfWindow(format!("region {}..{}", c.lo(), c.hi())))
    }
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

/// Connected components of the open subgraph inside a cuboid.
///
/// Cluster ids are the dense index of the lexicographically smallest member,
/// so labelings are canonical.
#[derive(Clone, Debug)]
pub struct ClusterLabeling<const D: usize> {
    window: Cuboid<D>,
    openness: Openness,
    label: Vec<u32>,
    size: Vec<u32>,
}

/// Faces touched by each cluster, and which clusters cross in every direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingReport<const D: usize> {
    /// Some cluster joins the two faces normal to axis `a`.
    pub direction: [bool; D],
    /// Clusters crossing in all directions, ascending id.
    pub crossing: Vec<u32>,
}

impl<const D: usize> CrossingReport<D> {
    pub fn unique(&self) -> Option<u32> {
        (self.crossing.len() == 1).then(|| self.crossing[0])
    }
}

pub fn label_clusters<const D: usize>(
    env: &CoupledEnvironment<D>,
    window: &Cuboid<D>,
    openness: Openness,
) -> Result<ClusterLabeling<D>> {
    ensure_inside(env, window)?;
    Ok(label_clusters_by(window, openness, |e| openness.is_open(env, e)))
}

/// Labeling under an arbitrary edge predicate; `openness` is recorded only.
pub fn label_clusters_by<const D: usize>(
    window: &Cuboid<D>,
    openness: Openness,
    is_open: impl Fn(&Edge<D>) -> bool,
) -> ClusterLabeling<D> {
    let n = window.vertex_count();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        let p = window.point_at(i);
        for axis in 0..D {
            let q = p.shifted(axis, 1);
            if let Some(j) = window.index_of(&q) {
                if is_open(&Edge::along(p, axis)) {
                    uf.union(i as u32, j as u32);
                }
            }
        }
    }
    // Relabel by smallest member: the first index seen for each root.
    let mut canon = vec![u32::MAX; n];
    let mut label = vec![0u32; n];
    let mut size = vec![0u32; n];
    for i in 0..n {
        let r = uf.find(i as u32) as usize;
        if canon[r] == u32::MAX {
            canon[r] = i as u32;
        }
        label[i] = canon[r];
        size[canon[r] as usize] += 1;
    }
    ClusterLabeling { window: *window, openness, label, size }
}

impl<const D: usize> ClusterLabeling<D> {
    pub fn window(&self) -> &Cuboid<D> {
        &self.window
    }

    pub fn openness(&self) -> Openness {
        self.openness
    }

    pub fn cluster_of(&self, p: &Point<D>) -> Option<u32> {
        self.window.index_of(p).map(|i| self.label[i])
    }

    pub fn cluster_size(&self, id: u32) -> usize {
        self.size[id as usize] as usize
    }

    pub fn same_cluster(&self, a: &Point<D>, b: &Point<D>) -> bool {
        match (self.cluster_of(a), self.cluster_of(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    pub fn component_count(&self) -> usize {
        self.label.iter().enumerate().filter(|(i, l)| **l as usize == *i).count()
    }

    /// Ids of all clusters, ascending.
    pub fn clusters(&self) -> impl Iterator<Item = u32> + '_ {
        self.label
            .iter()
            .enumerate()
            .filter(|(i, l)| **l as usize == *i)
            .map(|(i, _)| i as u32)
    }

    pub fn members(&self, id: u32) -> impl Iterator<Item = Point<D>> + '_ {
        self.label
            .iter()
            .enumerate()
            .filter(move |(_, l)| **l == id)
            .map(move |(i, _)| self.window.point_at(i))
    }

    /// Bitmask per cluster id of touched faces: bit `2a` low face, `2a+1` high face.
    fn face_masks(&self) -> hashbrown::HashMap<u32, u32> {
        let mut masks = hashbrown::HashMap::new();
        let (lo, hi) = (self.window.lo(), self.window.hi());
        for (i, l) in self.label.iter().enumerate() {
            let p = self.window.point_at(i);
            let mut m = 0u32;
            for a in 0..D {
                if p.0[a] == lo.0[a] {
                    m |= 1 << (2 * a);
                }
                if p.0[a] == hi.0[a] {
                    m |= 1 << (2 * a + 1);
                }
            }
            if m != 0 {
                *masks.entry(*l).or_insert(0) |= m;
            }
        }
        masks
    }

    pub fn crossing_report(&self) -> CrossingReport<D> {
        let masks = self.face_masks();
        let mut direction = [false; D];
        let mut crossing = Vec::new();
        for (id, m) in masks.iter() {
            let mut all = true;
            for (a, dir) in direction.iter_mut().enumerate() {
                let both = (m >> (2 * a)) & 3 == 3;
                *dir |= both;
                all &= both;
            }
            if all {
                crossing.push(*id);
            }
        }
        crossing.sort_unstable();
        CrossingReport { direction, crossing }
    }

    /// The unique all-direction crossing cluster, else the largest cluster
    /// when it fills at least `fraction` of the window.
    pub fn infinite_cluster_proxy(&self, fraction: f64) -> Option<u32> {
        if let Some(id) = self.crossing_report().unique() {
            return Some(id);
        }
        let best = self.clusters().max_by(|a, b| {
            self.cluster_size(*a)
                .cmp(&self.cluster_size(*b))
                .then_with(|| b.cmp(a))
        })?;
        let need = fraction * self.window.vertex_count() as f64;
        (self.cluster_size(best) > 1 && self.cluster_size(best) as f64 >= need).then_some(best)
    }

    pub fn proxy(&self) -> Result<u32> {
        self.infinite_cluster_proxy(DEFAULT_PROXY_FRACTION)
            .ok_or(Error::RegularizationUnavailable)
    }

    /// `[x]`: the ℓ1-closest vertex of cluster `id`, ties broken lexicographically.
    pub fn closest_in(&self, x: &Point<D>, id: u32) -> Result<Point<D>> {
        if self.cluster_of(x) == Some(id) {
            return Ok(*x);
        }
        let (lo, hi) = (self.window.lo(), self.window.hi());
        // ℓ1 distance from x to the farthest window corner bounds the search.
        let reach: u32 = (0..D)
            .map(|a| x.0[a].abs_diff(lo.0[a]).max(x.0[a].abs_diff(hi.0[a])))
            .sum();
        for r in 1..=reach as i32 {
            let mut clo = [0i32; D];
            let mut chi = [0i32; D];
            for a in 0..D {
                clo[a] = (x.0[a] - r).max(lo.0[a]);
                chi[a] = (x.0[a] + r).min(hi.0[a]);
            }
            let shell = Cuboid::new(Point(clo), Point(chi));
            // Lexicographic scan of the ℓ1 sphere of radius r.
            let hit = shell
                .vertices()
                .filter(|v| v.l1_dist(x) == r as u32)
                .find(|v| self.cluster_of(v) == Some(id));
            if let Some(v) = hit {
                return Ok(v);
            }
        }
        Err(Error::RegularizationUnavailable)
    }

    /// `[x]` with respect to the infinite-cluster proxy.
    pub fn closest_point(&self, x: &Point<D>) -> Result<Point<D>> {
        self.closest_in(x, self.proxy()?)
    }

    /// `‖x - [x]‖∞`.
    pub fn hole_size(&self, x: &Point<D>) -> Result<u32> {
        Ok(self.closest_point(x)?.linf_dist(x))
    }
}

/// Multi-source BFS over open edges inside `region` from `a`; returns the
/// hop count to the nearest vertex of `b` together with a shortest path.
/// Sources and neighbours are visited in lexicographic order, which fixes
/// the returned path.
pub fn chemical_path<const D: usize, R: Domain<D>>(
    env: &CoupledEnvironment<D>,
    openness: Openness,
    region: &R,
    a: &[Point<D>],
    b: &[Point<D>],
) -> Result<Option<Vec<Point<D>>>> {
    ensure_inside(env, &region.bounds())?;
    chemical_path_by(region, |e| openness.is_open(env, e), a, b)
}

/// [`chemical_path`] under an arbitrary edge predicate.
pub fn chemical_path_by<const D: usize, R: Domain<D>>(
    region: &R,
    is_open: impl Fn(&Edge<D>) -> bool,
    a: &[Point<D>],
    b: &[Point<D>],
) -> Result<Option<Vec<Point<D>>>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let bounds = region.bounds();
    for p in a.iter().chain(b.iter()) {
        if !region.contains(p) {
            return Err(Error::OutsideRegion(format!("{p}")));
        }
    }
    let n = bounds.vertex_count();
    let mut target = vec![false; n];
    for p in b {
        target[bounds.index_of(p).expect("checked")] = true;
    }
    let mut pred = vec![u32::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    let mut sources: Vec<Point<D>> = a.to_vec();
    sources.sort_unstable();
    sources.dedup();
    for s in &sources {
        let i = bounds.index_of(s).expect("checked");
        if target[i] {
            return Ok(Some(vec![*s]));
        }
        seen[i] = true;
        queue.push_back(i);
    }
    while let Some(i) = queue.pop_front() {
        let p = bounds.point_at(i);
        for q in p.neighbors() {
            let Some(j) = bounds.index_of(&q) else { continue };
            if seen[j] || !region.contains(&q) {
                continue;
            }
            let e = Edge::canonicalize(p, q).expect("neighbours are adjacent");
            if !is_open(&e) {
                continue;
            }
            seen[j] = true;
            pred[j] = i as u32;
            if target[j] {
                let mut path = vec![q];
                let mut k = j;
                while pred[k] != u32::MAX {
                    k = pred[k] as usize;
                    path.push(bounds.point_at(k));
                }
                path.reverse();
                return Ok(Some(path));
            }
            queue.push_back(j);
        }
    }
    Ok(None)
}

/// `D^U(A, B)`: edge count of the shortest open path inside `region`; `None` is `∞`.
pub fn chemical_distance<const D: usize, R: Domain<D>>(
    env: &CoupledEnvironment<D>,
    openness: Openness,
    region: &R,
    a: &[Point<D>],
    b: &[Point<D>],
) -> Result<Option<u32>> {
    Ok(chemical_path(env, openness, region, a, b)?.map(|p| p.len() as u32 - 1))
}

/// Hop distances from `sources` to every vertex of `region`; `u32::MAX` is unreachable.
/// With `limit`, the search stops expanding beyond that depth.
pub fn chemical_field<const D: usize, R: Domain<D>>(
    env: &CoupledEnvironment<D>,
    openness: Openness,
    region: &R,
    sources: &[Point<D>],
    limit: Option<u32>,
) -> Result<Vec<u32>> {
    ensure_inside(env, &region.bounds())?;
    chemical_field_by(region, |e| openness.is_open(env, e), sources, limit)
}

/// [`chemical_field`] under an arbitrary edge predicate.
pub fn chemical_field_by<const D: usize, R: Domain<D>>(
    region: &R,
    is_open: impl Fn(&Edge<D>) -> bool,
    sources: &[Point<D>],
    limit: Option<u32>,
) -> Result<Vec<u32>> {
    let bounds = region.bounds();
    let mut dist = vec![u32::MAX; bounds.vertex_count()];
    let mut queue = VecDeque::new();
    for s in sources {
        if !region.contains(s) {
            return Err(Error::OutsideRegion(format!("{s}")));
        }
        let i = bounds.index_of(s).expect("region lies in its bounds");
        if dist[i] == u32::MAX {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    let limit = limit.unwrap_or(u32::MAX);
    while let Some(i) = queue.pop_front() {
        let d = dist[i];
        if d >= limit {
            continue;
        }
        let p = bounds.point_at(i);
        for q in p.neighbors() {
            let Some(j) = bounds.index_of(&q) else { continue };
            if dist[j] != u32::MAX || !region.contains(&q) {
                continue;
            }
            if is_open(&Edge::canonicalize(p, q).expect("adjacent")) {
                dist[j] = d + 1;
                queue.push_back(j);
            }
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BoxRegion;
    use crate::law::WeightLaw;

    fn env(seed: u64, r: u32) -> CoupledEnvironment<2> {
        CoupledEnvironment::new(seed, BoxRegion::new(Point::origin(), r), WeightLaw::Dirac(1.0)).unwrap()
    }

    #[test]
    fn all_open_and_all_closed() {
        let e = env(1, 5);
        let w = BoxRegion::new(Point::origin(), 3).cuboid();
        let open = label_clusters(&e, &w, Openness::P { p: 1.0 }).unwrap();
        assert_eq!(open.component_count(), 1);
        assert_eq!(open.cluster_size(open.cluster_of(&Point([0, 0])).unwrap()), 49);
        assert_eq!(open.infinite_cluster_proxy(0.1), open.cluster_of(&Point([3, 3])));
        let closed = label_clusters(&e, &w, Openness::P { p: 0.0 }).unwrap();
        assert_eq!(closed.component_count(), 49);
        assert_eq!(closed.infinite_cluster_proxy(0.1), None);
        assert_eq!(closed.closest_point(&Point::origin()), Err(Error::RegularizationUnavailable));
    }

    #[test]
    fn closest_point_tie_break() {
        let e = env(1, 4);
        let w = BoxRegion::new(Point::origin(), 3).cuboid();
        let mut lab = label_clusters(&e, &w, Openness::P { p: 0.0 }).unwrap();
        // Fake a two-vertex cluster {(0,1),(1,0)} sharing an id.
        let id = w.index_of(&Point([0, 1])).unwrap() as u32;
        let j = w.index_of(&Point([1, 0])).unwrap();
        lab.label[j] = id;
        assert_eq!(lab.closest_in(&Point::origin(), id).unwrap(), Point([0, 1]));
        assert_eq!(lab.closest_in(&Point([0, 1]), id).unwrap(), Point([0, 1]));
    }

    #[test]
    fn forced_detour() {
        let e = env(3, 4);
        let region = BoxRegion::new(Point::origin(), 2);
        let blocked = Edge::along(Point::origin(), 0);
        let path = chemical_path_by(&region, |x| *x != blocked, &[Point([0, 0])], &[Point([1, 0])])
            .unwrap()
            .unwrap();
        assert_eq!(path.len() - 1, 3);
        // Two detours of length 3; the lexicographic visit order takes the lower one.
        assert_eq!(path, alloc::vec![Point([0, 0]), Point([0, -1]), Point([1, -1]), Point([1, 0])]);
        assert_eq!(
            chemical_distance(&e, Openness::P { p: 1.0 }, &region, &[Point([0, 0])], &[Point([0, 0])]).unwrap(),
            Some(0)
        );
        assert_eq!(
            chemical_distance(&e, Openness::P { p: 1.0 }, &region, &[], &[Point([0, 0])]),
            Err(Error::EmptySet)
        );
    }

    #[test]
    fn proxy_present_at_high_density() {
        let e = env(42, 32);
        let w = BoxRegion::new(Point::origin(), 32).cuboid();
        let lab = label_clusters(&e, &w, Openness::P { p: 0.8 }).unwrap();
        let rep = lab.crossing_report();
        assert_eq!(rep.direction, [true, true]);
        let id = lab.infinite_cluster_proxy(0.1).unwrap();
        assert_eq!(rep.unique(), Some(id));
        assert!(lab.cluster_size(id) > w.vertex_count() / 2);
    }

    #[test]
    fn hole_size_examples() {
        let e = env(42, 32);
        let w = BoxRegion::new(Point::origin(), 32).cuboid();
        let lab = label_clusters(&e, &w, Openness::P { p: 0.7 }).unwrap();
        let id = lab.proxy().unwrap();
        let inside = lab.members(id).next().unwrap();
        assert_eq!(lab.hole_size(&inside).unwrap(), 0);
        for x in w.vertices().step_by(17) {
            let c = lab.closest_point(&x).unwrap();
            // Exhaustive scan oracle.
            let best = lab
                .members(id)
                .min_by(|a, b| a.l1_dist(&x).cmp(&b.l1_dist(&x)).then(a.cmp(b)))
                .unwrap();
            assert_eq!(c, best);
        }
    }
}
