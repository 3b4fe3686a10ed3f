//! The q-good-box certificate on `Λ_{3N}(e)`.
//!
//! (i) a q-crossing cluster `C` of the box holds a crossing cluster of every
//! sub-box with side `N_ρ`; (ii) nearby pairs in the middle of the annulus
//! have short chemical distance realized inside the annulus; (iii) every
//! geodesic segment of diameter at least `N_ρ` inside the box meets `C`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::environment::CoupledEnvironment;
use crate::error::{Error, Result};
use crate::lattice::{AnnulusRegion, BoxRegion, Cuboid, Domain, Edge, Point};
use crate::passage::{approx_eq, distance_field_covering, Field, WeightView};
use crate::percolation::{chemical_field_by, label_clusters_by, ClusterLabeling};

use super::RadiusParams;

/// Outcome of the three checks at one scale. `None` marks a check that was
/// not run.
#[derive(Clone, Debug, PartialEq)]
pub struct GoodBoxReport<const D: usize> {
    pub n: u32,
    pub n_rho: u32,
    pub crossing: Option<bool>,
    pub local_distances: Option<bool>,
    pub geodesics_meet: Option<bool>,
    /// Lower corner of the first sub-box without a crossing sub-cluster of `C`,
    /// or `None` with `crossing == Some(false)` when `Λ_{3N}` has no crossing cluster.
    pub sub_box: Option<Point<D>>,
    /// A pair violating (ii).
    pub far_pair: Option<(Point<D>, Point<D>)>,
    /// Endpoints of a geodesic segment that avoids `C`.
    pub avoiding: Option<(Point<D>, Point<D>)>,
}

impl<const D: usize> GoodBoxReport<D> {
    pub fn is_good(&self) -> bool {
        self.crossing == Some(true) && self.local_distances == Some(true) && self.geodesics_meet == Some(true)
    }
}

/// `Λ_L(x)`, optionally intersected with the proper annulus.
struct Patch<const D: usize> {
    bx: BoxRegion<D>,
    ann: Option<AnnulusRegion<D>>,
}

impl<const D: usize> Domain<D> for Patch<D> {
    fn contains(&self, p: &Point<D>) -> bool {
        self.bx.contains(p) && self.ann.is_none_or(|a| a.contains(p))
    }
    fn bounds(&self) -> Cuboid<D> {
        self.bx.cuboid()
    }
}

pub fn good_box_check<const D: usize>(
    env: &CoupledEnvironment<D>,
    e: &Edge<D>,
    n: u32,
    params: &RadiusParams,
    short_circuit: bool,
) -> Result<GoodBoxReport<D>> {
    let n_rho = params.n_rho(n);
    if n_rho < 1 {
        return Err(Error::Precondition(alloc::format!("N_ρ = 0 at N = {n}")));
    }
    let reach = params.reach(n);
    let big = BoxRegion::new(e.x(), reach);
    if !env.window().contains_box(&big) {
        let win = env.window();
        let actual = win.radius.saturating_sub(win.center.linf_dist(&e.x()));
        return Err(Error::WindowTooSmall { required: reach, actual });
    }
    let q = params.openness();
    let is_open = |x: &Edge<D>| q.is_open(env, x);
    let ann = AnnulusRegion::new(*e, n);
    let outer = ann.outer_box().cuboid();
    let labels = label_clusters_by(&outer, q, is_open);

    let mut report = GoodBoxReport {
        n,
        n_rho,
        crossing: None,
        local_distances: None,
        geodesics_meet: None,
        sub_box: None,
        far_pair: None,
        avoiding: None,
    };

    let candidates = labels.crossing_report().crossing;
    let mut cluster = None;
    for &c in &candidates {
        match uncovered_sub_box(&labels, c, n_rho, &is_open) {
            None => {
                cluster = Some(c);
                break;
            }
            Some(corner) => {
                if report.sub_box.is_none() {
                    report.sub_box = Some(corner);
                }
            }
        }
    }
    report.crossing = Some(cluster.is_some());
    if cluster.is_some() {
        report.sub_box = None;
    } else if short_circuit {
        return Ok(report);
    }

    let far = local_distance_violation(&ann, n, n_rho, params, &is_open, &big)?;
    report.local_distances = Some(far.is_none());
    report.far_pair = far;
    if short_circuit && far.is_some() {
        return Ok(report);
    }

    if let Some(c) = cluster {
        let view = WeightView::new(env, params.p, Some(params.h), big.cuboid())?;
        let avoid = avoiding_segment(&labels, c, n_rho, &view)?;
        report.geodesics_meet = Some(avoid.is_none());
        report.avoiding = avoid;
    }
    Ok(report)
}

/// First sub-box (by lower corner) none of whose crossing clusters lies in `c`.
fn uncovered_sub_box<const D: usize>(
    labels: &ClusterLabeling<D>,
    c: u32,
    side: u32,
    is_open: &impl Fn(&Edge<D>) -> bool,
) -> Option<Point<D>> {
    let outer = *labels.window();
    let mut hi = outer.hi();
    for a in 0..D {
        hi.0[a] -= side as i32;
    }
    let corners = Cuboid::new(outer.lo(), hi);
    for lo in corners.vertices() {
        let mut top = lo;
        for a in 0..D {
            top.0[a] += side as i32;
        }
        let sub = Cuboid::new(lo, top);
        let local = label_clusters_by(&sub, labels.openness(), is_open);
        let covered = local
            .crossing_report()
            .crossing
            .iter()
            .any(|&id| labels.cluster_of(&sub.point_at(id as usize)) == Some(c));
        if !covered {
            return Some(lo);
        }
    }
    None
}

/// Checks (ii). Any q-open path of at most `L = 4ρN_ρ` edges from `x` stays
/// in `Λ_L(x)`, so two bounded searches there decide `D_q(x, y) ≤ L` and
/// `D_q^{A_N}(x, y) = D_q(x, y)` exactly. Finiteness of `D_q` is read off
/// the labeling of `Λ_{C*N}`.
fn local_distance_violation<const D: usize>(
    ann: &AnnulusRegion<D>,
    n: u32,
    n_rho: u32,
    params: &RadiusParams,
    is_open: &impl Fn(&Edge<D>) -> bool,
    big: &BoxRegion<D>,
) -> Result<Option<(Point<D>, Point<D>)>> {
    let limit = 4 * params.rho * n_rho;
    let span = 2 * n_rho;
    // d∞ to ∂A_N at least N/2, with ∂A_N the levels N + 1 and 3N.
    let lo_level = (3 * n + 2).div_ceil(2);
    let hi_level = (5 * n) / 2;
    let center = ann.center();
    let in_ring = |p: &Point<D>| {
        let r = p.linf_dist(&center);
        lo_level <= r && r <= hi_level
    };
    let wide = label_clusters_by(&big.cuboid(), params.openness(), is_open);
    let ring_box = BoxRegion::new(center, hi_level).cuboid();
    for x in ring_box.vertices().filter(|p| in_ring(p)) {
        let pairs: Vec<Point<D>> = BoxRegion::new(x, span)
            .cuboid()
            .vertices()
            .filter(|y| *y > x && in_ring(y) && wide.same_cluster(&x, y))
            .collect();
        if pairs.is_empty() {
            continue;
        }
        let free = Patch { bx: BoxRegion::new(x, limit), ann: None };
        let inside = Patch { bx: BoxRegion::new(x, limit), ann: Some(*ann) };
        let src = core::slice::from_ref(&x);
        let df = chemical_field_by(&free, is_open, src, Some(limit))?;
        let da = chemical_field_by(&inside, is_open, src, Some(limit))?;
        let bounds = free.bounds();
        for y in pairs {
            let i = bounds.index_of(&y).expect("pair within patch");
            if df[i] == u32::MAX || da[i] != df[i] {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

/// Checks (iii) for cluster `c`. A geodesic segment of diameter at least `N_ρ`
/// avoiding `c` contains a sub-segment between two vertices at `ℓ∞` distance
/// at least `N_ρ`, so it suffices to search the geodesic DAG from each `u`
/// inside its component of `Λ_{3N} \ C`.
fn avoiding_segment<const D: usize>(
    labels: &ClusterLabeling<D>,
    c: u32,
    n_rho: u32,
    view: &WeightView<'_, D>,
) -> Result<Option<(Point<D>, Point<D>)>> {
    let outer = *labels.window();
    let count = outer.vertex_count();
    let free: Vec<bool> = (0..count).map(|i| labels.cluster_of(&outer.point_at(i)) != Some(c)).collect();
    let mut comp = vec![u32::MAX; count];
    let mut next = 0u32;
    for start in 0..count {
        if !free[start] || comp[start] != u32::MAX {
            continue;
        }
        let mut members = vec![start];
        comp[start] = next;
        let mut head = 0;
        while head < members.len() {
            let p = outer.point_at(members[head]);
            head += 1;
            for q in p.neighbors() {
                if let Some(j) = outer.index_of(&q) {
                    if free[j] && comp[j] == u32::MAX {
                        comp[j] = next;
                        members.push(j);
                    }
                }
            }
        }
        next += 1;
        let pts: Vec<Point<D>> = members.iter().map(|&i| outer.point_at(i)).collect();
        if crate::lattice::linf_diameter(&pts)? < n_rho {
            continue;
        }
        for u in &pts {
            if let Some(v) = far_descendant(u, &pts, &outer, &comp, comp[start], n_rho, view)? {
                return Ok(Some((*u, v)));
            }
        }
    }
    Ok(None)
}

fn far_descendant<const D: usize>(
    u: &Point<D>,
    component: &[Point<D>],
    outer: &Cuboid<D>,
    comp: &[u32],
    id: u32,
    n_rho: u32,
    view: &WeightView<'_, D>,
) -> Result<Option<Point<D>>> {
    if !component.iter().any(|v| v.linf_dist(u) >= n_rho) {
        return Ok(None);
    }
    let field = distance_field_covering(view, u, component)?;
    let mut seen = hashbrown::HashSet::new();
    seen.insert(*u);
    let mut queue = VecDeque::from([*u]);
    while let Some(a) = queue.pop_front() {
        if a.linf_dist(u) >= n_rho {
            return Ok(Some(a));
        }
        let da = field.distance(&a);
        for b in a.neighbors() {
            let inside = outer.index_of(&b).is_some_and(|j| comp[j] == id);
            if !inside || seen.contains(&b) {
                continue;
            }
            let w = view.weight(&Edge::canonicalize(a, b).expect("adjacent"));
            if approx_eq(da + w, field.distance(&b)) {
                seen.insert(b);
                queue.push_back(b);
            }
        }
    }
    Ok(None)
}
