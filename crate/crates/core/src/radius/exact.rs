//! Exact evaluation of `V_N(e)`: every two crossing geodesics of the annulus
//! are joined by a q-open path of at most `C*·N` edges inside it.
//!
//! Only minimal crossings (one vertex on each shell, the rest strictly
//! between) are enumerated. A sub-path of a geodesic is a geodesic of the
//! same box, and shrinking the two paths can only increase the chemical
//! distance between them, so minimal crossings realize the worst case.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::environment::CoupledEnvironment;
use crate::error::{Error, Result};
use crate::lattice::{AnnulusRegion, BoxRegion, ClosedAnnulus, Cuboid, Edge, Point};
use crate::passage::{approx_eq, distance_field, Field, WeightView};
use crate::percolation::{chemical_distance, chemical_field_by};

use super::RadiusParams;

#[derive(Clone, Debug, PartialEq)]
pub enum ExactOutcome<const D: usize> {
    Holds {
        /// Shell endpoint pairs joined by at least one crossing geodesic.
        crossing_pairs: usize,
        /// Pairs of pairs not settled by endpoint distances.
        unresolved: usize,
    },
    Fails {
        gamma1: Vec<Point<D>>,
        gamma2: Vec<Point<D>>,
        /// `D_q` between the two paths inside the annulus; `None` is `∞`.
        distance: Option<u32>,
    },
    Overflow {
        from: Point<D>,
        to: Point<D>,
    },
}

impl<const D: usize> ExactOutcome<D> {
    pub fn holds(&self) -> bool {
        matches!(self, ExactOutcome::Holds { .. })
    }
}

/// Shortest-path data restricted to the annulus bounding box.
struct Compact {
    dist: Vec<f64>,
}

struct Setup<'a, const D: usize> {
    ann: AnnulusRegion<D>,
    bounds: Cuboid<D>,
    view: WeightView<'a, D>,
    shell: Vec<Point<D>>,
    inner_count: usize,
    fields: Vec<Compact>,
}

impl<const D: usize> Setup<'_, D> {
    fn allowed(&self, v: &Point<D>, a: &Point<D>, b: &Point<D>) -> bool {
        v == a || v == b || self.ann.in_interior(v)
    }

    /// Geodesic-DAG successors of `u` for the pair `(ia, ib)`.
    fn successors(&self, ia: usize, ib: usize, u: &Point<D>) -> impl Iterator<Item = Point<D>> + '_ {
        let a = self.shell[ia];
        let b = self.shell[ib];
        let fa = &self.fields[ia].dist;
        let fb = &self.fields[ib].dist;
        let total = fa[self.bounds.index_of(&b).expect("shell")];
        let iu = self.bounds.index_of(u).expect("annulus vertex");
        let du = fa[iu];
        let u = *u;
        u.neighbors().filter_map(move |v| {
            if !self.allowed(&v, &a, &b) {
                return None;
            }
            let iv = self.bounds.index_of(&v)?;
            let w = self.view.weight(&Edge::canonicalize(u, v).expect("adjacent"));
            (approx_eq(du + w, fa[iv]) && approx_eq(fa[iv] + fb[iv], total)).then_some(v)
        })
    }

    /// A crossing geodesic from `shell[ia]` to `shell[ib]` avoiding `blocked`, if any.
    fn reach(&self, ia: usize, ib: usize, blocked: Option<&[u32]>, limit: u32) -> Option<Vec<Point<D>>> {
        let a = self.shell[ia];
        let b = self.shell[ib];
        let is_blocked =
            |v: &Point<D>| blocked.is_some_and(|bl| bl[self.bounds.index_of(v).expect("inside")] <= limit);
        if is_blocked(&a) {
            return None;
        }
        let n = self.bounds.vertex_count();
        let mut pred = vec![u32::MAX; n];
        let mut seen = vec![false; n];
        let ia_idx = self.bounds.index_of(&a).expect("shell");
        seen[ia_idx] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                let mut path = vec![b];
                let mut k = self.bounds.index_of(&b).expect("shell");
                while pred[k] != u32::MAX {
                    k = pred[k] as usize;
                    path.push(self.bounds.point_at(k));
                }
                path.reverse();
                return Some(path);
            }
            let iu = self.bounds.index_of(&u).expect("inside");
            for v in self.successors(ia, ib, &u) {
                let iv = self.bounds.index_of(&v).expect("inside");
                if seen[iv] || is_blocked(&v) {
                    continue;
                }
                seen[iv] = true;
                pred[iv] = iu as u32;
                queue.push_back(v);
            }
        }
        None
    }

    /// All crossing geodesics of a pair, or `None` past `cap`.
    fn enumerate(&self, ia: usize, ib: usize, cap: usize) -> Option<Vec<Vec<Point<D>>>> {
        let a = self.shell[ia];
        let b = self.shell[ib];
        let mut out = Vec::new();
        let mut path = vec![a];
        let mut stack: Vec<Vec<Point<D>>> = vec![self.successors(ia, ib, &a).collect()];
        while let Some(frame) = stack.last_mut() {
            match frame.pop() {
                None => {
                    stack.pop();
                    path.pop();
                }
                Some(v) => {
                    if path.contains(&v) {
                        continue;
                    }
                    if v == b {
                        let mut full = path.clone();
                        full.push(v);
                        out.push(full);
                        if out.len() > cap {
                            return None;
                        }
                        continue;
                    }
                    path.push(v);
                    let mut next: Vec<Point<D>> = self.successors(ia, ib, &v).collect();
                    next.reverse();
                    stack.push(next);
                }
            }
        }
        Some(out)
    }
}

fn build_setup<'a, const D: usize>(
    env: &'a CoupledEnvironment<D>,
    e: &Edge<D>,
    n: u32,
    params: &RadiusParams,
) -> Result<Setup<'a, D>> {
    if n == 0 {
        return Err(Error::Precondition("annulus scale must be positive".into()));
    }
    let reach = params.reach(n);
    let big = BoxRegion::new(e.x(), reach);
    if !env.window().contains_box(&big) {
        return Err(Error::WindowTooSmall { required: reach, actual: env.window().radius });
    }
    let ann = AnnulusRegion::new(*e, n);
    let bounds = ann.outer_box().cuboid();
    let view = WeightView::new(env, params.p, Some(params.h), big.cuboid())?;
    let mut shell: Vec<Point<D>> = bounds.vertices().filter(|v| ann.on_inner_shell(v)).collect();
    let inner_count = shell.len();
    shell.extend(bounds.vertices().filter(|v| ann.on_outer_shell(v)));
    let mut fields = Vec::with_capacity(shell.len());
    for s in &shell {
        let f = distance_field(&view, s)?;
        fields.push(Compact { dist: bounds.vertices().map(|v| f.distance(&v)).collect() });
    }
    Ok(Setup { ann, bounds, view, shell, inner_count, fields })
}

/// Evaluates `V_N(e)` on the weights `τ ∧ H` inside `Λ_{C*N}(x_e)`.
pub fn exact_check<const D: usize>(
    env: &CoupledEnvironment<D>,
    e: &Edge<D>,
    n: u32,
    params: &RadiusParams,
) -> Result<ExactOutcome<D>> {
    let setup = build_setup(env, e, n, params)?;
    let reach = params.reach(n);
    let closed = ClosedAnnulus(setup.ann);
    let bounds = setup.bounds;
    let q = params.openness();
    let is_open = |x: &Edge<D>| q.is_open(env, x);

    // Chemical distances between shell vertices inside the closed annulus.
    let shell_d: Vec<Vec<u32>> = setup
        .shell
        .iter()
        .map(|s| {
            let f = chemical_field_by(&closed, is_open, core::slice::from_ref(s), None).expect("shell in annulus");
            setup.shell.iter().map(|t| f[bounds.index_of(t).expect("shell")]).collect()
        })
        .collect();

    let mut pairs = Vec::new();
    for ia in 0..setup.inner_count {
        for ib in setup.inner_count..setup.shell.len() {
            if setup.reach(ia, ib, None, 0).is_some() {
                pairs.push((ia, ib));
            }
        }
    }

    let bound = reach;
    let mut partners: Vec<Vec<usize>> = vec![Vec::new(); pairs.len()];
    let mut unresolved = 0usize;
    for i in 0..pairs.len() {
        let (a1, b1) = pairs[i];
        for j in (i + 1)..pairs.len() {
            let (a2, b2) = pairs[j];
            let near = shell_d[a1][a2].min(shell_d[a1][b2]).min(shell_d[b1][a2]).min(shell_d[b1][b2]);
            if near > bound {
                partners[i].push(j);
                unresolved += 1;
            }
        }
    }

    for (i, list) in partners.iter().enumerate() {
        if list.is_empty() {
            continue;
        }
        let (a1, b1) = pairs[i];
        let Some(paths) = setup.enumerate(a1, b1, params.path_cap) else {
            return Ok(ExactOutcome::Overflow { from: setup.shell[a1], to: setup.shell[b1] });
        };
        for g1 in &paths {
            let ball = chemical_field_by(&closed, is_open, g1, Some(bound))?;
            for &j in list {
                let (a2, b2) = pairs[j];
                if let Some(g2) = setup.reach(a2, b2, Some(&ball), bound) {
                    let distance = chemical_distance(env, q, &closed, g1, &g2)?;
                    return Ok(ExactOutcome::Fails { gamma1: g1.clone(), gamma2: g2, distance });
                }
            }
        }
    }
    Ok(ExactOutcome::Holds { crossing_pairs: pairs.len(), unresolved })
}

/// Lists every minimal crossing geodesic of `A_N(e)` (test and diagnostic use).
pub fn crossing_geodesics<const D: usize>(
    env: &CoupledEnvironment<D>,
    e: &Edge<D>,
    n: u32,
    params: &RadiusParams,
) -> Result<Vec<Vec<Point<D>>>> {
    let setup = build_setup(env, e, n, params)?;
    let mut out = Vec::new();
    for ia in 0..setup.inner_count {
        for ib in setup.inner_count..setup.shell.len() {
            match setup.enumerate(ia, ib, params.path_cap) {
                Some(paths) => out.extend(paths),
                None => {
                    return Err(Error::GuardExceeded(alloc::format!(
                        "{} → {}",
                        setup.shell[ia], setup.shell[ib]
                    )))
                }
            }
        }
    }
    Ok(out)
}
