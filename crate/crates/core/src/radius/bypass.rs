//! Bypass of an edge on a geodesic: keep the geodesic up to its first
//! crossing of `A_R(e)`, jump to its last crossing along a shortest q-open
//! path inside the annulus, and continue from there.

use alloc::format;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::environment::CoupledEnvironment;
use crate::error::{Error, Result};
use crate::lattice::{path_edges, validate_path, AnnulusRegion, ClosedAnnulus, Edge, Point};
use crate::passage::GeodesicPath;
use crate::percolation::chemical_path_by;

use super::RadiusParams;

#[derive(Clone, Debug, PartialEq)]
pub struct BypassRecord<const D: usize> {
    pub edge: Edge<D>,
    pub radius: u32,
    /// `(i₋, i₊)` and `(o₋, o₊)` as indices into the geodesic.
    pub first_crossing: (usize, usize),
    pub last_crossing: (usize, usize),
    /// The q-open connector from the first crossing to the last.
    pub connector: Vec<Point<D>>,
    pub path: Vec<Point<D>>,
    /// `|η \ γ|`.
    pub new_edges: usize,
    /// No vertex of the bypass lies in `Λ_{R-1}(e)`.
    pub avoids_core: bool,
    /// Every edge of `η \ γ` is q-open.
    pub new_edges_open: bool,
    /// `|η \ γ| ≤ C*·R`.
    pub within_budget: bool,
}

impl<const D: usize> BypassRecord<D> {
    pub fn verified(&self) -> bool {
        self.avoids_core && self.new_edges_open && self.within_budget && !self.path.is_empty()
    }
}

/// Erases loops in visiting order, keeping the first arrival at each vertex.
fn loop_erase<const D: usize>(walk: &[Point<D>]) -> Vec<Point<D>> {
    let mut out: Vec<Point<D>> = Vec::with_capacity(walk.len());
    let mut at: HashMap<Point<D>, usize> = HashMap::new();
    for &v in walk {
        if let Some(&k) = at.get(&v) {
            for w in out.drain(k + 1..) {
                at.remove(&w);
            }
        } else {
            at.insert(v, out.len());
            out.push(v);
        }
    }
    out
}

pub fn build_bypass<const D: usize>(
    gamma: &GeodesicPath<D>,
    e: &Edge<D>,
    r: u32,
    env: &CoupledEnvironment<D>,
    params: &RadiusParams,
) -> Result<BypassRecord<D>> {
    let path = &gamma.vertices;
    validate_path(path)?;
    let on_path = path.windows(2).any(|w| Edge::canonicalize(w[0], w[1]).is_ok_and(|x| x == *e));
    if !on_path {
        return Err(Error::Precondition(format!("edge {e} is not on the geodesic")));
    }
    if r == 0 {
        return Err(Error::Precondition("radius must be positive".into()));
    }
    let ann = AnnulusRegion::new(*e, r);
    let (x, y) = (path[0], path[path.len() - 1]);
    if ann.outer_box().contains(&x) || ann.outer_box().contains(&y) {
        return Err(Error::Precondition(format!("an endpoint lies in Λ_{}(e)", 3 * r)));
    }
    if !env.window().contains_box(&ann.outer_box()) {
        return Err(Error::OutOfWindow(format!("Λ_{}({})", 3 * r, ann.center())));
    }

    let c = ann.center();
    let level = |p: &Point<D>| p.linf_dist(&c);
    let i_plus = path.iter().position(|p| level(p) == r).expect("the path enters Λ_R(e)");
    let i_minus = path[..=i_plus].iter().rposition(|p| level(p) == 3 * r).expect("x lies outside Λ_3R(e)");
    let o_minus = path.iter().rposition(|p| level(p) == r).expect("the path leaves Λ_R(e)");
    let o_plus = o_minus + path[o_minus..].iter().position(|p| level(p) == 3 * r).expect("y lies outside Λ_3R(e)");

    let q = params.openness();
    let is_open = |x: &Edge<D>| q.is_open(env, x);
    let first = &path[i_minus..=i_plus];
    let last = &path[o_minus..=o_plus];
    let connector =
        chemical_path_by(&ClosedAnnulus(ann), is_open, first, last)?.ok_or(Error::BypassInfeasible(r))?;
    let z1 = connector[0];
    let z2 = connector[connector.len() - 1];
    let iz1 = i_minus + first.iter().position(|p| *p == z1).expect("connector starts on γ₁");
    let iz2 = o_minus + last.iter().position(|p| *p == z2).expect("connector ends on γ₂");

    let mut walk: Vec<Point<D>> = path[..iz1].to_vec();
    walk.extend_from_slice(&connector);
    walk.extend_from_slice(&path[iz2 + 1..]);
    let eta = loop_erase(&walk);

    let old: HashSet<Edge<D>> = path_edges(path)?.into_iter().collect();
    let fresh: Vec<Edge<D>> = path_edges(&eta)?.into_iter().filter(|x| !old.contains(x)).collect();
    let avoids_core = eta.iter().all(|p| level(p) >= r);
    let new_edges_open = fresh.iter().all(|x| env.is_q_open(x, params.p, params.lambda).unwrap_or(false));
    let within_budget = fresh.len() as u64 <= params.reach(r) as u64;
    Ok(BypassRecord {
        edge: *e,
        radius: r,
        first_crossing: (i_minus, i_plus),
        last_crossing: (o_minus, o_plus),
        connector,
        path: eta,
        new_edges: fresh.len(),
        avoids_core,
        new_edges_open,
        within_budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BoxRegion;
    use crate::law::WeightLaw;

    fn straight(len: i32) -> GeodesicPath<2> {
        GeodesicPath { vertices: (-len..=len).map(|t| Point([t, 0])).collect(), weight: 2.0 * len as f64 }
    }

    #[test]
    fn loop_erasure_keeps_first_visit() {
        let w = [Point([0, 0]), Point([1, 0]), Point([1, 1]), Point([0, 1]), Point([0, 0]), Point([0, -1])];
        assert_eq!(loop_erase(&w), alloc::vec![Point([0, 0]), Point([0, -1])]);
    }

    #[test]
    fn open_lattice_bypass() {
        let env = CoupledEnvironment::new(3, BoxRegion::new(Point::origin(), 20), WeightLaw::Dirac(1.0)).unwrap();
        let params = RadiusParams::new(1.0, 1.0, 10.0);
        let e = Edge::along(Point::<2>::origin(), 0);
        let rec = build_bypass(&straight(12), &e, 3, &env, &params).unwrap();
        assert!(rec.verified());
        assert_eq!(rec.first_crossing, (3, 9));
        assert_eq!(rec.last_crossing, (15, 21));
        assert!(!path_edges(&rec.path).unwrap().contains(&e));
        assert_eq!(rec.path[0], Point([-12, 0]));
        assert_eq!(*rec.path.last().unwrap(), Point([12, 0]));
        // Around the inner box at level 3: up 3, across 6, down 3.
        assert_eq!(rec.new_edges, 12);
    }

    #[test]
    fn rejects_edge_off_path_and_close_endpoints() {
        let env = CoupledEnvironment::new(3, BoxRegion::new(Point::origin(), 20), WeightLaw::Dirac(1.0)).unwrap();
        let params = RadiusParams::new(1.0, 1.0, 10.0);
        let off = Edge::along(Point::<2>::origin(), 1);
        assert!(matches!(build_bypass(&straight(12), &off, 3, &env, &params), Err(Error::Precondition(_))));
        let e = Edge::along(Point::<2>::origin(), 0);
        assert!(matches!(build_bypass(&straight(8), &e, 3, &env, &params), Err(Error::Precondition(_))));
    }

    #[test]
    fn closed_annulus_is_infeasible() {
        let env = CoupledEnvironment::new(3, BoxRegion::new(Point::origin(), 20), WeightLaw::Dirac(1.0)).unwrap();
        let params = RadiusParams::new(0.0, 1.0, 10.0);
        let e = Edge::along(Point::<2>::origin(), 0);
        assert_eq!(build_bypass(&straight(12), &e, 3, &env, &params), Err(Error::BypassInfeasible(3)));
    }
}
