//! Tail samples: hole sizes, chemical-distance overshoot, geodesic lengths
//! and a sampled lower-bound diagnostic for the time per edge of long paths.

use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::error::Result;
use crate::lattice::{BoxRegion, Edge, Point};
use crate::percolation::{chemical_distance, label_clusters, Openness};
use crate::replicate::Replicator;
use crate::stats::{survival, SurvivalPoint};

use super::{target, truncated_geodesic, ExperimentConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct TailTables {
    pub n: u32,
    pub p: f64,
    pub seeds: usize,
    /// Seeds without a q-proxy cluster (no hole or chemical samples).
    pub excluded: usize,
    /// `‖x - [x]_q‖∞` at the sampled sites.
    pub hole: Vec<f64>,
    /// `D_q([0]_q, [n·e1]_q) / n`.
    pub chemical: Vec<f64>,
    /// `|γ|` for the geodesic of `T_M^{Λ_K}(0, n·e1)`.
    pub geodesic_len: Vec<f64>,
    /// Per seed, the least `T(π)/|π|` over sampled p-open self-avoiding walks
    /// of the requested length; non-exhaustive, so only a lower-bound check.
    pub kesten: Vec<f64>,
}

impl TailTables {
    pub fn hole_table(&self, grid: &[f64]) -> Vec<SurvivalPoint> {
        survival(&self.hole, grid)
    }

    pub fn chemical_table(&self, grid: &[f64]) -> Vec<SurvivalPoint> {
        survival(&self.chemical, grid)
    }

    pub fn length_table(&self, grid: &[f64]) -> Vec<SurvivalPoint> {
        survival(&self.geodesic_len, grid)
    }

    pub fn kesten_table(&self, grid: &[f64]) -> Vec<SurvivalPoint> {
        survival(&self.kesten, grid)
    }

    /// Empirical `P(|γ| ≥ factor·n)`.
    pub fn long_geodesic_fraction(&self, factor: f64) -> f64 {
        let t = factor * self.n as f64;
        self.geodesic_len.iter().filter(|l| **l >= t).count() as f64 / self.geodesic_len.len().max(1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TailSampling {
    /// Hole-size sites per seed.
    pub sites: usize,
    /// Random walks per seed for the path diagnostic.
    pub walks: usize,
    /// Walk length.
    pub walk_len: u32,
}

impl Default for TailSampling {
    fn default() -> Self {
        TailSampling { sites: 100, walks: 20, walk_len: 32 }
    }
}

pub fn tail_suite<const D: usize>(
    config: &ExperimentConfig,
    p: f64,
    n: u32,
    sampling: TailSampling,
    replicator: &impl Replicator,
) -> Result<TailTables> {
    config.check_dim::<D>()?;
    let lambda = config.lambda()?;
    let (m, k) = (config.m_for(n), config.k_for(n));
    let window = config.label_window::<D>(n);
    let q = Openness::Q { p, lambda };
    struct Seed {
        hole: Vec<f64>,
        chemical: Option<f64>,
        len: f64,
        kesten: Option<f64>,
        excluded: bool,
    }
    let rows: Vec<Result<Seed>> = replicator.run(config.replicas, |i| {
        let env = config.environment::<D>(i, k.max(window.linf_radius_span()))?.cached(&window);
        let gamma = truncated_geodesic(&env, p, m, k, n)?;
        let lab = label_clusters(&env, &window, q)?;
        let mut seed = Seed { hole: Vec::new(), chemical: None, len: gamma.len() as f64, kesten: None, excluded: false };
        match lab.infinite_cluster_proxy(crate::percolation::DEFAULT_PROXY_FRACTION) {
            None => seed.excluded = true,
            Some(id) => {
                // Sites uniform in the central half of the window.
                let inner = BoxRegion::<D>::new(Point::on_axis(0, (n / 2) as i32), n.div_ceil(2)).cuboid();
                for s in 0..sampling.sites as u32 {
                    let mut c = [0i32; D];
                    for (a, slot) in c.iter_mut().enumerate() {
                        let u = env.rng().site_uniform(&Point::<D>::origin(), 0x401e, s * D as u32 + a as u32);
                        *slot = inner.lo().0[a] + (u * inner.side(a) as f64) as i32;
                    }
                    let x = Point(c);
                    seed.hole.push(lab.closest_in(&x, id)?.linf_dist(&x) as f64);
                }
                let a = lab.closest_in(&Point::origin(), id)?;
                let b = lab.closest_in(&target(n), id)?;
                seed.chemical = chemical_distance(&env, q, &window, &[a], &[b])?.map(|d| d as f64 / n as f64);
            }
        }
        let mut best: Option<f64> = None;
        for w in 0..sampling.walks as u32 {
            if let Some(r) = open_walk_ratio(&env, p, w, sampling.walk_len, &window) {
                best = Some(best.map_or(r, |b: f64| b.min(r)));
            }
        }
        seed.kesten = best;
        Ok(seed)
    });
    let rows: Vec<Seed> = rows.into_iter().collect::<Result<_>>()?;
    Ok(TailTables {
        n,
        p,
        seeds: rows.len(),
        excluded: rows.iter().filter(|r| r.excluded).count(),
        hole: rows.iter().flat_map(|r| r.hole.iter().copied()).collect(),
        chemical: rows.iter().filter_map(|r| r.chemical).collect(),
        geodesic_len: rows.iter().map(|r| r.len).collect(),
        kesten: rows.iter().filter_map(|r| r.kesten).collect(),
    })
}

/// A self-avoiding walk from the origin along p-open edges, choosing among
/// free neighbours with auxiliary uniforms; `T(π)/|π|` when it reaches `len`.
fn open_walk_ratio<const D: usize>(
    env: &crate::environment::CoupledEnvironment<D>,
    p: f64,
    walk: u32,
    len: u32,
    window: &crate::lattice::Cuboid<D>,
) -> Option<f64> {
    let mut seen: HashSet<Point<D>> = HashSet::new();
    let mut at = Point::<D>::origin();
    seen.insert(at);
    let mut total = 0.0;
    for step in 0..len {
        let options: Vec<(Point<D>, f64)> = at
            .neighbors()
            .filter(|v| window.contains(v) && !seen.contains(v))
            .filter_map(|v| {
                let w = env.weight(&Edge::canonicalize(at, v).ok()?, p).ok()?;
                w.is_finite().then_some((v, w))
            })
            .collect();
        if options.is_empty() {
            return None;
        }
        let u = env.rng().site_uniform(&at, 0x6e57 + walk, step);
        let (v, w) = options[((u * options.len() as f64) as usize).min(options.len() - 1)];
        total += w;
        seen.insert(v);
        at = v;
    }
    Some(total / len as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replicate::Sequential;

    #[test]
    fn full_lattice_tables() {
        let c = ExperimentConfig { p_grid: alloc::vec![1.0], replicas: 3, ..Default::default() };
        let t = tail_suite::<2>(&c, 1.0, 8, TailSampling { sites: 5, walks: 3, walk_len: 6 }, &Sequential).unwrap();
        assert!(t.hole.iter().all(|h| *h == 0.0));
        assert_eq!(t.hole.len(), 15);
        assert!(t.chemical.iter().all(|c| *c == 1.0));
        assert!(t.geodesic_len.iter().all(|l| *l == 8.0));
        assert!(t.kesten.iter().all(|k| *k == 1.0));
        assert_eq!(t.length_table(&[8.0])[0].survival(), 1.0);
        assert_eq!(t.long_geodesic_fraction(4.0), 0.0);
    }
}
