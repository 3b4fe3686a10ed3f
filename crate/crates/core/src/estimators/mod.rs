//! Monte Carlo experiments and exact tiny-lattice oracles.
//!
//! Every estimator takes an [`ExperimentConfig`] and a [`Replicator`]. Replica
//! `i` draws its environment from `prf(seed, i)`, so results depend only on
//! the configuration, never on the execution order or thread count.

pub mod delta;
pub mod gap;
pub mod mu;
pub mod radius;
pub mod russo;
pub mod tails;

use alloc::format;
use alloc::vec::Vec;

use crate::environment::{critical_probability, lambda_for, CoupledEnvironment};
use crate::error::{Error, Result};
use crate::lattice::{BoxRegion, Cuboid, Point};
use crate::law::WeightLaw;
use crate::passage::{distance_field_until, extract_geodesic, GeodesicPath, WeightView};
use crate::rng::replica_seed;

pub use delta::{delta_estimator, DeltaMode, DeltaReport};
pub use gap::{truncation_gap, GapRow};
pub use mu::{lipschitz_scan, mu_estimate, slln_diagnostic, LipschitzScan, MuEstimate, SllnReport};
pub use radius::{bypass_batch, path_sum_check, radius_ensemble, BypassBatch, PathSumRow};
pub use russo::{russo_exact_check, RussoInstance, RussoReport};
pub use tails::{tail_suite, TailSampling, TailTables};

#[derive(Clone, Debug, PartialEq)]
pub struct WindowPolicy {
    /// Margin, in units of `n`, added around the segment `[0, n·e1]` for the
    /// cluster labelings that define `[x]_p` and `[x]_q`.
    pub label_margin: f64,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        WindowPolicy { label_margin: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub law: WeightLaw,
    pub p_grid: Vec<f64>,
    pub p0: f64,
    pub delta0: f64,
    pub lambda: Option<f64>,
    pub n_grid: Vec<u32>,
    /// Overrides `M = (log n)³`.
    pub m: Option<f64>,
    /// Overrides `K = n²`.
    pub k: Option<u32>,
    pub replicas: usize,
    pub seed: u64,
    pub window: WindowPolicy,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dim: 2,
            law: WeightLaw::Dirac(1.0),
            p_grid: alloc::vec![0.85],
            p0: 0.6,
            delta0: 0.05,
            lambda: None,
            n_grid: alloc::vec![32],
            m: None,
            k: None,
            replicas: 20,
            seed: 42,
            window: WindowPolicy::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::Config(format!("d = {} must be at least 2", self.dim)));
        }
        if self.p_grid.is_empty() {
            return Err(Error::Config("empty p grid".into()));
        }
        for &p in &self.p_grid {
            if !(p >= self.p0 && p <= 1.0) {
                return Err(Error::Config(format!("p = {p} outside [p0, 1] = [{}, 1]", self.p0)));
            }
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n grid must be non-empty, positive and strictly increasing".into()));
        }
        if self.replicas == 0 {
            return Err(Error::Config("replica count must be positive".into()));
        }
        if let Some(m) = self.m {
            if !(m > 0.0) {
                return Err(Error::Config(format!("M = {m} must be positive")));
            }
        }
        if self.k == Some(0) {
            return Err(Error::Config("K must be positive".into()));
        }
        if !(self.window.label_margin >= 0.0) {
            return Err(Error::Config("label margin must be non-negative".into()));
        }
        if self.law.mass_at_zero() >= critical_probability(self.dim) {
            return Err(Error::Config(format!(
                "F(0) = {} must stay below p_c = {}",
                self.law.mass_at_zero(),
                critical_probability(self.dim)
            )));
        }
        self.lambda()?;
        Ok(())
    }

    pub(crate) fn check_dim<const D: usize>(&self) -> Result<()> {
        self.validate()?;
        if self.dim != D {
            return Err(Error::Config(format!("configured d = {} but running in d = {D}", self.dim)));
        }
        Ok(())
    }

    /// `λ`, from the override or from `p0`, `δ0` and `p_c`.
    pub fn lambda(&self) -> Result<f64> {
        match self.lambda {
            Some(l) if l >= 0.0 => Ok(l),
            Some(l) => Err(Error::Config(format!("λ = {l} must be non-negative"))),
            None => lambda_for(&self.law, self.p0, self.delta0, critical_probability(self.dim)),
        }
    }

    /// `M` at scale `n`.
    pub fn m_for(&self, n: u32) -> f64 {
        self.m.unwrap_or_else(|| libm::pow(libm::log(n as f64), 3.0)).max(f64::MIN_POSITIVE)
    }

    /// `K` at scale `n`.
    pub fn k_for(&self, n: u32) -> u32 {
        self.k.unwrap_or(n.saturating_mul(n)).max(n)
    }

    /// Labeling window around `[0, n·e1]`.
    pub fn label_window<const D: usize>(&self, n: u32) -> Cuboid<D> {
        let margin = libm::ceil(self.window.label_margin * n as f64) as u32;
        BoxRegion::new(Point::on_axis(0, (n / 2) as i32), n.div_ceil(2) + margin).cuboid()
    }

    pub fn replica_seed(&self, i: usize) -> u64 {
        replica_seed(self.seed, i as u64)
    }

    /// Environment of replica `i` on `Λ_radius(0)`.
    pub fn environment<const D: usize>(&self, i: usize, radius: u32) -> Result<CoupledEnvironment<D>> {
        CoupledEnvironment::new(self.replica_seed(i), BoxRegion::new(Point::origin(), radius), self.law.clone())
    }
}

pub(crate) fn target<const D: usize>(n: u32) -> Point<D> {
    Point::on_axis(0, n as i32)
}

/// Canonical geodesic of `T_M^{Λ_K}(0, n·e1)`.
pub(crate) fn truncated_geodesic<const D: usize>(
    env: &CoupledEnvironment<D>,
    p: f64,
    m: f64,
    k: u32,
    n: u32,
) -> Result<GeodesicPath<D>> {
    let view = WeightView::new(env, p, Some(m), BoxRegion::new(Point::origin(), k).cuboid())?;
    let y = target(n);
    let field = distance_field_until(&view, &Point::origin(), &y)?;
    extract_geodesic(&field, &view, &y)
}

/// `T_M^{Λ_K}(0, n·e1)`.
pub(crate) fn truncated_time<const D: usize>(env: &CoupledEnvironment<D>, p: f64, m: f64, k: u32, n: u32) -> Result<f64> {
    let view = WeightView::new(env, p, Some(m), BoxRegion::new(Point::origin(), k).cuboid())?;
    crate::passage::passage_time(&view, &Point::origin(), &target(n))
}

/// Region whose uniforms are worth caching when several Dijkstra runs from
/// the origin to `n·e1` reuse one environment.
pub(crate) fn hot_region<const D: usize>(n: u32) -> Cuboid<D> {
    BoxRegion::new(Point::origin(), n + n / 4 + 2).cuboid()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.k_for(32), 1024);
        assert!((c.m_for(32) - libm::pow(libm::log(32.0), 3.0)).abs() < 1e-12);
        assert_eq!(c.lambda().unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_grids() {
        let bad_p = ExperimentConfig { p_grid: alloc::vec![0.5], ..Default::default() };
        assert!(matches!(bad_p.validate(), Err(Error::Config(_))));
        let bad_n = ExperimentConfig { n_grid: alloc::vec![32, 16], ..Default::default() };
        assert!(matches!(bad_n.validate(), Err(Error::Config(_))));
        assert!(ExperimentConfig::default().check_dim::<3>().is_err());
    }

    #[test]
    fn label_window_covers_segment() {
        let c = ExperimentConfig::default();
        let w = c.label_window::<2>(32);
        assert!(w.contains(&Point([0, 0])) && w.contains(&Point([32, 0])));
        assert!(w.contains(&Point([-16, 32])));
    }
}
