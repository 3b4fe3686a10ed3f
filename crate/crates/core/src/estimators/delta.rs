//! The derivative of `E[T_M^{Λ_K}(0, n·e1)]` in `p`: a CRN finite difference
//! against the sum of single-edge effects `Δ_e T` along the geodesic.

use alloc::format;
use alloc::vec::Vec;

use crate::environment::CoupledEnvironment;
use crate::error::{Error, Result};
use crate::lattice::{BoxRegion, Edge, Point};
use crate::passage::{approx_eq, passage_time, WeightView};
use crate::replicate::Replicator;
use crate::rng::EdgeStream;
use crate::stats::Summary;

use super::{hot_region, target, truncated_geodesic, truncated_time, ExperimentConfig};

/// Geodesic edges evaluated per replica before subsampling starts.
pub const DEFAULT_EDGE_BUDGET: usize = 512;

/// What the lower variant of `Δ_e T` puts on `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaMode {
    /// `τ_e = 0`.
    Zero,
    /// `τ_e` redrawn from `F` (auxiliary stream).
    Resample,
}

impl core::str::FromStr for DeltaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(DeltaMode::Zero),
            "resample" => Ok(DeltaMode::Resample),
            _ => Err(Error::Config(format!("unknown delta mode `{s}` (zero|resample)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaReport {
    pub p: f64,
    pub n: u32,
    /// Finite-difference end points, `p ± h` clipped to `[p0, 1]`.
    pub p_lo: f64,
    pub p_hi: f64,
    pub mode: DeltaMode,
    pub replicas: usize,
    pub fd_mean: f64,
    pub fd_stderr: f64,
    /// `Ê[Σ_{e∈γ} Δ_e T]`.
    pub sum_mean: f64,
    pub sum_stderr: f64,
    pub mean_geodesic_len: f64,
    /// Largest Horvitz–Thompson factor `|γ| / sampled` used.
    pub subsample_factor: f64,
    /// Replicas whose finite difference was positive; zero under CRN.
    pub fd_positive: usize,
    pub off_checked: usize,
    /// Off-geodesic edges with `Δ_e T < 0` or whose upper variant moved `T`.
    pub off_violations: usize,
    /// Off-geodesic edges with `Δ_e T > 0` (allowed: lowering `e` can open a shortcut).
    pub off_positive: usize,
}

impl DeltaReport {
    pub fn fd_over_n(&self) -> f64 {
        self.fd_mean / self.n as f64
    }

    pub fn sum_over_n(&self) -> f64 {
        self.sum_mean / self.n as f64
    }
}

struct ReplicaDelta {
    fd: f64,
    sum: f64,
    len: usize,
    factor: f64,
    off_checked: usize,
    off_violations: usize,
    off_positive: usize,
}

fn lowered<const D: usize>(env: &CoupledEnvironment<D>, e: &Edge<D>, mode: DeltaMode) -> f64 {
    match mode {
        DeltaMode::Zero => 0.0,
        DeltaMode::Resample => env.law().quantile(env.rng().edge_uniform(e, EdgeStream::Aux)),
    }
}

/// `spot_checks` off-geodesic edges per replica are drawn from `Λ_n(0)`.
#[allow(clippy::too_many_arguments)]
pub fn delta_estimator<const D: usize>(
    config: &ExperimentConfig,
    p: f64,
    n: u32,
    h: f64,
    mode: DeltaMode,
    edge_budget: usize,
    spot_checks: usize,
    replicator: &impl Replicator,
) -> Result<DeltaReport> {
    config.check_dim::<D>()?;
    let p_hi = (p + h).min(1.0);
    let p_lo = (p - h).max(config.p0);
    if !(h > 0.0) || !(p >= config.p0 && p <= 1.0) || p_hi <= p_lo {
        return Err(Error::Config(format!("p ± h must give a non-empty interval inside [p0, 1] (p = {p}, h = {h})")));
    }
    if edge_budget == 0 {
        return Err(Error::Config("edge budget must be positive".into()));
    }
    let (m, k) = (config.m_for(n), config.k_for(n));
    let region = BoxRegion::new(Point::origin(), k).cuboid();
    let y = target::<D>(n);
    let rows: Vec<Result<ReplicaDelta>> = replicator.run(config.replicas, |i| {
        let env = config.environment::<D>(i, k)?.cached(&hot_region(n));
        let fd = (truncated_time(&env, p_hi, m, k, n)? - truncated_time(&env, p_lo, m, k, n)?) / (p_hi - p_lo);
        let gamma = truncated_geodesic(&env, p, m, k, n)?;
        let t0 = gamma.weight;
        let edges = gamma.edges();
        let base = WeightView::new(&env, p, Some(m), region)?;
        let delta = |e: &Edge<D>| -> Result<(f64, f64)> {
            let up = passage_time(&base.clone().with_override(*e, m), &Point::origin(), &y)?;
            let down = passage_time(&base.clone().with_override(*e, lowered(&env, e, mode)), &Point::origin(), &y)?;
            Ok((up, up - down))
        };

        let mut chosen: Vec<usize> = (0..edges.len()).collect();
        if edges.len() > edge_budget {
            let key = |j: &usize| env.rng().site_uniform(&edges[*j].low(), 0x5e1, edges[*j].axis() as u32);
            chosen.sort_by(|a, b| key(a).total_cmp(&key(b)));
            chosen.truncate(edge_budget);
        }
        let factor = edges.len() as f64 / chosen.len().max(1) as f64;
        let mut sum = 0.0;
        for &j in &chosen {
            sum += delta(&edges[j])?.1;
        }

        let on: hashbrown::HashSet<Edge<D>> = edges.iter().copied().collect();
        let spot = BoxRegion::new(Point::origin(), n).cuboid();
        let (mut off_checked, mut off_violations, mut off_positive) = (0, 0, 0);
        let mut draw = 0u32;
        while off_checked < spot_checks && draw < 64 * spot_checks as u32 + 64 {
            let u = env.rng().site_uniform(&Point::<D>::origin(), 0x0ff, draw);
            draw += 1;
            let slots = spot.vertex_count() * D;
            let Some(e) = spot.edge_at(((u * slots as f64) as usize).min(slots - 1)) else { continue };
            if on.contains(&e) {
                continue;
            }
            let (up, d) = delta(&e)?;
            off_checked += 1;
            if d < 0.0 || !approx_eq(up, t0) {
                off_violations += 1;
            } else if d > 0.0 {
                off_positive += 1;
            }
        }
        Ok(ReplicaDelta { fd, sum: sum * factor, len: edges.len(), factor, off_checked, off_violations, off_positive })
    });
    let rows: Vec<ReplicaDelta> = rows.into_iter().collect::<Result<_>>()?;
    let fds: Vec<f64> = rows.iter().map(|r| r.fd).collect();
    let sums: Vec<f64> = rows.iter().map(|r| r.sum).collect();
    let (sf, ss) = (Summary::of(&fds), Summary::of(&sums));
    Ok(DeltaReport {
        p,
        n,
        p_lo,
        p_hi,
        mode,
        replicas: rows.len(),
        fd_mean: sf.mean,
        fd_stderr: sf.stderr,
        sum_mean: ss.mean,
        sum_stderr: ss.stderr,
        mean_geodesic_len: rows.iter().map(|r| r.len as f64).sum::<f64>() / rows.len() as f64,
        subsample_factor: rows.iter().map(|r| r.factor).fold(1.0, f64::max),
        fd_positive: fds.iter().filter(|f| **f > 0.0).count(),
        off_checked: rows.iter().map(|r| r.off_checked).sum(),
        off_violations: rows.iter().map(|r| r.off_violations).sum(),
        off_positive: rows.iter().map(|r| r.off_positive).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replicate::Sequential;

    #[test]
    fn full_lattice() {
        let c = ExperimentConfig { p_grid: alloc::vec![1.0], replicas: 2, ..Default::default() };
        let r = delta_estimator::<2>(&c, 1.0, 8, 0.02, DeltaMode::Zero, 512, 5, &Sequential).unwrap();
        assert!(r.fd_mean <= 0.0);
        assert_eq!(r.fd_positive, 0);
        // Each geodesic edge: raising it to M forces a detour of +2; zero saves 1.
        assert_eq!(r.sum_mean, 8.0 * 3.0);
        assert_eq!(r.off_violations, 0);
        assert_eq!(r.off_checked, 10);
    }

    #[test]
    fn subsampling_is_scaled() {
        let c = ExperimentConfig { p_grid: alloc::vec![1.0], replicas: 1, ..Default::default() };
        let r = delta_estimator::<2>(&c, 1.0, 8, 0.02, DeltaMode::Zero, 2, 0, &Sequential).unwrap();
        assert_eq!(r.subsample_factor, 4.0);
        assert_eq!(r.sum_mean, 24.0);
        assert!("bogus".parse::<DeltaMode>().is_err());
    }
}
