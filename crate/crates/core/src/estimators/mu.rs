//! Time-constant estimates, the Lipschitz scan and the single-trajectory
//! diagnostic.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{BoxRegion, Point};
use crate::passage::{passage_time, regularized_time, WeightView};
use crate::percolation::{label_clusters, Openness};
use crate::replicate::Replicator;
use crate::stats::Summary;

use super::{hot_region, target, truncated_time, ExperimentConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct MuEstimate {
    pub p: f64,
    pub n: u32,
    pub replicas: usize,
    /// `Ê[T_M^{Λ_K}(0, n·e1)] / n`.
    pub mean_truncated: f64,
    pub stderr_truncated: f64,
    /// `Ê[T̃(0, n·e1)] / n` over replicas with a proxy cluster.
    pub mean_regularized: Option<f64>,
    pub stderr_regularized: Option<f64>,
    /// Replicas without a proxy cluster, excluded from the regularized mean.
    pub excluded: usize,
    pub per_replica: Vec<f64>,
}

fn is_unavailable(e: &Error) -> bool {
    matches!(e, Error::RegularizationUnavailable | Error::NoPath(_))
}

pub fn mu_estimate<const D: usize>(
    config: &ExperimentConfig,
    p: f64,
    n: u32,
    regularized: bool,
    replicator: &impl Replicator,
) -> Result<MuEstimate> {
    config.check_dim::<D>()?;
    if !(p >= config.p0 && p <= 1.0) {
        return Err(Error::Config(format!("p = {p} outside [p0, 1]")));
    }
    let (m, k) = (config.m_for(n), config.k_for(n));
    let rows: Vec<Result<(f64, Option<f64>)>> = replicator.run(config.replicas, |i| {
        let mut env = config.environment::<D>(i, k)?;
        let window = config.label_window::<D>(n);
        if regularized {
            env = env.cached(&window);
        }
        let t = truncated_time(&env, p, m, k, n)? / n as f64;
        let tilde = if regularized {
            match regularized_time(&env, p, &window, &Point::origin(), &target(n)) {
                Ok(r) => Some(r.time / n as f64),
                Err(e) if is_unavailable(&e) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        Ok((t, tilde))
    });
    let rows: Vec<(f64, Option<f64>)> = rows.into_iter().collect::<Result<_>>()?;
    let per_replica: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let s = Summary::of(&per_replica);
    let tildes: Vec<f64> = rows.iter().filter_map(|r| r.1).collect();
    let st = Summary::of(&tildes);
    let have = regularized && !tildes.is_empty();
    Ok(MuEstimate {
        p,
        n,
        replicas: config.replicas,
        mean_truncated: s.mean,
        stderr_truncated: s.stderr,
        mean_regularized: have.then_some(st.mean),
        stderr_regularized: have.then_some(st.stderr),
        excluded: if regularized { rows.len() - tildes.len() } else { 0 },
        per_replica,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuPoint {
    pub p: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slope {
    pub p_lo: f64,
    pub p_hi: f64,
    /// `|μ̂(p_hi) - μ̂(p_lo)| / (p_hi - p_lo)`.
    pub slope: f64,
    /// Standard error from the paired per-replica differences.
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzScan {
    pub n: u32,
    pub points: Vec<MuPoint>,
    pub slopes: Vec<Slope>,
    /// Replica/grid pairs where `T` increased with `p`; zero under a correct coupling.
    pub monotone_violations: usize,
    /// `T_M^{Λ_K}(0, n·e1)/n` per replica, one entry per grid point.
    pub per_replica: Vec<Vec<f64>>,
}

/// `μ̂` over `config.p_grid` with common random numbers: every grid point of
/// replica `i` reads the same environment.
pub fn lipschitz_scan<const D: usize>(config: &ExperimentConfig, n: u32, replicator: &impl Replicator) -> Result<LipschitzScan> {
    config.check_dim::<D>()?;
    let grid = &config.p_grid;
    if grid.len() < 2 {
        return Err(Error::Config("the Lipschitz scan needs at least two grid points".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("p grid must be strictly increasing".into()));
    }
    let (m, k) = (config.m_for(n), config.k_for(n));
    let rows: Vec<Result<Vec<f64>>> = replicator.run(config.replicas, |i| {
        let env = config.environment::<D>(i, k)?.cached(&hot_region(n));
        grid.iter().map(|&p| Ok(truncated_time(&env, p, m, k, n)? / n as f64)).collect()
    });
    let per_replica: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    let monotone_violations = per_replica
        .iter()
        .map(|r| r.windows(2).filter(|w| w[1] > w[0]).count())
        .sum();
    let points = grid
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let xs: Vec<f64> = per_replica.iter().map(|r| r[j]).collect();
            let s = Summary::of(&xs);
            MuPoint { p, mean: s.mean, stderr: s.stderr }
        })
        .collect();
    let slopes = (0..grid.len() - 1)
        .map(|j| {
            let dp = grid[j + 1] - grid[j];
            let diffs: Vec<f64> = per_replica.iter().map(|r| r[j + 1] - r[j]).collect();
            let s = Summary::of(&diffs);
            Slope { p_lo: grid[j], p_hi: grid[j + 1], slope: s.mean.abs() / dp, stderr: s.stderr / dp }
        })
        .collect();
    Ok(LipschitzScan { n, points, slopes, monotone_violations, per_replica })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SllnRow {
    pub n: u32,
    /// `T̃(0, n·e1)/n`; `None` when the window at this `n` has no proxy.
    pub value: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranslateMean {
    pub count: usize,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SllnReport {
    pub p: f64,
    pub seed: u64,
    pub trajectory: Vec<SllnRow>,
    /// Means of `T([x]_p, [x+e1]_p)` over two disjoint translate sets.
    pub translates: [TranslateMean; 2],
}

/// One environment (seed `config.seed`) read through nested windows.
/// `translates` sites per set are taken on a checkerboard of spacing 4
/// inside the largest labeling window.
pub fn slln_diagnostic<const D: usize>(config: &ExperimentConfig, p: f64, translates: usize) -> Result<SllnReport> {
    config.check_dim::<D>()?;
    let n_max = *config.n_grid.last().expect("validated");
    let outer = config.label_window::<D>(n_max);
    let span = outer.linf_radius_span();
    let env = crate::environment::CoupledEnvironment::new(
        config.seed,
        BoxRegion::new(Point::origin(), span + 1),
        config.law.clone(),
    )?
    .cached(&outer);
    let mut trajectory = Vec::new();
    for &n in &config.n_grid {
        let window = config.label_window::<D>(n);
        let value = match regularized_time(&env, p, &window, &Point::origin(), &target(n)) {
            Ok(r) => Some(r.time / n as f64),
            Err(e) if is_unavailable(&e) => None,
            Err(e) => return Err(e),
        };
        trajectory.push(SllnRow { n, value });
    }

    let lab = label_clusters(&env, &outer, Openness::P { p })?;
    let id = lab.proxy()?;
    let view = WeightView::new(&env, p, None, outer)?;
    let inner = config.label_window::<D>(n_max / 2);
    let mut sets: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for x in inner.vertices() {
        if x.0.iter().any(|c| c.rem_euclid(4) != 0) || !inner.contains(&x.shifted(0, 1)) {
            continue;
        }
        let parity = (x.0.iter().map(|c| c.div_euclid(4)).sum::<i32>()).rem_euclid(2) as usize;
        if sets[parity].len() >= translates {
            if sets[1 - parity].len() >= translates {
                break;
            }
            continue;
        }
        let rx = lab.closest_in(&x, id)?;
        let ry = lab.closest_in(&x.shifted(0, 1), id)?;
        sets[parity].push(passage_time(&view, &rx, &ry)?);
    }
    let mean = |xs: &[f64]| {
        let s = Summary::of(xs);
        TranslateMean { count: s.count, mean: s.mean, stderr: s.stderr }
    };
    Ok(SllnReport { p, seed: config.seed, trajectory, translates: [mean(&sets[0]), mean(&sets[1])] })
}
