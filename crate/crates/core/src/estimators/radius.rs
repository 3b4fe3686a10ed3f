//! Ensembles built on the effective radius: radius samples at a fixed edge,
//! bypass validity along sampled geodesics, and radius sums along geodesics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{Edge, Point};
use crate::radius::{build_bypass, effective_radius, RadiusMethod, RadiusMode, RadiusParams, RadiusResult};
use crate::replicate::Replicator;
use crate::stats::Summary;

use super::{truncated_geodesic, ExperimentConfig};

/// `R̂_e` of the edge `{0, e1}` in each replica environment.
pub fn radius_ensemble<const D: usize>(
    config: &ExperimentConfig,
    params: &RadiusParams,
    mode: RadiusMode,
    replicator: &impl Replicator,
) -> Result<Vec<RadiusResult<D>>> {
    config.check_dim::<D>()?;
    params.validate()?;
    let e = Edge::along(Point::<D>::origin(), 0);
    let radius = params.reach(params.n_max) + 1;
    let rows = replicator.run(config.replicas, |i| {
        let env = config.environment::<D>(i, radius)?;
        effective_radius(&env, &e, params, mode)
    });
    rows.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BypassCase<const D: usize> {
    pub replica: usize,
    pub edge: Edge<D>,
    pub radius: u32,
    pub method: Option<RadiusMethod>,
    pub new_edges: usize,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct BypassBatch<const D: usize> {
    /// Cases with a radius and both geodesic ends outside `Λ_3R(e)`.
    pub cases: usize,
    pub censored: usize,
    /// Sampled edges too close to an end of the geodesic for their radius.
    pub skipped: usize,
    pub infeasible: usize,
    pub verified: usize,
    pub failed: usize,
    pub records: Vec<BypassCase<D>>,
}

impl<const D: usize> BypassBatch<D> {
    /// Censored share of the sampled edges that were not skipped.
    pub fn censored_fraction(&self) -> f64 {
        self.censored as f64 / (self.cases + self.censored).max(1) as f64
    }
}

fn window_radius(n: u32, k: u32, params: &RadiusParams) -> u32 {
    k.max(n + params.reach(params.n_max) + 1)
}

/// Samples `per_geodesic` edges of the canonical geodesic of
/// `T_M^{Λ_K}(0, n·e1)` per replica and builds their bypasses. The radius
/// parameters are used with `p`, `λ` from the config and `H = M`.
pub fn bypass_batch<const D: usize>(
    config: &ExperimentConfig,
    p: f64,
    n: u32,
    params: &RadiusParams,
    mode: RadiusMode,
    per_geodesic: usize,
    replicator: &impl Replicator,
) -> Result<BypassBatch<D>> {
    config.check_dim::<D>()?;
    let (m, k) = (config.m_for(n), config.k_for(n));
    let params = RadiusParams { p, lambda: config.lambda()?, h: m, ..params.clone() };
    params.validate()?;
    let rows: Vec<Result<BypassBatch<D>>> = replicator.run(config.replicas, |i| {
        let env = config.environment::<D>(i, window_radius(n, k, &params))?;
        let gamma = truncated_geodesic(&env, p, m, k, n)?;
        let edges = gamma.edges();
        let mut out = BypassBatch::default();
        // Spread the sample over the interior of the geodesic.
        let usable: Vec<usize> = (0..edges.len()).filter(|&j| j >= 10 && j + 10 <= edges.len()).collect();
        let take = per_geodesic.min(usable.len());
        for s in 0..take {
            let e = edges[usable[s * usable.len() / take]];
            let r = effective_radius(&env, &e, &params, mode)?;
            let Some(radius) = r.value else {
                out.censored += 1;
                continue;
            };
            match build_bypass(&gamma, &e, radius, &env, &params) {
                Err(Error::Precondition(_)) => out.skipped += 1,
                Err(Error::BypassInfeasible(_)) => {
                    out.cases += 1;
                    out.infeasible += 1;
                }
                Err(err) => return Err(err),
                Ok(rec) => {
                    out.cases += 1;
                    let ok = rec.verified();
                    if ok {
                        out.verified += 1;
                    } else {
                        out.failed += 1;
                    }
                    out.records.push(BypassCase { replica: i, edge: e, radius, method: r.method, new_edges: rec.new_edges, verified: ok });
                }
            }
        }
        Ok(out)
    });
    let mut total = BypassBatch::default();
    for row in rows {
        let row = row?;
        total.cases += row.cases;
        total.censored += row.censored;
        total.skipped += row.skipped;
        total.infeasible += row.infeasible;
        total.verified += row.verified;
        total.failed += row.failed;
        total.records.extend(row.records);
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathSumRow {
    pub n: u32,
    /// `Σ_{e∈γ} R̂_e 1{R̂_e ≤ M} / n` over replicas.
    pub sum_over_n: Summary,
    pub length_over_n: Summary,
    /// Empirical `P(|γ| ≥ 4n)`.
    pub long_fraction: f64,
    /// Geodesic edges whose radius was censored (left out of the sum).
    pub censored: usize,
    pub lengths: Vec<usize>,
}

/// Radius sums along the canonical geodesic of `T_M^{Λ_K}(0, n·e1)` for each
/// `n` of the config; parameters as in [`bypass_batch`].
pub fn path_sum_check<const D: usize>(
    config: &ExperimentConfig,
    p: f64,
    params: &RadiusParams,
    mode: RadiusMode,
    replicator: &impl Replicator,
) -> Result<Vec<PathSumRow>> {
    config.check_dim::<D>()?;
    let mut out = Vec::new();
    for &n in &config.n_grid {
        let (m, k) = (config.m_for(n), config.k_for(n));
        let params = RadiusParams { p, lambda: config.lambda()?, h: m, ..params.clone() };
        params.validate()?;
        let rows: Vec<Result<(f64, usize, usize)>> = replicator.run(config.replicas, |i| {
            let env = config.environment::<D>(i, window_radius(n, k, &params))?;
            let gamma = truncated_geodesic(&env, p, m, k, n)?;
            let (mut sum, mut censored) = (0.0, 0);
            for e in gamma.edges() {
                match effective_radius(&env, &e, &params, mode)?.value {
                    Some(r) if r as f64 <= m => sum += r as f64,
                    Some(_) => {}
                    None => censored += 1,
                }
            }
            Ok((sum / n as f64, gamma.len(), censored))
        });
        let rows: Vec<(f64, usize, usize)> = rows.into_iter().collect::<Result<_>>()?;
        let lengths: Vec<usize> = rows.iter().map(|r| r.1).collect();
        out.push(PathSumRow {
            n,
            sum_over_n: Summary::of(&rows.iter().map(|r| r.0).collect::<Vec<_>>()),
            length_over_n: Summary::of(&lengths.iter().map(|l| *l as f64 / n as f64).collect::<Vec<_>>()),
            long_fraction: lengths.iter().filter(|l| **l >= 4 * n as usize).count() as f64 / rows.len() as f64,
            censored: rows.iter().map(|r| r.2).sum(),
            lengths,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replicate::Sequential;

    #[test]
    fn full_lattice_radius_is_three() {
        let c = ExperimentConfig { p_grid: alloc::vec![1.0], replicas: 2, ..Default::default() };
        let params = RadiusParams { n_max: 4, ..RadiusParams::new(1.0, 1.0, 10.0) };
        let rs = radius_ensemble::<2>(&c, &params, RadiusMode::Exact, &Sequential).unwrap();
        assert!(rs.iter().all(|r| r.value == Some(3)));
    }

    #[test]
    fn full_lattice_bypasses_verify() {
        let c = ExperimentConfig { p_grid: alloc::vec![1.0], replicas: 1, ..Default::default() };
        let params = RadiusParams { n_max: 4, ..RadiusParams::new(1.0, 1.0, 10.0) };
        let b = bypass_batch::<2>(&c, 1.0, 24, &params, RadiusMode::Exact, 3, &Sequential).unwrap();
        assert_eq!((b.cases, b.verified, b.censored), (3, 3, 0));
        assert!(b.records.iter().all(|r| r.radius == 3 && r.new_edges == 12));
    }
}
