//! `|T([0]_q, [n·e1]_q) - T_M^{Λ_K}(0, n·e1)|` and its two-step decomposition
//! through `T_M([0]_q, [n·e1]_q)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{BoxRegion, Point};
use crate::passage::{passage_time, WeightView};
use crate::percolation::{label_clusters, Openness};
use crate::replicate::Replicator;
use crate::stats::Summary;

use super::{target, ExperimentConfig};

/// Slack allowed in the per-replica triangle inequality.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapParts {
    /// `|T([0]_q,[n]_q) - T_M^{Λ_K}(0,n)|`.
    pub total: f64,
    /// `|T([0]_q,[n]_q) - T_M([0]_q,[n]_q)|`.
    pub first: f64,
    /// `|T_M([0]_q,[n]_q) - T_M^{Λ_K}(0,n)|`.
    pub second: f64,
}

impl GapParts {
    pub fn triangle_holds(&self) -> bool {
        self.total <= self.first + self.second + TRIANGLE_TOLERANCE
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapRow {
    pub n: u32,
    pub m: f64,
    pub used: usize,
    /// Replicas without a q-proxy cluster.
    pub excluded: usize,
    pub total: Summary,
    pub first: Summary,
    pub second: Summary,
    pub triangle_violations: usize,
    pub parts: Vec<GapParts>,
}

impl GapRow {
    /// `(log n)³`.
    pub fn scale(&self) -> f64 {
        libm::pow(libm::log(self.n as f64), 3.0)
    }

    pub fn normalized(&self) -> f64 {
        self.total.mean / self.scale()
    }
}

/// One row per entry of `config.n_grid`. The q-regularization uses the
/// labeling of `config.label_window(n)`; `T` and `T_M` run over `Λ_K`.
pub fn truncation_gap<const D: usize>(config: &ExperimentConfig, p: f64, replicator: &impl Replicator) -> Result<Vec<GapRow>> {
    config.check_dim::<D>()?;
    let lambda = config.lambda()?;
    let mut out = Vec::new();
    for &n in &config.n_grid {
        let (m, k) = (config.m_for(n), config.k_for(n));
        let window = config.label_window::<D>(n);
        let region = BoxRegion::new(Point::origin(), k).cuboid();
        let rows: Vec<Result<Option<GapParts>>> = replicator.run(config.replicas, |i| {
            let env = config.environment::<D>(i, k.max(window.linf_radius_span()))?.cached(&window);
            let lab = label_clusters(&env, &window, Openness::Q { p, lambda })?;
            let Some(id) = lab.infinite_cluster_proxy(crate::percolation::DEFAULT_PROXY_FRACTION) else {
                return Ok(None);
            };
            let a = lab.closest_in(&Point::origin(), id)?;
            let b = lab.closest_in(&target(n), id)?;
            let full = passage_time(&WeightView::new(&env, p, None, region)?, &a, &b)?;
            let capped = WeightView::new(&env, p, Some(m), region)?;
            let tm_ab = passage_time(&capped, &a, &b)?;
            let tm = passage_time(&capped, &Point::origin(), &target(n))?;
            if !full.is_finite() {
                return Err(Error::NoPath(alloc::format!("{b}")));
            }
            Ok(Some(GapParts { total: (full - tm).abs(), first: (full - tm_ab).abs(), second: (tm_ab - tm).abs() }))
        });
        let rows: Vec<Option<GapParts>> = rows.into_iter().collect::<Result<_>>()?;
        let parts: Vec<GapParts> = rows.iter().flatten().copied().collect();
        let pick = |f: fn(&GapParts) -> f64| Summary::of(&parts.iter().map(f).collect::<Vec<_>>());
        out.push(GapRow {
            n,
            m,
            used: parts.len(),
            excluded: rows.len() - parts.len(),
            total: pick(|g| g.total),
            first: pick(|g| g.first),
            second: pick(|g| g.second),
            triangle_violations: parts.iter().filter(|g| !g.triangle_holds()).count(),
            parts,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replicate::Sequential;

    #[test]
    fn full_lattice_has_no_gap() {
        let c = ExperimentConfig { p_grid: alloc::vec![1.0], n_grid: alloc::vec![8, 16], replicas: 3, ..Default::default() };
        let rows = truncation_gap::<2>(&c, 1.0, &Sequential).unwrap();
        for r in rows {
            assert_eq!((r.total.mean, r.first.mean, r.second.mean), (0.0, 0.0, 0.0));
            assert_eq!((r.used, r.excluded, r.triangle_violations), (3, 0, 0));
        }
    }

    #[test]
    fn decomposition_holds() {
        let c = ExperimentConfig { n_grid: alloc::vec![16], replicas: 5, ..Default::default() };
        let rows = truncation_gap::<2>(&c, 0.85, &Sequential).unwrap();
        assert_eq!(rows[0].triangle_violations, 0);
        assert_eq!(rows[0].used + rows[0].excluded, 5);
    }
}
