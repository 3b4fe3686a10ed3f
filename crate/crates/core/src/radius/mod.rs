//! Effective radius `R_e`: an exact checker of the defining event `V_N(e)`,
//! the q-good-box certificate, and the bypass construction built on top.

pub mod bypass;
pub mod exact;
pub mod goodbox;

use alloc::format;
use alloc::vec::Vec;

use crate::environment::CoupledEnvironment;
use crate::error::{Error, Result};
use crate::lattice::{BoxRegion, Edge};
use crate::percolation::Openness;

pub use bypass::{build_bypass, BypassRecord};
pub use exact::{exact_check, ExactOutcome};
pub use goodbox::{good_box_check, GoodBoxReport};

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusParams {
    pub c_star: u32,
    pub rho: u32,
    /// Truncation level `H` of the geodesics.
    pub h: f64,
    pub p: f64,
    pub lambda: f64,
    pub n_max: u32,
    /// Geodesics enumerated per endpoint pair before the exact checker gives up.
    pub path_cap: usize,
    /// Largest `N` the combined scan hands to the exact checker.
    pub auto_exact_max: u32,
}

impl RadiusParams {
    pub fn new(p: f64, lambda: f64, h: f64) -> Self {
        RadiusParams { c_star: 10, rho: 1, h, p, lambda, n_max: 32, path_cap: 10_000, auto_exact_max: 7 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_star < 3 {
            return Err(Error::Config(format!("C* = {} must be at least 3", self.c_star)));
        }
        if self.rho == 0 {
            return Err(Error::Config("ρ must be positive".into()));
        }
        if !(self.h > 0.0) {
            return Err(Error::Config(format!("H = {} must be positive", self.h)));
        }
        if self.n_max < 3 {
            return Err(Error::Config(format!("N_max = {} must be at least 3", self.n_max)));
        }
        Ok(())
    }

    /// `N_ρ = ⌊N / 8ρ²⌋`.
    pub fn n_rho(&self, n: u32) -> u32 {
        n / (8 * self.rho * self.rho)
    }

    /// Smallest scale the certificate can speak about.
    pub fn certificate_floor(&self) -> u32 {
        3.max(8 * self.rho * self.rho)
    }

    pub fn openness(&self) -> Openness {
        Openness::Q { p: self.p, lambda: self.lambda }
    }

    /// `C*·N`, the radius of the box every scale-`N` computation reads.
    pub fn reach(&self, n: u32) -> u32 {
        self.c_star * n
    }
}

/// Largest `N` the exact mode accepts in dimension `d`.
pub fn exact_guard(d: usize) -> u32 {
    match d {
        2 => 6,
        _ => 3,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusMode {
    /// Exact `V_N` checks for `3 ≤ N ≤` the dimension guard.
    Exact,
    /// First q-good box from `max(3, 8ρ²)` on.
    Certificate,
    /// Exact up to `auto_exact_max`, certificate beyond.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusMethod {
    Exact,
    Certificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Holds,
    Fails,
    /// Geodesic enumeration exceeded the cap.
    Overflow,
    /// No method applies at this scale.
    Skipped,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrailEntry<const D: usize> {
    pub n: u32,
    pub method: Option<RadiusMethod>,
    pub outcome: StepOutcome,
    pub report: Option<GoodBoxReport<D>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusResult<const D: usize> {
    pub edge: Edge<D>,
    /// `R̂_e`, absent when censored.
    pub value: Option<u32>,
    /// Largest scale examined without success.
    pub censored_at: Option<u32>,
    pub method: Option<RadiusMethod>,
    pub overflowed: bool,
    pub trail: Vec<TrailEntry<D>>,
}

impl<const D: usize> RadiusResult<D> {
    pub fn is_censored(&self) -> bool {
        self.value.is_none()
    }
}

/// Checks the environment covers `Λ_{C*N}(x_e)` and returns it materialized.
pub(crate) fn local_environment<const D: usize>(
    env: &CoupledEnvironment<D>,
    e: &Edge<D>,
    radius: u32,
) -> Result<CoupledEnvironment<D>> {
    let need = BoxRegion::new(e.x(), radius);
    let win = env.window();
    if !win.contains_box(&need) {
        let actual = win.radius.saturating_sub(win.center.linf_dist(&e.x()));
        return Err(Error::WindowTooSmall { required: radius, actual });
    }
    Ok(env.with_window(need)?.materialized())
}

/// `R̂_e` under the chosen mode.
pub fn effective_radius<const D: usize>(
    env: &CoupledEnvironment<D>,
    e: &Edge<D>,
    params: &RadiusParams,
    mode: RadiusMode,
) -> Result<RadiusResult<D>> {
    params.validate()?;
    let floor = params.certificate_floor();
    let (start, end) = match mode {
        RadiusMode::Exact => (3, params.n_max.min(exact_guard(D))),
        RadiusMode::Certificate => (floor, params.n_max),
        RadiusMode::Auto => (3, params.n_max),
    };
    let exact_top = match mode {
        RadiusMode::Exact => end,
        RadiusMode::Certificate => 0,
        RadiusMode::Auto => params.auto_exact_max,
    };
    let mut trail = Vec::new();
    let mut overflowed = false;
    for n in start..=end {
        let local = local_environment(env, e, params.reach(n))?;
        let mut entry = TrailEntry { n, method: None, outcome: StepOutcome::Skipped, report: None };
        let mut try_certificate = n > exact_top;
        if n <= exact_top {
            entry.method = Some(RadiusMethod::Exact);
            match exact_check(&local, e, n, params)? {
                ExactOutcome::Holds { .. } => entry.outcome = StepOutcome::Holds,
                ExactOutcome::Fails { .. } => entry.outcome = StepOutcome::Fails,
                ExactOutcome::Overflow { .. } => {
                    overflowed = true;
                    entry.outcome = StepOutcome::Overflow;
                    try_certificate = true;
                }
            }
        }
        if try_certificate && n >= floor {
            let report = good_box_check(&local, e, n, params, true)?;
            entry.method = Some(RadiusMethod::Certificate);
            entry.outcome = if report.is_good() { StepOutcome::Holds } else { StepOutcome::Fails };
            entry.report = Some(report);
        }
        let done = entry.outcome == StepOutcome::Holds;
        let method = entry.method;
        trail.push(entry);
        if done {
            return Ok(RadiusResult { edge: *e, value: Some(n), censored_at: None, method, overflowed, trail });
        }
    }
    Ok(RadiusResult { edge: *e, value: None, censored_at: Some(end), method: None, overflowed, trail })
}

/// One row of a survival table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurvivalRow {
    pub t: u32,
    pub n_ge_t: usize,
    pub n_total: usize,
    pub n_censored: usize,
}

/// Empirical `P(R̂ ≥ t)`. A radius censored at `N_c` is known to exceed
/// `N_c` and counts towards every `t ≤ N_c + 1`.
pub fn radius_tail<const D: usize>(results: &[RadiusResult<D>], grid: &[u32]) -> Vec<SurvivalRow> {
    let n_censored = results.iter().filter(|r| r.is_censored()).count();
    grid.iter()
        .map(|&t| SurvivalRow {
            t,
            n_ge_t: results
                .iter()
                .filter(|r| match (r.value, r.censored_at) {
                    (Some(v), _) => v >= t,
                    (None, Some(c)) => c + 1 >= t,
                    (None, None) => false,
                })
                .count(),
            n_total: results.len(),
            n_censored,
        })
        .collect()
}
