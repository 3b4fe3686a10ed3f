//! Monotone-coupled random environments.
//!
//! Each edge carries a pair of uniforms `(U_e, V_e)`; at parameter `p` the
//! weight is `F^{-1}(V_e)` when `U_e ≤ p` and `+∞` otherwise. Every `p`, every
//! truncation level and both openness notions are read off the same pair.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{BoxRegion, Cuboid, Edge, Point};
use crate::law::WeightLaw;
use crate::rng::{CounterRng, MAX_COORD};

/// Literature values of the bond percolation threshold.
pub fn critical_probability(d: usize) -> f64 {
    match d {
        1 => 1.0,
        2 => 0.5,
        3 => 0.2488,
        _ => 1.0 / (2.0 * d as f64 - 1.0),
    }
}

#[derive(Clone, Debug)]
pub struct CoupledEnvironment<const D: usize> {
    seed: u64,
    rng: CounterRng,
    window: BoxRegion<D>,
    cuboid: Cuboid<D>,
    law: WeightLaw,
    cache: Option<(Cuboid<D>, Vec<(f64, f64)>)>,
}

impl<const D: usize> CoupledEnvironment<D> {
    pub fn new(seed: u64, window: BoxRegion<D>, law: WeightLaw) -> Result<Self> {
        let reach = window.center.linf_norm() as i64 + window.radius as i64 + 1;
        if reach > MAX_COORD as i64 {
            return Err(Error::Config(format!(
                "window of radius {} around {} exceeds the addressable lattice",
                window.radius, window.center
            )));
        }
        Ok(CoupledEnvironment {
            seed,
            rng: CounterRng::new(seed),
            window,
            cuboid: window.cuboid(),
            law,
            cache: None,
        })
    }

    /// Precomputes the uniforms of every window edge. Values are identical to
    /// the lazy path; only lookups get cheaper.
    pub fn materialized(self) -> Self {
        let all = self.cuboid;
        self.cached(&all)
    }

    /// Precomputes the uniforms of edges with lower endpoint in `region`
    /// (clipped to the window); other edges stay lazy.
    pub fn cached(mut self, region: &Cuboid<D>) -> Self {
        let (lo, hi) = (region.lo(), region.hi());
        let (wlo, whi) = (self.cuboid.lo(), self.cuboid.hi());
        let mut a = [0i32; D];
        let mut b = [0i32; D];
        for k in 0..D {
            a[k] = lo.0[k].max(wlo.0[k]);
            b[k] = hi.0[k].min(whi.0[k]).max(a[k]);
        }
        let zone = Cuboid::new(Point(a), Point(b));
        let slots = zone.vertex_count() * D;
        let mut table = Vec::with_capacity(slots);
        for i in 0..slots {
            table.push(match zone.edge_at(i) {
                Some(e) => self.rng.edge_uniforms(&e),
                None => (f64::NAN, f64::NAN),
            });
        }
        self.cache = Some((zone, table));
        self
    }

    /// Same seed and law on another window.
    pub fn with_window(&self, window: BoxRegion<D>) -> Result<Self> {
        Self::new(self.seed, window, self.law.clone())
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn window(&self) -> BoxRegion<D> {
        self.window
    }

    pub fn cuboid(&self) -> &Cuboid<D> {
        &self.cuboid
    }

    pub fn law(&self) -> &WeightLaw {
        &self.law
    }

    pub fn rng(&self) -> &CounterRng {
        &self.rng
    }

    pub fn contains_edge(&self, e: &Edge<D>) -> bool {
        self.cuboid.contains(&e.x()) && self.cuboid.contains(&e.y())
    }

    fn check(&self, e: &Edge<D>) -> Result<()> {
        if self.contains_edge(e) {
            Ok(())
        } else {
            Err(Error::OutOfWindow(format!("{e}")))
        }
    }

    /// `(U_e, V_e)`.
    pub fn uniforms(&self, e: &Edge<D>) -> Result<(f64, f64)> {
        self.check(e)?;
        Ok(self.uniforms_unchecked(e))
    }

    #[inline]
    pub(crate) fn uniforms_unchecked(&self, e: &Edge<D>) -> (f64, f64) {
        if let Some((zone, table)) = &self.cache {
            if let Some(i) = zone.edge_index(e) {
                return table[i];
            }
        }
        self.rng.edge_uniforms(e)
    }

    #[inline]
    pub(crate) fn weight_unchecked(&self, e: &Edge<D>, p: f64) -> f64 {
        let (u, v) = self.uniforms_unchecked(e);
        if u <= p {
            self.law.quantile(v)
        } else {
            f64::INFINITY
        }
    }

    /// `τ_e` at parameter `p`; `+∞` for closed edges.
    pub fn weight(&self, e: &Edge<D>, p: f64) -> Result<f64> {
        self.check(e)?;
        Ok(self.weight_unchecked(e, p))
    }

    /// `τ_e ∧ M`.
    pub fn truncated_weight(&self, e: &Edge<D>, p: f64, m: f64) -> Result<f64> {
        if !(m > 0.0) {
            return Err(Error::Precondition(format!("truncation level {m} must be positive")));
        }
        Ok(self.weight(e, p)?.min(m))
    }

    /// The finite weight the edge carries whenever it is open: `F^{-1}(V_e)`.
    pub fn open_weight(&self, e: &Edge<D>) -> Result<f64> {
        Ok(self.law.quantile(self.uniforms(e)?.1))
    }

    /// `τ_e ≤ λ`.
    pub fn is_q_open(&self, e: &Edge<D>, p: f64, lambda: f64) -> Result<bool> {
        Ok(self.weight(e, p)? <= lambda)
    }

    /// `τ_e < ∞`.
    pub fn is_p_open(&self, e: &Edge<D>, p: f64) -> Result<bool> {
        Ok(self.weight(e, p)?.is_finite())
    }
}

/// Smallest `λ` with `F([0, λ]) ≥ max{q0/p0, 1 - δ0}`, `q0 = (p0 + p_c)/2`.
pub fn lambda_for(law: &WeightLaw, p0: f64, delta0: f64, p_c: f64) -> Result<f64> {
    if !(p0 > p_c && p0 <= 1.0) {
        return Err(Error::Config(format!("p0 = {p0} must lie in (p_c, 1] with p_c = {p_c}")));
    }
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(Error::Config(format!("delta0 = {delta0} must lie in (0, 1)")));
    }
    let q0 = 0.5 * (p0 + p_c);
    let target = (q0 / p0).max(1.0 - delta0);
    if target > 1.0 {
        return Err(Error::Config(format!("required mass {target} exceeds one")));
    }
    let lambda = law.quantile(target);
    // Guard against rounding in the accumulated atom masses.
    if law.cdf(lambda) + 1e-12 < target {
        return Err(Error::Config(format!("no finite λ reaches mass {target}")));
    }
    Ok(lambda)
}

/// `p, p0, λ, M` and the derived `q`, `q0`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentParams {
    pub p: f64,
    pub p0: f64,
    pub lambda: f64,
    pub m: f64,
    pub p_c: f64,
}

impl EnvironmentParams {
    pub fn q(&self, law: &WeightLaw) -> f64 {
        self.p * law.cdf(self.lambda)
    }

    pub fn q0(&self) -> f64 {
        0.5 * (self.p0 + self.p_c)
    }

    pub fn validate(&self, law: &WeightLaw) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) || self.p < self.p0 {
            return Err(Error::Config(format!("p = {} must lie in [p0, 1] = [{}, 1]", self.p, self.p0)));
        }
        if law.mass_at_zero() >= self.p_c {
            return Err(Error::Config(format!(
                "F(0) = {} must stay below p_c = {}",
                law.mass_at_zero(),
                self.p_c
            )));
        }
        if !(self.m > 0.0) {
            return Err(Error::Config(format!("M = {} must be positive", self.m)));
        }
        Ok(())
    }

    /// Violations of `q0 ≤ q ≤ p ≤ q + δ0`; advisory only.
    pub fn regime_warnings(&self, law: &WeightLaw, delta0: f64) -> Vec<String> {
        let q = self.q(law);
        let mut out = Vec::new();
        if q < self.q0() {
            out.push(format!("q = {q} below q0 = {}", self.q0()));
        }
        if self.p > q + delta0 + 1e-12 {
            out.push(format!("p = {} exceeds q + δ0 = {}", self.p, q + delta0));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Point;
    use proptest::prelude::*;

    fn env(seed: u64, r: u32, law: &str) -> CoupledEnvironment<2> {
        CoupledEnvironment::new(seed, BoxRegion::new(Point::origin(), r), law.parse().unwrap()).unwrap()
    }

    #[test]
    fn extreme_parameters() {
        let e = env(1, 4, "dirac:1");
        for edge in e.cuboid().clone().edges() {
            assert_eq!(e.weight(&edge, 1.0).unwrap(), 1.0);
            assert_eq!(e.weight(&edge, 0.0).unwrap(), f64::INFINITY);
        }
    }

    #[test]
    fn open_fraction_matches_p() {
        let e = env(42, 8, "dirac:1");
        let edges: Vec<_> = e.cuboid().edges().collect();
        let open = edges.iter().filter(|x| e.is_p_open(x, 0.7).unwrap()).count();
        let n = edges.len() as f64;
        let tol = 3.0 * libm::sqrt(0.21 / n);
        assert!((open as f64 / n - 0.7).abs() <= tol, "fraction {}", open as f64 / n);
    }

    #[test]
    fn q_open_fraction() {
        let e = env(42, 8, "uniform:0:1");
        let edges: Vec<_> = e.cuboid().edges().collect();
        let q = edges.iter().filter(|x| e.is_q_open(x, 0.9, 0.5).unwrap()).count() as f64 / edges.len() as f64;
        let n = edges.len() as f64;
        assert!((q - 0.45).abs() <= 3.0 * libm::sqrt(0.45 * 0.55 / n), "q fraction {q}");
        for x in &edges {
            if e.is_q_open(x, 0.9, 0.5).unwrap() {
                assert!(e.is_p_open(x, 0.9).unwrap());
            }
        }
    }

    #[test]
    fn truncation() {
        let e = env(3, 2, "dirac:10");
        let edge = Edge::along(Point::origin(), 0);
        assert_eq!(e.truncated_weight(&edge, 0.0, 10.0).unwrap(), 10.0);
        assert_eq!(e.truncated_weight(&edge, 1.0, 10.0).unwrap(), 10.0);
        let e = env(3, 2, "dirac:0.3");
        assert_eq!(e.truncated_weight(&edge, 1.0, 10.0).unwrap(), 0.3);
        assert!(e.truncated_weight(&edge, 1.0, 0.0).is_err());
    }

    #[test]
    fn q_open_boundary_inclusive() {
        let e = env(5, 2, "dirac:0.5");
        let edge = Edge::along(Point::origin(), 1);
        assert!(e.is_q_open(&edge, 1.0, 0.5).unwrap());
        assert!(!e.is_q_open(&edge, 0.0, 0.5).unwrap());
        assert!(!e.is_p_open(&edge, 0.0).unwrap());
    }

    #[test]
    fn out_of_window_rejected() {
        let e = env(5, 2, "dirac:1");
        let edge = Edge::along(Point([2, 0]), 0);
        assert!(matches!(e.weight(&edge, 0.5), Err(Error::OutOfWindow(_))));
    }

    #[test]
    fn nested_windows_agree() {
        let small = env(9, 3, "uniform:0:1");
        let big = env(9, 30, "uniform:0:1").materialized();
        for edge in small.cuboid().edges() {
            assert_eq!(small.uniforms(&edge).unwrap(), big.uniforms(&edge).unwrap());
        }
    }

    #[test]
    fn marginal_matches_law() {
        // Kolmogorov–Smirnov distance of finite weights against F, ≥ 1e5 edges.
        let e = env(11, 120, "uniform:0:1");
        let mut w: Vec<f64> = e
            .cuboid()
            .edges()
            .map(|x| e.weight(&x, 0.8).unwrap())
            .filter(|w| w.is_finite())
            .collect();
        assert!(w.len() >= 40_000);
        let e2 = env(12, 180, "uniform:0:1");
        w.extend(e2.cuboid().edges().map(|x| e2.weight(&x, 0.8).unwrap()).filter(|w| w.is_finite()));
        assert!(w.len() >= 100_000);
        w.sort_by(f64::total_cmp);
        let n = w.len() as f64;
        let ks = w
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let f = *x;
                ((i as f64 + 1.0) / n - f).abs().max((f - i as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS distance {ks}");
    }

    #[test]
    fn lambda_examples() {
        let uni = WeightLaw::uniform(0.0, 1.0).unwrap();
        assert!((lambda_for(&uni, 0.75, 0.05, 0.5).unwrap() - 0.95).abs() < 1e-15);
        assert_eq!(lambda_for(&WeightLaw::Dirac(1.0), 0.8, 0.05, 0.5).unwrap(), 1.0);
        let atoms = WeightLaw::atoms([(0.0, 0.5), (3.0, 0.5)]).unwrap();
        assert_eq!(lambda_for(&atoms, 0.8, 0.05, 0.5).unwrap(), 3.0);
        assert!(lambda_for(&uni, 0.4, 0.05, 0.5).is_err());
    }

    #[test]
    fn params_regime() {
        let law = WeightLaw::Dirac(1.0);
        let prm = EnvironmentParams { p: 0.85, p0: 0.6, lambda: 1.0, m: 10.0, p_c: 0.5 };
        assert!(prm.validate(&law).is_ok());
        assert!(prm.regime_warnings(&law, 0.05).is_empty());
        let low = EnvironmentParams { lambda: 0.5, ..prm.clone() };
        assert!(!low.regime_warnings(&law, 0.05).is_empty());
        let bad = EnvironmentParams { p: 0.5, ..prm };
        assert!(bad.validate(&law).is_err());
        let heavy_zero = WeightLaw::atoms([(0.0, 0.6), (1.0, 0.4)]).unwrap();
        let prm = EnvironmentParams { p: 0.85, p0: 0.6, lambda: 1.0, m: 10.0, p_c: 0.5 };
        assert!(prm.validate(&heavy_zero).is_err());
    }

    proptest! {
        #[test]
        fn monotone_coupling(seed in 0u64..1000, x in -20i32..20, y in -20i32..20, p in 0.0f64..1.0, dp in 0.0f64..1.0) {
            let e = env(seed, 25, "uniform:0:2");
            let edge = Edge::along(Point([x, y]), (seed % 2) as usize);
            let hi = (p + dp).min(1.0);
            prop_assert!(e.weight(&edge, hi).unwrap() <= e.weight(&edge, p).unwrap());
        }

        #[test]
        fn deterministic(seed in 0u64..u64::MAX, x in -5i32..5) {
            let a = env(seed, 6, "atoms:1:0.5,2:0.5");
            let b = env(seed, 6, "atoms:1:0.5,2:0.5");
            let edge = Edge::along(Point([x, 0]), 1);
            prop_assert_eq!(a.weight(&edge, 0.6).unwrap().to_bits(), b.weight(&edge, 0.6).unwrap().to_bits());
        }
    }
}
