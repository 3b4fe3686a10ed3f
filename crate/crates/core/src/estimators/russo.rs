//! Exact check of the derivative formula
//! `d/dp E[X(ξ)] = Σ_e (E[X(ξ^e)] - E[X(ξ^{+,e})])` on tiny graphs, where
//! `ξ` has i.i.d. entries of law `G_p = pG + (1-p)δ_L`, `ξ^e` redraws entry
//! `e` from `G` and `ξ^{+,e}` sets it to `L`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest edge count the enumeration accepts.
pub const MAX_EDGES: usize = 16;
/// Largest atom count of `G`.
pub const MAX_ATOMS: usize = 3;
/// Largest number of joint edge states, `(atoms + 1)^|E|`.
pub const MAX_STATES: usize = 1 << 20;

/// A small graph with marked vertices; `X` is the passage time between them.
#[derive(Clone, Debug, PartialEq)]
pub struct RussoInstance {
    pub name: &'static str,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    /// `(value, mass)` atoms of `G`.
    pub atoms: Vec<(f64, f64)>,
    /// The closed-edge value `L`.
    pub cap: f64,
    pub source: usize,
    pub target: usize,
}

impl RussoInstance {
    /// One edge, `G = δ_0`: `E[X] = (1-p)L`.
    pub fn single_edge(cap: f64) -> Self {
        RussoInstance { name: "edge", vertices: 2, edges: vec![(0, 1)], atoms: vec![(0.0, 1.0)], cap, source: 0, target: 1 }
    }

    /// The unit square (4 edges), `G = δ_1`, `L = 3`, corner to opposite corner.
    pub fn square() -> Self {
        RussoInstance {
            name: "2x2",
            vertices: 4,
            edges: vec![(0, 1), (0, 2), (1, 3), (2, 3)],
            atoms: vec![(1.0, 1.0)],
            cap: 3.0,
            source: 0,
            target: 3,
        }
    }

    /// The 2×3 vertex grid (7 edges), `G = ½δ_1 + ½δ_2`, `L = 5`, corner to
    /// opposite corner.
    pub fn grid_2x3() -> Self {
        RussoInstance {
            name: "2x3",
            vertices: 6,
            edges: vec![(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)],
            atoms: vec![(1.0, 0.5), (2.0, 0.5)],
            cap: 5.0,
            source: 0,
            target: 5,
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "edge" => Some(Self::single_edge(1.0)),
            "2x2" => Some(Self::square()),
            "2x3" => Some(Self::grid_2x3()),
            _ => None,
        }
    }

    /// States per edge: closed, or one of the atoms.
    fn radix(&self) -> usize {
        self.atoms.len() + 1
    }

    pub fn state_count(&self) -> Option<usize> {
        self.radix().checked_pow(self.edges.len() as u32)
    }

    pub fn validate(&self) -> Result<()> {
        if self.edges.is_empty() || self.edges.len() > MAX_EDGES {
            return Err(Error::GuardExceeded(format!("{} edges (1..={MAX_EDGES} allowed)", self.edges.len())));
        }
        if self.atoms.is_empty() || self.atoms.len() > MAX_ATOMS {
            return Err(Error::GuardExceeded(format!("{} atoms (1..={MAX_ATOMS} allowed)", self.atoms.len())));
        }
        match self.state_count() {
            Some(s) if s <= MAX_STATES => {}
            _ => return Err(Error::GuardExceeded(format!("more than {MAX_STATES} joint states"))),
        }
        let mass: f64 = self.atoms.iter().map(|a| a.1).sum();
        if (mass - 1.0).abs() > 1e-12 || self.atoms.iter().any(|a| !(a.1 > 0.0)) {
            return Err(Error::Config(format!("atom masses must be positive and sum to one (got {mass})")));
        }
        if !(self.cap.is_finite() && self.cap >= 0.0) || self.atoms.iter().any(|a| !(a.0 >= 0.0 && a.0 <= self.cap)) {
            return Err(Error::Config(format!("atoms must lie in [0, L] with finite L = {}", self.cap)));
        }
        let v = self.vertices;
        if self.source >= v || self.target >= v || self.edges.iter().any(|&(a, b)| a >= v || b >= v || a == b) {
            return Err(Error::Config("edge or marked vertex out of range".into()));
        }
        Ok(())
    }

    /// `X`: Dijkstra on the tiny graph.
    fn passage(&self, weights: &[f64]) -> f64 {
        let n = self.vertices;
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[self.source] = 0.0;
        for _ in 0..n {
            let Some(u) = (0..n).filter(|&i| !done[i]).min_by(|&a, &b| dist[a].total_cmp(&dist[b])) else { break };
            done[u] = true;
            for (k, &(a, b)) in self.edges.iter().enumerate() {
                let v = if a == u { b } else if b == u { a } else { continue };
                dist[v] = dist[v].min(dist[u] + weights[k]);
            }
        }
        dist[self.target]
    }

    fn weights_of(&self, mut state: usize, out: &mut [f64]) {
        for w in out.iter_mut() {
            let digit = state % self.radix();
            state /= self.radix();
            *w = if digit == 0 { self.cap } else { self.atoms[digit - 1].0 };
        }
    }

    /// `X` on every joint state, mixed radix with edge 0 least significant.
    fn table(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.edges.len()];
        (0..self.state_count().expect("validated"))
            .map(|s| {
                self.weights_of(s, &mut w);
                self.passage(&w)
            })
            .collect()
    }
}

/// `E[X] = Σ_k c_k p^k (1-p)^{m-k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BernsteinPoly {
    pub coeffs: Vec<f64>,
}

impl BernsteinPoly {
    pub fn eval(&self, p: f64) -> f64 {
        let m = self.coeffs.len() as i32 - 1;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * libm::pow(p, k as f64) * libm::pow(1.0 - p, (m - k as i32) as f64))
            .sum()
    }

    pub fn derivative(&self, p: f64) -> f64 {
        let m = self.coeffs.len() as i32 - 1;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let k = k as i32;
                let up = if k > 0 { k as f64 * libm::pow(p, (k - 1) as f64) * libm::pow(1.0 - p, (m - k) as f64) } else { 0.0 };
                let down = if k < m {
                    (m - k) as f64 * libm::pow(p, k as f64) * libm::pow(1.0 - p, (m - k - 1) as f64)
                } else {
                    0.0
                };
                c * (up - down)
            })
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RussoRow {
    pub p: f64,
    pub expectation: f64,
    /// Derivative of the exact polynomial.
    pub derivative: f64,
    /// `Σ_e (E[X(ξ^e)] - E[X(ξ^{+,e})])`.
    pub rhs: f64,
    pub discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RussoReport {
    pub instance: &'static str,
    pub states: usize,
    pub polynomial: BernsteinPoly,
    pub rows: Vec<RussoRow>,
    pub max_discrepancy: f64,
}

pub fn russo_exact_check(instance: &RussoInstance, p_grid: &[f64]) -> Result<RussoReport> {
    instance.validate()?;
    if p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Config("p grid must lie in [0, 1]".into()));
    }
    let m = instance.edges.len();
    let radix = instance.radix();
    let xs = instance.table();
    let digit = |s: usize, e: usize| (s / radix.pow(e as u32)) % radix;
    let mass = |d: usize| if d == 0 { 1.0 } else { instance.atoms[d - 1].1 };

    // Left side: collect c_k = Σ_{k open} (Π g) X.
    let mut coeffs = vec![0.0; m + 1];
    for (s, x) in xs.iter().enumerate() {
        let (mut k, mut g) = (0, 1.0);
        for e in 0..m {
            let d = digit(s, e);
            k += (d != 0) as usize;
            g *= mass(d);
        }
        coeffs[k] += g * x;
    }
    let polynomial = BernsteinPoly { coeffs };

    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let prob = |d: usize| if d == 0 { 1.0 - p } else { p * instance.atoms[d - 1].1 };
        // Right side: for each e, sum over the other entries under G_p.
        let mut rhs = 0.0;
        for e in 0..m {
            let stride = radix.pow(e as u32);
            for s in (0..xs.len()).filter(|&s| digit(s, e) == 0) {
                let others: f64 = (0..m).filter(|&f| f != e).map(|f| prob(digit(s, f))).product();
                let resampled: f64 = (1..radix).map(|j| instance.atoms[j - 1].1 * xs[s + j * stride]).sum();
                rhs += others * (resampled - xs[s]);
            }
        }
        let derivative = polynomial.derivative(p);
        rows.push(RussoRow { p, expectation: polynomial.eval(p), derivative, rhs, discrepancy: (derivative - rhs).abs() });
    }
    let max_discrepancy = rows.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
    Ok(RussoReport { instance: instance.name, states: xs.len(), polynomial, rows, max_discrepancy })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_closed_form() {
        let r = russo_exact_check(&RussoInstance::single_edge(4.0), &[0.2, 0.5]).unwrap();
        for row in &r.rows {
            assert!((row.expectation - (1.0 - row.p) * 4.0).abs() < 1e-15);
            assert_eq!(row.derivative, -4.0);
            assert_eq!(row.rhs, -4.0);
        }
    }

    #[test]
    fn square_at_endpoints() {
        let r = russo_exact_check(&RussoInstance::square(), &[0.0, 1.0]).unwrap();
        // All closed: both routes cost 6; all open: 2.
        assert_eq!(r.rows[0].expectation, 6.0);
        assert_eq!(r.rows[1].expectation, 2.0);
        assert_eq!(r.states, 16);
    }

    #[test]
    fn guards() {
        let mut big = RussoInstance::square();
        big.edges = vec![(0, 1); 17];
        assert!(matches!(russo_exact_check(&big, &[0.5]), Err(Error::GuardExceeded(_))));
        let mut heavy = RussoInstance::square();
        heavy.atoms = vec![(4.0, 1.0)];
        assert!(matches!(russo_exact_check(&heavy, &[0.5]), Err(Error::Config(_))));
    }
}
