//! Greedy lattice animals over paths: `Γ_{L,N} = max_{γ ∈ P_L} Σ_{e∈γ} I_{e,N}`,
//! where `P_L` holds the self-avoiding paths from the origin with at most `L`
//! edges.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::environment::CoupledEnvironment;
use crate::error::{Error, Result};
use crate::lattice::{BoxRegion, Cuboid, Edge, Point};
use crate::radius::{effective_radius, RadiusMode, RadiusParams};
use crate::replicate::Replicator;
use crate::rng::{replica_seed, CounterRng, EdgeStream};
use crate::stats::Summary;

/// Largest `L` accepted by the exact maximizer in dimension `d`.
pub fn exact_guard(d: usize) -> u32 {
    match d {
        2 => 14,
        3 => 9,
        _ => 7,
    }
}

/// Bernoulli indicators `I_{e,N}` on the edges of `Λ_L(0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorField<const D: usize> {
    cuboid: Cuboid<D>,
    values: Vec<bool>,
    /// Scale `N` of the indicator class.
    pub n: u32,
    /// Dependency range `A·N`; zero for independent fields.
    pub range: u32,
    /// Declared bound on `sup_e E[I_{e,N}]`.
    pub q_n: f64,
    /// Edges left at zero because their radius was censored.
    pub censored: usize,
}

impl<const D: usize> IndicatorField<D> {
    /// All indicators equal to `value`.
    pub fn constant(radius: u32, n: u32, value: bool) -> Self {
        let cuboid = BoxRegion::new(Point::origin(), radius).cuboid();
        let values = vec![value; cuboid.vertex_count() * D];
        IndicatorField { cuboid, values, n, range: 0, q_n: if value { 1.0 } else { 0.0 }, censored: 0 }
    }

    /// Indicators given by `f` on the edges of `Λ_radius(0)`.
    pub fn from_fn(radius: u32, n: u32, q_n: f64, mut f: impl FnMut(&Edge<D>) -> bool) -> Self {
        let cuboid = BoxRegion::new(Point::origin(), radius).cuboid();
        let values = (0..cuboid.vertex_count() * D)
            .map(|i| cuboid.edge_at(i).is_some_and(|e| f(&e)))
            .collect();
        IndicatorField { cuboid, values, n, range: 0, q_n, censored: 0 }
    }

    /// Independent indicators with mean `q` drawn from the auxiliary stream of `seed`.
    pub fn iid(seed: u64, radius: u32, n: u32, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Config(format!("q_N = {q} must lie in [0, 1]")));
        }
        let rng = CounterRng::new(seed);
        Ok(Self::from_fn(radius, n, q, |e| rng.edge_uniform(e, EdgeStream::Aux) < q))
    }

    /// `I_{e,N} = 1{N - 1 ≤ R̂_e < N}` on the edges of `Λ_radius(0)`, with
    /// `A = 2C*`. Censored radii are left at zero and counted.
    pub fn from_radius(
        env: &CoupledEnvironment<D>,
        params: &RadiusParams,
        mode: RadiusMode,
        radius: u32,
        n: u32,
        q_n: f64,
    ) -> Result<Self> {
        let cuboid = BoxRegion::new(Point::origin(), radius).cuboid();
        let mut values = vec![false; cuboid.vertex_count() * D];
        let mut censored = 0;
        for (i, slot) in values.iter_mut().enumerate() {
            let Some(e) = cuboid.edge_at(i) else { continue };
            let r = effective_radius(env, &e, params, mode)?;
            match r.value {
                Some(v) => *slot = n >= 1 && v == n - 1,
                None => censored += 1,
            }
        }
        Ok(IndicatorField { cuboid, values, n, range: 2 * params.c_star * n, q_n, censored })
    }

    pub fn radius(&self) -> u32 {
        (self.cuboid.side(0) as u32 - 1) / 2
    }

    pub fn get(&self, e: &Edge<D>) -> bool {
        self.cuboid.edge_index(e).is_some_and(|i| self.values[i])
    }

    /// Empirical mean over the edges of the field.
    pub fn mean(&self) -> f64 {
        let (mut ones, mut total) = (0usize, 0usize);
        for (i, v) in self.values.iter().enumerate() {
            if self.cuboid.edge_at(i).is_some() {
                total += 1;
                ones += *v as usize;
            }
        }
        ones as f64 / total as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnimalResult<const D: usize> {
    pub l: u32,
    pub gamma: u32,
    /// A maximizing path, lexicographically first in search order.
    pub path: Vec<Point<D>>,
    pub exact: bool,
}

struct Search<'a, const D: usize> {
    field: &'a IndicatorField<D>,
    l: u32,
    visited: Vec<bool>,
    path: Vec<Point<D>>,
    best: u32,
    best_path: Vec<Point<D>>,
    total_ones: u32,
}

impl<const D: usize> Search<'_, D> {
    fn dfs(&mut self, score: u32, used_ones: u32) {
        if score > self.best {
            self.best = score;
            self.best_path = self.path.clone();
        }
        let len = self.path.len() as u32 - 1;
        if len == self.l {
            return;
        }
        let room = (self.l - len).min(self.total_ones - used_ones);
        if score + room <= self.best {
            return;
        }
        let u = *self.path.last().expect("non-empty");
        for v in u.neighbors() {
            let Some(iv) = self.field.cuboid.index_of(&v) else { continue };
            if self.visited[iv] {
                continue;
            }
            let one = self.field.get(&Edge::canonicalize(u, v).expect("adjacent")) as u32;
            self.visited[iv] = true;
            self.path.push(v);
            self.dfs(score + one, used_ones + one);
            self.path.pop();
            self.visited[iv] = false;
        }
    }
}

/// Exact `Γ_{L,N}` by depth-first search with branch-and-bound.
pub fn gamma_max<const D: usize>(field: &IndicatorField<D>, l: u32) -> Result<AnimalResult<D>> {
    let guard = exact_guard(D);
    if l > guard {
        return Err(Error::GuardExceeded(format!("L = {l} above the exact guard {guard}")));
    }
    if field.radius() < l {
        return Err(Error::WindowTooSmall { required: l, actual: field.radius() });
    }
    let origin = Point::origin();
    let mut visited = vec![false; field.cuboid.vertex_count()];
    visited[field.cuboid.index_of(&origin).expect("origin inside")] = true;
    let total_ones = field.values.iter().filter(|v| **v).count() as u32;
    let mut s = Search { field, l, visited, path: vec![origin], best: 0, best_path: vec![origin], total_ones };
    s.dfs(0, 0);
    Ok(AnimalResult { l, gamma: s.best, path: s.best_path, exact: true })
}

/// A lower bound on `Γ_{L,N}` for `L` beyond the exact guard: the best of
/// `restarts` randomized greedy walks (prefer unused 1-edges, break ties by
/// an auxiliary uniform). Never exact.
pub fn gamma_lower_bound<const D: usize>(field: &IndicatorField<D>, l: u32, seed: u64, restarts: u32) -> Result<AnimalResult<D>> {
    if field.radius() < l {
        return Err(Error::WindowTooSmall { required: l, actual: field.radius() });
    }
    let rng = CounterRng::new(seed);
    let origin = Point::origin();
    let mut best = AnimalResult { l, gamma: 0, path: vec![origin], exact: false };
    for r in 0..restarts {
        let mut visited = vec![false; field.cuboid.vertex_count()];
        visited[field.cuboid.index_of(&origin).expect("origin inside")] = true;
        let mut path = vec![origin];
        let mut score = 0;
        for step in 0..l {
            let u = *path.last().expect("non-empty");
            let pick = u
                .neighbors()
                .filter(|v| field.cuboid.index_of(v).is_some_and(|i| !visited[i]))
                .map(|v| {
                    let one = field.get(&Edge::canonicalize(u, v).expect("adjacent"));
                    let noise = rng.site_uniform(&v, r, step);
                    (one, noise, v)
                })
                .max_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let Some((one, _, v)) = pick else { break };
            visited[field.cuboid.index_of(&v).expect("inside")] = true;
            score += one as u32;
            path.push(v);
        }
        if score > best.gamma {
            best = AnimalResult { l, gamma: score, path, exact: false };
        }
    }
    Ok(best)
}

/// One row of the `E[Γ_{L,N}] ≤ C·L·N^d·q_N^{1/d}` check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundRow {
    pub l: u32,
    pub n: u32,
    pub q_n: f64,
    pub mean_gamma: f64,
    pub stderr: f64,
    /// `Ê[Γ] / (L·N^d·q_N^{1/d})`; `None` when `q_N = 0`.
    pub ratio: Option<f64>,
}

/// Monte Carlo `Ê[Γ_{L,N}]` over i.i.d. fields with mean `q_n`, replica `i`
/// using seed `prf(seed, i)`; the same fields serve every `L`.
pub fn bound_check<const D: usize>(
    q_n: f64,
    n: u32,
    l_grid: &[u32],
    replicas: usize,
    seed: u64,
    replicator: &impl Replicator,
) -> Result<Vec<BoundRow>> {
    let l_max = *l_grid.iter().max().ok_or(Error::EmptySet)?;
    if l_max > exact_guard(D) {
        return Err(Error::GuardExceeded(format!("L = {l_max} above the exact guard {}", exact_guard(D))));
    }
    let per: Vec<Result<Vec<f64>>> = replicator.run(replicas, |i| {
        let field = IndicatorField::<D>::iid(replica_seed(seed, i as u64), l_max, n, q_n)?;
        l_grid.iter().map(|&l| Ok(gamma_max(&field, l)?.gamma as f64)).collect()
    });
    let per: Vec<Vec<f64>> = per.into_iter().collect::<Result<_>>()?;
    Ok(l_grid
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let xs: Vec<f64> = per.iter().map(|r| r[k]).collect();
            let s = Summary::of(&xs);
            let scale = l as f64 * libm::pow(n as f64, D as f64) * libm::pow(q_n, 1.0 / D as f64);
            BoundRow { l, n, q_n, mean_gamma: s.mean, stderr: s.stderr, ratio: (q_n > 0.0).then(|| s.mean / scale) }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replicate::Sequential;

    #[test]
    fn constant_fields() {
        let ones = IndicatorField::<2>::constant(6, 1, true);
        let zeros = IndicatorField::<2>::constant(6, 1, false);
        for l in 0..=6 {
            let r = gamma_max(&ones, l).unwrap();
            assert_eq!(r.gamma, l);
            assert_eq!(r.path.len() as u32, l + 1);
            assert_eq!(gamma_max(&zeros, l).unwrap().gamma, 0);
        }
    }

    #[test]
    fn guard_and_window() {
        let f = IndicatorField::<2>::constant(20, 1, false);
        assert!(matches!(gamma_max(&f, 15), Err(Error::GuardExceeded(_))));
        let small = IndicatorField::<2>::constant(3, 1, false);
        assert!(matches!(gamma_max(&small, 4), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn argmax_path_attains_gamma() {
        let f = IndicatorField::<2>::iid(5, 10, 2, 0.3).unwrap();
        let r = gamma_max(&f, 10).unwrap();
        crate::lattice::validate_path(&r.path).unwrap();
        assert_eq!(r.path[0], Point::origin());
        let sum: u32 = r.path.windows(2).map(|w| f.get(&Edge::canonicalize(w[0], w[1]).unwrap()) as u32).sum();
        assert_eq!(sum, r.gamma);
        let lb = gamma_lower_bound(&f, 10, 1, 50).unwrap();
        assert!(!lb.exact && lb.gamma <= r.gamma);
    }

    #[test]
    fn bound_rows_for_trivial_fields() {
        let rows = bound_check::<2>(1.0, 2, &[3, 5], 3, 9, &Sequential).unwrap();
        assert_eq!(rows[0].mean_gamma, 3.0);
        assert_eq!(rows[1].ratio, Some(5.0 / (5.0 * 4.0)));
        let zero = bound_check::<2>(0.0, 2, &[4], 3, 9, &Sequential).unwrap();
        assert_eq!((zero[0].mean_gamma, zero[0].ratio), (0.0, None));
    }
}
