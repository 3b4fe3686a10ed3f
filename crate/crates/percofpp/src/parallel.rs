use percofpp_core::replicate::Replicator;
use rayon::prelude::*;

/// Runs replicas on a dedicated rayon pool. `collect` on an indexed parallel
/// iterator keeps index order, so results do not depend on the thread count.
pub struct RayonReplicator {
    pool: rayon::ThreadPool,
}

impl RayonReplicator {
    /// `threads = 0` uses every available core.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        Ok(RayonReplicator { pool: rayon::ThreadPoolBuilder::new().num_threads(threads).build()? })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Replicator for RayonReplicator {
    fn run<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use percofpp_core::replicate::Sequential;

    #[test]
    fn order_matches_sequential() {
        let f = |i: usize| i * i + 1;
        let par = RayonReplicator::new(3).unwrap();
        assert_eq!(par.run(100, f), Sequential.run(100, f));
    }
}
