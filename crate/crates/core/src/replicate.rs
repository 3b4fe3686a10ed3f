//! Replica scheduling. Estimators describe one replica as a pure function of
//! its index; a [`Replicator`] decides how the indices are executed. Results
//! always come back in index order, so output never depends on scheduling.

use alloc::vec::Vec;

pub trait Replicator: Sync {
    fn run<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs replicas one after another on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Replicator for Sequential {
    fn run<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}
