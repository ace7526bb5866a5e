//! Rayon-backed chunk executor.

use std::num::NonZeroUsize;

use croftonlab_core::exec::ChunkMap;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "CROFTONLAB_THREADS";

/// Runs chunks on a private pool and returns results in chunk order, so
/// reductions downstream see the same sequence for any thread count.
pub struct Parallel {
    pool: ThreadPool,
}

impl Parallel {
    pub fn new(threads: usize) -> anyhow::Result<Self> {
        let pool = ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
        Ok(Self { pool })
    }

    /// `CROFTONLAB_THREADS` if set and positive, else all available cores.
    pub fn from_env() -> anyhow::Result<Self> {
        Self::new(threads_from_env()?)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

pub fn threads_from_env() -> anyhow::Result<usize> {
    let available = std::thread::available_parallelism().map_or(1, NonZeroUsize::get);
    match std::env::var(THREADS_VAR) {
        Ok(v) => {
            let cap: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("{THREADS_VAR}={v:?} is not a count"))?;
            anyhow::ensure!(cap > 0, "{THREADS_VAR} must be positive");
            Ok(cap.min(available))
        }
        Err(_) => Ok(available),
    }
}

impl ChunkMap for Parallel {
    fn map_chunks<T: Send, F: Fn(usize) -> T + Sync>(&self, count: usize, f: F) -> Vec<T> {
        self.pool.install(|| (0..count).into_par_iter().map(&f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use croftonlab_core::exec::Sequential;

    #[test]
    fn order_is_preserved() {
        let par = Parallel::new(4).unwrap();
        let a = par.map_chunks(1000, |i| i * i);
        let b = Sequential.map_chunks(1000, |i| i * i);
        assert_eq!(a, b);
    }
}
