//! Worker pool used by index construction.
//!
//! With the `parallel` feature the pool is a dedicated rayon pool; without it
//! (or with a single worker) every map runs on the calling thread. Outputs are
//! collected in index order either way, so results never depend on
//! scheduling.

use crate::error::BuildError;

/// Whether the crate was compiled with the `parallel` feature.
pub const PARALLEL: bool = cfg!(feature = "parallel");

pub struct WorkerPool {
    threads: usize,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl WorkerPool {
    /// `workers == 0` picks the available parallelism.
    pub fn new(workers: usize) -> Result<Self, BuildError> {
        #[cfg(feature = "parallel")]
        {
            if workers == 1 {
                return Ok(WorkerPool { threads: 1, pool: None });
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| BuildError::WorkerPool(e.to_string()))?;
            Ok(WorkerPool {
                threads: pool.current_num_threads(),
                pool: Some(pool),
            })
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = workers;
            Ok(WorkerPool { threads: 1 })
        }
    }

    pub fn sequential() -> Self {
        WorkerPool {
            threads: 1,
            #[cfg(feature = "parallel")]
            pool: None,
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// `(0..len).map(f)` with per-worker scratch state from `init`.
    pub fn map<T, S, I, F>(&self, len: usize, init: I, f: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> S + Send + Sync,
        F: Fn(&mut S, usize) -> T + Send + Sync,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| (0..len).into_par_iter().map_init(&init, |s, i| f(s, i)).collect());
        }
        let mut scratch = init();
        (0..len).map(|i| f(&mut scratch, i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        for workers in [1, 3] {
            let pool = WorkerPool::new(workers).unwrap();
            let out = pool.map(
                100,
                || 0usize,
                |calls, i| {
                    *calls += 1;
                    i * i
                },
            );
            assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<_>>());
        }
    }
}
