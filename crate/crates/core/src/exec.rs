use std::fmt;
#[cfg(feature = "parallel")]
use std::sync::Arc;

/// Runs batches of independent jobs, either on the calling thread or on a
/// dedicated rayon pool.
///
/// Output order always matches input order, so callers that consume results
/// sequentially see the same sequence for any worker count.
#[derive(Clone)]
pub struct Executor {
    workers: usize,
    #[cfg(feature = "parallel")]
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl Executor {
    pub fn sequential() -> Self {
        Self {
            workers: 1,
            #[cfg(feature = "parallel")]
            pool: None,
        }
    }

    /// A pool with `workers` threads. `workers <= 1` is the sequential
    /// executor. Without the `parallel` feature the request is logged and
    /// ignored.
    pub fn with_workers(workers: usize) -> Self {
        if workers <= 1 {
            return Self::sequential();
        }
        #[cfg(feature = "parallel")]
        {
            match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                Ok(pool) => Self {
                    workers,
                    pool: Some(Arc::new(pool)),
                },
                Err(err) => {
                    log::warn!("could not start {workers} worker threads ({err}); running sequentially");
                    Self::sequential()
                }
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            log::warn!("built without the `parallel` feature; ignoring workers = {workers}");
            Self::sequential()
        }
    }

    /// One worker per available core.
    pub fn available() -> Self {
        let n = std::thread::available_parallelism().map_or(1, |n| n.get());
        Self::with_workers(n)
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn is_parallel(&self) -> bool {
        #[cfg(feature = "parallel")]
        {
            self.pool.is_some()
        }
        #[cfg(not(feature = "parallel"))]
        {
            false
        }
    }

    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| items.par_iter().map(&f).collect());
        }
        items.iter().map(f).collect()
    }

    pub fn map_range<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| (0..n).into_par_iter().map(&f).collect());
        }
        (0..n).map(f).collect()
    }
}

impl Default for Executor {
    fn default() -> Self {
        Self::sequential()
    }
}

impl fmt::Debug for Executor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Executor")
            .field("workers", &self.workers)
            .field("parallel", &self.is_parallel())
            .finish()
    }
}
