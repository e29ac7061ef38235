//! Execution strategy for the data-parallel loops.
//!
//! Every hot loop in the crate (walk generation, shortest-path sampling,
//! top-k scoring, per-query metrics) is written once against the helpers
//! here. With the `parallel` feature the helpers fan out over rayon; without
//! it, or with [`Exec::Sequential`], they run on the calling thread. Results
//! are always collected in input order, so both strategies produce identical
//! output.

/// How a data-parallel loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    /// Run on the calling thread.
    Sequential,
    /// Run on the rayon pool. Falls back to sequential when the crate is
    /// built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Exec {
    /// `workers <= 1` means sequential.
    pub fn from_workers(workers: usize) -> Self {
        if workers <= 1 {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Maps `f` over `0..n`, preserving order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }
}

/// Runs `f` inside a dedicated pool of `workers` threads when parallel
/// execution is available, otherwise calls it directly.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if workers > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(f);
        }
    }
    let _ = workers;
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let a = Exec::Sequential.map(&items, |x| x * x);
        let b = Exec::Parallel.map(&items, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(
            Exec::Sequential.map_range(17, |i| i + 1),
            Exec::Parallel.map_range(17, |i| i + 1)
        );
    }

    #[test]
    fn workers_to_exec() {
        assert_eq!(Exec::from_workers(0), Exec::Sequential);
        assert_eq!(Exec::from_workers(1), Exec::Sequential);
        assert_eq!(Exec::from_workers(4), Exec::Parallel);
    }
}
