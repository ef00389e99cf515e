//! Replica-level data parallelism.
//!
//! With the `parallel` feature, [`Execution::Parallel`] maps replicas on the
//! current rayon pool; otherwise it degrades to the sequential loop. Results
//! are always returned in replica order.

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

/// Maps `f` over `0..n` and collects in index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Fallible variant of [`map_indexed`]; the first error in index order wins.
pub fn try_map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    map_indexed(exec, n, f).into_iter().collect()
}

/// Runs `op` on a pool with `workers` threads. `workers == 0` uses the global
/// pool. Without the `parallel` feature this just calls `op`.
pub fn with_workers<R: Send>(workers: usize, op: impl FnOnce() -> R + Send) -> Result<R> {
    #[cfg(feature = "parallel")]
    {
        if workers == 0 {
            return Ok(op());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| crate::Error::invalid(format!("cannot build worker pool: {e}")))?;
        Ok(pool.install(op))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        Ok(op())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let par = map_indexed(Execution::Parallel, 1000, |i| i * i);
        let seq = map_indexed(Execution::Sequential, 1000, |i| i * i);
        assert_eq!(par, seq);
    }

    #[test]
    fn first_error_in_index_order() {
        let r = try_map_indexed(Execution::Parallel, 100, |i| {
            if i == 40 || i == 70 {
                Err(crate::Error::invalid(format!("bad {i}")))
            } else {
                Ok(i)
            }
        });
        assert!(matches!(r, Err(crate::Error::InvalidParameter(m)) if m == "bad 40"));
    }
}
