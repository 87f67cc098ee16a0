//! Execution policy for the data-parallel kernels.
//!
//! Every kernel routes its independent work items through [`map_indexed`],
//! which preserves index order so results are identical in both modes.

use std::sync::atomic::{AtomicBool, Ordering};

/// How data-parallel kernels are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

static PARALLEL: AtomicBool = AtomicBool::new(cfg!(feature = "parallel"));

/// Selects the execution mode. `Parallel` is ignored when the crate is built
/// without the `parallel` feature.
pub fn set_execution(mode: Execution) {
    PARALLEL.store(mode == Execution::Parallel, Ordering::SeqCst);
}

pub fn execution() -> Execution {
    if cfg!(feature = "parallel") && PARALLEL.load(Ordering::SeqCst) {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if execution() == Execution::Parallel && n > 1 {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

/// Maps a slice in order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_indexed(items.len(), |i| f(&items[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v = map_indexed(1000, |i| i * i);
        assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
    }
}
