//! Evaluation-mode switch for the data-parallel window loops.
//!
//! Point evaluations inside the flow engine are pure and independent, so
//! they can fan out across threads; outputs are collected in index order,
//! so both modes produce identical results.

/// How window loops execute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    Sequential,
    /// Rayon work-stealing; falls back to sequential when the crate is
    /// built without the `parallel` feature.
    Parallel,
}

impl Default for EvalMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            EvalMode::Parallel
        } else {
            EvalMode::Sequential
        }
    }
}

/// Map `0..count` through `f`, collecting results in index order.
pub fn map_collect<T, F>(mode: EvalMode, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == EvalMode::Parallel {
            use rayon::prelude::*;
            return (0..count).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..count).map(f).collect()
}
