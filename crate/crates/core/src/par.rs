//! Indexed map over trials, data-parallel when the `parallel` feature is on.

use serde::{Deserialize, Serialize};

/// How campaign trials are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Rayon work-stealing over trials. Without the `parallel` feature this
    /// runs sequentially.
    #[default]
    Parallel,
}

/// `f(i)` for every `i` in `range`, returned in index order whatever the
/// schedule.
pub fn map_indexed<T, F>(range: std::ops::Range<u64>, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => range.map(f).collect(),
        Execution::Parallel => parallel_map(range, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(range: std::ops::Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(range: std::ops::Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    range.map(f).collect()
}

/// Whether the parallel schedule is compiled in.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}
