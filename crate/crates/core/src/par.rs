//! Data-parallel helpers. With the `parallel` feature (default) work is
//! spread over the rayon pool; without it everything runs on the calling
//! thread. Results are always returned in index order, so both paths are
//! bit-identical.

/// Face sweeps shorter than this stay sequential even in parallel mode.
pub const PAR_MIN_LEN: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(start..end).map(f).collect()`, parallel when `exec` allows and the
/// range is at least `min_len` long.
pub fn map_range<T, F>(exec: Execution, start: usize, end: usize, min_len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && end.saturating_sub(start) >= min_len {
        use rayon::prelude::*;
        return (start..end).into_par_iter().map(f).collect();
    }
    let _ = (exec, min_len);
    (start..end).map(f).collect()
}

/// `items.iter().map(f).collect()`, parallel over items when `exec` allows.
pub fn map_items<I, T, F>(exec: Execution, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
