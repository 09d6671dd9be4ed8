//! Data-parallel index maps with a sequential fallback.
//!
//! Every parallel loop in the crate is an ordered `map` over independent
//! indices followed by `collect`, so results are bit-identical whatever the
//! thread count. With the `parallel` feature disabled, or after
//! [`set_sequential`]`(true)`, the same closures run on the calling thread.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Forces (or releases) sequential execution at runtime.
pub fn set_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

/// True when maps are dispatched to the rayon pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::SeqCst)
}

/// Sizes the global worker pool. `0` keeps the default (all cores).
///
/// Only the first call has an effect; later calls return `false`.
pub fn init_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        if threads == 0 {
            return false;
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

/// Evaluates `f(0), ..., f(n-1)` and returns the results in index order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}
