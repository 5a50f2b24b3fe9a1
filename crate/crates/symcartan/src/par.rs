//! Data-parallel map helpers.
//!
//! Heavy workloads (ansatz-system assembly, identity batches, sample sweeps)
//! are embarrassingly parallel maps. With the default `parallel` feature they
//! run on rayon; without it, or after [`set_sequential`], they run as plain
//! sequential maps. Both paths collect in input order, so results are
//! byte-for-byte identical — benches compare the two in a single build.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force the sequential path at runtime even when the `parallel` feature is
/// compiled in. Used by benches and the CLI `--sequential` flag.
pub fn set_sequential(v: bool) {
    FORCE_SEQUENTIAL.store(v, Ordering::SeqCst);
}

pub fn is_sequential() -> bool {
    FORCE_SEQUENTIAL.load(Ordering::SeqCst)
}

/// Ordered map over a slice, parallel when available and enabled.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !is_sequential() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// Ordered map over an index range, parallel when available and enabled.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !is_sequential() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}
