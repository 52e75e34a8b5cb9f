//! Data-parallel map over index ranges with a sequential fallback.
//!
//! All heavy kernels (rasters, lattice searches, per-cell iteration) call
//! [`map_indexed`], which fans out over rayon when the `parallel` feature is
//! enabled. Results are collected positionally, so output is identical in
//! both modes. [`sequential`] forces the sequential path inside a scope even
//! in a parallel build — this is what the benchmarks use to compare the two
//! paths within a single binary.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQ: Cell<bool> = const { Cell::new(false) };
}

/// Run `body` with parallel dispatch disabled on this thread.
pub fn sequential<T>(body: impl FnOnce() -> T) -> T {
    FORCE_SEQ.with(|f| {
        let prev = f.replace(true);
        let out = body();
        f.set(prev);
        out
    })
}

/// Whether `map_indexed` would currently dispatch in parallel.
pub fn parallel_active() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQ.with(Cell::get)
}

/// `(0..n).map(job)` collected into a `Vec`, in index order.
pub fn map_indexed<T, F>(n: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel_active() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(job).collect();
        }
    }
    (0..n).map(job).collect()
}

/// Run `body` on a rayon pool of `threads` workers (parallel builds only;
/// otherwise the body just runs inline). `None` keeps the global default.
pub fn with_threads<T: Send>(threads: Option<usize>, body: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = threads {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .expect("thread pool");
            return pool.install(body);
        }
    }
    let _ = &threads;
    body()
}
