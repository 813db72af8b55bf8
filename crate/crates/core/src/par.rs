//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper maps items independently and collects in input order, so the
//! parallel and sequential builds produce bitwise identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_chunks<T, F>(data: &[f64], chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_exact(chunk).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_exact(chunk).map(f).collect()
    }
}

pub(crate) fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Caps the global rayon pool. No-op in sequential builds.
pub fn configure_threads(threads: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(t) = threads.filter(|&t| t > 0) {
        // Fails only if the pool was already built; the existing pool is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}
