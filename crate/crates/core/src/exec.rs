//! Data-parallel execution helpers with a sequential fallback.
//!
//! Every batch stage in the crate funnels through [`map_indices`], so the
//! `parallel` feature swaps rayon in and out at a single seam. Results are
//! returned in index order in both builds, which keeps outputs
//! byte-identical regardless of thread count.

#[cfg(feature = "parallel")]
pub fn map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    map_indices_seq(n, f)
}

/// Sequential variant, available in every build. The benches use it as the
/// baseline against the parallel path.
pub fn map_indices_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Cap the worker-thread count (`None` keeps the rayon default). Without the
/// `parallel` feature this is a no-op. Returns an error message if the global
/// pool was already initialized with a different size.
#[cfg(feature = "parallel")]
pub fn configure_threads(jobs: Option<usize>) -> std::result::Result<(), String> {
    match jobs {
        None => Ok(()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| e.to_string()),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_jobs: Option<usize>) -> std::result::Result<(), String> {
    Ok(())
}
