//! Order-preserving map over a slice: rayon when the `parallel` feature is
//! on, a plain iterator otherwise.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`; output order equals input order either way.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Whether this build runs sweeps on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
