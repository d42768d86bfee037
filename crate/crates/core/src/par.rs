//! Data-parallel helpers. With the `parallel` feature the work is spread over
//! the rayon pool; otherwise, or when the backend is set to
//! [`Backend::Sequential`], the same closures run in order on the calling
//! thread. Results are collected in index order either way, so every caller
//! sees identical output whatever the backend or worker count.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Sequential,
    Parallel,
}

const SEQUENTIAL: u8 = 0;
const PARALLEL: u8 = 1;

static BACKEND: AtomicU8 = AtomicU8::new(if cfg!(feature = "parallel") {
    PARALLEL
} else {
    SEQUENTIAL
});

/// Backend currently in effect. Always `Sequential` without the `parallel` feature.
pub fn backend() -> Backend {
    if cfg!(feature = "parallel") && BACKEND.load(Ordering::Relaxed) == PARALLEL {
        Backend::Parallel
    } else {
        Backend::Sequential
    }
}

pub fn set_backend(backend: Backend) {
    let v = match backend {
        Backend::Sequential => SEQUENTIAL,
        Backend::Parallel => PARALLEL,
    };
    BACKEND.store(v, Ordering::Relaxed);
}

/// Runs `f` with `backend` selected, restoring the previous choice afterwards.
pub fn with_backend<R>(backend: Backend, f: impl FnOnce() -> R) -> R {
    let previous = self::backend();
    set_backend(backend);
    let out = f();
    set_backend(previous);
    out
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match backend() {
        #[cfg(feature = "parallel")]
        Backend::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Applies `f(chunk_index, chunk)` to consecutive chunks of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk_len = chunk_len.max(1);
    match backend() {
        #[cfg(feature = "parallel")]
        Backend::Parallel => {
            use rayon::prelude::*;
            data.par_chunks_mut(chunk_len)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
        }
        _ => data
            .chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c)),
    }
}
