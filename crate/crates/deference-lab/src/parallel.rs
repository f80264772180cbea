//! A rayon-backed [`ChunkRunner`].
//!
//! Chunk results come back in chunk order, so estimates are identical to the
//! sequential runner for any thread count.

use deflab_core::ChunkRunner;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::InputError;

pub const THREADS_VAR: &str = "DEFLAB_THREADS";

pub struct Parallel {
    pool: ThreadPool,
}

impl Parallel {
    /// `threads = 0` lets rayon pick.
    pub fn with_threads(threads: usize) -> Result<Self, InputError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| InputError::new(format!("cannot start thread pool: {e}")))?;
        Ok(Self { pool })
    }

    /// Honors `DEFLAB_THREADS` when set.
    pub fn from_env() -> Result<Self, InputError> {
        Self::with_threads(threads_from(std::env::var(THREADS_VAR).ok().as_deref())?)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

fn threads_from(value: Option<&str>) -> Result<usize, InputError> {
    match value.map(str::trim) {
        None | Some("") => Ok(0),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(InputError::new(format!(
                "{THREADS_VAR} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

impl ChunkRunner for Parallel {
    fn map_chunks<T, F>(&self, chunks: u64, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool
            .install(|| (0..chunks).into_par_iter().map(&job).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_variable_parsing() {
        assert_eq!(threads_from(None).unwrap(), 0);
        assert_eq!(threads_from(Some(" 3 ")).unwrap(), 3);
        assert!(threads_from(Some("0")).is_err());
        assert!(threads_from(Some("many")).is_err());
    }

    #[test]
    fn results_stay_in_chunk_order() {
        let p = Parallel::with_threads(4).unwrap();
        assert_eq!(p.threads(), 4);
        let out = p.map_chunks(1000, |k| k * k);
        assert!(out.iter().enumerate().all(|(k, &v)| v == (k * k) as u64));
    }
}
