//! Concurrency control. The `HYPERANK_THREADS` environment variable caps the
//! worker count (0 or unset means automatic). All parallel paths in this
//! crate preserve input order, so results never depend on the thread count.

pub const THREADS_ENV: &str = "HYPERANK_THREADS";

/// Thread cap requested via the environment, if any.
pub fn threads_from_env() -> Option<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => None,
            Ok(n) => Some(n),
        },
        Err(_) => None,
    }
}

/// Install the global rayon pool according to `HYPERANK_THREADS`.
///
/// Call once early (the CLI does); later calls are no-ops because the global
/// pool can only be built once per process.
pub fn init_threads_from_env() {
    if let Some(n) = threads_from_env() {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}
