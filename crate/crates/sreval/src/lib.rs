//! File formats, corpus generation, batch evaluation and report emission
//! on top of `sreval-core`.

pub mod cli;
pub mod corpus;
pub mod evaluate;
pub mod io;
pub mod manifest;
pub mod records;
pub mod report;

pub use sreval_core as core;

/// Runs `f` on a rayon pool with `workers` threads (all cores when `None`).
pub fn with_workers<R: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> R + Send,
) -> anyhow::Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()?;
    Ok(pool.install(f))
}
