//! Command implementations for the `maj3lab` binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

/// Worker count from an explicit value, then `MAJ3LAB_WORKERS`, then the
/// machine's parallelism.
pub fn resolve_workers(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var("MAJ3LAB_WORKERS").ok()?.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
