//! Tiny fork-join helper for running independent table cells.
//!
//! `STABGRAD_THREADS` caps the worker count; results are collected by cell
//! index, so the output order never depends on scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Worker cap from the environment, defaulting to the machine parallelism.
pub fn thread_cap() -> usize {
    match std::env::var("STABGRAD_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n >= 1).unwrap_or(1),
        Err(_) => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    }
}

/// Computes `f(0..count)` on up to `threads` workers, returning results in
/// index order. `f` must be pure per cell.
pub fn run_cells<T, F>(count: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = threads.clamp(1, count.max(1));
    if threads <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let value = f(i);
                *slots[i].lock().expect("cell slot") = Some(value);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("cell slot").expect("cell computed"))
        .collect()
}
