//! Deterministic fan-out for sweep points.
//!
//! Workers pull indices from a shared cursor and write into the slot for
//! their index, so the assembled output preserves input order no matter
//! how many threads run or how they interleave. `CHEEGER_GAP_THREADS`
//! caps the worker count; the default is the machine's parallelism.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub const THREADS_ENV: &str = "CHEEGER_GAP_THREADS";

pub fn thread_count(points: usize) -> usize {
    let configured = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v > 0);
    let available = std::thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1);
    configured.unwrap_or(available).min(points.max(1))
}

pub fn ordered_map<T, F>(count: usize, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if count == 0 {
        return Vec::new();
    }
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers.max(1) {
            scope.spawn(|| loop {
                let idx = cursor.fetch_add(1, Ordering::Relaxed);
                if idx >= count {
                    break;
                }
                let value = job(idx);
                *slots[idx].lock().unwrap() = Some(value);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .unwrap()
                .expect("every slot is filled before the scope ends")
        })
        .collect()
}
