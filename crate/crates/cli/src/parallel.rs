//! Tiny ordered fan-out: results come back indexed by input position, so the
//! output never depends on scheduling.

/// Worker count: explicit flag, then the MOSH_ENT_WORKERS environment
/// variable, then the number of available cores.
pub fn resolve_workers(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("MOSH_ENT_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
    .max(1)
}

/// Applies `f` to every index in `0..count` across `workers` threads and
/// returns the results in index order.
pub fn ordered_map<R, F>(count: usize, workers: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let workers = workers.min(count.max(1));
    if workers <= 1 {
        return (0..count).map(f).collect();
    }
    let mut slots: Vec<Option<R>> = (0..count).map(|_| None).collect();
    std::thread::scope(|scope| {
        let f = &f;
        let mut handles = Vec::new();
        for t in 0..workers {
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                let mut i = t;
                while i < count {
                    out.push((i, f(i)));
                    i += workers;
                }
                out
            }));
        }
        for handle in handles {
            for (i, r) in handle.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("missing result"))
        .collect()
}
